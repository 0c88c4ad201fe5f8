"""rho-Bessel kernels, Hankel transforms and the summation identities they drive."""

__version__ = "0.1.0"
