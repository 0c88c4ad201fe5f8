"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section of the
pytest terminal summary.  Suites are run once per module through the same
runners the CLI uses.
"""

import subprocess
import sys
import time
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_LINES
from rho_hankel.report import RunConfig, run_suite

pytestmark = pytest.mark.slow


def _record(n: int, ok: bool, what: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {what}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _timed(suite: str, **cfg):
    t0 = time.perf_counter()
    rep = run_suite(suite, RunConfig(**cfg))
    return rep, time.perf_counter() - t0


def _rows(rep, prefix: str):
    return [c for c in rep.checks if c.name.startswith(prefix)]


@pytest.fixture(scope="module")
def local_report():
    return _timed("local", q=[2, 3, 5], s=[0.3, 0.45, 0.5])[0]


def test_criterion_1_voronoi():
    rep, secs = _timed("voronoi")
    c = rep.checks[0]
    ok = c.rel_err <= 1e-4 and secs <= 120
    _record(1, ok, f"classical Voronoi rel_err={c.rel_err:.2e} (tol 1e-4), {secs:.0f} s (limit 120 s)")
    assert ok


def test_criterion_2_oppenheim():
    rep, _ = _timed("oppenheim", s=[0.3, 0.4, 0.45, 0.499])
    main = {c.name: c.rel_err for c in rep.checks if c.name.startswith("oppenheim(")}
    cont = _rows(rep, "continuity(s=0.499)")[0]
    ok = (all(main[f"oppenheim(s={s:g})"] <= 1e-4 for s in (0.3, 0.4, 0.45))
          and cont.rel_err <= 5e-3)
    worst = max(main[f"oppenheim(s={s:g})"] for s in (0.3, 0.4, 0.45))
    _record(2, ok, f"Oppenheim worst rel_err={worst:.2e} (tol 1e-4); s=0.499 vs classical gap "
                   f"{cont.rel_err:.2e} (tol 5e-3)")
    assert ok


def test_criterion_3_exact_local(local_report):
    parts = ("gamma_reflection", "mellin_divisor_count", "bernstein", "local_fe_basic")
    rows = [c for c in local_report.checks if c.name.split("[")[0] in parts]
    assert len(rows) == 4 * 3
    bern = _rows(local_report, "bernstein")
    ok = all(c.status == "EXACT" for c in rows) and all(c.details["shells_checked"] >= 30 for c in bern)
    # the companion identity for the sigma-normalized basic function is reported alongside
    basic_ok = all(c.status == "EXACT" for c in _rows(local_report, "mellin_basic"))
    _record(3, ok, f"exact p-adic identities (a)-(d) at q=2,3,5: {sum(c.status == 'EXACT' for c in rows)}/12 "
                   f"exact; zeta(1)M(basic) = 1/((1-T)(1-rT)) also exact: {basic_ok}")
    assert ok


def test_criterion_4_small_x_kernel(local_report):
    rows = [c for c in _rows(local_report, "small_x_kernel[q=2,") if "s=" in c.name]
    want = {f"small_x_kernel[q=2,v={k},s={s:g}]" for k in (1, 2, 3) for s in (0.3, 0.45, 0.5)}
    got = {c.name for c in rows}
    worst = max(c.abs_err for c in rows)
    ok = want <= got and all(c.abs_err <= 1e-10 for c in rows if c.name in want)
    _record(4, ok, f"small-|x| kernel vs shell character sums, worst |diff|={worst:.1e} (tol 1e-10)")
    assert ok


def test_criterion_5_eigenfunction(local_report):
    rows = _rows(local_report, "eigenfunction_shells")
    stated = all("holds_all_shells" in c.details for c in rows) and len(rows) == 3
    holds = all(c.details["holds_all_shells"] for c in rows)
    _record(5, stated, "p-adic eigenfunction at e=0: " + ("holds on every shell" if holds else "does NOT hold")
            + " at q=2,3,5 (both exact routes agree)")
    assert stated


def test_criterion_6_arch():
    rep, secs = _timed("arch", s=[0.3, 0.45, 0.5])
    judged = [c for c in rep.checks if c.status != "FINDING" and not c.name.startswith("basis_action_derived")]
    failed = [c.name for c in judged if c.failed]
    ok = not failed and secs <= 300
    n2 = [c for c in rep.checks if c.name.startswith("basis_action") and "n=2" in c.name
          and not c.name.startswith("basis_action_derived")]
    gap = max(c.rel_err for c in n2)
    derived = max(c.rel_err for c in _rows(rep, "basis_action_derived"))
    _record(6, ok, f"archimedean suite: {len(judged) - len(failed)}/{len(judged)} checks pass in {secs:.0f} s; "
                   f"failing: {', '.join(failed) or 'none'}; basis n=2 relative gap {gap:.1%} "
                   f"(derived form u^2 L + (D L + s L)/(2 pi^2) agrees to {derived:.1e})")
    assert ok, f"failing checks: {failed}"


def test_criterion_7_poisson():
    rep, _ = _timed("poisson", s=[0.4], primes=[2])
    base = _rows(rep, "poisson_all_basic")[0]
    unit = _rows(rep, "poisson_units_at_2")[0]
    ok = base.rel_err <= 1e-3 and unit.rel_err <= 1e-3
    _record(7, ok, f"Poisson over Q at s=0.4: all-basic rel_err={base.rel_err:.1e}, "
                   f"p=2 unit override rel_err={unit.rel_err:.1e} (tol 1e-3)")
    assert ok


def test_criterion_8_special_floor():
    here = Path(__file__).parent
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here / "test_special.py")],
                          capture_output=True, text=True, timeout=600)
    secs = time.perf_counter() - t0
    ok = proc.returncode == 0 and secs <= 30
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    _record(8, ok, f"special-function examples and property grids: {tail} (limit 30 s)")
    assert ok, proc.stdout[-2000:]
