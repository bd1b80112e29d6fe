import numpy as np
import pytest

from juliabubbles import families, solver
from juliabubbles.errors import NoConvergenceError, WrongPeriodError

GOLDEN = 2.0 + (np.sqrt(5.0) - 1.0) / 2.0          # 2.6180339887...
OTHER = 2.0 + (-np.sqrt(5.0) - 1.0) / 2.0          # 0.3819660112...


def test_p1_exact():
    r = solver.solve_superattracting(1, 2.5)
    assert abs(r.parameter - 3.0) < 1e-12
    assert r.residual <= 1e-12
    assert r.cycle.period == 1
    assert r.other_critical_fate.kind == "escape"


def test_p2_golden():
    r = solver.solve_superattracting(2, 2.5)
    assert abs(r.parameter - GOLDEN) < 1e-9
    assert r.newton_iters <= 20
    pts = sorted(p.real for p in r.cycle.points)
    assert pts == pytest.approx([(-1 + np.sqrt(5)) / 2, 1.0])


def test_p2_other_root():
    r = solver.solve_superattracting(2, 0.4)
    assert abs(r.parameter - OTHER) < 1e-9


def test_deflation_ten_random_starts():
    rng = np.random.default_rng(11)
    for _ in range(10):
        v0 = 2.6 + complex(*(rng.uniform(-0.3, 0.3, 2)))
        r = solver.solve_superattracting(2, v0, max_iters=20)
        assert abs(r.parameter - GOLDEN) < 1e-9, v0
        assert r.newton_iters <= 20


def test_every_success_verifies():
    for p, v0 in ((1, 2.5), (2, 2.5), (2, 0.4), (3, 2.3)):
        r = solver.solve_superattracting(p, v0)
        inst = families.make("solver_cubic", v=r.parameter)
        ok, mult = solver.verify_superattracting(inst, 1.0, p)
        assert ok and abs(mult) <= 1e-9, (p, v0)


def test_deflation_avoids_period_one_root():
    # the raw period-3 objective has a root at v=3 with exact period 1; the
    # deflated Newton flow from v0=2.8 must land on a genuine period-3 root
    r = solver.solve_superattracting(3, 2.8)
    assert r.cycle.period == 3
    assert abs(r.parameter - 3.0) > 1e-3


def test_wrong_period_error_attributes():
    err = WrongPeriodError(3, 1, 3.0 + 0j)
    assert err.requested == 3 and err.actual == 1
    assert "period 1" in str(err)


def test_verify_rejects_wrong_period():
    inst = families.make("solver_cubic", v=3.0)
    ok, _ = solver.verify_superattracting(inst, 1.0, 2)
    assert not ok
    ok, mult = solver.verify_superattracting(inst, 1.0, 1)
    assert ok and abs(mult) < 1e-12


def test_verify_g_cycle():
    ok, mult = solver.verify_superattracting(families.make("g", a=2.5), 0.0, 2)
    assert ok and abs(mult) < 1e-12


def test_no_convergence_from_escaping_start():
    with pytest.raises(NoConvergenceError):
        solver.solve_superattracting(2, 1e6)


def test_invalid_period():
    with pytest.raises(ValueError):
        solver.solve_superattracting(0, 2.5)


def test_chained_criterion_p1():
    r = solver.solve_superattracting(1, 2.5, chain_criterion=True,
                                     resolution=256)
    assert r.verdict is not None
    assert r.verdict.topology_class != "CantorCirclesLike"
