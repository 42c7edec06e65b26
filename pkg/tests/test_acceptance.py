"""Exit criteria for the whole package, one test per criterion.

Each test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import time

import numpy as np
import pytest

from conftest import crandn, record_criterion
from ybmap.chain import iterate, random_chain
from ybmap.cli import main
from ybmap.kdv import finite_difference_residual, kdv_residual, phase, residual_scan
from ybmap.lax import default_grid, lax_eval, lax_inverse, refactorize_numeric
from ybmap.linalg import ProjectorState, projector_from_pair, random_projector
from ybmap.maps import projector_map, vector_soliton_map
from ybmap.verify import FAMILIES, check_reversibility, check_yang_baxter, sample_lambdas

TRIALS = 1000
SEED = 0
YB_TOL = 1e-9
REV_TOL = 1e-10
ORACLE_TOL = 1e-10
K1_TOL = 1e-10
INVERSE_TOL = 1e-11  # times n
DET_TOL = 1e-10
CERT_TOL = 1e-9
DRIFT_TOL = 1e-8
KDV_TOL = 1e-10
ORDER_RANGE = (1.8, 2.2)
NEGATIVE_FLOOR = 1e-2
CAMPAIGN_BUDGET_S = 120.0
TRANSFER_BUDGET_S = 30.0

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def campaigns():
    out = {}
    for fam in sorted(FAMILIES):
        out[fam] = (check_yang_baxter(fam, TRIALS, SEED, YB_TOL),
                    check_reversibility(fam, TRIALS, SEED, REV_TOL))
    return out


def test_criterion_1_yang_baxter(campaigns):
    reports = {f: r[0] for f, r in campaigns.items()}
    runtime = sum(r.runtime_ms for r in reports.values()) / 1e3
    worst = max(r.max_deviation for r in reports.values())
    ok = (all(r.passed and r.trials == TRIALS for r in reports.values())
          and worst < YB_TOL and runtime < CAMPAIGN_BUDGET_S)
    detail = ", ".join(f"{f}={r.max_deviation:.2e}" for f, r in reports.items())
    record_criterion(1, "Yang-Baxter campaigns", ok,
                     f"{detail}; tol {YB_TOL:g}; {runtime:.1f}s (budget {CAMPAIGN_BUDGET_S:g}s)")
    assert ok


def test_criterion_2_reversibility(campaigns):
    reports = {f: r[1] for f, r in campaigns.items()}
    worst = max(r.max_deviation for r in reports.values())
    ok = all(r.passed and r.trials == TRIALS for r in reports.values()) and worst < REV_TOL
    detail = ", ".join(f"{f}={r.max_deviation:.2e}" for f, r in reports.items())
    record_criterion(2, "reversibility campaigns", ok, f"{detail}; tol {REV_TOL:g}")
    assert ok


def test_criterion_3_oracle_equivalence():
    worst = 0.0
    for trial in range(TRIALS):
        rng = np.random.default_rng([SEED, 3, trial])
        n = int(rng.integers(2, 9))
        p1 = random_projector(rng, n, int(rng.integers(1, n)))
        p2 = random_projector(rng, n, int(rng.integers(1, n)))
        l1, l2 = sample_lambdas(rng, 2)
        a, b = projector_map(l1, p1, l2, p2)
        c, d = refactorize_numeric(l1, p1, l2, p2)
        worst = max(worst, a.image.distance(c.image), a.kernel.distance(c.kernel),
                    b.image.distance(d.image), b.kernel.distance(d.kernel))
    p1 = ProjectorState.from_matrix(np.diag([1, 0]))
    p2 = ProjectorState.from_matrix([[0, 0], [1, 1]])
    q1, q2 = projector_map(3, p1, 1, p2)
    r1, r2 = refactorize_numeric(3, p1, 1, p2)
    fixture_err = max(np.abs(q1.matrix - [[1, 0], [1, 0]]).max(), np.abs(q2.matrix - [[0, 0], [-2, 1]]).max(),
                      np.abs(r1.matrix - [[1, 0], [1, 0]]).max(), np.abs(r2.matrix - [[0, 0], [-2, 1]]).max())
    eps = np.finfo(float).eps
    ok = worst < ORACLE_TOL and fixture_err <= 8 * eps
    record_criterion(3, "oracle equivalence", ok,
                     f"max angle {worst:.2e} over {TRIALS} instances (tol {ORACLE_TOL:g}); "
                     f"worked fixture error {fixture_err:.1e}")
    assert ok


def test_criterion_4_rank_one_reduction():
    worst = 0.0
    for trial in range(TRIALS):
        rng = np.random.default_rng([SEED, 4, trial])
        d = int(rng.integers(2, 5))
        l1, l2 = sample_lambdas(rng, 2)
        xi1, eta1, xi2, eta2 = (crandn(rng, d) for _ in range(4))
        out = vector_soliton_map(l1, xi1, eta1, l2, xi2, eta2)
        a, b = projector_map(l1, projector_from_pair(xi1, eta1), l2, projector_from_pair(xi2, eta2))
        worst = max(worst, a.distance(projector_from_pair(out[0], out[1])),
                    b.distance(projector_from_pair(out[2], out[3])))
    ok = worst < K1_TOL
    record_criterion(4, "k=1 reduction", ok, f"max distance {worst:.2e} over {TRIALS} trials (tol {K1_TOL:g})")
    assert ok


def test_criterion_5_lax_identities(campaigns):
    inv_worst = det_worst = 0.0
    for trial in range(TRIALS):
        rng = np.random.default_rng([SEED, 5, trial])
        n = int(rng.integers(1, 9))
        k = int(rng.integers(0, n + 1))
        p = random_projector(rng, n, k)
        lam = sample_lambdas(rng, 1)[0]
        grid = default_grid([lam], seed=trial)
        for z in grid.points[:4]:
            a = lax_eval((p, lam), z)
            inv_worst = max(inv_worst, np.linalg.norm(lax_inverse((p, lam), z) @ a - np.eye(n)) / n)
            expected = ((z + lam) / (z - lam)) ** k
            det_worst = max(det_worst, abs(np.linalg.det(a) - expected) / abs(expected))
    cert = max(r.max_certificate for pair in campaigns.values() for r in pair)
    ok = inv_worst < INVERSE_TOL and det_worst < DET_TOL and cert < CERT_TOL
    record_criterion(5, "Lax identities", ok,
                     f"inverse {inv_worst:.2e}*n (tol {INVERSE_TOL:g}*n), det rel {det_worst:.2e} "
                     f"(tol {DET_TOL:g}), certificate {cert:.2e} over all campaign map "
                     f"applications at 16 zeta samples (tol {CERT_TOL:g})")
    assert ok


def test_criterion_6_transfer_conservation():
    start = time.perf_counter()
    worst = det_worst = 0.0
    shapes = []
    for trial in range(10):
        rng = np.random.default_rng([SEED, 6, trial])
        sites = 2 + trial % 5
        n = 2 + (trial * 3) % 7
        shapes.append((sites, n))
        chain = random_chain(rng, sites, n, hermitian=True, real_lambdas=True)
        traj = iterate(chain, 100, default_grid(chain.lambdas, size=8, seed=trial))
        worst = max(worst, traj.max_drift)
        det_worst = max(det_worst, max(traj.det_errors))
    runtime = time.perf_counter() - start
    ok = worst < DRIFT_TOL and det_worst < DET_TOL and runtime < TRANSFER_BUDGET_S
    record_criterion(6, "transfer-map conservation", ok,
                     f"max drift {worst:.2e} (tol {DRIFT_TOL:g}), det {det_worst:.1e}, "
                     f"N <= {max(s[0] for s in shapes)}, n <= {max(s[1] for s in shapes)}, 100 steps, "
                     f"{runtime:.1f}s (budget {TRANSFER_BUDGET_S:g}s)")
    assert ok


def test_criterion_7_kdv_residual():
    xs, ts = np.linspace(-5, 5, 21), np.linspace(-1, 1, 21)
    rng = np.random.default_rng([SEED, 7])
    worst = 0.0
    for n in range(1, 9):
        for k in range(0, n + 1):
            p = random_projector(rng, n, k)
            lam = float(rng.uniform(0.5, 2.0))
            worst = max(worst, residual_scan(p, lam, xs, ts).max())

    orders = []
    for lam, x, t in [(0.7, 0.4, 0.1), (1.2, -0.8, 0.05), (1.5, 0.3, -0.02)]:
        p = random_projector(rng, 3, 1)
        analytic = kdv_residual(p, lam, x, t)
        errs = [np.linalg.norm(finite_difference_residual(p, lam, x, t, h) - analytic) for h in (1e-3, 5e-4)]
        orders.append(float(np.log2(errs[0] / errs[1])))

    # amplitude 2P, evaluated over the soliton core (profile at least half its peak)
    lam = 1.0
    p = random_projector(rng, 3, 1)
    xg, tg = np.meshgrid(xs, ts, indexing="ij")
    core = np.abs(phase(lam, xg, tg)) <= np.arccosh(np.sqrt(2))
    negative = residual_scan(2 * p.matrix, lam, xs, ts)[core].max()

    ok = (worst < KDV_TOL and all(ORDER_RANGE[0] <= o <= ORDER_RANGE[1] for o in orders)
          and negative > NEGATIVE_FLOOR)
    record_criterion(7, "KdV residual", ok,
                     f"projector residual {worst:.2e} (tol {KDV_TOL:g}); FD orders "
                     f"{', '.join(f'{o:.3f}' for o in orders)}; 2P core residual {negative:.2f}")
    assert ok


def test_criterion_8_cli_determinism(tmp_path, fixture_path):
    commands = [
        ["collide", fixture_path("collide_rank1.json"), "--seed", "4"],
        ["collide", fixture_path("collide_projector.json")],
        ["verify", "--family", "projector", "--trials", "50", "--seed", "11"],
        ["verify", "--family", "vector", "--trials", "1", "--seed", "7"],
        ["transfer", fixture_path("chain_random.json"), "--steps", "20", "--seed", "2"],
        ["kdv", fixture_path("kdv_rank1.json")],
    ]
    identical = 0
    for i, cmd in enumerate(commands):
        outs = []
        for rep in range(2):
            path = tmp_path / f"{i}-{rep}.out"
            main([*cmd, "--out", str(path)])
            outs.append(path.read_bytes())
        identical += outs[0] == outs[1] and len(outs[0]) > 0
    ok = identical == len(commands)
    record_criterion(8, "CLI determinism", ok, f"{identical}/{len(commands)} commands byte-identical")
    assert ok
