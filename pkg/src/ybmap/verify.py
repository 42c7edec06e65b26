"""Seeded campaigns for the Yang-Baxter relation and reversibility.

Each trial draws its own generator from ``(seed, trial)``, so results do
not depend on execution order or thread count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io
from .errors import YBMapError
from .lax import default_grid, verify_refactorization
from .linalg import Subspace, orthonormalize, random_projector, random_subspace
from .maps import Polarization, apply_map, as_projector

LAMBDA_RANGE = (0.5, 2.0)
MIN_SEPARATION = 0.1


def sample_lambdas(rng, count, real=False, low=LAMBDA_RANGE[0], high=LAMBDA_RANGE[1],
                   separation=MIN_SEPARATION):
    """``count`` parameters with modulus in ``[low, high]`` and ``|l_i -+ l_j| >= separation``."""
    while True:
        mod = rng.uniform(low, high, count)
        if real:
            lams = mod * rng.choice([-1.0, 1.0], count)
        else:
            lams = mod * np.exp(2j * np.pi * rng.uniform(0, 1, count))
        lams = [complex(x) for x in lams]
        if all(abs(lams[i] - s * lams[j]) >= separation
               for i in range(count) for j in range(i + 1, count) for s in (1, -1)):
            return lams


def _line_angle(u, v):
    return Subspace(orthonormalize(u[:, None], dim=1)).distance(
        Subspace(orthonormalize(v[:, None], dim=1)))


def polarization_distance(a, b):
    """Angle between the lines spanned by the concatenations ``(xi, eta)``."""
    return _line_angle(np.concatenate([a.xi, a.eta]), np.concatenate([b.xi, b.eta]))


def _sample_polarization(rng, d):
    xi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    eta = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    # placeholder velocity; campaigns pass parameters separately
    return Polarization(xi, eta, 1.0)


@dataclass(frozen=True)
class MapFamily:
    """A map family with seeded samplers and a state metric.

    ``sample_states(rng, count)`` returns states living in one common
    space; ``sample_lambdas(rng, count)`` returns parameters.
    """

    name: str
    sample_states: object
    sample_lambdas: object
    distance: object
    real: bool = False

    def apply(self, l1, x1, l2, x2):
        return apply_map(l1, x1, l2, x2)


def _vector_states(rng, count):
    d = int(rng.integers(2, 5))
    return [_sample_polarization(rng, d) for _ in range(count)]


def _projector_states(rng, count):
    n = int(rng.integers(2, 7))
    return [random_projector(rng, n, int(rng.integers(1, n)))
            for _ in range(count)]


def _grassmannian_states(rng, count):
    n = int(rng.integers(2, 7))
    return [random_subspace(rng, n, int(rng.integers(1, n))) for _ in range(count)]


def _complex_lambdas(rng, count):
    return sample_lambdas(rng, count)


def _real_lambdas(rng, count):
    return sample_lambdas(rng, count, real=True)


FAMILIES = {
    "vector": MapFamily("vector", _vector_states, _complex_lambdas, polarization_distance),
    "projector": MapFamily("projector", _projector_states, _complex_lambdas,
                           lambda a, b: a.distance(b)),
    "grassmannian": MapFamily("grassmannian", _grassmannian_states, _real_lambdas,
                              lambda a, b: a.distance(b), real=True),
}


def get_family(name):
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


@dataclass
class VerificationReport:
    family: str
    check: str
    trials: int
    seed: int
    tol: float
    max_deviation: float
    failures: list = field(default_factory=list)
    runtime_ms: float | None = None
    max_certificate: float = 0.0

    @property
    def passed(self):
        return not self.failures

    def to_dict(self, timing=False):
        return {
            "family": self.family,
            "check": self.check,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "max_deviation": self.max_deviation,
            "max_certificate": self.max_certificate,
            "failures": self.failures,
            "runtime_ms": self.runtime_ms if timing else None,
        }


class _Recorder:
    """Applies maps and tracks the worst refactorization certificate."""

    def __init__(self, family, seed, certify):
        self.family = family
        self.seed = seed
        self.certify = certify
        self.worst = 0.0

    def __call__(self, l1, x1, l2, x2):
        y1, y2 = self.family.apply(l1, x1, l2, x2)
        if self.certify:
            grid = default_grid([l1, l2], seed=self.seed)
            r = verify_refactorization(l1, as_projector(x1), l2, as_projector(x2),
                                       as_projector(y1), as_projector(y2), grid)
            self.worst = max(self.worst, r)
        return y1, y2


def _on(apply, i, j, lams, xs):
    xs = list(xs)
    xs[i], xs[j] = apply(lams[i], xs[i], lams[j], xs[j])
    return xs


def yang_baxter_deviation(apply, lams, xs, distance):
    """Compare ``R12 R13 R23`` with ``R23 R13 R12`` (rightmost acts first)."""
    left = _on(apply, 0, 1, lams, _on(apply, 0, 2, lams, _on(apply, 1, 2, lams, xs)))
    right = _on(apply, 1, 2, lams, _on(apply, 0, 2, lams, _on(apply, 0, 1, lams, xs)))
    return max(distance(a, b) for a, b in zip(left, right))


def swapped(apply):
    """``R21 = P R P``: states are exchanged, parameters stay in place."""
    def r21(l1, x1, l2, x2):
        y2, y1 = apply(l1, x2, l2, x1)
        return y1, y2
    return r21


def reversibility_deviation(apply, lams, xs, distance):
    """Distance of ``R21(l2, l1) R(l1, l2)`` from the identity."""
    l1, l2 = lams
    y1, y2 = apply(l1, xs[0], l2, xs[1])
    z1, z2 = swapped(apply)(l2, y1, l1, y2)
    return max(distance(xs[0], z1), distance(xs[1], z2))


def _encode_inputs(lams, xs):
    return [io.encode_state(x, lam) for lam, x in zip(lams, xs)]


def _threads():
    try:
        return max(1, int(os.environ.get("YBMAP_THREADS", "1")))
    except ValueError:
        return 1


def _campaign(family, check, trials, seed, tol, certify, threads):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    count = 3 if check == "yang_baxter" else 2
    measure = yang_baxter_deviation if check == "yang_baxter" else reversibility_deviation

    def run(trial):
        rng = np.random.default_rng([seed, trial])
        xs = family.sample_states(rng, count)
        lams = family.sample_lambdas(rng, count)
        rec = _Recorder(family, seed, certify)
        try:
            dev = measure(rec, lams, xs, family.distance)
        except YBMapError as exc:
            return trial, None, rec.worst, {
                "trial": trial, "error": type(exc).__name__, "message": str(exc),
                "inputs": _encode_inputs(lams, xs)}
        failure = None
        if not dev <= tol:
            failure = {"trial": trial, "deviation": dev, "inputs": _encode_inputs(lams, xs)}
        return trial, dev, rec.worst, failure

    start = time.perf_counter()
    threads = threads or _threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]
    runtime = (time.perf_counter() - start) * 1e3
    results.sort(key=lambda r: r[0])
    devs = [r[1] for r in results if r[1] is not None]
    return VerificationReport(
        family=family.name, check=check, trials=trials, seed=seed, tol=tol,
        max_deviation=float(max(devs)) if devs else 0.0,
        failures=[r[3] for r in results if r[3] is not None],
        runtime_ms=runtime,
        max_certificate=float(max(r[2] for r in results)),
    )


def check_yang_baxter(family, trials=1000, seed=0, tol=1e-9, certify=True, threads=None):
    """Randomized check of ``R12 R13 R23 = R23 R13 R12`` with parameters."""
    if isinstance(family, str):
        family = get_family(family)
    return _campaign(family, "yang_baxter", trials, seed, tol, certify, threads)


def check_reversibility(family, trials=1000, seed=0, tol=1e-10, certify=True, threads=None):
    """Randomized check of ``R21(l2, l1) R(l1, l2) = Id``."""
    if isinstance(family, str):
        family = get_family(family)
    return _campaign(family, "reversibility", trials, seed, tol, certify, threads)
