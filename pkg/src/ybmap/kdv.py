"""One-soliton fields of the matrix KdV equation ``U_t = 3 U U_x + 3 U_x U - U_xxx``.

The soliton is ``U = -2 lam^2 sech^2(lam x - 4 lam^3 t) P``.  With the
equation written this way the profile has a negative sign; substituting
the profile leaves ``-6 a lam^5 g g' (a P^2 + 2 P)`` for amplitude ``a``
and ``g = sech^2``, which vanishes for ``a = -2`` exactly when ``P^2 = P``.

Derivatives are analytic.  :func:`finite_difference_residual` is a
separate high-precision oracle that differentiates sampled fields.
"""

from __future__ import annotations

import csv

import mpmath
import numpy as np

from .linalg import ProjectorState, as_matrix

AMPLITUDE = -2.0


def _amplitude_matrix(p):
    return p.matrix if isinstance(p, ProjectorState) else as_matrix(p)


def _real_lambda(lam):
    z = complex(lam)
    if z.imag != 0:
        raise ValueError(f"soliton velocity must be real, got {lam}")
    return z.real


def phase(lam, x, t):
    return lam * np.asarray(x, float) - 4 * lam**3 * np.asarray(t, float)


def _sech_tanh(theta):
    a = np.abs(theta)
    e = np.exp(-2 * a)
    return 2 * np.exp(-a) / (1 + e), np.tanh(theta)


def profile_derivatives(lam, x, t):
    """Scalar profile ``u(theta)`` and its first and third ``theta``-derivatives."""
    sech, tanh = _sech_tanh(phase(lam, x, t))
    g = sech**2
    g1 = -2 * g * tanh
    g3 = -8 * g * tanh * (1 - 3 * g)
    c = AMPLITUDE * lam**2
    return c * g, c * g1, c * g3


def soliton_field(p, lam, x, t):
    """Field matrix ``U(x, t)``; for array ``x``/``t`` the matrix axes come last."""
    lam = _real_lambda(lam)
    q = _amplitude_matrix(p)
    u, _, _ = profile_derivatives(lam, x, t)
    return np.multiply.outer(u, q)


def kdv_residual(p, lam, x, t):
    """``U_t - 3 U U_x - 3 U_x U + U_xxx`` for the soliton with matrix amplitude ``p``.

    ``p`` may be any square matrix; the residual vanishes only for
    projectors.
    """
    lam = _real_lambda(lam)
    q = _amplitude_matrix(p)
    u, u1, u3 = profile_derivatives(lam, x, t)
    linear = lam**3 * (u3 - 4 * u1)
    quadratic = -6 * lam * u * u1
    return np.multiply.outer(linear, q) + np.multiply.outer(quadratic, q @ q)


def residual_scale(p, lam):
    """Natural size ``|lam|^5 (1 + ||P||_F)`` of each term in the residual."""
    return abs(_real_lambda(lam)) ** 5 * (1 + np.linalg.norm(_amplitude_matrix(p)))


def relative_residual(p, lam, x, t):
    """Largest Frobenius residual over the points, divided by :func:`residual_scale`."""
    r = kdv_residual(p, lam, x, t)
    norms = np.sqrt(np.sum(np.abs(r) ** 2, axis=(-2, -1)))
    worst = float(np.max(norms))
    scale = residual_scale(p, lam)
    return worst / scale if scale > 0 else worst


def residual_scan(p, lam, xs, ts):
    """Relative residual norm at every grid point, shape ``(len(xs), len(ts))``."""
    xg, tg = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float), indexing="ij")
    r = kdv_residual(p, lam, xg, tg)
    norms = np.sqrt(np.sum(np.abs(r) ** 2, axis=(-2, -1)))
    scale = residual_scale(p, lam)
    return norms / scale if scale > 0 else norms


def _mp_field(q, lam, amplitude=AMPLITUDE):
    lam = mpmath.mpf(lam)

    def field(x, t):
        theta = lam * x - 4 * lam**3 * t
        return q * (amplitude * lam**2 * mpmath.sech(theta) ** 2)

    return field


def finite_difference_residual(p, lam, x, t, h, dps=40, field=None):
    """Residual from centred differences of order ``h^2`` in extended precision.

    ``field(x, t)`` must return an mpmath matrix; by default the soliton
    field is sampled directly.
    """
    with mpmath.workdps(dps):
        q = mpmath.matrix(np.asarray(_amplitude_matrix(p)).tolist())
        f = field or _mp_field(q, _real_lambda(lam))
        x, t, h = mpmath.mpf(x), mpmath.mpf(t), mpmath.mpf(h)
        u = f(x, t)
        u_t = (f(x, t + h) - f(x, t - h)) / (2 * h)
        u_x = (f(x + h, t) - f(x - h, t)) / (2 * h)
        u_xxx = (f(x + 2 * h, t) - 2 * f(x + h, t) + 2 * f(x - h, t) - f(x - 2 * h, t)) / (2 * h**3)
        r = u_t - 3 * (u * u_x) - 3 * (u_x * u) + u_xxx
        return np.array(r.tolist(), dtype=complex)


def write_field_csv(path, p, lam, xs, ts):
    """Field snapshot: one row per ``(x, t)`` with real and imaginary parts of ``U`` flattened."""
    q = _amplitude_matrix(p)
    n = q.shape[0]
    header = ["x", "t"]
    for i in range(n):
        for j in range(n):
            header += [f"re_{i}_{j}", f"im_{i}_{j}"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for x in xs:
            for t in ts:
                u = soliton_field(q, lam, x, t)
                row = [repr(float(x)), repr(float(t))]
                for z in u.ravel():
                    row += [repr(float(z.real)), repr(float(z.imag))]
                w.writerow(row)
