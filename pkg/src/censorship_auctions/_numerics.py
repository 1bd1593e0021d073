"""Scalar root finding and quadrature shared by the solvers."""

import math

import numpy as np

from .errors import SolverError

BISECT_TOL = 1e-12
BISECT_MAX_ITER = 200
SIMPSON_TOL = 1e-10
SIMPSON_MAX_DEPTH = 60


def bisect(f, lo, hi, tol=BISECT_TOL, max_iter=BISECT_MAX_ITER):
    """Root of a continuous scalar function bracketed by ``[lo, hi]``.

    Stops once the bracket is narrower than ``tol`` or stops shrinking in
    floating point. Raises SolverError when the endpoints share a sign.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise SolverError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={f_lo!r}, f(hi)={f_hi!r}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_array(g, lo, hi, iters=64):
    """Elementwise bisection for ``g(x) = 0`` with ``g(lo) >= 0 >= g(hi)``.

    ``lo`` and ``hi`` are arrays of brackets; ``g`` must be vectorised.
    64 halvings take any bracket inside [0, 1] below double resolution.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        positive = g(mid) > 0.0
        lo = np.where(positive, mid, lo)
        hi = np.where(positive, hi, mid)
    return 0.5 * (lo + hi)


def adaptive_simpson(f, a, b, tol=SIMPSON_TOL, max_depth=SIMPSON_MAX_DEPTH):
    """Integrate a scalar function over ``[a, b]`` by adaptive Simpson.

    The absolute tolerance is shared across the interval; each accepted panel
    gets the Richardson correction. The interval is first cut into four
    panels so a single symmetric bump cannot fool the initial estimate.
    """
    if a == b:
        return 0.0
    edges = np.linspace(a, b, 5)
    stack = []
    for left, right in zip(edges[:-1], edges[1:]):
        left, right = float(left), float(right)
        mid = 0.5 * (left + right)
        fl, fm, fr = f(left), f(mid), f(right)
        whole = (right - left) / 6.0 * (fl + 4.0 * fm + fr)
        stack.append((left, right, fl, fm, fr, whole, tol / 4.0, 0))
    parts = []
    while stack:
        left, right, fl, fm, fr, whole, eps, depth = stack.pop()
        mid = 0.5 * (left + right)
        lm, rm = 0.5 * (left + mid), 0.5 * (mid + right)
        flm, frm = f(lm), f(rm)
        h = right - left
        left_est = h / 12.0 * (fl + 4.0 * flm + fm)
        right_est = h / 12.0 * (fm + 4.0 * frm + fr)
        delta = left_est + right_est - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            parts.append(left_est + right_est + delta / 15.0)
            continue
        stack.append((mid, right, fm, frm, fr, right_est, eps / 2.0, depth + 1))
        stack.append((left, mid, fl, flm, fm, left_est, eps / 2.0, depth + 1))
    return math.fsum(parts)


def gauss_legendre(breaks, nodes_per_piece=32):
    """Composite Gauss-Legendre nodes and weights over sorted breakpoints."""
    x, w = np.polynomial.legendre.leggauss(nodes_per_piece)
    xs, ws = [], []
    breaks = np.unique(np.asarray(breaks, dtype=float))
    for a, b in zip(breaks[:-1], breaks[1:]):
        half = 0.5 * (b - a)
        xs.append(a + half * (x + 1.0))
        ws.append(half * w)
    if not xs:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(xs), np.concatenate(ws)
