"""Small deterministic numerical routines used across the package.

Everything here is scalar and dependency-free on purpose: the same bisection /
golden-section / adaptive-Simpson code backs the N-function machinery and the
norm computations, and results must be reproducible run to run.
"""

import math

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_decreasing(fn, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    """Root of a non-increasing function on [lo, hi] with fn(lo) >= 0 >= fn(hi).

    Stops when the bracket width drops below tol * (1 + |lo| + |hi|) or the
    midpoint is no longer representable strictly inside the bracket.
    """
    if hi < lo:
        raise ValueError("empty bracket")
    for _ in range(max_iter):
        if hi - lo <= tol * (1.0 + abs(lo) + abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_minimize(fn, lo: float, hi: float, rel_tol: float = 1e-10,
                    max_iter: int = 400) -> tuple[float, float]:
    """Golden-section minimum of a unimodal function on [lo, hi].

    Returns (argmin, min value).
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * (abs(a) + abs(b) + 1e-300):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    if fc < fd:
        return c, fc
    return d, fd


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(fn, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = fn(lm)
    frm = fn(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    err = left + right - whole
    if abs(err) <= 15.0 * tol or depth <= 0:
        return left + right + err / 15.0
    return (_adaptive(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _adaptive(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def adaptive_simpson(fn, a: float, b: float, rel_tol: float = 1e-11,
                     abs_tol: float = 1e-300, max_depth: int = 48) -> float:
    """Adaptive Simpson quadrature of fn over [a, b]."""
    if b <= a:
        return 0.0
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = _simpson(fa, fm, fb, b - a)
    tol = max(abs_tol, rel_tol * abs(whole))
    return _adaptive(fn, a, b, fa, fm, fb, whole, tol, max_depth)
