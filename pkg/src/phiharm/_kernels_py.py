"""Pure-Python Gauss-Seidel sweep kernels.

Same contract as the compiled extension `phiharm._kernels`, but parametrized
by the N-function's scalar callables, so it also serves arbitrary parsed
N-functions. The sweep updates vertices in index order; each update solves
the scalar optimality equation at that vertex by bisection on the hull of the
relevant neighbor levels (the scalar map is strictly monotone there, and the
discrete maximum principle puts the root inside the hull).

The energy being minimized is

    F(v) = sum_s sum_x Phi( v[s^-1 x] - v[x] - off[s, x] )

over directed in-ball pairs; the plain entry points are the off = 0 case,
where the per-vertex equation reduces to  sum_s Phi'(v[s^-1 x] - c) = 0.
"""

import math

import numpy as np

_MAX_BISECT = 200


def _bisect_update(g, lo: float, hi: float, inner_tol: float, increasing: bool) -> float:
    if hi <= lo:
        return lo
    for _ in range(_MAX_BISECT):
        if hi - lo <= inner_tol * (1.0 + abs(lo) + abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if (gm < 0.0) if increasing else (gm > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sweep_plain(values, nbr, free_idx, dphi, inner_tol: float) -> float:
    """One Gauss-Seidel sweep for the zero-offset energy; returns the largest
    absolute update. Every free vertex must have all neighbors in the ball."""
    n_gens = nbr.shape[0]
    max_change = 0.0
    for x in free_idx:
        x = int(x)
        lo = math.inf
        hi = -math.inf
        for s in range(n_gens):
            v = values[nbr[s, x]]
            if v < lo:
                lo = v
            if v > hi:
                hi = v

        def g(c, x=x):
            total = 0.0
            for s in range(n_gens):
                total += dphi(values[nbr[s, x]] - c)
            return total

        c = _bisect_update(g, lo, hi, inner_tol, increasing=False)
        change = abs(c - values[x])
        if change > max_change:
            max_change = change
        values[x] = c
    return max_change


def residual_plain(values, nbr, free_idx, dphi) -> float:
    """max over free vertices of |sum_s Phi'(v[s^-1 x] - v[x])|."""
    n_gens = nbr.shape[0]
    worst = 0.0
    for x in free_idx:
        x = int(x)
        total = 0.0
        for s in range(n_gens):
            total += dphi(values[nbr[s, x]] - values[x])
        if abs(total) > worst:
            worst = abs(total)
    return worst


def energy_plain(values, nbr, phi_values) -> float:
    """Dirichlet energy over directed in-ball pairs (vectorized)."""
    total = 0.0
    for s in range(nbr.shape[0]):
        row = nbr[s]
        src = np.nonzero(row >= 0)[0]
        total += float(np.sum(phi_values(values[row[src]] - values[src])))
    return total


def sweep_offset(values, nbr, off, inv_gen, free_idx, dphi, inner_tol: float) -> float:
    """One Gauss-Seidel sweep for the offset energy."""
    n_gens = nbr.shape[0]
    max_change = 0.0
    for x in free_idx:
        x = int(x)
        lo = math.inf
        hi = -math.inf
        for s in range(n_gens):
            j = nbr[s, x]
            if j >= 0:  # out-edge (x, s): term Phi(v[j] - c - off[s, x])
                z = values[j] - off[s, x]
                lo = min(lo, z)
                hi = max(hi, z)
            y = nbr[inv_gen[s], x]
            if y >= 0:  # in-edge (y, s) with s^-1 y = x: Phi(c - v[y] - off[s, y])
                z = values[y] + off[s, y]
                lo = min(lo, z)
                hi = max(hi, z)

        def g(c, x=x):
            # dF/dc: increasing in c.
            total = 0.0
            for s in range(n_gens):
                j = nbr[s, x]
                if j >= 0:
                    total -= dphi(values[j] - c - off[s, x])
                y = nbr[inv_gen[s], x]
                if y >= 0:
                    total += dphi(c - values[y] - off[s, y])
            return total

        c = _bisect_update(g, lo, hi, inner_tol, increasing=True)
        change = abs(c - values[x])
        if change > max_change:
            max_change = change
        values[x] = c
    return max_change


def residual_offset(values, nbr, off, inv_gen, free_idx, dphi) -> float:
    """max over free vertices of |dF/dv(x)| / 2 (matches the plain residual
    when off = 0)."""
    n_gens = nbr.shape[0]
    worst = 0.0
    for x in free_idx:
        x = int(x)
        total = 0.0
        for s in range(n_gens):
            j = nbr[s, x]
            if j >= 0:
                total -= dphi(values[j] - values[x] - off[s, x])
            y = nbr[inv_gen[s], x]
            if y >= 0:
                total += dphi(values[x] - values[y] - off[s, y])
        if abs(total) > worst:
            worst = abs(total)
    return 0.5 * worst


def energy_offset(values, nbr, off, phi_values) -> float:
    total = 0.0
    for s in range(nbr.shape[0]):
        row = nbr[s]
        src = np.nonzero(row >= 0)[0]
        total += float(np.sum(phi_values(values[row[src]] - values[src]
                                         - off[s, src])))
    return total
