"""The nonlinear graph Laplacian induced by an N-function on a Cayley ball,
with its Dirichlet energy (modular) and first-variation pairing.

For a function f on the ball, generator s and vertex x,

    (Lap f)(x)    = sum_s Phi'( f(s^-1 x) - f(x) )            (interior x)
    energy(f)     = sum_s sum_x Phi( f(s^-1 x) - f(x) )
    pairing(h, f) = sum_s sum_x Phi'( h(s^-1 x) - h(x) ) * ( f(s^-1 x) - f(x) )

Sums run over directed pairs (x, s) with both x and s^-1 x inside the ball,
so with a symmetric generating set every undirected edge is counted once per
direction. This doubles quantities relative to an undirected-edge convention;
all identities and solver contracts here follow the directed convention.
"""

import numpy as np

from .errors import DomainError
from .groups import CayleyBall, act_generator
from .nfunction import NFunction, eval_dphi
from .orlicz import FiniteFunction, luxemburg_norm_arr


class DirichletForm:
    """An N-function together with a ball; precomputes the directed edge
    lists (src, dst) per generator, with dst = index of s^-1 * src."""

    def __init__(self, nf: NFunction, ball: CayleyBall):
        self.nf = nf
        self.ball = ball
        self.edge_src = []
        self.edge_dst = []
        for gi in range(ball.n_gens):
            row = ball.nbr[gi]
            src = np.nonzero(row >= 0)[0].astype(np.int64)
            self.edge_src.append(src)
            self.edge_dst.append(row[src].astype(np.int64))

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.edge_src)

    def values_of(self, f) -> np.ndarray:
        if isinstance(f, FiniteFunction):
            return self.ball.check_function(f)
        values = np.asarray(f, dtype=float)
        if values.shape != (self.ball.n_vertices,):
            raise ValueError("value array does not match the ball")
        return values


def laplacian(form: DirichletForm, f, x: int) -> float:
    """(Lap f)(x) over all |S| neighbors; x must be interior."""
    values = form.values_of(f)
    ball = form.ball
    if not ball.interior[x]:
        raise DomainError(f"vertex {x} is not interior (depth {ball.depth[x]}, "
                          f"radius {ball.radius})")
    total = 0.0
    for gi in range(ball.n_gens):
        j = int(ball.nbr[gi, x])
        total += eval_dphi(form.nf, float(values[j] - values[x]))
    return total


def laplacian_interior(form: DirichletForm, f) -> np.ndarray:
    """(Lap f) at every interior vertex at once (NaN at non-interior)."""
    values = form.values_of(f)
    ball = form.ball
    out = np.full(ball.n_vertices, np.nan)
    idx = ball.interior_indices()
    acc = np.zeros(len(idx))
    for gi in range(ball.n_gens):
        nbrs = ball.nbr[gi, idx]
        acc += form.nf.dphi_values(values[nbrs] - values[idx])
    out[idx] = acc
    return out


def dirichlet_modular(form: DirichletForm, f) -> float:
    """Dirichlet energy: sum over directed in-ball pairs of Phi(difference).

    Zero exactly when f is constant on each connected component.
    """
    values = form.values_of(f)
    total = 0.0
    for src, dst in zip(form.edge_src, form.edge_dst):
        total += float(np.sum(form.nf.phi_values(values[dst] - values[src])))
    return total


def pairing(form: DirichletForm, h, f) -> float:
    """First-variation pairing of the Dirichlet energy at h against f.

    Linear in f and invariant under adding constants to f.
    """
    hv = form.values_of(h)
    fv = form.values_of(f)
    total = 0.0
    for src, dst in zip(form.edge_src, form.edge_dst):
        total += float(np.sum(form.nf.dphi_values(hv[dst] - hv[src])
                              * (fv[dst] - fv[src])))
    return total


def pairing_with_indicators(form: DirichletForm, h) -> np.ndarray:
    """pairing(h, delta_x) for every vertex x at once, by a direct scatter of
    edge terms (independent of the odd-symmetry shortcut)."""
    hv = form.values_of(h)
    out = np.zeros(form.ball.n_vertices)
    for src, dst in zip(form.edge_src, form.edge_dst):
        w = form.nf.dphi_values(hv[dst] - hv[src])
        np.add.at(out, dst, w)
        np.subtract.at(out, src, w)
    return out


def indicator_pairing_check(form: DirichletForm, h, x: int,
                            tol: float = 1e-12) -> tuple[float, float, bool]:
    """Check pairing(h, delta_x) == -2 * (Lap h)(x) at an interior vertex.

    The identity needs a symmetric generating set and odd Phi'; both hold by
    construction here. Returns (lhs, rhs, ok).
    """
    hv = form.values_of(h)
    delta = np.zeros(form.ball.n_vertices)
    delta[x] = 1.0
    lhs = pairing(form, hv, delta)
    rhs = -2.0 * laplacian(form, hv, x)
    return lhs, rhs, abs(lhs - rhs) <= tol * (1.0 + abs(rhs))


def gateaux_check(form: DirichletForm, f, g, t_list) -> list[tuple[float, float]]:
    """Forward-difference check of the derivative identity
    (energy(f + t g) - energy(f)) / t -> pairing(f, g) as t -> 0+.

    Returns [(t, err)] per step; for smooth Phi, err decays at first order.
    Meaningful when g is supported on interior vertices, so every affected
    edge lies in the directed edge set.
    """
    fv = form.values_of(f)
    gv = form.values_of(g)
    base = dirichlet_modular(form, fv)
    pair = pairing(form, fv, gv)
    out = []
    for t in t_list:
        if not t > 0.0:
            raise DomainError("t values must be positive")
        err = abs((dirichlet_modular(form, fv + t * gv) - base) / t - pair)
        out.append((float(t), err))
    return out


def dirichlet_seminorm(form: DirichletForm, f) -> float:
    """sum_s ||lambda(s) f - f||_(Phi), each difference restricted to the
    vertices where s^-1 x stays inside the ball."""
    values = form.values_of(f)
    total = 0.0
    for gi in range(form.ball.n_gens):
        shifted, mask = act_generator(form.ball, gi, values)
        diff = shifted[mask] - values[mask]
        total += luxemburg_norm_arr(form.nf, diff)
    return total
