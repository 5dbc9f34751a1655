"""Convex energy minimization on Cayley balls: harmonic extension of boundary
data and the split of a Dirichlet-finite function into an interior-supported
part plus an energy-minimizing (harmonic) part.

Two schemes share one contract: nonlinear Gauss-Seidel (per-vertex monotone
bisection; the default) and gradient descent with Armijo backtracking. Both
stop when the residual sup-norm is at or below `tol_residual` *and* the last
relative energy decrease is at or below `tol_energy`; the combination keeps
flat-derivative N-functions (|x|^p with p > 2 near the minimum) from stopping
early on a misleadingly small residual.

The Gauss-Seidel inner loop runs in the compiled extension when it is
importable and the N-function is a builtin shape; otherwise a pure-Python
kernel with identical semantics takes over (set PHIHARM_PURE=1 to force it).
"""

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels_py as _pk
from .errors import SolverError, ValidationError
from .phi_laplacian import DirichletForm, pairing_with_indicators
from .orlicz import FiniteFunction

try:
    from . import _kernels as _ck
except ImportError:  # extension not built; pure fallback only
    _ck = None


def compiled_available() -> bool:
    return _ck is not None


def kernel_backend(nf=None) -> str:
    """Which sweep kernel a solve would use: "compiled" or "pure"."""
    if os.environ.get("PHIHARM_PURE"):
        return "pure"
    if _ck is None:
        return "pure"
    if nf is not None and nf.kernel_spec is None:
        return "pure"
    return "compiled"


@dataclass
class SolverConfig:
    scheme: str = "gauss_seidel"         # or "gradient_descent"
    tol_residual: float = 1e-10
    tol_energy: float = 1e-14
    max_sweeps: int = 100_000
    inner_tol: float = 1e-13
    init: str = "zero"                   # zero | copy_f | given
    init_values: np.ndarray | None = None

    def __post_init__(self):
        if self.scheme not in ("gauss_seidel", "gradient_descent"):
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        if self.init not in ("zero", "copy_f", "given"):
            raise ValidationError(f"unknown initialization {self.init!r}")
        if not (self.tol_residual > 0 and self.tol_energy > 0 and self.inner_tol > 0):
            raise ValidationError("tolerances must be positive")
        if self.max_sweeps < 1:
            raise ValidationError("max_sweeps must be at least 1")
        if self.init == "given" and self.init_values is None:
            raise ValidationError("init='given' requires init_values")

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "tol_residual": self.tol_residual,
            "tol_energy": self.tol_energy,
            "max_sweeps": self.max_sweeps,
            "inner_tol": self.inner_tol,
            "init": self.init,
        }


@dataclass
class SolveStats:
    sweeps: int
    residual: float
    energy: float
    converged: bool


@dataclass
class Decomposition:
    """f = u + h with u supported on the interior and h energy-minimizing
    (its nonlinear Laplacian vanishes on the interior up to the residual)."""
    u: FiniteFunction
    h: FiniteFunction
    residual: float
    energy: float
    sweeps: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "u": [float(v) for v in self.u.values],
            "h": [float(v) for v in self.h.values],
            "residual": float(self.residual),
            "energy": float(self.energy),
            "sweeps": int(self.sweeps),
            "converged": bool(self.converged),
        }


class _KernelOps:
    """Uniform sweep/residual/energy interface over the two kernels."""

    def __init__(self, form: DirichletForm, offsets: np.ndarray | None):
        self.form = form
        self.nbr = np.ascontiguousarray(form.ball.nbr, dtype=np.int32)
        self.off = None if offsets is None else \
            np.ascontiguousarray(offsets, dtype=float)
        self.inv = np.asarray(form.ball.group.inverse_index, dtype=np.int32)
        nf = form.nf
        self.compiled = kernel_backend(nf) == "compiled"
        if self.compiled:
            self.kind, self.p = nf.kernel_spec
        self.nf = nf

    def sweep(self, values, free_idx, inner_tol) -> float:
        if self.off is None:
            if self.compiled:
                return _ck.sweep_plain(values, self.nbr, free_idx,
                                       self.kind, self.p, inner_tol)
            return _pk.sweep_plain(values, self.nbr, free_idx,
                                   self.nf.dphi, inner_tol)
        if self.compiled:
            return _ck.sweep_offset(values, self.nbr, self.off, self.inv,
                                    free_idx, self.kind, self.p, inner_tol)
        return _pk.sweep_offset(values, self.nbr, self.off, self.inv,
                                free_idx, self.nf.dphi, inner_tol)

    def residual(self, values, free_idx) -> float:
        if self.off is None:
            if self.compiled:
                return _ck.residual_plain(values, self.nbr, free_idx,
                                          self.kind, self.p)
            return _pk.residual_plain(values, self.nbr, free_idx, self.nf.dphi)
        if self.compiled:
            return _ck.residual_offset(values, self.nbr, self.off, self.inv,
                                       free_idx, self.kind, self.p)
        return _pk.residual_offset(values, self.nbr, self.off, self.inv,
                                   free_idx, self.nf.dphi)

    def energy(self, values) -> float:
        if self.off is None:
            if self.compiled:
                return _ck.energy_plain(values, self.nbr, self.kind, self.p)
            return _pk.energy_plain(values, self.nbr, self.nf.phi_values)
        if self.compiled:
            return _ck.energy_offset(values, self.nbr, self.off,
                                     self.kind, self.p)
        return _pk.energy_offset(values, self.nbr, self.off, self.nf.phi_values)

    def gradient(self, values) -> np.ndarray:
        """dF/dv at every vertex (callers mask to the free set)."""
        form = self.form
        grad = np.zeros(len(values))
        for gi, (src, dst) in enumerate(zip(form.edge_src, form.edge_dst)):
            d = values[dst] - values[src]
            if self.off is not None:
                d = d - self.off[gi, src]
            w = self.nf.dphi_values(d)
            np.add.at(grad, dst, w)
            np.subtract.at(grad, src, w)
        return grad


def minimize_free(form: DirichletForm, values0: np.ndarray,
                  free_idx: np.ndarray, offsets: np.ndarray | None = None,
                  cfg: SolverConfig | None = None
                  ) -> tuple[np.ndarray, SolveStats]:
    """Minimize the (possibly offset) Dirichlet energy over the free vertices,
    holding all other values fixed. Returns (values, stats); raises
    SolverError if the scheme does not converge within max_sweeps."""
    cfg = cfg or SolverConfig()
    if not form.nf.strictly_convex:
        raise ValidationError(
            f"N-function {form.nf.spec_string!r} is not certified strictly "
            "convex; the minimizer would not be unique")
    values = np.array(values0, dtype=float)
    free_idx = np.asarray(free_idx, dtype=np.int64)
    if offsets is None and len(free_idx) and \
            np.any(form.ball.nbr[:, free_idx] < 0):
        raise ValidationError("free vertices must have all neighbors inside "
                              "the ball")
    ops = _KernelOps(form, offsets)
    if len(free_idx) == 0:
        return values, SolveStats(0, 0.0, ops.energy(values), True)
    if cfg.scheme == "gauss_seidel":
        stats = _run_gauss_seidel(ops, values, free_idx, cfg)
    else:
        stats = _run_gradient_descent(ops, values, free_idx, cfg)
    return values, stats


def _run_gauss_seidel(ops, values, free_idx, cfg) -> SolveStats:
    energy_prev = ops.energy(values)
    for sweep in range(1, cfg.max_sweeps + 1):
        ops.sweep(values, free_idx, cfg.inner_tol)
        e = ops.energy(values)
        if e > energy_prev + 1e-12 * (1.0 + abs(energy_prev)):
            raise SolverError("energy increased during a Gauss-Seidel sweep",
                              residual=ops.residual(values, free_idx),
                              sweeps=sweep)
        res = ops.residual(values, free_idx)
        if res <= cfg.tol_residual and \
                energy_prev - e <= cfg.tol_energy * (1.0 + abs(e)):
            return SolveStats(sweep, res, e, True)
        energy_prev = e
    raise SolverError("Gauss-Seidel did not converge",
                      residual=ops.residual(values, free_idx),
                      sweeps=cfg.max_sweeps)


def _run_gradient_descent(ops, values, free_idx, cfg) -> SolveStats:
    # Steepest descent with a derivative-based line search: along the ray
    # v - t*g the directional derivative q(t) = <grad F(v - t g), g> is
    # non-increasing (convexity) and starts at |g|^2 > 0, so bisecting its
    # sign change finds the line minimum without energy differences, which
    # would underflow near convergence. The trial step comes from the
    # Barzilai-Borwein quotient of the previous iterate. Accepting the
    # bracket end with q > 0 keeps the energy strictly non-increasing.
    e = ops.energy(values)
    step = 1.0
    last_decrease = 0.0
    g_prev = None
    v_prev = None
    res = float("inf")
    for it in range(1, cfg.max_sweeps + 1):
        grad = ops.gradient(values)
        g = grad[free_idx]
        res = 0.5 * float(np.max(np.abs(g)))
        if res <= cfg.tol_residual and \
                last_decrease <= cfg.tol_energy * (1.0 + abs(e)):
            return SolveStats(it - 1, res, e, True)

        def q(t):
            trial = values.copy()
            trial[free_idx] -= t * g
            return float(np.dot(ops.gradient(trial)[free_idx], g))

        a = step
        if g_prev is not None:
            s = values[free_idx] - v_prev
            y = g - g_prev
            sy = float(np.dot(s, y))
            if sy > 0.0:
                a = min(max(float(np.dot(s, s)) / sy, 1e-12), 1e12)
        g_prev = g
        v_prev = values[free_idx].copy()

        if q(a) > 0.0:
            lo, hi = a, a
            for _ in range(60):
                hi *= 2.0
                if q(hi) <= 0.0:
                    break
                lo = hi
        else:
            lo, hi = 0.0, a
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if q(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        if lo == 0.0:
            lo = hi  # root below bracket resolution; the overshoot is ~hi
        values[free_idx] -= lo * g
        e_new = ops.energy(values)
        last_decrease = e - e_new
        e = e_new
        step = lo if lo > 0.0 else step
    raise SolverError("gradient descent did not converge",
                      residual=res, sweeps=cfg.max_sweeps)


def harmonic_extension(form: DirichletForm, boundary: FiniteFunction,
                       cfg: SolverConfig | None = None) -> FiniteFunction:
    """Extend boundary data (the non-interior values of `boundary`) to a
    function whose nonlinear Laplacian vanishes on the interior up to
    cfg.tol_residual. Interior entries of `boundary` only matter for
    init='copy_f', where they seed the iteration."""
    cfg = cfg or SolverConfig()
    ball = form.ball
    bvals = ball.check_function(boundary)
    if cfg.init == "zero":
        values0 = np.zeros(ball.n_vertices)
    elif cfg.init == "copy_f":
        values0 = bvals.copy()
    else:
        values0 = np.array(cfg.init_values, dtype=float)
        if values0.shape != (ball.n_vertices,):
            raise ValidationError("init_values does not match the ball")
    outside = ~ball.interior
    values0[outside] = bvals[outside]
    values, _ = minimize_free(form, values0, ball.interior_indices(), None, cfg)
    return ball.function(values)


def decompose_via_extension(form: DirichletForm, f: FiniteFunction,
                            cfg: SolverConfig) -> tuple[np.ndarray, SolveStats]:
    """Route A: h = harmonic extension of f's non-interior values."""
    ball = form.ball
    fvals = ball.check_function(f)
    if cfg.init == "zero":
        values0 = np.zeros(ball.n_vertices)
    elif cfg.init == "copy_f":
        values0 = fvals.copy()
    else:
        values0 = np.array(cfg.init_values, dtype=float)
        if values0.shape != (ball.n_vertices,):
            raise ValidationError("init_values does not match the ball")
    outside = ~ball.interior
    values0[outside] = fvals[outside]
    return minimize_free(form, values0, ball.interior_indices(), None, cfg)


def decompose_via_residual_min(form: DirichletForm, f: FiniteFunction,
                               cfg: SolverConfig) -> tuple[np.ndarray, SolveStats]:
    """Route B: minimize energy(f - g) over interior-supported g, starting
    from g = 0. Parametrized through w = f - g, so the iteration starts at w
    = f and returns the same minimizer as route A."""
    ball = form.ball
    fvals = ball.check_function(f)
    cfg_b = replace(cfg, init="given", init_values=fvals.copy())
    values0 = fvals.copy()
    return minimize_free(form, values0, ball.interior_indices(), None, cfg_b)


def decompose(form: DirichletForm, f: FiniteFunction,
              cfg: SolverConfig | None = None,
              route_tol: float = 1e-8) -> Decomposition:
    """Split f into an interior-supported part u and an energy-minimizing
    part h = f - u.

    Runs both the boundary-extension route and the residual-minimization
    route and requires their minimizers to agree within `route_tol`.
    Constant f short-circuits to u = 0, h = f.
    """
    from .phi_laplacian import dirichlet_modular, laplacian_interior

    cfg = cfg or SolverConfig()
    ball = form.ball
    fvals = ball.check_function(f)
    if np.max(fvals) - np.min(fvals) == 0.0:
        zero = ball.function(np.zeros(ball.n_vertices))
        return Decomposition(zero, ball.function(fvals.copy()), 0.0, 0.0, 0,
                             True, {"route_agreement": 0.0,
                                    "indicator_pairing_max": 0.0})
    h_a, stats = decompose_via_extension(form, f, cfg)
    h_b, stats_b = decompose_via_residual_min(form, f, cfg)
    agreement = float(np.max(np.abs(h_a - h_b)))
    if agreement > route_tol:
        raise SolverError(
            f"extension and residual-minimization routes disagree by "
            f"{agreement:.3e} (tolerance {route_tol:g})",
            residual=stats.residual, sweeps=stats.sweeps)
    lap = laplacian_interior(form, h_a)
    residual = float(np.nanmax(np.abs(lap))) if ball.interior.any() else 0.0
    energy = dirichlet_modular(form, h_a)
    scale = float(np.max(np.abs(h_a)))
    pair_max = pairing_with_indicators(form, h_a)[ball.interior]
    pair_max = float(np.max(np.abs(pair_max))) if len(pair_max) else 0.0
    bound = 2.0 * cfg.tol_residual * (1.0 + scale)
    if pair_max > bound:
        raise SolverError(
            f"indicator pairing {pair_max:.3e} exceeds {bound:.3e} on the "
            "interior; minimizer is inconsistent",
            residual=residual, sweeps=stats.sweeps)
    u = fvals - h_a
    return Decomposition(
        ball.function(u), ball.function(h_a), residual, energy,
        stats.sweeps, stats.converged,
        {"route_agreement": agreement,
         "indicator_pairing_max": pair_max,
         "route_b_sweeps": stats_b.sweeps},
    )


def verify_uniqueness(form: DirichletForm, f: FiniteFunction,
                      cfg_a: SolverConfig, cfg_b: SolverConfig) -> float:
    """Solve twice under different configurations; return max |h_a - h_b|.

    On a truncation the boundary data pins the minimizer exactly, so the
    deviation is pure solver noise (contract: <= 1e-6)."""
    dec_a = decompose(form, f, cfg_a)
    dec_b = decompose(form, f, cfg_b)
    return float(np.max(np.abs(dec_a.h.values - dec_b.h.values)))
