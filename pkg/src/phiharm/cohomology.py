"""Executable cocycle machinery on Cayley balls and the capacity / flattening
experiments.

A cocycle assigns to each generator s a function b(s) with a validity mask;
values at longer group elements are reconstructed along fixed geodesic words
through the cocycle identity b(gh) = b(g) + lambda(g) b(h). The map
alpha(f)(s) = lambda(s) f - f produces coboundary-like cocycles from
functions; the coboundary-distance solver measures how well a cocycle can be
matched by alpha of an interior-supported function.

The capacity of a ball is the minimal Dirichlet energy of a potential pinned
to 1 at the identity and 0 on the boundary sphere. Its decay as the radius
grows is the desk-scale signature used here for the amenable/nonamenable
contrast; trends are reported as experiments consistent with the theory, not
as verification of statements about infinite groups.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PhiharmError, ValidationError
from .groups import CayleyBall, build_ball, parse_group_spec
from .phi_laplacian import DirichletForm
from .nfunction import NFunction
from .orlicz import FiniteFunction, luxemburg_norm_arr
from .rng import Lcg64
from .solver import Decomposition, SolverConfig, SolveStats, decompose, minimize_free


@dataclass
class Cocycle:
    """Generator values of a cocycle on a ball: for each generator name, a
    value array and a boolean validity mask."""
    ball: CayleyBall
    values: dict[str, np.ndarray]
    masks: dict[str, np.ndarray]
    provenance: str = "explicit"

    def __post_init__(self):
        names = set(self.ball.group.gen_names)
        if set(self.values) != names or set(self.masks) != names:
            raise ValidationError("cocycle must carry one value array and one "
                                  "mask per generator")


def alpha(ball: CayleyBall, f: FiniteFunction) -> Cocycle:
    """The cocycle with b(s) = lambda(s) f - f; constants map to zero."""
    fvals = ball.check_function(f)
    values = {}
    masks = {}
    for gi, name in enumerate(ball.group.gen_names):
        row = ball.nbr[gi]
        mask = row >= 0
        out = np.zeros(ball.n_vertices)
        out[mask] = fvals[row[mask]] - fvals[mask]
        values[name] = out
        masks[name] = mask
    return Cocycle(ball, values, masks, provenance="alpha")


def _act_masked(ball: CayleyBall, g, values: np.ndarray, mask: np.ndarray
                ) -> tuple[np.ndarray, np.ndarray]:
    """lambda(g) applied to a masked function: defined where g^-1 x is inside
    the ball and carried a valid value."""
    group = ball.group
    w = group.inv(g)
    out = np.zeros(ball.n_vertices)
    out_mask = np.zeros(ball.n_vertices, dtype=bool)
    for i, x in enumerate(ball.elements):
        j = ball.index.get(group.mul(w, x))
        if j is not None and mask[j]:
            out[i] = values[j]
            out_mask[i] = True
    return out, out_mask


def geodesic_word(ball: CayleyBall, vertex: int) -> list[int]:
    """Generator indices [t1, ..., tm] with vertex = t1 * t2 * ... * tm,
    following depth-decreasing neighbor steps (smallest generator index
    first, so the word is unique and deterministic)."""
    word = []
    x = vertex
    while ball.depth[x] > 0:
        for gi in range(ball.n_gens):
            j = int(ball.nbr[gi, x])
            if j >= 0 and ball.depth[j] == ball.depth[x] - 1:
                word.append(gi)
                x = j
                break
        else:  # pragma: no cover - BFS construction guarantees a parent
            raise ValidationError("ball has a vertex with no depth-decreasing "
                                  "neighbor")
    return word


def cocycle_value(b: Cocycle, g) -> tuple[np.ndarray, np.ndarray]:
    """Reconstruct b(g) along the fixed geodesic word of g via the cocycle
    identity. g must lie inside the ball."""
    ball = b.ball
    group = ball.group
    idx = ball.index.get(g)
    if idx is None:
        raise DomainError(f"element {group.nf_str(g)!r} is outside the "
                          f"radius-{ball.radius} ball")
    total = np.zeros(ball.n_vertices)
    mask = np.ones(ball.n_vertices, dtype=bool)
    prefix = group.identity()
    for gi in geodesic_word(ball, idx):
        name = group.gen_names[gi]
        term, term_mask = _act_masked(ball, prefix, b.values[name], b.masks[name])
        total += term
        mask &= term_mask
        prefix = group.mul(prefix, group.generators()[gi])
    return total, mask


def cocycle_check(b: Cocycle, g, h) -> float:
    """Max pointwise violation of b(gh) = b(g) + lambda(g) b(h) over the
    common validity mask (0.0 when the mask is empty)."""
    group = b.ball.group
    bg, mg = cocycle_value(b, g)
    bh, mh = cocycle_value(b, h)
    bgh, mgh = cocycle_value(b, group.mul(g, h))
    lam_bh, ml = _act_masked(b.ball, g, bh, mh)
    common = mg & mgh & ml
    if not common.any():
        return 0.0
    return float(np.max(np.abs(bgh[common] - bg[common] - lam_bh[common])))


def inverse_consistency(b: Cocycle) -> float:
    """Max violation of b(s^-1) = -lambda(s^-1) b(s) over common masks; a
    structural invariant of cocycles with b(identity) = 0."""
    ball = b.ball
    group = ball.group
    worst = 0.0
    for gi, name in enumerate(group.gen_names):
        inv_name = group.gen_names[group.inverse_index[gi]]
        s_inv = group.generators()[group.inverse_index[gi]]
        lam, ml = _act_masked(ball, s_inv, b.values[name], b.masks[name])
        common = ml & b.masks[inv_name]
        if common.any():
            worst = max(worst, float(np.max(np.abs(
                b.values[inv_name][common] + lam[common]))))
    return worst


@dataclass
class CoboundaryResult:
    modular_residual: float
    norm_residual: float
    v: FiniteFunction
    stats: SolveStats


def coboundary_distance(b: Cocycle, form: DirichletForm,
                        cfg: SolverConfig | None = None) -> CoboundaryResult:
    """Minimize sum_s rho(b(s) - (lambda(s) v - v)) over interior-supported v.

    The smooth modular is the optimization surrogate; the sum of Luxemburg
    norms of the residuals at the minimizer is reported alongside it.
    """
    ball = b.ball
    if ball is not form.ball:
        raise ValidationError("cocycle and Dirichlet form use different balls")
    cfg = cfg or SolverConfig()
    off = np.zeros((ball.n_gens, ball.n_vertices))
    for gi, name in enumerate(ball.group.gen_names):
        edge_pos = ball.nbr[gi] >= 0
        if not np.all(b.masks[name][edge_pos]):
            raise ValidationError(
                f"cocycle lacks values on in-ball edges of generator {name!r}")
        off[gi, edge_pos] = b.values[name][edge_pos]
    values0 = np.zeros(ball.n_vertices)
    values, stats = minimize_free(form, values0, ball.interior_indices(),
                                  offsets=off, cfg=cfg)
    norm_res = 0.0
    for gi, name in enumerate(ball.group.gen_names):
        row = ball.nbr[gi]
        pos = np.nonzero(row >= 0)[0]
        resid = b.values[name][pos] - (values[row[pos]] - values[pos])
        norm_res += luxemburg_norm_arr(form.nf, resid)
    return CoboundaryResult(stats.energy, norm_res, ball.function(values), stats)


@dataclass
class CapacityResult:
    group: str
    radius: int
    nfunction: str
    value: float
    minimizer: FiniteFunction
    residual: float
    sweeps: int
    converged: bool


def capacity(group_or_spec, radius: int, nf: NFunction,
             cfg: SolverConfig | None = None,
             ball: CayleyBall | None = None) -> CapacityResult:
    """Minimal Dirichlet energy of a potential with value 1 at the identity
    and 0 on the boundary sphere (all other vertices free)."""
    if radius < 1:
        raise DomainError("capacity requires radius >= 1")
    if ball is None:
        ball = build_ball(group_or_spec, radius)
    form = DirichletForm(nf, ball)
    values0 = np.zeros(ball.n_vertices)
    values0[0] = 1.0
    free = np.nonzero((ball.depth > 0) & (ball.depth < radius))[0]
    cfg = cfg or SolverConfig()
    values, stats = minimize_free(form, values0, free, None, cfg)
    return CapacityResult(ball.group.spec, radius, nf.spec_string,
                          stats.energy, ball.function(values),
                          stats.residual, stats.sweeps, stats.converged)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

CSV_HEADER = "group,radius,nfunction,quantity,value,converged"


@dataclass
class ExperimentReport:
    kind: str
    nfunction: str
    seed: int
    solver: dict
    rows: list[dict] = field(default_factory=list)

    def to_csv_text(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            value = row["value"]
            if value is None:
                text = ""
            else:
                if not math.isfinite(value):
                    raise ValidationError("refusing to emit a non-finite value "
                                          "into a CSV report")
                text = repr(float(value))
            conv = "true" if row["converged"] else "false"
            lines.append(f"{row['group']},{row['radius']},{row['nfunction']},"
                         f"{row['quantity']},{text},{conv}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "nfunction": self.nfunction,
            "seed": self.seed,
            "solver": self.solver,
            "rows": self.rows,
        }


def random_boundary(ball: CayleyBall, seed: int) -> FiniteFunction:
    """Seeded uniform [-1, 1] values on the boundary sphere (vertex index
    order), zero on the interior; the standard experiment input."""
    rng = Lcg64(seed)
    values = np.zeros(ball.n_vertices)
    for i in np.nonzero(~ball.interior)[0]:
        values[i] = rng.uniform()
    return ball.function(values)


def flatten_cell(ball: CayleyBall, nf: NFunction, cfg: SolverConfig,
                 seed: int) -> tuple[float, Decomposition]:
    """Decompose seeded random boundary data and measure the oscillation
    (max - min) of the energy-minimizing part on the inner half-radius ball."""
    form = DirichletForm(nf, ball)
    f = random_boundary(ball, seed)
    dec = decompose(form, f, cfg)
    inner = ball.depth <= ball.radius // 2
    h = dec.h.values[inner]
    return float(np.max(h) - np.min(h)), dec


def run_experiment(kind: str, groups, radii, nf: NFunction,
                   cfg: SolverConfig | None = None, seed: int = 0
                   ) -> ExperimentReport:
    """Run a capacity trend or flattening experiment over groups x radii.

    A failing cell records converged=false and no value; it does not abort
    the rest of the table. Row order is the declared (group, radius) order.
    """
    if kind not in ("capacity_trend", "flatten_test"):
        raise ValidationError(f"unknown experiment kind {kind!r}")
    cfg = cfg or SolverConfig()
    report = ExperimentReport(kind, nf.spec_string, seed, cfg.to_json_dict())
    for gspec in groups:
        group = parse_group_spec(gspec) if isinstance(gspec, str) else gspec
        for radius in radii:
            row = {
                "group": group.spec,
                "radius": int(radius),
                "nfunction": nf.spec_string,
                "quantity": "capacity" if kind == "capacity_trend"
                            else "inner_oscillation",
                "value": None,
                "converged": False,
                "diagnostics": {},
            }
            try:
                ball = build_ball(group, radius)
                if kind == "capacity_trend":
                    res = capacity(group, radius, nf, cfg, ball=ball)
                    row["value"] = float(res.value)
                    row["converged"] = bool(res.converged)
                    row["diagnostics"] = {"sweeps": res.sweeps,
                                          "residual": res.residual}
                else:
                    osc, dec = flatten_cell(ball, nf, cfg, seed)
                    row["value"] = osc
                    row["converged"] = bool(dec.converged)
                    row["diagnostics"] = {"sweeps": dec.sweeps,
                                          "residual": dec.residual,
                                          "energy": dec.energy}
            except PhiharmError as exc:
                row["diagnostics"] = {"error": str(exc)}
            report.rows.append(row)
    return report
