"""N-function calculus: builtins, a small DSL, complementary functions and
growth-regularity certificates.

An N-function is an even convex function Phi(x) = integral_0^|x| phi(t) dt
with phi non-decreasing, phi(0) = 0, phi(t) > 0 for t > 0 and phi(t) -> oo.
Its complementary function Psi integrates the generalized inverse of phi and
pairs with Phi in Young's inequality  a*b <= Phi(a) + Psi(b), with equality
exactly at b = Phi'(a).
"""

import bisect as _bisect
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._numeric import adaptive_simpson, bisect_decreasing
from .errors import DomainError, RangeError, ValidationError
from .expressions import compile_expression

# Kernel kind codes shared with the compiled sweep kernels (mirrored in
# _kernels.pyx; keep in sync).
KIND_POWER = 0        # Phi(x) = |x|^p / p
KIND_POWER_NORM = 1   # Phi(x) = |x|^p
KIND_COSH = 2         # Phi(x) = cosh(x) - 1
KIND_PLOG = 3         # Phi(x) = |x|^p * log(1 + |x|)

DEFAULT_NABLA2_GRID = (1.1, 1.25, math.sqrt(2.0), 2.01, 3.0, 4.0, 8.0)


class NFunction:
    """An N-function with its derivative and optional complementary function.

    `phi` and `dphi` are the even/odd full-line versions Phi and Phi'.
    `kernel_spec` is a (kind, p) pair when the function is one of the builtin
    shapes the compiled solver kernels understand; parsed functions carry None
    and the solvers fall back to these scalar callables.
    """

    def __init__(self, name: str, phi: Callable[[float], float],
                 dphi: Callable[[float], float], *,
                 params: dict[str, float] | None = None,
                 complementary: "NFunction | None" = None,
                 strictly_convex: bool = False,
                 source: str = "builtin",
                 kernel_spec: tuple[int, float] | None = None,
                 phi_arr: Callable[[np.ndarray], np.ndarray] | None = None,
                 dphi_arr: Callable[[np.ndarray], np.ndarray] | None = None,
                 spec_string: str | None = None):
        self.name = name
        self.params = dict(params or {})
        self.phi = phi
        self.dphi = dphi
        self.complementary = complementary
        self.strictly_convex = strictly_convex
        self.source = source
        self.kernel_spec = kernel_spec
        self._phi_arr = phi_arr
        self._dphi_arr = dphi_arr
        self.spec_string = spec_string or name

    def __repr__(self):
        return f"NFunction({self.spec_string!r})"

    def phi_values(self, values: np.ndarray) -> np.ndarray:
        """Vectorized Phi; overflow saturates to +inf instead of raising."""
        values = np.asarray(values, dtype=float)
        with np.errstate(over="ignore"):
            if self._phi_arr is not None:
                return self._phi_arr(values)
            return np.array([eval_phi(self, float(v)) for v in values.ravel()]
                            ).reshape(values.shape)

    def dphi_values(self, values: np.ndarray) -> np.ndarray:
        """Vectorized Phi'."""
        values = np.asarray(values, dtype=float)
        with np.errstate(over="ignore"):
            if self._dphi_arr is not None:
                return self._dphi_arr(values)
            return np.array([eval_dphi(self, float(v)) for v in values.ravel()]
                            ).reshape(values.shape)


@dataclass
class RegularityCertificate:
    """Outcome of an empirical growth-regularity scan near zero.

    `constant` is K for a delta2 scan (Phi(2x) <= K Phi(x) on the grid) and c
    for a nabla2 scan (Phi(x) <= Phi(cx)/(2c) on the grid). A certificate
    records a grid scan, not a proof.
    """
    kind: str
    x0: float
    constant: float
    grid_points: int
    passed: bool
    skipped: int = 0


def eval_phi(nf: NFunction, x: float) -> float:
    """Phi(x); even in x, overflow saturates to +inf."""
    if not math.isfinite(x):
        raise DomainError(f"eval_phi: non-finite argument {x!r}")
    try:
        return nf.phi(x)
    except OverflowError:
        return math.inf


def eval_dphi(nf: NFunction, x: float) -> float:
    """Phi'(x) = sign(x) * phi(|x|); odd in x."""
    if not math.isfinite(x):
        raise DomainError(f"eval_dphi: non-finite argument {x!r}")
    try:
        return nf.dphi(x)
    except OverflowError:
        return math.copysign(math.inf, x)


# ---------------------------------------------------------------------------
# Builtin catalog
# ---------------------------------------------------------------------------

def power(p: float) -> NFunction:
    """Phi(x) = |x|^p / p for p > 1; complementary is power(q), q = p/(p-1)."""
    nf = _power_half(p)
    if p == 2.0:
        nf.complementary = nf  # self-conjugate
    else:
        q = p / (p - 1.0)
        conj = _power_half(q)
        nf.complementary = conj
        conj.complementary = nf
    return nf


def _power_half(p: float) -> NFunction:
    if not p > 1.0:
        raise DomainError("power(p) requires p > 1")
    return NFunction(
        "power",
        lambda x: math.pow(abs(x), p) / p,
        lambda x: math.copysign(math.pow(abs(x), p - 1.0), x),
        params={"p": p},
        strictly_convex=True,
        kernel_spec=(KIND_POWER, p),
        phi_arr=lambda v: np.abs(v) ** p / p,
        dphi_arr=lambda v: np.sign(v) * np.abs(v) ** (p - 1.0),
        spec_string=f"power:p={p:g}",
    )


def power_norm(p: float) -> NFunction:
    """Phi(x) = |x|^p (no 1/p factor) for p > 1."""
    if not p > 1.0:
        raise DomainError("power_norm(p) requires p > 1")
    nf = NFunction(
        "power_norm",
        lambda x: math.pow(abs(x), p),
        lambda x: math.copysign(p * math.pow(abs(x), p - 1.0), x),
        params={"p": p},
        strictly_convex=True,
        kernel_spec=(KIND_POWER_NORM, p),
        phi_arr=lambda v: np.abs(v) ** p,
        dphi_arr=lambda v: np.sign(v) * (p * np.abs(v) ** (p - 1.0)),
        spec_string=f"power_norm:p={p:g}",
    )
    # Conjugate of |x|^p: integral of the inverse of p*t^(p-1), i.e.
    # c * |y|^q / q with q = p/(p-1) and c = (1/p)^(1/(p-1)).
    q = p / (p - 1.0)
    c = math.pow(1.0 / p, 1.0 / (p - 1.0))
    conj = NFunction(
        "power_norm_conj",
        lambda y: c * math.pow(abs(y), q) / q,
        lambda y: math.copysign(math.pow(abs(y) / p, 1.0 / (p - 1.0)), y),
        params={"p": p},
        strictly_convex=True,
        phi_arr=lambda v: c * np.abs(v) ** q / q,
        dphi_arr=lambda v: np.sign(v) * (np.abs(v) / p) ** (1.0 / (p - 1.0)),
        spec_string=f"power_norm_conj:p={p:g}",
    )
    nf.complementary = conj
    conj.complementary = nf
    return nf


def cosh_nf() -> NFunction:
    """Phi(x) = cosh(x) - 1. No closed-form complementary is registered; it
    is constructed numerically on demand."""
    # 2*sinh(x/2)^2 == cosh(x) - 1 without the catastrophic cancellation at
    # small x (cosh(1e-8) - 1 rounds to 0, breaking the near-zero scans).
    return NFunction(
        "cosh",
        lambda x: 2.0 * math.sinh(0.5 * x) ** 2,
        lambda x: math.sinh(x),
        strictly_convex=True,
        kernel_spec=(KIND_COSH, 0.0),
        phi_arr=lambda v: 2.0 * np.sinh(0.5 * v) ** 2,
        dphi_arr=np.sinh,
        spec_string="cosh",
    )


def plog(p: float) -> NFunction:
    """Phi(x) = |x|^p * log(1 + |x|) for p > 1."""
    if not p > 1.0:
        raise DomainError("plog(p) requires p > 1")

    def _phi(x: float) -> float:
        a = abs(x)
        return math.pow(a, p) * math.log1p(a)

    def _dphi(x: float) -> float:
        a = abs(x)
        v = p * math.pow(a, p - 1.0) * math.log1p(a) + math.pow(a, p) / (1.0 + a)
        return math.copysign(v, x)

    def _phi_arr(v: np.ndarray) -> np.ndarray:
        a = np.abs(v)
        return a ** p * np.log1p(a)

    def _dphi_arr(v: np.ndarray) -> np.ndarray:
        a = np.abs(v)
        return np.sign(v) * (p * a ** (p - 1.0) * np.log1p(a) + a ** p / (1.0 + a))

    return NFunction(
        "plog", _phi, _dphi,
        params={"p": p},
        strictly_convex=True,
        kernel_spec=(KIND_PLOG, p),
        phi_arr=_phi_arr,
        dphi_arr=_dphi_arr,
        spec_string=f"plog:p={p:g}",
    )


BUILTINS = {
    "power": power,
    "power_norm": power_norm,
    "cosh": cosh_nf,
    "plog": plog,
}


def builtin(spec: str) -> NFunction:
    """Instantiate a builtin from its mini-syntax, e.g. "power:p=3" or "cosh"."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in BUILTINS:
        raise ValidationError(f"unknown builtin N-function {name!r}; "
                              f"known: {sorted(BUILTINS)}")
    params: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValidationError(f"malformed parameter {item!r} in {spec!r}")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise ValidationError(f"bad value in parameter {item!r}") from exc
    try:
        return BUILTINS[name](**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for builtin {name!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Complementary (conjugate) function
# ---------------------------------------------------------------------------

def _inverse_dphi(nf: NFunction, x_max: float, inner_tol: float = 1e-13
                  ) -> Callable[[float], float]:
    """The generalized inverse of phi on [0, phi(x_max)], by bracketing and
    bisection; assumes phi strictly increasing (checked by the caller)."""

    def inverse(y: float) -> float:
        if y <= 0.0:
            return 0.0
        hi = min(1.0, x_max)
        while eval_dphi(nf, hi) < y:
            if hi >= x_max:
                raise RangeError(
                    f"Phi'({x_max:g}) = {eval_dphi(nf, x_max):.6g} < {y:.6g}: "
                    "inverse not bracketed; raise x_max")
            hi = min(2.0 * hi, x_max)
        return bisect_decreasing(lambda t: y - eval_dphi(nf, t), 0.0, hi, inner_tol)

    return inverse


def numerical_complementary(nf: NFunction, x_max: float = 50.0,
                            resolution: int = 512) -> NFunction:
    """Construct the complementary function numerically.

    The inverse of Phi' is found by monotone bracketing plus bisection, and
    Psi(y) integrates it with adaptive Simpson quadrature. Evaluations are
    cached and extended incrementally (the integrand is re-integrated only on
    the gap between the nearest cached point and the requested one), which
    keeps grid-style workloads cheap.
    """
    grid = np.linspace(0.0, x_max, resolution)
    vals = [eval_dphi(nf, float(t)) for t in grid]
    for a, b in zip(vals, vals[1:]):
        if b < a:
            raise ValidationError("Phi' is not non-decreasing on [0, x_max]; "
                                  "cannot construct the complementary function")
    inverse = _inverse_dphi(nf, x_max)

    cache_y = [0.0]
    cache_v = [0.0]

    def psi_pos(y: float) -> float:
        if y <= 0.0:
            return 0.0
        i = _bisect.bisect_right(cache_y, y) - 1
        y0, v0 = cache_y[i], cache_v[i]
        if y == y0:
            return v0
        value = v0 + adaptive_simpson(inverse, y0, y, rel_tol=1e-11)
        _bisect.insort(cache_y, y)
        cache_v.insert(_bisect.bisect_left(cache_y, y), value)
        return value

    return NFunction(
        f"conj({nf.name})",
        lambda x: psi_pos(abs(x)),
        lambda x: math.copysign(inverse(abs(x)), x) if x != 0.0 else 0.0,
        params=dict(nf.params),
        source=nf.source,
        spec_string=f"conj({nf.spec_string})",
    )


def complementary(nf: NFunction, x_max: float = 50.0, resolution: int = 512
                  ) -> NFunction:
    """The complementary N-function: the registered closed form when the
    builtin has one, otherwise the numerical construction (cached on nf)."""
    if nf.complementary is None:
        nf.complementary = numerical_complementary(nf, x_max, resolution)
    return nf.complementary


def young_gap(nf: NFunction, a: float, b: float) -> float:
    """Phi(a) + Psi(b) - a*b for a, b >= 0; non-negative, and zero exactly
    at b = Phi'(a)."""
    if a < 0.0 or b < 0.0:
        raise DomainError("young_gap expects non-negative arguments")
    psi = complementary(nf)
    return eval_phi(nf, a) + eval_phi(psi, b) - a * b


# ---------------------------------------------------------------------------
# Growth-regularity certificates (empirical grid scans, not proofs)
# ---------------------------------------------------------------------------

def _scan_grid(x0: float, grid_points: int) -> np.ndarray:
    if not x0 > 0.0:
        raise DomainError("x0 must be positive")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    # Log-spaced sample of (0, x0]; eight decades below x0 covers the
    # "near zero" regime without hitting denormal noise.
    return np.geomspace(x0 * 1e-8, x0, grid_points)


def certify_delta2(nf: NFunction, x0: float, grid_points: int = 512
                   ) -> RegularityCertificate:
    """Scan K = max Phi(2x)/Phi(x) over a log grid in (0, x0].

    Grid points where Phi(x) underflows to zero are skipped and counted.
    """
    grid = _scan_grid(x0, grid_points)
    best = 0.0
    skipped = 0
    for x in grid:
        px = eval_phi(nf, float(x))
        if px == 0.0:
            skipped += 1
            continue
        best = max(best, eval_phi(nf, float(2.0 * x)) / px)
    passed = math.isfinite(best) and best > 2.0 and skipped < len(grid)
    return RegularityCertificate("delta2", x0, best, grid_points, passed, skipped)


def certify_nabla2(nf: NFunction, x0: float,
                   c_grid: tuple[float, ...] | list[float] | None = None,
                   grid_points: int = 512) -> RegularityCertificate:
    """First candidate c > 1 with Phi(x) <= Phi(cx)/(2c) on the whole grid."""
    if c_grid is None:
        c_grid = DEFAULT_NABLA2_GRID
    if len(c_grid) == 0:
        raise ValueError("candidate list for the nabla2 scan is empty")
    if any(c <= 1.0 for c in c_grid):
        raise DomainError("all nabla2 candidates must exceed 1")
    grid = _scan_grid(x0, grid_points)
    for c in c_grid:
        ok = True
        for x in grid:
            lhs = eval_phi(nf, float(x))
            rhs = eval_phi(nf, float(c * x)) / (2.0 * c)
            # 1e-12 relative slack keeps exact-equality cases (homogeneous
            # Phi at the critical c) from failing on rounding.
            if lhs > rhs * (1.0 + 1e-12) + 1e-300:
                ok = False
                break
        if ok:
            return RegularityCertificate("nabla2", x0, float(c), grid_points, True)
    return RegularityCertificate("nabla2", x0, math.nan, grid_points, False)


def check_derivative_growth(nf: NFunction, x0: float, K: float,
                            grid_points: int = 512) -> tuple[bool, float]:
    """Verify x*Phi'(x) <= K*Phi(x) and Psi(Phi'(x)) <= (K-1)*Phi(x) on a log
    grid in (0, x0], with Psi(Phi'(x)) evaluated through Young's equality
    Psi(Phi'(x)) = x*Phi'(x) - Phi(x).

    Returns (ok, max relative violation).
    """
    grid = _scan_grid(x0, grid_points)
    worst = -math.inf
    for x in grid:
        x = float(x)
        px = eval_phi(nf, x)
        xdp = x * eval_dphi(nf, x)
        v1 = (xdp - K * px) / (1.0 + K * px)
        v2 = ((xdp - px) - (K - 1.0) * px) / (1.0 + K * px)
        worst = max(worst, v1, v2)
    return worst <= 1e-12, worst


# ---------------------------------------------------------------------------
# Parsed N-functions
# ---------------------------------------------------------------------------

_PARSE_PROBES = np.geomspace(1e-4, 10.0, 64)
_CONVEXITY_PROBES = np.geomspace(1e-4, 10.0, 512)


def parse_nfunction(phi_expr: str, dphi_expr: str,
                    params: dict[str, float] | None = None) -> NFunction:
    """Build an N-function from DSL expressions for Phi and Phi'.

    Phi is made even by evaluating at |x| and Phi' gets the odd extension.
    The supplied derivative is cross-checked against a central difference of
    Phi at 64 log-spaced probes in [1e-4, 10] (relative tolerance 1e-4), and
    Phi' must be non-negative and non-decreasing on the probe grid.
    """
    params = dict(params or {})
    phi_raw = compile_expression(phi_expr, params)
    dphi_raw = compile_expression(dphi_expr, params)

    def phi(x: float) -> float:
        return phi_raw(abs(x))

    def dphi(x: float) -> float:
        v = dphi_raw(abs(x))
        return v if x >= 0.0 else -v

    def probe(fn, x):
        try:
            v = fn(float(x))
        except OverflowError:
            return math.inf
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(
                f"expression evaluation failed at x={x:g}: {exc}") from exc
        if math.isnan(v):
            raise ValidationError(f"expression evaluates to NaN at x={x:g}")
        return v

    if abs(probe(phi, 0.0)) > 1e-12:
        raise ValidationError("Phi(0) must be 0")
    if abs(probe(dphi, 0.0)) > 1e-12:
        raise ValidationError("Phi'(0) must be 0")

    dvals = []
    worst_rel = 0.0
    worst_x = math.nan
    for x in _PARSE_PROBES:
        x = float(x)
        pv = probe(phi, x)
        if not pv > 0.0:
            raise ValidationError(f"Phi({x:g}) = {pv:g} is not positive")
        dv = probe(dphi, x)
        if dv < -1e-12:
            raise ValidationError(f"Phi'({x:g}) = {dv:g} is negative")
        dvals.append(dv)
        h = 1e-4 * max(x, 1e-2)
        cd = (probe(phi, x + h) - probe(phi, x - h)) / (2.0 * h)
        rel = abs(cd - dv) / max(abs(dv), abs(cd), 1e-12)
        if rel > worst_rel:
            worst_rel, worst_x = rel, x
    if worst_rel > 1e-4:
        raise ValidationError(
            f"dphi does not match the central difference of phi: relative "
            f"error {worst_rel:.3e} at x={worst_x:g} (tolerance 1e-4)")
    for a, b in zip(dvals, dvals[1:]):
        if b < a - 1e-12 * (1.0 + abs(a)):
            raise ValidationError("Phi' is not non-decreasing on the probe grid")

    # Def-style integral representation: quadrature of Phi' reproduces Phi.
    for x in (1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        integral = adaptive_simpson(dphi, 0.0, x, rel_tol=1e-9)
        pv = probe(phi, x)
        if abs(integral - pv) > 1e-6 * (abs(pv) + 1e-12):
            raise ValidationError(
                f"quadrature of Phi' does not reproduce Phi at x={x:g}: "
                f"{integral:.9g} vs {pv:.9g}")

    # Sub/superlinearity thresholds at the extremes of the working range.
    small = probe(phi, 1e-6) / 1e-6
    if not small <= 1e-3:
        raise ValidationError(f"Phi(x)/x = {small:g} at x=1e-6 exceeds 1e-3; "
                              "not sublinear near zero")
    big = probe(phi, 1e6) / 1e6
    if not big >= 1e3:
        raise ValidationError(f"Phi(x)/x = {big:g} at x=1e6 is below 1e3; "
                              "not superlinear at infinity")

    strict = True
    prev = 0.0
    for x in _CONVEXITY_PROBES:
        dv = probe(dphi, float(x))
        if not dv > prev:
            strict = False
            break
        prev = dv

    return NFunction(
        "parsed", phi, dphi,
        params=params,
        strictly_convex=strict,
        source="parsed",
        spec_string=f"expr({phi_expr!r},{dphi_expr!r})",
    )


def validate_nfunction(nf: NFunction, x_max: float = 10.0, probes: int = 64) -> None:
    """Run the structural N-function checks; raises ValidationError on failure.

    Covers: Phi(0)=0, evenness, positivity, odd Phi', non-decreasing Phi',
    integral representation (quadrature of Phi' reproduces Phi to relative
    1e-6), and the sub/superlinearity thresholds.
    """
    if eval_phi(nf, 0.0) != 0.0:
        raise ValidationError("Phi(0) != 0")
    grid = np.geomspace(1e-4, x_max, probes)
    prev = 0.0
    for x in grid:
        x = float(x)
        px = eval_phi(nf, x)
        if not px > 0.0:
            raise ValidationError(f"Phi({x:g}) not positive")
        if px != eval_phi(nf, -x):
            raise ValidationError(f"Phi not even at x={x:g}")
        dv = eval_dphi(nf, x)
        if dv != -eval_dphi(nf, -x):
            raise ValidationError(f"Phi' not odd at x={x:g}")
        if not dv > 0.0:
            raise ValidationError(f"Phi'({x:g}) not positive")
        if dv < prev:
            raise ValidationError(f"Phi' decreasing at x={x:g}")
        prev = dv
    for x in (0.01, 0.1, 1.0, min(5.0, x_max), x_max):
        integral = adaptive_simpson(lambda t: eval_dphi(nf, t), 0.0, x, rel_tol=1e-9)
        px = eval_phi(nf, x)
        if abs(integral - px) > 1e-6 * (abs(px) + 1e-12):
            raise ValidationError(f"integral of Phi' does not match Phi at x={x:g}")
    if not eval_phi(nf, 1e-6) / 1e-6 <= 1e-3:
        raise ValidationError("Phi(x)/x at x=1e-6 exceeds 1e-3")
    if not eval_phi(nf, 1e6) / 1e6 >= 1e3:
        raise ValidationError("Phi(x)/x at x=1e6 below 1e3")
