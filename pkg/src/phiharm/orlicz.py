"""Discrete Orlicz-space computations on finitely supported functions.

The modular of f is rho(f) = sum_x Phi(f(x)). The gauge (Luxemburg) norm is
inf{k > 0 : rho(f/k) <= 1}; the Orlicz norm is the supremum of sum f*u over
the complementary-class ball {u : rho_Psi(u) <= 1}, computed here through the
equivalent one-dimensional formula  inf_{k>0} (1 + rho(k*f)) / k.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import golden_minimize
from .errors import ValidationError
from .nfunction import NFunction, eval_dphi, eval_phi

LUXEMBURG_REL_TOL = 1e-12
ORLICZ_REL_TOL = 1e-10


@dataclass
class FiniteFunction:
    """Real values indexed by a named finite vertex set.

    `ball` is the identifier of the indexing set (a Cayley ball id such as
    "free:2@4", or "set@n" for an abstract n-point set).
    """
    ball: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).copy()
        if self.values.ndim != 1:
            raise ValidationError("FiniteFunction values must be a 1-d array")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("FiniteFunction values must all be finite")

    def __len__(self):
        return len(self.values)

    def to_json_dict(self) -> dict:
        return {"ball": self.ball, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "FiniteFunction":
        return cls(str(data["ball"]), np.array(data["values"], dtype=float))


def finite_function(values, ball: str | None = None) -> FiniteFunction:
    """Wrap a plain vector as a FiniteFunction on an abstract point set."""
    values = np.asarray(values, dtype=float)
    return FiniteFunction(ball or f"set@{len(values)}", values)


def _check_same_index(f: FiniteFunction, u: FiniteFunction) -> None:
    if f.ball != u.ball or len(f) != len(u):
        raise ValueError(
            f"index-set mismatch: {f.ball!r} (n={len(f)}) vs {u.ball!r} (n={len(u)})")


def modular(nf: NFunction, f: FiniteFunction) -> float:
    """rho(f) = sum_x Phi(f(x)); zero exactly when f is identically zero."""
    return float(np.sum(nf.phi_values(f.values)))


def _modular_arr(nf: NFunction, values: np.ndarray) -> float:
    return float(np.sum(nf.phi_values(values)))


def luxemburg_norm(nf: NFunction, f: FiniteFunction) -> float:
    """Gauge norm: the unique k > 0 with rho(f/k) = 1 (0 for f = 0).

    Found by geometric bracketing of k and bisection to relative 1e-12;
    k -> rho(f/k) is strictly decreasing where positive on finite support.
    """
    return luxemburg_norm_arr(nf, f.values)


def luxemburg_norm_arr(nf: NFunction, values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    if scale == 0.0:
        return 0.0

    def rho(k: float) -> float:
        return _modular_arr(nf, values / k)

    k = scale
    if rho(k) >= 1.0:
        lo = k
        while rho(k) > 1.0:
            k *= 2.0
            if k > 1e300:
                raise ValidationError("Luxemburg bracketing overflow")
        hi = k
    else:
        hi = k
        while rho(k) < 1.0:
            k *= 0.5
            if k < 1e-300:
                # rho stays below 1 down to underflow; the norm is ~0.
                return 0.0
        lo = k
    while hi - lo > LUXEMBURG_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def orlicz_norm(nf: NFunction, f: FiniteFunction) -> float:
    """Orlicz norm via the one-dimensional infimum inf_k (1 + rho(k f)) / k.

    The objective is unimodal in k: its derivative has the sign of
    N(k) = sum_i Psi(Phi'(k|f_i|)) - 1, which is non-decreasing in k (here
    evaluated through Young's equality, without Psi). N brackets the
    minimizer; golden-section search finishes the job.
    """
    values = f.values
    scale = float(np.max(np.abs(values))) if len(f) else 0.0
    if scale == 0.0:
        return 0.0

    def n_of(k: float) -> float:
        kv = np.abs(values) * k
        with np.errstate(over="ignore", invalid="ignore"):
            term = kv * nf.dphi_values(kv) - nf.phi_values(kv)
        total = float(np.sum(term)) - 1.0
        return math.inf if math.isnan(total) else total

    def objective(k: float) -> float:
        return (1.0 + _modular_arr(nf, values * k)) / k

    k = 1.0 / scale
    lo = k
    while n_of(lo) >= 0.0 and lo > 1e-300:
        lo *= 0.5
    hi = k
    while n_of(hi) <= 0.0 and hi < 1e300:
        hi *= 2.0
    _, best = golden_minimize(objective, lo, hi, rel_tol=ORLICZ_REL_TOL)
    return best


def dual_pairing(f: FiniteFunction, u: FiniteFunction) -> float:
    """sum_x f(x) u(x); the two functions must share their index set."""
    _check_same_index(f, u)
    return float(np.dot(f.values, u.values))


def sandwich_check(nf: NFunction, f: FiniteFunction,
                   tol: float = 1e-9) -> tuple[float, float, bool]:
    """Return (gauge, orlicz, ok) with ok iff gauge <= orlicz <= 2*gauge
    within tol."""
    gauge = luxemburg_norm(nf, f)
    orlicz = orlicz_norm(nf, f)
    ok = (gauge - tol <= orlicz <= 2.0 * gauge + tol)
    return gauge, orlicz, ok
