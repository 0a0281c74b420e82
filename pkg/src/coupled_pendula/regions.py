"""Classification of the (X, Y) damping/stiffness quadrant.

For identical pendula the δ modes sit at distance ηω/2 from the
imaginary axis while the x/σ spectrum lives in the Eneström-Kakeya
annulus [ρm, ρM].  Comparing the two yields, per quadrant point:

* zone Z1-Z4: which coefficient ratios attain ρm and ρM;
* conic conditions: the four pairwise ratio comparisons as explicit
  quadratic inequalities in (X, Y);
* antiphase facilitation: ηω < 2ρm, split into condition (A) when
  ρm = a0/a1 (zones Z1, Z2) and (B) when ρm = a1/a2 (zones Z3, Z4) —
  the set 𝒜 collects the points whose zone-matching condition holds;
* in-phase impossibility: ηω/2 ≤ ρM always holds for η ≤ 1, so the δ
  pair can never decay faster than the whole x/σ spectrum;
* semicircle membership: ω ≤ ρM, i.e. whether the δ eigenvalue pair
  (modulus exactly ω) lies inside the outer annulus radius;
* a refined bound for quartics with two complex root pairs: whenever
  a2/a4 ≤ 2ρm², every root real part lies left of the negative root of
  r² + (a3/a4) r/2 + (a2/a4 − 2ρm²)/4 = 0; pushing that root left of
  −ηω/2 certifies antiphase tendency without computing roots.

All verdicts here are dimensionless (ω ≡ 1).  Analyses specific to the
η ≤ 1 branch refuse η > 1 rather than guess.  Grid sweeps are
deterministic and parallelize over rows with no shared mutable state.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.signal import find_peaks

from . import spectral
from .dynamics import DampingModel, Trajectory, integrate
from .params import ParamError, PhysicalParams, SystemState, identical_pendula

__all__ = [
    "BranchUnsupportedError",
    "QuadrantPoint",
    "AntiphaseVerdict",
    "InphaseCheck",
    "RootBound",
    "GridSpec",
    "RegionVerdict",
    "RegionMap",
    "classify_zone",
    "conic_conditions",
    "antiphase_conditions",
    "mu_threshold",
    "no_inphase_check",
    "semicircle_condition",
    "complex_root_bound",
    "region_map",
    "empirical_decay_rates",
]


class BranchUnsupportedError(ValueError):
    """Requested verdict is only analyzed for η ≤ 1."""


@dataclass(frozen=True)
class QuadrantPoint:
    """A point of the open positive quadrant with its (η, μ) context."""

    X: float
    Y: float
    eta: float
    mu: float

    def __post_init__(self):
        if not self.X > 0:
            raise ParamError("X", "must be positive")
        if not self.Y > 0:
            raise ParamError("Y", "must be positive")
        if not self.eta > 0:
            raise ParamError("eta", "must be positive")
        if not 0.0 < self.mu < 0.5:
            raise ParamError("mu", "must lie in (0, 1/2)")

    def ratios(self) -> np.ndarray:
        return spectral.ek_ratios_dimensionless(self.eta, self.X, self.Y, self.mu)


def classify_zone(q: QuadrantPoint) -> str:
    """Zone Z1-Z4 from the ratio comparison; ties go to the lower index."""
    return spectral.zone_from_ratios(q.ratios())


def _conic_values(X, Y, eta, mu):
    e2 = eta * eta
    one = 1.0 - 2.0 * mu
    c1 = X**2 + (e2 - 1.0) * Y**2 + eta * X * Y + 4.0 * mu * eta * X \
        + (4.0 * mu * e2 - 1.0) * Y + 4.0 * mu**2 * e2
    c2 = X**2 + eta * X * Y + eta * X + one * (e2 - 1.0) * Y + 2.0 * mu * one * e2
    c3 = (e2 - 1.0) * X**2 + Y**2 + eta * X * Y + eta * X \
        + (2.0 - one * e2) * Y + 1.0 - 2.0 * mu * one * e2
    c4 = X**2 + one * eta * X - one * Y + one * (one * e2 - 1.0)
    return c1, c2, c3, c4


def conic_conditions(q: QuadrantPoint) -> tuple[bool, bool, bool, bool]:
    """Signs of the four ratio-comparison conics.

    Positive values mean, in order: a0/a1 < a1/a2, a0/a1 < a3/a4,
    a1/a2 < a2/a3, a2/a3 < a3/a4.
    """
    vals = _conic_values(q.X, q.Y, q.eta, q.mu)
    return tuple(bool(v > 0) for v in vals)


class AntiphaseVerdict(NamedTuple):
    cond_a: bool
    cond_b: bool
    in_a_set: bool


def antiphase_conditions(q: QuadrantPoint) -> AntiphaseVerdict:
    """Conditions (A) and (B): does the δ decay rate ηω/2 stay below ρm?

    (A) is the comparison against a0/a1 (binding in Z1 ∪ Z2), (B)
    against a1/a2 (binding in Z3 ∪ Z4).  ``in_a_set`` is the condition
    matching the point's zone.  Only the η ≤ 1 branch is analyzed.
    """
    if q.eta > 1.0:
        raise BranchUnsupportedError("antiphase conditions analyzed for eta <= 1 only")
    r = q.ratios()
    cond_a = bool(q.eta < 2.0 * r[0])
    cond_b = bool(q.eta < 2.0 * r[1])
    in_a = cond_a if r[0] <= r[1] else cond_b
    return AntiphaseVerdict(cond_a=cond_a, cond_b=cond_b, in_a_set=in_a)


def mu_threshold(eta: float) -> float:
    """Mass-ratio threshold (2−η²)/(2(4−η²)) separating the map cases."""
    if not 0.0 < eta <= 1.0:
        raise BranchUnsupportedError("threshold defined for 0 < eta <= 1")
    return (2.0 - eta**2) / (2.0 * (4.0 - eta**2))


class InphaseCheck(NamedTuple):
    ok: bool
    margin: float  # 2 ρM/ω − η, non-negative whenever ok


def no_inphase_check(q: QuadrantPoint) -> InphaseCheck:
    """Verify ηω/2 ≤ ρM: the δ pair cannot out-decay the x/σ annulus.

    For η ≤ 1 this holds at every quadrant point, which is why in-phase
    synchronization is never facilitated.
    """
    if q.eta > 1.0:
        raise BranchUnsupportedError("in-phase check analyzed for eta <= 1 only")
    r = q.ratios()
    margin = 2.0 * max(r[2], r[3]) - q.eta
    return InphaseCheck(ok=bool(margin >= 0.0), margin=float(margin))


def semicircle_condition(q: QuadrantPoint) -> bool:
    """Whether the δ eigenvalue pair (|z| = ω) lies within |z| ≤ ρM.

    Equivalent closed forms per zone: with ρM = a2/a3 (Z1 ∪ Z3) the
    condition reads Y > (1−η)X + (1−2μ)η − 1; with ρM = a3/a4
    (Z2 ∪ Z4) it reads X > (1−2μ)(1−η).
    """
    if q.eta > 1.0:
        raise BranchUnsupportedError("semicircle condition analyzed for eta <= 1 only")
    one = 1.0 - 2.0 * q.mu
    r = q.ratios()
    if r[2] >= r[3]:
        return bool(q.Y > (1.0 - q.eta) * q.X + one * q.eta - 1.0)
    return bool(q.X > one * (1.0 - q.eta))


class RootBound(NamedTuple):
    applicable: bool
    b_bound: Optional[float]  # in units of ω
    refined_ok: Optional[bool]
    pattern: str  # "complex", "real", or "mixed"


_REAL_ROOT_RTOL = 1e-9


def _root_pattern(roots: np.ndarray) -> str:
    scale = np.maximum(np.abs(roots), 1e-30)
    n_real = int(np.sum(np.abs(roots.imag) <= _REAL_ROOT_RTOL * scale))
    return {4: "real", 0: "complex"}.get(n_real, "mixed")


def complex_root_bound(q: QuadrantPoint) -> RootBound:
    """Coefficient-only real-part bound for the all-complex root pattern.

    Applicable when the quartic has two conjugate pairs and
    a2/a4 ≤ 2ρm²; then every root real part is ≤ the negative root
    of r² + (a3/a4) r/2 + (a2/a4 − 2ρm²)/4, and ``refined_ok`` records
    whether that bound clears −ηω/2.  Real or mixed patterns return
    not-applicable; the direct root comparison is used instead.

    Beware that for the stable quartics arising here the premise cannot
    actually hold: a2/a4 = |λ1|² + |λ2|² + 4ξ1ξ2 with both real parts
    negative, so it exceeds 2ρm² strictly.  The check is kept for
    completeness but region verdicts in practice always use the direct
    root comparison.
    """
    quart = spectral.quartic_from_dimensionless(q.eta, q.X, q.Y, q.mu, omega=1.0)
    roots = spectral.poly_roots(quart)
    pattern = _root_pattern(roots)
    if pattern != "complex":
        return RootBound(applicable=False, b_bound=None, refined_ok=None, pattern=pattern)
    r = q.ratios()
    rho_m = min(r[0], r[1])
    a = quart.coeffs
    a24 = a[2] / a[4]
    if a24 > 2.0 * rho_m**2:
        return RootBound(applicable=False, b_bound=None, refined_ok=None, pattern=pattern)
    h = a[3] / a[4] / 2.0
    b_bound = 0.5 * (-h - math.sqrt(h * h - (a24 - 2.0 * rho_m**2)))
    return RootBound(applicable=True, b_bound=float(b_bound),
                     refined_ok=bool(-0.5 * q.eta >= b_bound), pattern=pattern)


# ---------------------------------------------------------------------------
# Grid sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid strictly inside the open quadrant."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    spacing: str = "log"

    def __post_init__(self):
        if not 0.0 < self.x_min <= self.x_max:
            raise ParamError("x_min", "grid must satisfy 0 < x_min <= x_max")
        if not 0.0 < self.y_min <= self.y_max:
            raise ParamError("y_min", "grid must satisfy 0 < y_min <= y_max")
        if self.nx < 1 or self.ny < 1:
            raise ParamError("nx", "grid must have at least one node per axis")
        if self.spacing not in ("log", "linear"):
            raise ParamError("spacing", "must be 'log' or 'linear'")

    def axis(self, which: str) -> np.ndarray:
        lo, hi, n = ((self.x_min, self.x_max, self.nx) if which == "x"
                     else (self.y_min, self.y_max, self.ny))
        if n == 1:
            return np.array([lo])
        if self.spacing == "log":
            return np.geomspace(lo, hi, n)
        return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class RegionVerdict:
    """All per-node verdicts; Optional fields are None when η > 1 or the
    refined bound does not apply."""

    zone: str
    conics: tuple[bool, bool, bool, bool]
    cond_a: Optional[bool]
    cond_b: Optional[bool]
    in_a_set: Optional[bool]
    semicircle: Optional[bool]
    refined: Optional[bool]
    rho_m_over_omega: float
    rho_M_over_omega: float


_CSV_HEADER = ("X,Y,zone,conic1,conic2,conic3,conic4,condA,condB,inA,"
               "semicircle,refined,rho_m_over_omega,rho_M_over_omega")


def _flag(v: Optional[bool]) -> str:
    return "na" if v is None else ("true" if v else "false")


@dataclass(frozen=True)
class RegionMap:
    """Verdicts over a grid, row-major in Y then X."""

    grid: GridSpec
    eta: float
    mu: float
    xs: np.ndarray
    ys: np.ndarray
    verdicts: list[RegionVerdict]

    def verdict_at(self, ix: int, iy: int) -> RegionVerdict:
        return self.verdicts[iy * self.grid.nx + ix]

    def zone_fractions(self) -> dict[str, float]:
        total = len(self.verdicts)
        return {z: sum(v.zone == z for v in self.verdicts) / total
                for z in ("Z1", "Z2", "Z3", "Z4")}

    def in_a_fraction(self) -> Optional[float]:
        flags = [v.in_a_set for v in self.verdicts]
        if any(f is None for f in flags):
            return None
        return sum(flags) / len(flags)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(_CSV_HEADER + "\n")
            for iy in range(self.grid.ny):
                for ix in range(self.grid.nx):
                    v = self.verdicts[iy * self.grid.nx + ix]
                    cells = [format(self.xs[ix], ".9e"), format(self.ys[iy], ".9e"),
                             v.zone,
                             *(_flag(c) for c in v.conics),
                             _flag(v.cond_a), _flag(v.cond_b), _flag(v.in_a_set),
                             _flag(v.semicircle), _flag(v.refined),
                             format(v.rho_m_over_omega, ".9e"),
                             format(v.rho_M_over_omega, ".9e")]
                    fh.write(",".join(cells) + "\n")


def _quartic_roots_batch(eta: float, X: np.ndarray, Y: np.ndarray, mu: float) -> np.ndarray:
    """Roots of the ω=1 quartic at each node, via batched companions."""
    one = 1.0 - 2.0 * mu
    n = X.size
    a0 = Y
    a1 = eta * Y + X + 2.0 * mu * eta
    a2 = eta * X + Y + 1.0
    a3 = X + one * eta
    comp = np.zeros((n, 4, 4))
    comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
    comp[:, 0, 3] = -a0 / one
    comp[:, 1, 3] = -a1 / one
    comp[:, 2, 3] = -a2 / one
    comp[:, 3, 3] = -a3 / one
    return np.linalg.eigvals(comp)


def _sweep_rows(xs: np.ndarray, ys_chunk: np.ndarray, eta: float, mu: float) -> list[RegionVerdict]:
    nx, ny = xs.size, ys_chunk.size
    X = np.tile(xs, ny)
    Y = np.repeat(ys_chunk, nx)
    r = spectral.ek_ratios_dimensionless(eta, X, Y, mu)  # (n, 4)
    rm_first = r[:, 0] <= r[:, 1]
    rM_first = r[:, 2] >= r[:, 3]
    rho_m = np.minimum(r[:, 0], r[:, 1])
    rho_M = np.maximum(r[:, 2], r[:, 3])
    conics = np.stack(_conic_values(X, Y, eta, mu), axis=-1) > 0

    branch = eta <= 1.0
    one = 1.0 - 2.0 * mu
    if branch:
        cond_a = eta < 2.0 * r[:, 0]
        cond_b = eta < 2.0 * r[:, 1]
        in_a = np.where(rm_first, cond_a, cond_b)
        semi = np.where(rM_first,
                        Y > (1.0 - eta) * X + one * eta - 1.0,
                        X > one * (1.0 - eta))

    roots = _quartic_roots_batch(eta, X, Y, mu)
    scale = np.maximum(np.abs(roots), 1e-30)
    n_real = np.sum(np.abs(roots.imag) <= _REAL_ROOT_RTOL * scale, axis=1)
    a24 = (eta * X + Y + 1.0) / one
    h = (X + one * eta) / one / 2.0
    c = a24 - 2.0 * rho_m**2
    applicable = (n_real == 0) & (c <= 0.0)
    with np.errstate(invalid="ignore"):
        b_bound = 0.5 * (-h - np.sqrt(np.maximum(h * h - c, 0.0)))

    out = []
    for i in range(X.size):
        zone = ("Z1" if rM_first[i] else "Z2") if rm_first[i] else ("Z3" if rM_first[i] else "Z4")
        refined = bool(-0.5 * eta >= b_bound[i]) if applicable[i] else None
        out.append(RegionVerdict(
            zone=zone,
            conics=tuple(bool(v) for v in conics[i]),
            cond_a=bool(cond_a[i]) if branch else None,
            cond_b=bool(cond_b[i]) if branch else None,
            in_a_set=bool(in_a[i]) if branch else None,
            semicircle=bool(semi[i]) if branch else None,
            refined=refined,
            rho_m_over_omega=float(rho_m[i]),
            rho_M_over_omega=float(rho_M[i]),
        ))
    return out


def region_map(grid: GridSpec, eta: float, mu: float, threads: int = 1) -> RegionMap:
    """Evaluate every verdict on the grid; deterministic for any thread count."""
    if not eta > 0:
        raise ParamError("eta", "must be positive")
    if not 0.0 < mu < 0.5:
        raise ParamError("mu", "must lie in (0, 1/2)")
    xs = grid.axis("x")
    ys = grid.axis("y")
    if threads <= 1 or grid.ny == 1:
        verdicts = _sweep_rows(xs, ys, eta, mu)
    else:
        chunks = np.array_split(np.arange(grid.ny), min(threads, grid.ny))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_sweep_rows, xs, ys[idx], eta, mu)
                       for idx in chunks if idx.size]
            verdicts = [v for fut in futures for v in fut.result()]
    return RegionMap(grid=grid, eta=eta, mu=mu, xs=xs, ys=ys, verdicts=verdicts)


# ---------------------------------------------------------------------------
# Empirical decay rates from nonlinear simulation
# ---------------------------------------------------------------------------


def _envelope_rate(times: np.ndarray, signal: np.ndarray, t_start: float) -> float:
    """Exponential decay rate from log-envelope peaks past t_start."""
    peaks, _ = find_peaks(np.abs(signal))
    peaks = peaks[(times[peaks] >= t_start) & (np.abs(signal[peaks]) > 1e-300)]
    if peaks.size < 5:
        raise ValueError(f"only {peaks.size} envelope peaks in the fit window; "
                         "need at least 5 (lengthen the trajectory)")
    slope, _ = np.polyfit(times[peaks], np.log(np.abs(signal[peaks])), 1)
    return float(-slope)


def empirical_decay_rates(p: PhysicalParams, y0: SystemState, t_end: float,
                          samples: int = 4001,
                          trajectory: Optional[Trajectory] = None) -> tuple[float, float]:
    """Fitted decay rates of σ and δ from a nonlinear trajectory.

    Peak amplitudes of each signal over the final 60% of the run are fit
    by least squares in log scale; identical, damped pendula required.
    A precomputed trajectory may be passed to avoid re-integration.
    """
    if not identical_pendula(p):
        raise ParamError("m2", "decay-rate fit requires identical pendula")
    if p.frictionless:
        raise ParamError("beta0", "decay-rate fit requires damping")
    traj = trajectory if trajectory is not None else integrate(
        y0, p, DampingModel.FULL_VELOCITY, t_end, samples=samples)
    t_start = 0.4 * t_end
    rate_sigma = _envelope_rate(traj.times, traj.states[:, 1], t_start)
    rate_delta = _envelope_rate(traj.times, traj.states[:, 2], t_start)
    return rate_sigma, rate_delta
