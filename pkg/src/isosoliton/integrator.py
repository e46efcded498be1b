"""Event-aware adaptive integration of the slope equation.

The slope equation is integrated with an embedded Dormand-Prince 5(4) pair
under three hard behaviors that a generic ODE driver does not provide in the
form needed here:

* the step is capped by half the distance to the nearest focal level, so the
  walk can approach r = +-1 without ever evaluating the singular right-hand
  side outside (-1, 1);
* blow-up is a first-class termination, declared either when |psi| exceeds a
  threshold or when the step collapses below 1e-14 while |psi| is large and
  still growing (in double precision the threshold alone is unreachable:
  |psi| ~ 1/sqrt(pole distance), and the pole distance would have to shrink
  below one ulp), reported at the last accepted sample;
* reaching a focal level regularly is also a termination, with the profile
  derivative measured at the final sample.

Endpoint approach uses an absolute gap tolerance plus a relative rule for
runs that *start* within ``endpoint_start_window`` of a focal level: the
regular orbit into the endpoint is a separatrix, and integrating toward the
endpoint amplifies the O(epsilon) seeding error like a power of
(epsilon/gap), so a fixed absolute gap is unreachable from a coarse seed.
Covering a fixed fraction of the initial gap instead makes the measured
endpoint derivative converge linearly in epsilon, which downstream
extrapolation then cancels.

Fixed-step Euler and RK4 walks are provided as independent cross-checks;
they share nothing with the adaptive path except the right-hand side.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .catalog import SolitonParams, params_to_dict
from .phase import PhasePoint, eta, psi_rhs

REGULAR_ENDPOINT = "RegularEndpoint"
BLOWUP_PLUS = "BlowUpPlus"
BLOWUP_MINUS = "BlowUpMinus"
BUDGET_EXHAUSTED = "BudgetExhausted"

CROSSING_ZERO = "zero"
CROSSING_ETA = "eta"


@dataclass(frozen=True)
class IntegratorConfig:
    """Tunables for the adaptive walk.

    tol                    per-step local error tolerance (mixed abs/rel).
    blowup_threshold       |psi| at which blow-up is declared outright.
    max_steps              attempted-step budget per direction.
    epsilon                default focal-level offset for endpoint seeds.
    max_step               global cap on |step|; also bounds the sample
                           spacing, which crossing detection relies on.
    endpoint_tol           absolute gap at which a focal level counts as
                           reached.
    endpoint_start_window  sides whose initial gap is at most this use the
                           relative endpoint rule below.
    endpoint_cover         relative rule: stop once the remaining gap is this
                           fraction of the initial gap (99% covered).
    step_collapse          step size below which the walk is declared stuck;
                           with the graph slope above blowup_soft and |psi|
                           growing this is the blow-up exit.
    blowup_soft            slope floor for the step-collapse blow-up exit.
    max_samples            stored samples per trace (curvature-weighted
                           thinning above this).
    keep_full_resolution   bypass thinning.
    refine_blowup          add the leading-order pole-distance correction to
                           reported blow-up locations.
    """

    tol: float = 1e-10
    blowup_threshold: float = 1e8
    max_steps: int = 1_000_000
    epsilon: float = 1e-6
    max_step: float = 0.01
    endpoint_tol: float = 1e-12
    endpoint_start_window: float = 1e-3
    endpoint_cover: float = 0.01
    step_collapse: float = 1e-14
    blowup_soft: float = 1e4
    max_samples: int = 4096
    keep_full_resolution: bool = False
    refine_blowup: bool = False

    def __post_init__(self) -> None:
        for name in ("tol", "blowup_threshold", "epsilon", "max_step",
                     "endpoint_tol", "step_collapse", "blowup_soft"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_steps < 1 or self.max_samples < 2:
            raise ValueError("step and sample budgets must be positive")
        if not 0.0 < self.endpoint_cover < 1.0:
            raise ValueError(f"endpoint_cover must be in (0, 1), got {self.endpoint_cover}")


@dataclass(frozen=True)
class TerminationEvent:
    """Why a directed run stopped.

    ``endpoint_vprime`` is set only for RegularEndpoint events and holds the
    profile derivative psi/(k sqrt(1-r^2)) measured at the last accepted
    sample; ``location`` is +-1 exactly for RegularEndpoint, the last
    accepted r otherwise.
    """

    kind: str
    location: float
    endpoint_vprime: float | None = None


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    min_step: float
    max_step: float


@dataclass(frozen=True)
class Crossing:
    kind: str  # "zero" or "eta"
    r: float


@dataclass(frozen=True)
class HalfTrace:
    """Samples of one directed run, in integration order."""

    params: SolitonParams
    seed: PhasePoint
    direction: int
    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    event: TerminationEvent
    stats: StepStats


@dataclass(frozen=True)
class Trace:
    """A maximal bidirectional run, samples strictly increasing in r.

    vprime is definitionally psi/(k sqrt(1-r^2)); v is the profile recovered
    by trapezoid quadrature of vprime with gauge v = 0 at the seed.
    """

    params: SolitonParams
    seed: PhasePoint
    cfg: IntegratorConfig
    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    vprime: np.ndarray
    v: np.ndarray
    left_event: TerminationEvent
    right_event: TerminationEvent
    crossings: tuple[Crossing, ...]
    step_stats: StepStats


# Dormand-Prince 5(4) tableau.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# Error = 5th-order minus embedded 4th-order weights.
_DP_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def endpoint_vprime_limit(p: SolitonParams, which: int) -> float:
    """Profile derivative forced at a focal level by regularity.

    which = -1 gives V'(-1) =  1 / (k (k + (n-1)(1+R)));
    which = +1 gives V'(+1) = -1 / (k (k + (n-1)(1-R))).
    """
    if which == -1:
        return 1.0 / (p.k * (p.k + (p.n - 1) * (1.0 + p.R)))
    if which == 1:
        return -1.0 / (p.k * (p.k + (p.n - 1) * (1.0 - p.R)))
    raise ValueError(f"which must be -1 or +1, got {which!r}")


def endpoint_seed(p: SolitonParams, which: int, epsilon: float) -> PhasePoint:
    """Seed just inside a focal level on the regular orbit.

    Places the state at r = which * (1 - epsilon) with the slope the endpoint
    derivative law dictates to first order.  epsilon must lie in (0, 1e-4].
    """
    if not 0.0 < epsilon <= 1e-4:
        raise ValueError(f"epsilon must be in (0, 1e-4], got {epsilon}")
    vp = endpoint_vprime_limit(p, which)
    r0 = which * (1.0 - epsilon)
    psi0 = p.k * math.sqrt(1.0 - r0 * r0) * vp
    return PhasePoint(r=r0, psi=psi0)


def integrate_from(
    p: SolitonParams,
    seed: PhasePoint,
    direction: int,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> HalfTrace:
    """Run the adaptive walk from ``seed`` in one direction until an event."""
    if direction not in (-1, 1):
        raise ValueError(f"direction must be -1 or +1, got {direction!r}")

    k = p.k
    rhs: Callable[[float, float], float] = lambda r, y: psi_rhs(p, r, y)
    endpoint = float(direction)

    r, y = seed.r, seed.psi
    gap0 = abs(endpoint - r)
    relative_rule = gap0 <= cfg.endpoint_start_window
    stop_gap = max(cfg.endpoint_tol, cfg.endpoint_cover * gap0 if relative_rule else 0.0)
    # Landing exactly on the stop radius keeps the endpoint-derivative
    # measurement a smooth function of the seeding offset, which the
    # extrapolation in the endpoint-law checks relies on.
    r_stop = endpoint - direction * stop_gap

    rs = [r]
    ys = [y]
    k1 = rhs(r, y)
    ds = [k1]

    def finish(event: TerminationEvent, accepted: int, rejected: int,
               hmin: float, hmax: float) -> HalfTrace:
        stats = StepStats(accepted=accepted, rejected=rejected,
                          min_step=hmin if accepted else 0.0,
                          max_step=hmax if accepted else 0.0)
        return HalfTrace(
            params=p, seed=seed, direction=direction,
            r=np.asarray(rs), psi=np.asarray(ys), dpsi=np.asarray(ds),
            event=event, stats=stats,
        )

    def endpoint_event() -> TerminationEvent:
        vp = ys[-1] / (k * math.sqrt(1.0 - rs[-1] * rs[-1]))
        return TerminationEvent(kind=REGULAR_ENDPOINT, location=endpoint,
                                endpoint_vprime=vp)

    def blowup_event() -> TerminationEvent:
        kind = BLOWUP_PLUS if ys[-1] > 0 else BLOWUP_MINUS
        loc = rs[-1]
        if cfg.refine_blowup:
            loc = _refined_pole(p, rs[-1], ys[-1], direction)
        return TerminationEvent(kind=kind, location=loc)

    if gap0 <= cfg.endpoint_tol:
        return finish(endpoint_event(), 0, 0, 0.0, 0.0)

    accepted = 0
    rejected = 0
    hmin_seen = math.inf
    hmax_seen = 0.0
    prev_abs_y = abs(y)
    h = direction * min(cfg.max_step, 0.25 * gap0, 1e-3)

    for _attempt in range(cfg.max_steps):
        gap = abs(endpoint - r)
        hcap = min(cfg.max_step, 0.5 * gap)
        if abs(h) > hcap:
            h = direction * hcap
        if (r + h - r_stop) * direction >= 0.0:
            h = r_stop - r

        # Stages (FSAL: stage 7 is the derivative at the accepted point).
        ks = [k1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        bad = False
        for i in range(1, 7):
            yi = y
            a = _DP_A[i]
            for j in range(i):
                yi += h * a[j] * ks[j]
            if not math.isfinite(yi):
                bad = True
                break
            ks[i] = rhs(r + _DP_C[i] * h, yi)
        if bad:
            err_norm = math.inf
            y_new = math.nan
        else:
            y_new = y
            for j in range(6):
                y_new += h * _DP_A[6][j] * ks[j]
            err = 0.0
            for j in range(7):
                err += _DP_E[j] * ks[j]
            err *= h
            scale = cfg.tol * (1.0 + max(abs(y), abs(y_new) if math.isfinite(y_new) else 0.0))
            err_norm = abs(err) / scale if math.isfinite(err) else math.inf
            if not math.isfinite(y_new):
                err_norm = math.inf

        if err_norm <= 1.0:
            # Accept.  Stage 7 sits at (r+h, y_new), so it is the new
            # derivative for free (first-same-as-last pair).
            r_new = r + h
            d_new = ks[6]
            accepted += 1
            ah = abs(h)
            hmin_seen = min(hmin_seen, ah)
            hmax_seen = max(hmax_seen, ah)
            prev_abs_y = abs(y)
            r, y, k1 = r_new, y_new, d_new
            rs.append(r)
            ys.append(y)
            ds.append(k1)

            if abs(y) >= cfg.blowup_threshold:
                return finish(blowup_event(), accepted, rejected, hmin_seen, hmax_seen)
            # Slack of a few ulp of 1.0: the landed gap is |endpoint - r|
            # with r near +-1, so it carries that absolute rounding.
            if abs(endpoint - r) <= stop_gap + 1e-15:
                return finish(endpoint_event(), accepted, rejected, hmin_seen, hmax_seen)
        else:
            rejected += 1

        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        h *= factor

        if abs(h) < cfg.step_collapse:
            # Trigger on the graph slope, not on psi: a pole sitting close
            # to r = +-1 collapses the step while psi is still moderate,
            # but psi / (k sqrt(1-r^2)) is already enormous there.
            slope = abs(y) / (k * math.sqrt(max(1.0 - r * r, 1e-300)))
            if slope > cfg.blowup_soft and abs(y) >= prev_abs_y:
                return finish(blowup_event(), accepted, rejected, hmin_seen, hmax_seen)
            event = TerminationEvent(kind=BUDGET_EXHAUSTED, location=r)
            return finish(event, accepted, rejected, hmin_seen, hmax_seen)

    event = TerminationEvent(kind=BUDGET_EXHAUSTED, location=r)
    return finish(event, accepted, rejected, hmin_seen, hmax_seen)


def _refined_pole(p: SolitonParams, r: float, y: float, direction: int) -> float:
    """Leading-order pole location from the 1/sqrt blow-up asymptotics."""
    a = (p.n - 1) * (r - p.R) / (p.k * (1.0 - r * r))
    if a == 0.0 or y == 0.0:
        return r
    delta = 1.0 / (2.0 * a * y * y)
    gap = abs(direction - r)
    if delta * direction <= 0.0 or abs(delta) >= gap:
        return r
    return r + delta


def _hermite_eval(x0: float, x1: float, y0: float, y1: float,
                  d0: float, d1: float, x: float) -> float:
    """Cubic Hermite value on [x0, x1] at x."""
    h = x1 - x0
    s = (x - x0) / h
    s2 = s * s
    s3 = s2 * s
    return (
        (2 * s3 - 3 * s2 + 1) * y0
        + (s3 - 2 * s2 + s) * h * d0
        + (-2 * s3 + 3 * s2) * y1
        + (s3 - s2) * h * d1
    )


def _bisect_on(f: Callable[[float], float], lo: float, hi: float) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def _find_crossings(p: SolitonParams, r: np.ndarray, psi: np.ndarray,
                    dpsi: np.ndarray) -> tuple[Crossing, ...]:
    """Zero and guide-curve crossings of the sampled orbit.

    Segment-local cubic Hermite models refine each bracketed sign change;
    segments straddling the guide-curve pole at r = R are skipped for the
    eta scan (the sign of psi - eta flips there without a crossing).
    """
    out: list[Crossing] = []
    n = len(r)

    for i in range(n - 1):
        y0, y1 = psi[i], psi[i + 1]
        if y0 == 0.0:
            out.append(Crossing(kind=CROSSING_ZERO, r=float(r[i])))
            continue
        if y1 == 0.0:
            continue  # recorded when the next segment starts on it
        if (y0 > 0.0) != (y1 > 0.0):
            g = lambda x, i=i: _hermite_eval(r[i], r[i + 1], psi[i], psi[i + 1],
                                             dpsi[i], dpsi[i + 1], x)
            out.append(Crossing(kind=CROSSING_ZERO, r=float(_bisect_on(g, r[i], r[i + 1]))))
    if n and psi[-1] == 0.0:
        out.append(Crossing(kind=CROSSING_ZERO, r=float(r[-1])))

    R = p.R
    for i in range(n - 1):
        if r[i] <= R <= r[i + 1] or r[i] == R or r[i + 1] == R:
            continue
        s0 = psi[i] - eta(p, r[i])
        s1 = psi[i + 1] - eta(p, r[i + 1])
        if s0 == 0.0:
            out.append(Crossing(kind=CROSSING_ETA, r=float(r[i])))
            continue
        if s1 == 0.0:
            continue
        if (s0 > 0.0) != (s1 > 0.0):
            g = lambda x, i=i: (
                _hermite_eval(r[i], r[i + 1], psi[i], psi[i + 1],
                              dpsi[i], dpsi[i + 1], x) - eta(p, x)
            )
            out.append(Crossing(kind=CROSSING_ETA, r=float(_bisect_on(g, r[i], r[i + 1]))))

    out.sort(key=lambda c: c.r)
    return tuple(out)


def _thin_indices(r: np.ndarray, psi: np.ndarray, max_samples: int,
                  protected: Iterable[int]) -> np.ndarray:
    """Curvature-weighted sample selection keeping at most max_samples points.

    Importance is the local turning of the bounded graph (r, arctan psi), so
    blow-up tails do not hog the budget; protected indices are always kept.
    """
    n = len(r)
    if n <= max_samples:
        return np.arange(n)
    ang = np.arctan(psi)
    turn = np.zeros(n)
    turn[1:-1] = np.abs(np.diff(ang, 2))
    weight = turn + turn.mean() + 1e-300
    cum = np.concatenate([[0.0], np.cumsum(weight)])
    levels = np.linspace(0.0, cum[-1], max_samples)
    idx = np.searchsorted(cum, levels, side="left")
    idx = np.clip(idx, 0, n - 1)
    idx = np.union1d(idx, np.asarray(sorted(set(protected)), dtype=int))
    if len(idx) > max_samples:
        keep = np.linspace(0, len(idx) - 1, max_samples).round().astype(int)
        protected_set = set(int(i) for i in protected)
        chosen = set(int(idx[j]) for j in keep) | protected_set
        idx = np.asarray(sorted(chosen), dtype=int)
    return idx


def maximal_trace(
    p: SolitonParams,
    seed: PhasePoint,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trace:
    """Bidirectional maximal run through ``seed`` with derived columns.

    Left and right runs are merged on a strictly increasing r grid, the
    profile derivative and (by trapezoid quadrature, gauged to v = 0 at the
    seed) the profile itself are attached, and zero / guide-curve crossings
    are located on the full-resolution samples before any thinning.
    """
    left = integrate_from(p, seed, -1, cfg)
    right = integrate_from(p, seed, +1, cfg)

    r = np.concatenate([left.r[::-1][:-1], right.r])
    psi = np.concatenate([left.psi[::-1][:-1], right.psi])
    dpsi = np.concatenate([left.dpsi[::-1][:-1], right.dpsi])
    seed_idx = len(left.r) - 1

    sq = np.sqrt(1.0 - r * r)
    vprime = psi / (p.k * sq)
    # Trapezoid with the Hermite endpoint correction h^2/12 (f'_0 - f'_1);
    # the derivative of vprime comes for free from the stored slope
    # derivatives, and the correction buys two orders in the sample spacing.
    dvprime = dpsi / (p.k * sq) + psi * r / (p.k * sq**3)
    h_i = np.diff(r)
    dv = 0.5 * (vprime[1:] + vprime[:-1]) * h_i \
        - h_i * h_i / 12.0 * (dvprime[1:] - dvprime[:-1])
    v = np.concatenate([[0.0], np.cumsum(dv)])
    v -= v[seed_idx]

    crossings = _find_crossings(p, r, psi, dpsi)

    if not cfg.keep_full_resolution and len(r) > cfg.max_samples:
        idx = _thin_indices(r, psi, cfg.max_samples, protected=[0, seed_idx, len(r) - 1])
        r, psi, dpsi, vprime, v = r[idx], psi[idx], dpsi[idx], vprime[idx], v[idx]

    stats = StepStats(
        accepted=left.stats.accepted + right.stats.accepted,
        rejected=left.stats.rejected + right.stats.rejected,
        min_step=min(s for s in (left.stats.min_step, right.stats.min_step) if s > 0.0)
        if (left.stats.min_step > 0.0 or right.stats.min_step > 0.0) else 0.0,
        max_step=max(left.stats.max_step, right.stats.max_step),
    )
    return Trace(
        params=p, seed=seed, cfg=cfg,
        r=r, psi=psi, dpsi=dpsi, vprime=vprime, v=v,
        left_event=left.event, right_event=right.event,
        crossings=crossings, step_stats=stats,
    )


def psi_interpolant(trace: Trace) -> CubicHermiteSpline:
    """Dense C^1 evaluation of psi over the trace's r span."""
    return CubicHermiteSpline(trace.r, trace.psi, trace.dpsi)


def psi_at(trace: Trace, r: float) -> float:
    """Dense-output value of psi at an interior point of the trace span."""
    if not trace.r[0] <= r <= trace.r[-1]:
        raise ValueError(f"r={r} outside trace span [{trace.r[0]}, {trace.r[-1]}]")
    return float(psi_interpolant(trace)(r))


def trace_deviation(a: Trace, b: Trace, window: tuple[float, float], npts: int = 1001) -> float:
    """Max |psi_a - psi_b| on a shared window, by dense evaluation."""
    lo, hi = window
    for t in (a, b):
        if not (t.r[0] <= lo and hi <= t.r[-1]):
            raise ValueError(f"window {window} outside trace span [{t.r[0]}, {t.r[-1]}]")
    grid = np.linspace(lo, hi, npts)
    return float(np.max(np.abs(psi_interpolant(a)(grid) - psi_interpolant(b)(grid))))


def euler_walk(p: SolitonParams, seed: PhasePoint, r_stop: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step explicit Euler from the seed to r_stop (sign of travel from
    the ordering of seed.r and r_stop).  Oracle-grade: shares only the RHS
    with the adaptive path."""
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    direction = 1.0 if r_stop >= seed.r else -1.0
    n_steps = int(abs(r_stop - seed.r) / h)
    k, n, R = p.k, p.n, p.R
    r, y = seed.r, seed.psi
    rs = [r]
    ys = [y]
    sqrt = math.sqrt
    step = direction * h
    for _ in range(n_steps):
        one_minus_r2 = 1.0 - r * r
        drift = (n - 1) * (r - R) * y + sqrt(one_minus_r2)
        y += step * (y * y + 1.0) * drift / (k * one_minus_r2)
        r += step
        rs.append(r)
        ys.append(y)
    return np.asarray(rs), np.asarray(ys)


def rk4_walk(p: SolitonParams, seed: PhasePoint, r_stop: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step classical RK4 companion to :func:`euler_walk`."""
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    direction = 1.0 if r_stop >= seed.r else -1.0
    n_steps = int(abs(r_stop - seed.r) / h)
    r, y = seed.r, seed.psi
    rs = [r]
    ys = [y]
    step = direction * h
    for _ in range(n_steps):
        k1 = psi_rhs(p, r, y)
        k2 = psi_rhs(p, r + 0.5 * step, y + 0.5 * step * k1)
        k3 = psi_rhs(p, r + 0.5 * step, y + 0.5 * step * k2)
        k4 = psi_rhs(p, r + step, y + step * k3)
        y += step * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        r += step
        rs.append(r)
        ys.append(y)
    return np.asarray(rs), np.asarray(ys)


@dataclass(frozen=True)
class SelfConvergenceReport:
    window: tuple[float, float]
    euler_h: float
    rk4_h: float
    max_dev_euler: float
    max_dev_rk4: float
    euler_steps: int
    rk4_steps: int


def self_convergence(
    p: SolitonParams,
    seed: PhasePoint,
    cfg: IntegratorConfig = IntegratorConfig(),
    window: tuple[float, float] | None = None,
    euler_h: float = 1e-6,
    rk4_h: float = 1e-4,
) -> SelfConvergenceReport:
    """Deviation of the adaptive run from fixed-step oracles on a window.

    The window must contain the seed (both oracles walk outward from it); by
    default it is the largest sampled interval around the seed where
    |psi| <= 10.  A degenerate window yields zero deviation by construction.
    """
    full_cfg = dataclasses.replace(cfg, keep_full_resolution=True)
    trace = maximal_trace(p, seed, full_cfg)
    if window is None:
        window = _auto_window(trace, seed)
    lo, hi = window
    if not (lo <= seed.r <= hi):
        raise ValueError(f"window {window} must contain the seed r={seed.r}")
    if not (trace.r[0] <= lo and hi <= trace.r[-1]):
        raise ValueError(f"window {window} outside trace span")

    spline = psi_interpolant(trace)

    def walk_dev(walker, h: float) -> tuple[float, int]:
        dev = 0.0
        steps = 0
        for stop in (lo, hi):
            if abs(stop - seed.r) < h:
                continue
            rs, ys = walker(p, seed, stop, h)
            steps += len(rs) - 1
            dev = max(dev, float(np.max(np.abs(ys - spline(rs)))))
        return dev, steps

    dev_e, n_e = walk_dev(euler_walk, euler_h)
    dev_r, n_r = walk_dev(rk4_walk, rk4_h)
    return SelfConvergenceReport(
        window=(lo, hi), euler_h=euler_h, rk4_h=rk4_h,
        max_dev_euler=dev_e, max_dev_rk4=dev_r,
        euler_steps=n_e, rk4_steps=n_r,
    )


def _auto_window(trace: Trace, seed: PhasePoint) -> tuple[float, float]:
    mask = np.abs(trace.psi) <= 10.0
    idx = int(np.searchsorted(trace.r, seed.r))
    idx = min(max(idx, 0), len(trace.r) - 1)
    if not mask[idx]:
        return (seed.r, seed.r)
    lo = idx
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    hi = idx
    while hi < len(mask) - 1 and mask[hi + 1]:
        hi += 1
    return (float(trace.r[lo]), float(trace.r[hi]))


def endpoint_vprime_extrapolated(
    p: SolitonParams,
    which: int,
    cfg: IntegratorConfig | None = None,
    epsilons: Sequence[float] = (1e-5, 1e-6, 1e-7),
) -> float:
    """Endpoint derivative measured by seeding at several offsets and
    extrapolating to offset zero.

    Each run covers the short side from the endpoint seed to the stop radius;
    the measured derivatives converge linearly in the offset, so polynomial
    extrapolation through (epsilon_i, measurement_i) at epsilon = 0 (Neville)
    removes the offset error.  The default config tightens tol to 1e-12: the
    measurement divides psi by sqrt(1 - r^2) ~ sqrt(epsilon), so the
    integration error is magnified as the offsets shrink.
    """
    if cfg is None:
        cfg = IntegratorConfig(tol=1e-12)
    if len(epsilons) < 2:
        raise ValueError("need at least two offsets to extrapolate")
    xs = list(epsilons)
    ys = []
    for eps in xs:
        seed = endpoint_seed(p, which, eps)
        half = integrate_from(p, seed, which, cfg)
        if half.event.kind != REGULAR_ENDPOINT:
            raise RuntimeError(
                f"endpoint run at epsilon={eps} terminated with {half.event.kind}"
            )
        ys.append(half.event.endpoint_vprime)
    # Neville tableau evaluated at 0.
    tab = list(ys)
    m = len(xs)
    for level in range(1, m):
        for i in range(m - level):
            tab[i] = (xs[i + level] * tab[i] - xs[i] * tab[i + 1]) / (xs[i + level] - xs[i])
    return tab[0]


def event_to_dict(e: TerminationEvent) -> dict:
    d = {"kind": e.kind, "location": e.location}
    if e.endpoint_vprime is not None:
        d["endpoint_vprime"] = e.endpoint_vprime
    return d


def trace_to_csv(trace: Trace, stream) -> None:
    """Write the sample table as CSV with 17 significant digits."""
    stream.write("r,psi,vprime,v\n")
    for i in range(len(trace.r)):
        stream.write(
            f"{trace.r[i]:.17g},{trace.psi[i]:.17g},"
            f"{trace.vprime[i]:.17g},{trace.v[i]:.17g}\n"
        )


def trace_to_json(trace: Trace) -> dict:
    """Run envelope: parameters, seed, config, events, crossings, stats."""
    return {
        "params": params_to_dict(trace.params),
        "seed": {"r": trace.seed.r, "psi": trace.seed.psi},
        "cfg": dataclasses.asdict(trace.cfg),
        "events": {
            "left": event_to_dict(trace.left_event),
            "right": event_to_dict(trace.right_event),
        },
        "crossings": [{"kind": c.kind, "r": c.r} for c in trace.crossings],
        "step_stats": dataclasses.asdict(trace.step_stats),
        "n_samples": int(len(trace.r)),
        "r_span": [float(trace.r[0]), float(trace.r[-1])],
    }
