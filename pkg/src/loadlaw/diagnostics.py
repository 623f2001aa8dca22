"""Blunder detectors for closed-loop load-test data.

Each detector is a pure function from measurements to an optional
Finding (or a list of them). They all rest on the same operational
identities: N = X * (R + Z) for a closed system in steady state, the
throughput ceiling 1/S_max, and the saturation response slope S_max.
When measured data violates one of these, the data is wrong somewhere;
these functions say where and by how much.

Severity levels: ``info`` findings are notes and never affect a verdict;
``warning`` marks data worth scrutiny; ``critical`` marks a violated
operational law, which no amount of benign interpretation survives.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

import numpy as np

from .ingest import LoadPoint, LoadSeries
from .model import ServiceProfile, compute_n_opt, compute_r_min, compute_x_max

BOUND_VIOLATION = "BOUND_VIOLATION"
THREAD_THROTTLING = "THREAD_THROTTLING"
THINK_TIME_VIOLATION = "THINK_TIME_VIOLATION"
RETROGRADE_THROUGHPUT = "RETROGRADE_THROUGHPUT"
RESPONSE_FLATTENING = "RESPONSE_FLATTENING"
GROWTH_CLASS = "GROWTH_CLASS"

DETECTOR_IDS = (BOUND_VIOLATION, THREAD_THROTTLING, THINK_TIME_VIOLATION,
                RETROGRADE_THROUGHPUT, RESPONSE_FLATTENING, GROWTH_CLASS)

INFO = "info"
WARNING = "warning"
CRITICAL = "critical"


@dataclass(frozen=True)
class Finding:
    """One detector verdict with its numeric evidence."""

    detector: str
    severity: str
    message: str
    evidence: dict[str, float] = field(default_factory=dict)
    affected_points: tuple[int, ...] = ()

    def __post_init__(self):
        if self.detector not in DETECTOR_IDS:
            raise ValueError(f"unknown detector {self.detector!r}")
        if self.severity not in (INFO, WARNING, CRITICAL):
            raise ValueError(f"unknown severity {self.severity!r}")


@dataclass(frozen=True)
class AuditRow:
    """Little's-law reconstruction of one load point.

    ``n_run = x_was * r_was`` is how many clients were actually inside
    the system on average; ``n_idle = n_was - n_run`` is how many of the
    configured clients were doing neither work nor declared thinking.
    """

    n_was: int
    x_was: float
    r_was: float
    n_run: float
    n_idle: float

    @classmethod
    def from_point(cls, point: LoadPoint) -> "AuditRow":
        n_run = point.x * point.r
        return cls(n_was=point.n, x_was=point.x, r_was=point.r,
                   n_run=n_run, n_idle=point.n - n_run)


@dataclass(frozen=True)
class KneeEstimate:
    """Bottleneck service time, response floor and optimal load.

    ``basis`` records provenance: "profile" when derived exactly from a
    ServiceProfile, "data" when back-estimated from the measurements
    themselves (ceiling from the largest observed throughput, floor from
    the lightest-load response time).
    """

    s_max_hat: float
    r_min_hat: float
    n_opt_hat: float
    basis: str


@dataclass(frozen=True)
class GrowthFit:
    """Fit diagnostics behind a growth classification."""

    n_points: int
    linear_slope: float | None = None
    linear_intercept: float | None = None
    linear_ss: float | None = None
    exp_rate: float | None = None
    exp_scale: float | None = None
    exp_ss: float | None = None
    note: str = ""


def audit_littles_law(series: LoadSeries) -> list[AuditRow]:
    """One AuditRow per load point, in series order; r must be seconds."""
    return [AuditRow.from_point(p) for p in series.points]


def detect_thread_throttling(rows: list[AuditRow], plateau_tol: float = 0.05,
                             span_factor: float = 1.5) -> Finding | None:
    """Flag a load generator whose running-thread count has hit a cap.

    Looks for the longest suffix of the audit whose n_run values stay
    within ``plateau_tol`` relative spread; if the offered load grows by
    at least ``span_factor`` across that suffix while n_run stands still,
    the extra configured clients exist only as idle pool threads and the
    measurements above the cap describe the harness, not the system.
    """
    if len(rows) < 3:
        return None
    # longest suffix with (max - min) / min < plateau_tol; spread can only
    # grow as the suffix extends, so scan backwards until it breaks
    mx = mn = rows[-1].n_run
    start = len(rows) - 1
    for i in range(len(rows) - 2, -1, -1):
        v = rows[i].n_run
        hi = max(mx, v)
        lo = min(mn, v)
        if lo < 0 or (lo == 0 and hi > 0):
            break
        if hi > 0 and (hi - lo) / lo >= plateau_tol:
            break
        mx, mn = hi, lo
        start = i
    plateau = rows[start:]
    if len(plateau) < 2:
        return None
    span = plateau[-1].n_was / plateau[0].n_was
    if span < span_factor:
        return None
    level = sum(r.n_run for r in plateau) / len(plateau)
    spread = (mx - mn) / mn if mn > 0 else 0.0
    return Finding(
        detector=THREAD_THROTTLING,
        severity=CRITICAL,
        message=(f"running-client count (x*r) plateaus near {level:.1f} while the configured "
                 f"load grows {span:.2g}x from {plateau[0].n_was} to {plateau[-1].n_was}; "
                 f"the remaining clients sit idle in the generator's pool, so points beyond "
                 f"the plateau measure the harness cap, not the system"),
        evidence={
            "plateau_n_run": level,
            "plateau_spread": spread,
            "n_was_span": span,
            "plateau_start_n": float(plateau[0].n_was),
        },
        affected_points=tuple(r.n_was for r in plateau),
    )


def effective_think_time(point: LoadPoint) -> float:
    """Think time implied by N = X * (R + Z): n/x - r.

    A negative result is itself a red flag: the three measurements are
    mutually inconsistent for any closed system.
    """
    if point.x <= 0:
        raise ValueError(f"effective think time undefined at zero throughput (n={point.n})")
    return point.n / point.x - point.r


def detect_think_time_violation(series: LoadSeries, rel_tol: float = 0.5) -> Finding | None:
    """Compare declared pacing against what the measurements imply.

    Uses the median of per-point implied think times (robust to the
    noisy small-n points). Only applicable when the series declares a
    positive configured think time.
    """
    z_conf = series.configured_think_time
    if z_conf is None or z_conf <= 0:
        return None
    usable = [p for p in series.points if p.x > 0]
    if not usable:
        return None
    z_effs = [effective_think_time(p) for p in usable]
    med = statistics.median(z_effs)
    deviation = abs(med - z_conf) / z_conf
    if deviation <= rel_tol:
        return None
    detail = ""
    if med < 0:
        detail = " (a negative implied think time means n, x and r are mutually inconsistent)"
    return Finding(
        detector=THINK_TIME_VIOLATION,
        severity=CRITICAL,
        message=(f"harness declares {z_conf:g} s of think time between requests but the "
                 f"measurements imply a median of {med:.3g} s{detail}; the pacing logic in "
                 f"the client scripts is not doing what it claims"),
        evidence={
            "configured_think_time": float(z_conf),
            "median_effective_think_time": float(med),
            "relative_deviation": float(deviation),
            "points_skipped_zero_x": float(len(series.points) - len(usable)),
        },
        affected_points=tuple(p.n for p in usable),
    )


def detect_bound_violation(observed_x: float, profile: ServiceProfile,
                           rel_tol: float = 0.02) -> Finding | None:
    """Check a claimed throughput against the service-time ceiling.

    Fires exactly when observed_x / x_max > 1 + rel_tol. The excess over
    the ceiling estimates how much of the claimed rate cannot be real
    completed work (failed or phantom transactions acknowledged and then
    counted as successes are the classic cause).
    """
    if observed_x < 0 or not math.isfinite(observed_x):
        raise ValueError(f"observed_x must be finite and >= 0, got {observed_x!r}")
    x_max = compute_x_max(profile)
    if observed_x <= (1.0 + rel_tol) * x_max:
        return None
    excess = observed_x - x_max
    return Finding(
        detector=BOUND_VIOLATION,
        severity=CRITICAL,
        message=(f"claimed throughput {observed_x:g}/s exceeds the ceiling {x_max:g}/s set by "
                 f"the {profile.bottleneck_label!r} stage's service time; either the throughput "
                 f"measurement is wrong or the measured service times are wrong. If the service "
                 f"times stand, roughly {excess:g}/s of the claimed rate is error or phantom "
                 f"work counted as completed transactions"),
        evidence={
            "observed_x": float(observed_x),
            "x_max": float(x_max),
            "x_errors_estimate": float(excess),
            "relative_excess": float(observed_x / x_max - 1.0),
        },
    )


def estimate_knee(series: LoadSeries, profile: ServiceProfile | None = None) -> KneeEstimate:
    """Locate the knee: exact from a profile, else back-estimated from data.

    Data basis: the ceiling is approximated by the largest observed
    throughput, the floor by the response time at the lightest load, and
    the think time by the declared pacing (zero when undeclared).
    """
    if profile is not None:
        return KneeEstimate(
            s_max_hat=profile.s_max,
            r_min_hat=compute_r_min(profile),
            n_opt_hat=compute_n_opt(profile),
            basis="profile",
        )
    if len(series.points) < 2:
        raise ValueError("need at least 2 points to estimate the knee from data")
    x_peak = max(p.x for p in series.points)
    if x_peak <= 0:
        raise ValueError("cannot estimate the knee: every point has zero throughput")
    s_max_hat = 1.0 / x_peak
    r_min_hat = series.points[0].r
    z = series.configured_think_time or 0.0
    return KneeEstimate(
        s_max_hat=s_max_hat,
        r_min_hat=r_min_hat,
        n_opt_hat=(r_min_hat + z) / s_max_hat,
        basis="data",
    )


def detect_retrograde(series: LoadSeries, rel_tol: float = 0.02) -> list[Finding]:
    """Flag points where throughput falls below its running maximum.

    Healthy closed-system throughput is nondecreasing in load; a drop
    beyond ``rel_tol`` of the best rate seen so far marks retrograde
    behavior past saturation.
    """
    findings: list[Finding] = []
    if len(series.points) < 2:
        return findings
    running_max = series.points[0].x
    for p in series.points[1:]:
        if p.x < (1.0 - rel_tol) * running_max:
            drop = 1.0 - p.x / running_max if running_max > 0 else 0.0
            findings.append(Finding(
                detector=RETROGRADE_THROUGHPUT,
                severity=WARNING,
                message=(f"throughput at n={p.n} fell {drop:.1%} below the running maximum "
                         f"{running_max:g}/s; throughput decreasing as load grows marks "
                         f"retrograde behavior beyond saturation"),
                evidence={
                    "x": float(p.x),
                    "running_max": float(running_max),
                    "drop_fraction": float(drop),
                },
                affected_points=(p.n,),
            ))
        running_max = max(running_max, p.x)
    return findings


def detect_response_flattening(series: LoadSeries, knee: KneeEstimate,
                               slope_fraction: float = 0.5) -> Finding | None:
    """Flag a post-knee response curve that climbs far too slowly.

    Past the knee a lawful response curve rises with slope ~S_max per
    added user. A least-squares slope below ``slope_fraction`` of the
    bottleneck slope means the hockey-stick handle snapped: flattened
    response above saturation signals a throttled or broken harness,
    not good scalability.
    """
    post = [p for p in series.points if p.n > knee.n_opt_hat]
    if len(post) < 2:
        return None
    ns = np.array([p.n for p in post], dtype=float)
    rs = np.array([p.r for p in post], dtype=float)
    slope = float(np.polyfit(ns, rs, 1)[0])
    expected = knee.s_max_hat
    if slope >= slope_fraction * expected:
        return None
    return Finding(
        detector=RESPONSE_FLATTENING,
        severity=CRITICAL,
        message=(f"beyond the knee (~{knee.n_opt_hat:.1f} users) response time climbs at "
                 f"{slope:.3g} s/user, far below the {expected:.3g} s/user the bottleneck "
                 f"dictates; a flattened post-saturation response curve is a signal that the "
                 f"measurements are wrong, not that the system scales well"),
        evidence={
            "observed_slope": slope,
            "bottleneck_slope": float(expected),
            "slope_ratio": float(slope / expected) if expected > 0 else 0.0,
            "n_opt_hat": float(knee.n_opt_hat),
        },
        affected_points=tuple(p.n for p in post),
    )


def classify_growth(series: LoadSeries, knee: KneeEstimate, min_points: int = 4,
                    slope_fraction: float = 0.5) -> tuple[str, GrowthFit]:
    """Classify post-knee response growth: linear, exponential, sublinear.

    Fits r = a + b*n by ordinary least squares and r = c*exp(d*n) by
    least squares on log r, then compares residual sums on the original
    scale so both families are scored on the same footing. "exponential"
    requires decisive evidence: residuals under half the linear fit's
    and a positive rate. A linear slope far below the bottleneck slope
    is "sublinear" (the flattening syndrome); anything else is the
    lawful "linear".
    """
    post = [p for p in series.points if p.n > knee.n_opt_hat]
    if len(post) < min_points:
        return "inconclusive", GrowthFit(
            n_points=len(post),
            note=f"only {len(post)} point(s) beyond the knee; need {min_points}")

    ns = np.array([p.n for p in post], dtype=float)
    rs = np.array([p.r for p in post], dtype=float)
    b, a = np.polyfit(ns, rs, 1)
    linear_ss = float(np.sum((a + b * ns - rs) ** 2))

    exp_rate = exp_scale = exp_ss = None
    note = ""
    if np.all(rs > 0):
        d, log_c = np.polyfit(ns, np.log(rs), 1)
        with np.errstate(over="ignore", invalid="ignore"):
            predicted = np.exp(log_c + d * ns)
            residual = float(np.sum((predicted - rs) ** 2))
        if math.isfinite(residual):
            exp_rate, exp_scale, exp_ss = float(d), float(math.exp(log_c)), residual
        else:
            note = "exponential fit overflowed; treated as non-exponential"
    else:
        note = "nonpositive response times; exponential fit skipped"

    fit = GrowthFit(n_points=len(post), linear_slope=float(b), linear_intercept=float(a),
                    linear_ss=linear_ss, exp_rate=exp_rate, exp_scale=exp_scale,
                    exp_ss=exp_ss, note=note)
    if exp_ss is not None and exp_rate is not None and exp_ss < 0.5 * linear_ss and exp_rate > 0:
        return "exponential", fit
    if float(b) < slope_fraction * knee.s_max_hat:
        return "sublinear", fit
    return "linear", fit
