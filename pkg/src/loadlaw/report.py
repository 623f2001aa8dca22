"""Report assembly: run the detector suite and fold results into one verdict.

A Report carries everything a reviewer needs to audit the audit: the
derived bounds, the knee estimate, the Little's-law reconstruction, and
the findings sorted deterministically (detector id, then first affected
load point). The verdict is mechanical: ``broken`` iff any critical
finding, ``suspect`` iff any warning and no critical, ``clean``
otherwise. Info findings never affect the verdict.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from ._version import __version__
from .diagnostics import (
    CRITICAL,
    GROWTH_CLASS,
    INFO,
    RESPONSE_FLATTENING,
    THINK_TIME_VIOLATION,
    THREAD_THROTTLING,
    WARNING,
    AuditRow,
    Finding,
    KneeEstimate,
    audit_littles_law,
    classify_growth,
    detect_bound_violation,
    detect_response_flattening,
    detect_retrograde,
    detect_think_time_violation,
    detect_thread_throttling,
    estimate_knee,
)
from .ingest import LoadSeries
from .model import BoundsSummary, ServiceProfile, bounds_summary, response_lower_bound, throughput_upper_bound

VERDICT_CLEAN = "clean"
VERDICT_SUSPECT = "suspect"
VERDICT_BROKEN = "broken"


@dataclass
class DetectorConfig:
    """Tolerances for the detector suite; defaults catch the gross cases
    with margin while absorbing ordinary sampling noise."""

    bound_rel_tol: float = 0.02
    retrograde_rel_tol: float = 0.02
    plateau_tol: float = 0.05
    span_factor: float = 1.5
    think_time_rel_tol: float = 0.5
    slope_fraction: float = 0.5
    min_growth_points: int = 4


@dataclass
class Report:
    """Everything one diagnosis produced, JSON-serializable."""

    tool_version: str
    inputs: dict[str, str]
    bounds: BoundsSummary | None
    knee: KneeEstimate | None
    audit: list[AuditRow] | None
    findings: list[Finding]
    verdict: str

    def to_dict(self) -> dict:
        return {
            "version": self.tool_version,
            "inputs": dict(self.inputs),
            "bounds": _bounds_dict(self.bounds),
            "knee": asdict(self.knee) if self.knee is not None else None,
            "audit": [asdict(row) for row in self.audit] if self.audit is not None else None,
            "findings": [_finding_dict(f) for f in self.findings],
            "verdict": self.verdict,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _bounds_dict(bounds: BoundsSummary | None):
    if bounds is None:
        return None
    d = asdict(bounds)
    d["tied_labels"] = list(bounds.tied_labels)
    return d


def _finding_dict(finding: Finding) -> dict:
    return {
        "detector": finding.detector,
        "severity": finding.severity,
        "message": finding.message,
        "evidence": dict(finding.evidence),
        "affected_points": list(finding.affected_points),
    }


def verdict_for(findings: list[Finding]) -> str:
    severities = {f.severity for f in findings}
    if CRITICAL in severities:
        return VERDICT_BROKEN
    if WARNING in severities:
        return VERDICT_SUSPECT
    return VERDICT_CLEAN


def sort_findings(findings: list[Finding]) -> list[Finding]:
    """Deterministic merge order: detector id, then first affected point."""
    return sorted(findings, key=lambda f: (f.detector,
                                           f.affected_points[0] if f.affected_points else -1,
                                           f.severity, f.message))


def _note(detector: str, message: str) -> Finding:
    return Finding(detector=detector, severity=INFO, message=message)


def audit_series(series: LoadSeries, config: DetectorConfig | None = None,
                 inputs: dict[str, str] | None = None) -> Report:
    """Little's-law audit plus the two harness detectors it feeds."""
    config = config or DetectorConfig()
    rows = audit_littles_law(series)
    findings: list[Finding] = []

    if len(rows) < 3:
        findings.append(_note(THREAD_THROTTLING,
                              f"only {len(rows)} audit row(s); need 3 to assess thread throttling"))
    else:
        throttling = detect_thread_throttling(rows, plateau_tol=config.plateau_tol,
                                              span_factor=config.span_factor)
        if throttling:
            findings.append(throttling)

    findings.extend(_think_time_findings(series, config))

    findings = sort_findings(findings)
    return Report(
        tool_version=__version__,
        inputs=dict(inputs or {}),
        bounds=None,
        knee=None,
        audit=rows,
        findings=findings,
        verdict=verdict_for(findings),
    )


def _think_time_findings(series: LoadSeries, config: DetectorConfig) -> list[Finding]:
    z_conf = series.configured_think_time
    if z_conf is None or z_conf <= 0:
        return [_note(THINK_TIME_VIOLATION,
                      "no positive configured think time declared; pacing check skipped")]
    findings = []
    zero_x = [p.n for p in series.points if p.x <= 0]
    if zero_x:
        findings.append(Finding(
            detector=THINK_TIME_VIOLATION, severity=INFO,
            message=f"skipped {len(zero_x)} zero-throughput point(s) where implied think time is undefined",
            evidence={"points_skipped_zero_x": float(len(zero_x))},
            affected_points=tuple(zero_x)))
    if len(zero_x) < len(series.points):
        violation = detect_think_time_violation(series, rel_tol=config.think_time_rel_tol)
        if violation:
            findings.append(violation)
    return findings


def diagnose_series(series: LoadSeries, profile: ServiceProfile | None = None,
                    config: DetectorConfig | None = None,
                    inputs: dict[str, str] | None = None) -> Report:
    """Run every applicable detector against one load series.

    With a profile the bounds and knee are exact; without one the knee
    falls back to data-side estimates and the ceiling check is skipped
    (there is no independent ceiling to check against).
    """
    config = config or DetectorConfig()
    findings: list[Finding] = []

    bounds = bounds_summary(profile) if profile is not None else None

    knee: KneeEstimate | None = None
    try:
        knee = estimate_knee(series, profile)
    except ValueError as exc:
        findings.append(_note(RESPONSE_FLATTENING, f"knee estimate unavailable: {exc}"))

    if profile is not None:
        peak = max(p.x for p in series.points)
        bound = detect_bound_violation(peak, profile, rel_tol=config.bound_rel_tol)
        if bound:
            findings.append(bound)

    rows = audit_littles_law(series)
    if len(rows) < 3:
        findings.append(_note(THREAD_THROTTLING,
                              f"only {len(rows)} audit row(s); need 3 to assess thread throttling"))
    else:
        throttling = detect_thread_throttling(rows, plateau_tol=config.plateau_tol,
                                              span_factor=config.span_factor)
        if throttling:
            findings.append(throttling)

    findings.extend(_think_time_findings(series, config))
    findings.extend(detect_retrograde(series, rel_tol=config.retrograde_rel_tol))

    if knee is not None:
        post = [p for p in series.points if p.n > knee.n_opt_hat]
        if len(post) < 2:
            findings.append(_note(RESPONSE_FLATTENING,
                                  f"only {len(post)} point(s) beyond the knee; flattening not assessable"))
        else:
            flattening = detect_response_flattening(series, knee,
                                                    slope_fraction=config.slope_fraction)
            if flattening:
                findings.append(flattening)

        growth_class, fit = classify_growth(series, knee, min_points=config.min_growth_points,
                                            slope_fraction=config.slope_fraction)
        evidence: dict[str, float] = {"n_points": float(fit.n_points)}
        for key in ("linear_slope", "linear_ss", "exp_rate", "exp_ss"):
            value = getattr(fit, key)
            if value is not None:
                evidence[key] = float(value)
        detail = f"; {fit.note}" if fit.note else ""
        findings.append(Finding(
            detector=GROWTH_CLASS, severity=INFO,
            message=f"growth class {growth_class}: post-knee response growth{detail}",
            evidence=evidence,
            affected_points=tuple(p.n for p in post)))

    findings = sort_findings(findings)
    return Report(
        tool_version=__version__,
        inputs=dict(inputs or {}),
        bounds=bounds,
        knee=knee,
        audit=rows,
        findings=findings,
        verdict=verdict_for(findings),
    )


def plot_rows(series: LoadSeries, profile: ServiceProfile | None = None,
              knee: KneeEstimate | None = None) -> list[tuple[int, float, float, float, float]]:
    """Measured points next to their bounding lines, for external plotting.

    Returns (n, x_measured, r_measured, x_upper_bound, r_lower_bound)
    per point. Exact bounds with a profile; knee-estimate bounds
    otherwise (requires ``knee``).
    """
    rows = []
    if profile is not None:
        for p in series.points:
            rows.append((p.n, p.x, p.r,
                         throughput_upper_bound(profile, p.n),
                         response_lower_bound(profile, p.n)))
        return rows
    if knee is None:
        raise ValueError("need a profile or a knee estimate to compute bounding lines")
    z = series.configured_think_time or 0.0
    x_max_hat = 1.0 / knee.s_max_hat
    for p in series.points:
        x_bound = min(p.n / (knee.r_min_hat + z), x_max_hat)
        r_bound = max(knee.r_min_hat, p.n * knee.s_max_hat - z)
        rows.append((p.n, p.x, p.r, x_bound, r_bound))
    return rows
