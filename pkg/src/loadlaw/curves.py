"""Exact steady-state reference curves for a closed chain of stages.

``solve_reference`` produces the lawful X(N) and R(N) characteristics a
closed workload must follow when its stages behave: throughput rises
along the uncontended line, bends at the knee, and saturates at the
ceiling, while response time sits on its floor and then climbs the
hockey-stick handle with slope S_max. Measured data can be compared
against these curves point by point.

The computation is the standard exact population recursion for a
separable closed network: with all queues empty at population 0, the
residence time a newcomer sees at stage k is ``S_k * (1 + Q_k(n-1))``;
summing stages and adding the think delay gives the cycle time, so
``X(n) = n / (R(n) + Z)`` and the queues update to
``Q_k(n) = X(n) * R_k(n)``. Think time is a pure delay: users thinking
do not queue. Stage sums always accumulate in stage order so repeated
solves are bit-for-bit reproducible.

``solve_oracle`` recomputes the same stationary quantities for small
instances by brute force: it enumerates every split of the population
across the stages and the think pool and accumulates the product-form
weights directly. It shares no code path with the recursion and exists
to cross-check it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .model import ServiceProfile

# solve_oracle enumerates every population split; beyond these caps the
# state space explodes combinatorially.
ORACLE_MAX_N = 12
ORACLE_MAX_STAGES = 4

_PROFILE_Z = object()  # sentinel: as_series defaults to the profile's think time


@dataclass(frozen=True)
class CurveRow:
    """One population point: load, throughput, response, per-stage queues."""

    n: int
    x: float
    r: float
    queue_lengths: tuple[float, ...]


@dataclass(eq=False)
class CanonicalCurves:
    """Reference curves for n = 1..n_max, stored as parallel arrays.

    ``q[i, k]`` is the mean queue length (waiting plus in service) at
    stage k with population ``n[i]``. Every row satisfies
    ``x * (r + think_time) == n`` to float roundoff.
    """

    profile: ServiceProfile
    n: np.ndarray
    x: np.ndarray
    r: np.ndarray
    q: np.ndarray

    def __len__(self) -> int:
        return len(self.n)

    def row(self, n: int) -> CurveRow:
        """Row for population n (1-based, same as the load itself)."""
        if not 1 <= n <= len(self.n):
            raise IndexError(f"population {n} outside solved range 1..{len(self.n)}")
        i = n - 1
        return CurveRow(int(self.n[i]), float(self.x[i]), float(self.r[i]), tuple(float(v) for v in self.q[i]))

    def rows(self) -> Iterator[CurveRow]:
        for i in range(len(self.n)):
            yield CurveRow(int(self.n[i]), float(self.x[i]), float(self.r[i]), tuple(float(v) for v in self.q[i]))

    def write_csv(self, dest) -> None:
        """Write n,x,r plus one q_<label> column per stage.

        ``dest`` is a path or an open text file.
        """
        if hasattr(dest, "write"):
            self._write_csv(dest)
        else:
            with open(dest, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["n", "x", "r"] + [f"q_{s.label}" for s in self.profile.stages])
        for i in range(len(self.n)):
            writer.writerow([int(self.n[i]), repr(float(self.x[i])), repr(float(self.r[i]))]
                            + [repr(float(v)) for v in self.q[i]])

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self._write_csv(buf)
        return buf.getvalue()

    def as_series(self, ns=None, configured_think_time=_PROFILE_Z, source_label: str = "reference"):
        """Sample the curves into a LoadSeries, e.g. to feed the detectors.

        ``ns`` selects populations (default: every solved row).
        ``configured_think_time`` defaults to the profile's think time;
        pass something else to mimic a harness whose declared pacing does
        not match what it actually did, or None for no declared pacing.
        """
        from .ingest import LoadPoint, LoadSeries

        if configured_think_time is _PROFILE_Z:
            configured_think_time = self.profile.think_time
        if ns is None:
            ns = range(1, len(self.n) + 1)
        points = []
        for n in ns:
            row = self.row(int(n))
            points.append(LoadPoint(n=row.n, x=row.x, r=row.r))
        return LoadSeries(points=tuple(points), configured_think_time=configured_think_time,
                          source_label=source_label)


def solve_reference(profile: ServiceProfile, n_max: int) -> CanonicalCurves:
    """Solve the closed model exactly for every population 1..n_max."""
    if isinstance(n_max, bool) or not isinstance(n_max, int):
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")

    service = [s.service_time for s in profile.stages]
    z = profile.think_time
    m = len(service)

    ns = np.arange(1, n_max + 1, dtype=np.int64)
    xs = np.empty(n_max, dtype=np.float64)
    rs = np.empty(n_max, dtype=np.float64)
    qs = np.empty((n_max, m), dtype=np.float64)

    queue = [0.0] * m
    resid = [0.0] * m
    for n in range(1, n_max + 1):
        r_total = 0.0
        for k in range(m):
            v = service[k] * (1.0 + queue[k])
            resid[k] = v
            r_total += v
        x = n / (r_total + z)
        for k in range(m):
            queue[k] = x * resid[k]
        i = n - 1
        xs[i] = x
        rs[i] = r_total
        qs[i] = queue
    return CanonicalCurves(profile=profile, n=ns, x=xs, r=rs, q=qs)


def _state_weights(service, z, n):
    """Sum product-form weights over all splits of n across think pool and stages.

    Returns (G, per-stage weighted occupancy sums): G is the normalization
    constant, and dividing the k-th occupancy sum by G gives the mean
    queue length at stage k.
    """
    m = len(service)
    g = 0.0
    occupancy = [0.0] * m

    def visit(part, remaining, weight, counts):
        nonlocal g
        if part == m:
            # whatever remains sits in the think pool
            w = weight * z ** remaining / math.factorial(remaining)
            g += w
            for k in range(m):
                occupancy[k] += counts[k] * w
            return
        for here in range(remaining + 1):
            counts[part] = here
            visit(part + 1, remaining - here, weight * service[part] ** here, counts)
        counts[part] = 0

    visit(0, n, 1.0, [0] * m)
    return g, occupancy


def solve_oracle(profile: ServiceProfile, n: int) -> tuple[float, float]:
    """Brute-force steady-state (x, r) at population n for small instances.

    Independent cross-check for solve_reference: enumerates the whole
    population state space instead of recursing, computes throughput as
    the ratio of consecutive normalization constants, and recovers the
    response time from the mean stage occupancies.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if n > ORACLE_MAX_N:
        raise ValueError(f"n={n} exceeds the oracle size cap ({ORACLE_MAX_N})")
    if len(profile.stages) > ORACLE_MAX_STAGES:
        raise ValueError(
            f"{len(profile.stages)} stages exceed the oracle size cap ({ORACLE_MAX_STAGES})")

    service = [s.service_time for s in profile.stages]
    z = profile.think_time
    g_n, occupancy = _state_weights(service, z, n)
    g_prev, _ = _state_weights(service, z, n - 1)
    x = g_prev / g_n
    # mean residence per stage via the stage's mean occupancy at rate x
    r = 0.0
    for occ in occupancy:
        r += (occ / g_n) / x
    return x, r
