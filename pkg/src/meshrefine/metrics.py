"""Throughput, throughput ratio and Jain fairness, in exact rationals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .scheduler import TrafficStats


class UndefinedMetric(ValueError):
    """The requested quantity is undefined for this input (e.g. division by zero)."""


@dataclass(frozen=True)
class ThroughputReport:
    packets_per_slot: Fraction
    packets_per_second: Fraction
    sigma: Fraction | None
    theta: Fraction


def throughput(stats: TrafficStats) -> Fraction:
    """Delivered packets per measured slot."""
    if stats.measured_slots <= 0:
        raise UndefinedMetric("throughput needs measured_slots > 0")
    return Fraction(sum(stats.per_path.values()), stats.measured_slots)


def per_second(per_slot: Fraction, slot_seconds: float) -> Fraction:
    return per_slot / Fraction(slot_seconds).limit_denominator(10**9)


def sigma(refined, original) -> Fraction:
    """Ratio of refined throughput to original throughput."""
    original = Fraction(original)
    if original == 0:
        raise UndefinedMetric("sigma undefined: original throughput is 0")
    return Fraction(refined) / original


def jain(x: Iterable) -> Fraction:
    """Jain's index (sum x)^2 / (m * sum x^2) over non-negative counts."""
    xs = [Fraction(v) for v in x]
    if not xs:
        raise UndefinedMetric("fairness of an empty list")
    if any(v < 0 for v in xs):
        raise ValueError("fairness inputs must be non-negative")
    sq = sum(v * v for v in xs)
    if sq == 0:
        raise UndefinedMetric("fairness undefined when every count is 0")
    return sum(xs) ** 2 / (len(xs) * sq)


def fairness_paths(x: Sequence) -> Fraction:
    """Jain's index over per-path delivered counts; idle paths count as 0."""
    return jain(x)


def fairness_od(x: Sequence) -> Fraction:
    """Jain's index over per origin-destination totals."""
    return jain(x)


def zero_traffic_pairs(stats: TrafficStats) -> int:
    return sum(1 for v in stats.per_od.values() if v == 0)


def report(refined: TrafficStats | None, original: TrafficStats, n: int,
           slot_seconds: float) -> ThroughputReport:
    base = throughput(original)
    tp = throughput(refined) if refined is not None else base
    sig = sigma(tp, base) if refined is not None and base > 0 else None
    theta = Fraction(len(original.per_od), n)
    if not 0 < theta <= 1:
        raise ValueError(f"pair density {theta} outside (0, 1]")
    return ThroughputReport(tp, per_second(tp, slot_seconds), sig, theta)


def mean_ci(values: Sequence[float], z: float = 1.96) -> tuple[float, float]:
    """Mean and half-width of a normal-approximation confidence interval."""
    if not values:
        raise UndefinedMetric("mean of no values")
    m = math.fsum(values) / len(values)
    if len(values) < 2:
        return m, float("nan")
    var = math.fsum((v - m) ** 2 for v in values) / (len(values) - 1)
    return m, z * math.sqrt(var / len(values))
