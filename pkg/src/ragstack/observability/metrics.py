"""Metrics: counters, histograms, gauges with bounded label cardinality.

Metric names are namespaced rag.<module>.<name>. Excess label sets beyond
the per-metric bound are dropped and counted, never raised.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Optional

DEFAULT_LABEL_CARDINALITY = 100


def _label_key(labels: Optional[dict[str, str]]) -> tuple[tuple[str, str], ...]:
    return tuple(sorted((labels or {}).items()))


@dataclass
class _Histogram:
    count: int = 0
    total: float = 0.0
    minimum: float = float("inf")
    maximum: float = float("-inf")
    samples: list[float] = field(default_factory=list)

    def observe(self, value: float) -> None:
        self.count += 1
        self.total += value
        self.minimum = min(self.minimum, value)
        self.maximum = max(self.maximum, value)
        if len(self.samples) < 10_000:
            self.samples.append(value)


class MetricsRegistry:
    def __init__(self, max_label_sets: int = DEFAULT_LABEL_CARDINALITY):
        self.max_label_sets = max_label_sets
        self._lock = threading.Lock()
        self._counters: dict[str, dict[tuple, float]] = {}
        self._gauges: dict[str, dict[tuple, float]] = {}
        self._histograms: dict[str, dict[tuple, _Histogram]] = {}
        self.dropped_label_sets = 0

    def _slot(self, table: dict, name: str, labels, factory):
        series = table.setdefault(name, {})
        key = _label_key(labels)
        if key not in series and len(series) >= self.max_label_sets:
            self.dropped_label_sets += 1
            return None
        return series.setdefault(key, factory())

    def inc_counter(self, name: str, value: float = 1.0,
                    labels: Optional[dict[str, str]] = None) -> None:
        with self._lock:
            series = self._counters.setdefault(name, {})
            key = _label_key(labels)
            if key not in series and len(series) >= self.max_label_sets:
                self.dropped_label_sets += 1
                return
            series[key] = series.get(key, 0.0) + value

    def set_gauge(self, name: str, value: float,
                  labels: Optional[dict[str, str]] = None) -> None:
        with self._lock:
            series = self._gauges.setdefault(name, {})
            key = _label_key(labels)
            if key not in series and len(series) >= self.max_label_sets:
                self.dropped_label_sets += 1
                return
            series[key] = value

    def observe(self, name: str, value: float,
                labels: Optional[dict[str, str]] = None) -> None:
        with self._lock:
            hist = self._slot(self._histograms, name, labels, _Histogram)
            if hist is not None:
                hist.observe(value)

    def counter_value(self, name: str, labels: Optional[dict[str, str]] = None) -> float:
        return self._counters.get(name, {}).get(_label_key(labels), 0.0)

    def histogram(self, name: str, labels: Optional[dict[str, str]] = None) -> Optional[_Histogram]:
        return self._histograms.get(name, {}).get(_label_key(labels))

    def snapshot(self) -> list[dict[str, Any]]:
        now = time.time()
        points: list[dict[str, Any]] = []
        with self._lock:
            for name, series in self._counters.items():
                for key, value in series.items():
                    points.append({"name": name, "kind": "counter", "value": value,
                                   "labels": dict(key), "timestamp": now})
            for name, series in self._gauges.items():
                for key, value in series.items():
                    points.append({"name": name, "kind": "gauge", "value": value,
                                   "labels": dict(key), "timestamp": now})
            for name, series in self._histograms.items():
                for key, hist in series.items():
                    points.append({
                        "name": name, "kind": "histogram",
                        "value": {"count": hist.count, "sum": hist.total,
                                  "min": hist.minimum, "max": hist.maximum},
                        "labels": dict(key), "timestamp": now,
                    })
        return points
