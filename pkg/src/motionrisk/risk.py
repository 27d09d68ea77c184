"""Declarative risk rules over metric streams.

A rule is an AND of threshold conditions on named streams. Evaluation
yields a per-frame mask; incident segmentation keeps maximal true runs at
least min_duration_s long and bridges runs separated by less than
merge_gap_s (bridged gaps stay on the incident record). Severity grades
the peak's fractional margin beyond the violated threshold: low <= 0.10,
medium <= 0.25, high above.

The shipped default rule set uses the literature-derived thresholds:
Achilles overload at dorsiflexion beyond 40 deg with knee flexion in a
15-30 deg band around 22.5 deg; eccentric Achilles loading at
plantarflexion beyond -30 deg under fast ankle rotation; ACL valgus
collapse for knee flexion in 30-90 deg with abduction and internal
rotation beyond 25/20 deg; and ankle load above 3.6 body weights.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .types import MetricStream

REGIONS = ("ankle_l", "ankle_r", "knee_l", "knee_r", "hip_l", "hip_r", "trunk")
SEVERITIES = ("low", "medium", "high")
COMPARATORS = ("gt", "lt", "in_range", "out_of_range")

#: stress-score weights per severity and the session normalizer
SEVERITY_WEIGHTS = {"low": 0.2, "medium": 0.5, "high": 1.0}
STRESS_NORMALIZER = 2.0

DEFAULT_MIN_DURATION_S = 0.05
DEFAULT_MERGE_GAP_S = 0.2


class RuleValidationError(ValueError):
    """Invalid rule-set document; message carries the positional path."""


@dataclass(frozen=True)
class Condition:
    measure: str
    comparator: str
    threshold: float | None = None
    low: float | None = None
    high: float | None = None
    unit: str | None = None

    def violation_margin(self, values: np.ndarray) -> np.ndarray:
        """Signed margin beyond the threshold; positive where violated."""
        if self.comparator == "gt":
            return values - self.threshold
        if self.comparator == "lt":
            return self.threshold - values
        if self.comparator == "in_range":
            return np.minimum(values - self.low, self.high - values)
        return np.maximum(self.low - values, values - self.high)

    def severity_margin(self, peak: float) -> float:
        """Fractional margin used for severity grading."""
        if self.comparator == "in_range":
            depth = min(peak - self.low, self.high - peak)
            return max(0.0, depth) / (self.high - self.low)
        if self.comparator == "gt":
            reference = self.threshold
        elif self.comparator == "lt":
            reference = self.threshold
        else:  # out_of_range: nearest violated bound
            reference = self.low if (self.low - peak) > (peak - self.high) else self.high
        excess = abs(peak - reference)
        if reference == 0.0:
            return float("inf") if excess > 0 else 0.0
        return excess / abs(reference)


@dataclass(frozen=True)
class RiskRule:
    id: str
    region: str
    label: str
    conditions: tuple[Condition, ...]
    primary: int = 0
    min_duration_s: float = DEFAULT_MIN_DURATION_S
    merge_gap_s: float = DEFAULT_MERGE_GAP_S
    severity_low: float = 0.10
    severity_medium: float = 0.25

    @property
    def primary_condition(self) -> Condition:
        return self.conditions[self.primary]


@dataclass(frozen=True)
class Incident:
    rule_id: str
    label: str
    region: str
    start_frame: int
    end_frame: int  # inclusive
    peak_frame: int
    peak_value: float
    peak_unit: str
    peak_measure: str
    severity: str
    start_s: float
    end_s: float
    bridged_gaps: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "label": self.label,
            "region": self.region,
            "start_frame": self.start_frame,
            "end_frame": self.end_frame,
            "peak_frame": self.peak_frame,
            "peak_value": self.peak_value,
            "peak_unit": self.peak_unit,
            "peak_measure": self.peak_measure,
            "severity": self.severity,
            "start_s": self.start_s,
            "end_s": self.end_s,
            "bridged_gaps": [list(g) for g in self.bridged_gaps],
        }


@dataclass(frozen=True)
class SessionInfo:
    source: str
    frame_rate_hz: float
    frame_count: int
    duration_s: float
    body_mass_kg: float


@dataclass(frozen=True)
class RiskReport:
    session: SessionInfo
    incidents: tuple[Incident, ...]
    distribution: Mapping[str, Mapping[str, int]]
    stress_scores: Mapping[str, float]
    totals: Mapping[str, object]

    def to_dict(self) -> dict:
        return {
            "session": {
                "source": self.session.source,
                "frame_rate_hz": self.session.frame_rate_hz,
                "frame_count": self.session.frame_count,
                "duration_s": self.session.duration_s,
                "body_mass_kg": self.session.body_mass_kg,
            },
            "incidents": [i.to_dict() for i in self.incidents],
            "distribution": {r: dict(v) for r, v in self.distribution.items()},
            "stress_scores": dict(self.stress_scores),
            "totals": dict(self.totals),
        }


def _fail(path: str, message: str) -> None:
    raise RuleValidationError(f"{path}: {message}")


def _parse_condition(doc, path: str) -> Condition:
    if not isinstance(doc, dict):
        _fail(path, "expected an object")
    measure = doc.get("measure")
    if not isinstance(measure, str) or not measure:
        _fail(f"{path}.measure", "missing or empty")
    comparator = doc.get("comparator")
    if comparator not in COMPARATORS:
        _fail(f"{path}.comparator", f"must be one of {COMPARATORS}, got {comparator!r}")
    unit = doc.get("unit")
    if unit is not None and not isinstance(unit, str):
        _fail(f"{path}.unit", "must be a string")

    def _num(key):
        v = doc.get(key)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
            _fail(f"{path}.{key}", "must be a finite number")
        return float(v)

    if comparator in ("gt", "lt"):
        return Condition(measure, comparator, threshold=_num("threshold"), unit=unit)
    low, high = _num("low"), _num("high")
    if not (low < high):
        _fail(f"{path}.low", f"low ({low}) must be below high ({high})")
    return Condition(measure, comparator, low=low, high=high, unit=unit)


def parse_rule(doc, path: str = "rule") -> RiskRule:
    if not isinstance(doc, dict):
        _fail(path, "expected an object")
    rule_id = doc.get("id")
    if not isinstance(rule_id, str) or not rule_id:
        _fail(f"{path}.id", "missing or empty")
    region = doc.get("region")
    if region not in REGIONS:
        _fail(f"{path}.region", f"must be one of {REGIONS}, got {region!r}")
    label = doc.get("label", rule_id)
    conds_doc = doc.get("conditions")
    if not isinstance(conds_doc, list) or not conds_doc:
        _fail(f"{path}.conditions", "must be a non-empty array")
    conditions = tuple(
        _parse_condition(c, f"{path}.conditions[{i}]") for i, c in enumerate(conds_doc)
    )
    primary = doc.get("primary", 0)
    if not isinstance(primary, int) or not (0 <= primary < len(conditions)):
        _fail(f"{path}.primary", f"must index a condition (0..{len(conditions) - 1})")
    min_duration = float(doc.get("min_duration_s", DEFAULT_MIN_DURATION_S))
    merge_gap = float(doc.get("merge_gap_s", DEFAULT_MERGE_GAP_S))
    if min_duration < 0 or not np.isfinite(min_duration):
        _fail(f"{path}.min_duration_s", "must be >= 0")
    if merge_gap < 0 or not np.isfinite(merge_gap):
        _fail(f"{path}.merge_gap_s", "must be >= 0")
    return RiskRule(
        id=rule_id,
        region=region,
        label=label,
        conditions=conditions,
        primary=primary,
        min_duration_s=min_duration,
        merge_gap_s=merge_gap,
        severity_low=float(doc.get("severity_low", 0.10)),
        severity_medium=float(doc.get("severity_medium", 0.25)),
    )


def load_rule_set(source: str | Path | Mapping) -> list[RiskRule]:
    """Load rules from a JSON file path, JSON text, or mapping.

    Validation failures raise RuleValidationError with a positional path
    such as "rules[2].conditions[0].threshold".
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        s = str(source)
        if s.lstrip().startswith("{"):
            text = s
        else:
            text = Path(source).read_text(encoding="utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise RuleValidationError(f"rule set: not valid JSON ({e})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("rules"), list):
        raise RuleValidationError('rule set: expected an object with a "rules" array')
    rules = [parse_rule(r, f"rules[{i}]") for i, r in enumerate(doc["rules"])]
    if not rules:
        raise RuleValidationError("rules: array is empty")
    ids = [r.id for r in rules]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise RuleValidationError(f"rules: duplicate rule ids {dupes}")
    return rules


def default_rules() -> list[RiskRule]:
    text = resources.files("motionrisk.data").joinpath("rules_default.json").read_text()
    return load_rule_set(json.loads(text))


def condition_to_dict(cond: Condition) -> dict:
    doc: dict = {"measure": cond.measure, "comparator": cond.comparator}
    if cond.comparator in ("gt", "lt"):
        doc["threshold"] = cond.threshold
    else:
        doc["low"] = cond.low
        doc["high"] = cond.high
    if cond.unit is not None:
        doc["unit"] = cond.unit
    return doc


def rules_to_doc(rules: Sequence[RiskRule]) -> dict:
    """Serialize rules back to the rule-set file schema."""
    return {
        "rules": [
            {
                "id": r.id,
                "label": r.label,
                "region": r.region,
                "conditions": [condition_to_dict(c) for c in r.conditions],
                "primary": r.primary,
                "min_duration_s": r.min_duration_s,
                "merge_gap_s": r.merge_gap_s,
                "severity_low": r.severity_low,
                "severity_medium": r.severity_medium,
            }
            for r in rules
        ]
    }


def evaluate_rule(streams: Mapping[str, MetricStream], rule: RiskRule) -> np.ndarray:
    """AND of all rule conditions per frame."""
    mask: np.ndarray | None = None
    length = None
    for cond in rule.conditions:
        stream = streams.get(cond.measure)
        if stream is None:
            raise KeyError(f"rule {rule.id!r}: no stream for measure {cond.measure!r}")
        if cond.unit is not None and cond.unit != stream.unit:
            raise ValueError(
                f"rule {rule.id!r}: condition on {cond.measure!r} expects unit "
                f"{cond.unit!r} but the stream is {stream.unit!r}"
            )
        if length is None:
            length = len(stream)
        elif len(stream) != length:
            raise ValueError(f"rule {rule.id!r}: streams are not aligned")
        cond_mask = cond.violation_margin(stream.samples) > 0
        mask = cond_mask if mask is None else (mask & cond_mask)
    return mask


def _true_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal [start, end] (inclusive) runs of True."""
    runs = []
    start = None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def detect_incidents(
    mask: np.ndarray,
    rule: RiskRule,
    streams: Mapping[str, MetricStream],
    frame_rate_hz: float,
) -> list[Incident]:
    """Segment a rule mask into graded incidents.

    Runs shorter than min_duration_s (frame count / rate) are discarded,
    then surviving runs separated by gaps shorter than merge_gap_s are
    merged; the bridged gap spans are recorded. The peak frame maximizes
    the primary condition's violation margin over rule-true frames
    (earliest frame on ties).
    """
    if frame_rate_hz <= 0:
        raise ValueError(f"frame rate must be > 0, got {frame_rate_hz}")
    mask = np.asarray(mask, dtype=bool)
    runs = [
        r for r in _true_runs(mask) if (r[1] - r[0] + 1) / frame_rate_hz >= rule.min_duration_s
    ]
    if not runs:
        return []

    groups: list[list[tuple[int, int]]] = [[runs[0]]]
    for run in runs[1:]:
        gap = run[0] - groups[-1][-1][1] - 1
        if gap / frame_rate_hz < rule.merge_gap_s:
            groups[-1].append(run)
        else:
            groups.append([run])

    primary = rule.primary_condition
    stream = streams[primary.measure]
    margins = primary.violation_margin(stream.samples)

    incidents = []
    for group in groups:
        start, end = group[0][0], group[-1][1]
        gaps = tuple(
            (a[1] + 1, b[0] - 1) for a, b in zip(group, group[1:])
        )
        span = np.arange(start, end + 1)
        valid = span[mask[start : end + 1]]
        peak_frame = int(valid[np.argmax(margins[valid])])
        peak_value = float(stream.samples[peak_frame])
        incidents.append(
            Incident(
                rule_id=rule.id,
                label=rule.label,
                region=rule.region,
                start_frame=int(start),
                end_frame=int(end),
                peak_frame=peak_frame,
                peak_value=peak_value,
                peak_unit=stream.unit,
                peak_measure=primary.measure,
                severity=grade_severity(peak_value, rule),
                start_s=start / frame_rate_hz,
                end_s=(end + 1) / frame_rate_hz,
                bridged_gaps=gaps,
            )
        )
    return incidents


def grade_severity(peak_value: float, rule: RiskRule) -> str:
    """Map a peak value to low/medium/high by fractional threshold margin."""
    margin = rule.primary_condition.severity_margin(peak_value)
    if margin <= rule.severity_low:
        return "low"
    if margin <= rule.severity_medium:
        return "medium"
    return "high"


def aggregate(
    incidents: Sequence[Incident], regions: Sequence[str] = REGIONS
) -> tuple[dict[str, dict[str, int]], dict[str, float]]:
    """Severity histogram and capped stress score per body region."""
    histogram = {r: {s: 0 for s in SEVERITIES} for r in regions}
    for inc in incidents:
        histogram[inc.region][inc.severity] += 1
    scores = {}
    for region in regions:
        weight = sum(
            SEVERITY_WEIGHTS[s] * n for s, n in histogram[region].items()
        )
        scores[region] = min(1.0, weight / STRESS_NORMALIZER)
    return histogram, scores


def build_report(
    session: SessionInfo,
    incidents: Sequence[Incident],
    regions: Sequence[str] = REGIONS,
) -> RiskReport:
    """Deterministic session report; incidents sorted by start then region."""
    ordered = tuple(sorted(incidents, key=lambda i: (i.start_frame, i.region, i.rule_id)))
    histogram, scores = aggregate(ordered, regions)
    by_severity = {s: sum(1 for i in ordered if i.severity == s) for s in SEVERITIES}
    max_severity = "none"
    for s in reversed(SEVERITIES):
        if by_severity[s] > 0:
            max_severity = s
            break
    totals = {
        "incidents": len(ordered),
        "by_severity": by_severity,
        "max_severity": max_severity,
    }
    return RiskReport(
        session=session,
        incidents=ordered,
        distribution=histogram,
        stress_scores=scores,
        totals=totals,
    )


def evaluate_session(
    streams: Mapping[str, MetricStream],
    rules: Sequence[RiskRule],
    frame_rate_hz: float,
) -> list[Incident]:
    """Evaluate every rule and collect all incidents."""
    incidents: list[Incident] = []
    for rule in rules:
        mask = evaluate_rule(streams, rule)
        incidents.extend(detect_incidents(mask, rule, streams, frame_rate_hz))
    return incidents
