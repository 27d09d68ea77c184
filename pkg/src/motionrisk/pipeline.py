"""End-to-end analysis pipeline and deterministic exports.

analyze() runs ingest -> anatomical angles -> smoothing -> derivatives ->
quasi-static loads -> rule evaluation, then writes the report document,
the stream table, and the incident table. Outputs are deterministic for
fixed inputs: floats are rendered with 6 significant digits, key order is
stable, and files are written atomically (temp file + rename) with
partial outputs removed on failure.

The derivative chain is angle -> smooth -> differentiate -> differentiate
with no re-smoothing between derivative orders; rules see the smoothed
angle streams. Sequences too short for the configured filter fall back to
their raw samples (and a single-frame session gets all-zero derivative
streams) so that tiny diagnostic clips still analyze.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import dynamics, kinematics, risk
from .bvh import DEFAULT_SCALE
from .motion_io import load_motion_file
from .signals import FilterSpec, differentiate, smooth
from .types import MetricStream, PoseSequence, Skeleton


@dataclass(frozen=True)
class SessionConfig:
    """Everything analyze() needs for one session."""

    input_path: str | Path
    out_dir: str | Path
    body_mass_kg: float = 70.0
    scale: float = DEFAULT_SCALE
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    rules_path: str | Path | None = None
    bindings_path: str | Path | None = None
    segments_path: str | Path | None = None
    source_label: str | None = None

    def __post_init__(self):
        if not str(self.input_path):
            raise ValueError("input path must be non-empty")
        if not str(self.out_dir):
            raise ValueError("output directory must be non-empty")
        if not (self.body_mass_kg > 0):
            raise ValueError(f"body mass must be > 0 kg, got {self.body_mass_kg}")


@dataclass(frozen=True)
class AnalysisResult:
    skeleton: Skeleton
    sequence: PoseSequence
    streams: dict[str, MetricStream]  # insertion order = export column order
    incidents: tuple[risk.Incident, ...]
    report: risk.RiskReport
    rules: tuple[risk.RiskRule, ...]


def _derivative_id(measure_id: str, order: int) -> str:
    base = measure_id[: -len("_deg")] if measure_id.endswith("_deg") else measure_id
    return f"{base}_vel" if order == 1 else f"{base}_acc"


def compute_streams(
    skeleton: Skeleton,
    seq: PoseSequence,
    bindings: Sequence[kinematics.AnatomicalBinding],
    model: dynamics.SegmentModel | None,
    filter_spec: FilterSpec,
) -> dict[str, MetricStream]:
    """All session streams keyed by measure id, in deterministic order.

    model may be None for rigs the anthropometric table does not cover;
    load streams are then omitted.
    """
    streams: dict[str, MetricStream] = {}
    can_filter = seq.frame_count >= 3 * filter_spec.order

    for binding in bindings:
        angle = kinematics.anatomical_angle_stream(skeleton, seq, binding)
        if can_filter:
            angle = smooth(angle, filter_spec)
        streams[angle.measure_id] = angle

    for binding in bindings:
        angle = streams[binding.measure_id]
        if seq.frame_count >= 2:
            vel = differentiate(angle)
            acc = differentiate(vel)
        else:
            vel = MetricStream(angle.measure_id, "deg/s", [0.0], seq.frame_rate_hz)
            acc = MetricStream(angle.measure_id, "deg/s²", [0.0], seq.frame_rate_hz)
        streams[_derivative_id(binding.measure_id, 1)] = MetricStream(
            _derivative_id(binding.measure_id, 1), vel.unit, vel.samples, seq.frame_rate_hz
        )
        streams[_derivative_id(binding.measure_id, 2)] = MetricStream(
            _derivative_id(binding.measure_id, 2), acc.unit, acc.samples, seq.frame_rate_hz
        )

    if model is not None:
        contact = dynamics.detect_contact(skeleton, seq, feet=model.table.feet)
        loads = dynamics.joint_load_stream(
            skeleton, seq, model, contact, filter_spec=filter_spec if can_filter else None
        )
        for stream in loads:
            streams[stream.measure_id] = stream
    return streams


def run_analysis(
    skeleton: Skeleton,
    seq: PoseSequence,
    *,
    source: str,
    body_mass_kg: float,
    filter_spec: FilterSpec = FilterSpec(),
    bindings: Sequence[kinematics.AnatomicalBinding] | None = None,
    rules: Sequence[risk.RiskRule] | None = None,
    segment_table: dynamics.SegmentTable | None = None,
) -> AnalysisResult:
    """Run the full in-memory pipeline for one session.

    Explicitly supplied bindings/rules/segment tables are applied strictly
    (unresolvable joints or measures are errors). The shipped defaults are
    applied leniently so that non-humanoid or truncated rigs still
    analyze: bindings whose joint is absent are skipped, dynamics is
    omitted when the anthropometric table does not fit the skeleton, and
    default rules referencing unavailable streams are skipped.
    """
    if bindings is None:
        bindings = [
            b for b in kinematics.default_bindings() if skeleton.has_joint(b.joint)
        ]
    else:
        bindings = list(bindings)

    if segment_table is None:
        default_table = dynamics.default_segment_table()
        try:
            model = dynamics.segment_parameters(skeleton, body_mass_kg, table=default_table)
        except ValueError:
            if not (body_mass_kg > 0):
                raise
            model = None
    else:
        model = dynamics.segment_parameters(skeleton, body_mass_kg, table=segment_table)

    streams = compute_streams(skeleton, seq, bindings, model, filter_spec)

    if rules is None:
        rules = [
            r
            for r in risk.default_rules()
            if all(c.measure in streams for c in r.conditions)
        ]
    else:
        rules = list(rules)

    incidents = risk.evaluate_session(streams, rules, seq.frame_rate_hz)
    session = risk.SessionInfo(
        source=source,
        frame_rate_hz=seq.frame_rate_hz,
        frame_count=seq.frame_count,
        duration_s=seq.frame_count / seq.frame_rate_hz,
        body_mass_kg=body_mass_kg,
    )
    report = risk.build_report(session, incidents)
    return AnalysisResult(
        skeleton=skeleton,
        sequence=seq,
        streams=streams,
        incidents=report.incidents,
        report=report,
        rules=tuple(rules),
    )


def analyze(config: SessionConfig) -> risk.RiskReport:
    """Run the pipeline for a config and write report + tables to out_dir.

    Writes report.json, streams.csv and incidents.csv. On any failure the
    partially written outputs are removed and the error propagates.
    """
    skeleton, seq = load_motion_file(config.input_path, scale=config.scale)
    bindings = (
        kinematics.load_binding_table(Path(config.bindings_path))
        if config.bindings_path
        else None
    )
    rules = risk.load_rule_set(Path(config.rules_path)) if config.rules_path else None
    table = (
        dynamics.load_segment_table(Path(config.segments_path))
        if config.segments_path
        else None
    )
    source = config.source_label or Path(config.input_path).name
    result = run_analysis(
        skeleton,
        seq,
        source=source,
        body_mass_kg=config.body_mass_kg,
        filter_spec=config.filter_spec,
        bindings=bindings,
        rules=rules,
        segment_table=table,
    )

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_outputs(result, out_dir)
    return result.report


def write_outputs(result: AnalysisResult, out_dir: Path) -> dict[str, Path]:
    """Atomically write report.json, streams.csv, incidents.csv."""
    targets = {
        "report": out_dir / "report.json",
        "streams": out_dir / "streams.csv",
        "incidents": out_dir / "incidents.csv",
    }
    contents = {
        "report": report_to_json(result.report),
        "streams": streams_to_csv(list(result.streams.values())),
        "incidents": incidents_to_csv(result.incidents, result.sequence.frame_rate_hz),
    }
    temps: list[Path] = []
    try:
        for key, target in targets.items():
            tmp = target.with_suffix(target.suffix + ".tmp")
            tmp.write_text(contents[key], encoding="utf-8")
            temps.append(tmp)
        for key, target in targets.items():
            os.replace(target.with_suffix(target.suffix + ".tmp"), target)
    except BaseException:
        for tmp in temps:
            tmp.unlink(missing_ok=True)
        raise
    return targets


def _sig6(value):
    """Round floats to 6 significant digits for stable serialization."""
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    if value == 0 or not math.isfinite(value):
        return value
    return float(f"{value:.6g}")


def _round_floats(obj):
    if isinstance(obj, float):
        return _sig6(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def report_to_json(report: risk.RiskReport) -> str:
    """Deterministic report document (stable key order, 6 sig digits)."""
    return json.dumps(_round_floats(report.to_dict()), indent=2) + "\n"


def streams_to_csv(streams: Sequence[MetricStream]) -> str:
    """Stream table: time column plus one "<measure_id> (unit)" column each."""
    if streams:
        n = len(streams[0])
        rate = streams[0].frame_rate_hz
        for s in streams:
            if len(s) != n or s.frame_rate_hz != rate:
                raise ValueError(f"stream {s.measure_id!r} is not aligned with the others")
    else:
        n, rate = 0, 1.0
    header = ["time_s"] + [f"{s.measure_id} ({s.unit})" for s in streams]
    lines = [",".join(header)]
    for i in range(n):
        row = [f"{i / rate:.6g}"] + [f"{s.samples[i]:.6g}" for s in streams]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def export_streams(streams: Sequence[MetricStream], path: str | Path) -> Path:
    """Write the stream table to path atomically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(streams_to_csv(streams), encoding="utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return path


def incidents_to_csv(incidents: Sequence[risk.Incident], frame_rate_hz: float) -> str:
    header = (
        "rule_id,label,region,severity,start_s,end_s,peak_s,"
        "peak_value,peak_unit,peak_measure,start_frame,end_frame,peak_frame"
    )
    lines = [header]
    for i in incidents:
        lines.append(
            ",".join(
                [
                    i.rule_id,
                    i.label,
                    i.region,
                    i.severity,
                    f"{i.start_s:.6g}",
                    f"{i.end_s:.6g}",
                    f"{i.peak_frame / frame_rate_hz:.6g}",
                    f"{i.peak_value:.6g}",
                    i.peak_unit,
                    i.peak_measure,
                    str(i.start_frame),
                    str(i.end_frame),
                    str(i.peak_frame),
                ]
            )
        )
    return "\n".join(lines) + "\n"
