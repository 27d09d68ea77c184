"""Command-line entry point: convert, analyze, export, serve.

Option precedence is flags > config file > built-in defaults. The config
file is JSON; its path comes from --config or the MOTIONRISK_CONFIG
environment variable. Recognized config keys: body_mass_kg, scale,
cutoff_hz, filter_order, rules, bindings, segments, out_dir, port, host.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bvh import DEFAULT_SCALE, ParseError
from .motion_io import SchemaError, load_motion_file, save_motion_file
from .pipeline import SessionConfig, analyze, export_streams, run_analysis
from .risk import RuleValidationError
from .signals import FilterSpec

CONFIG_ENV_VAR = "MOTIONRISK_CONFIG"


def _load_config(path: str | None) -> dict:
    config_path = path or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        return {}
    p = Path(config_path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {p}")
    doc = json.loads(p.read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError(f"config file {p} must contain a JSON object")
    return doc


def _pick(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motionrisk", description="motion-risk analysis toolkit"
    )
    parser.add_argument("--config", "-c", help="config file (or set $MOTIONRISK_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert between motion formats")
    p.add_argument("--in", "-i", dest="input", required=True, help="input motion file")
    p.add_argument("--out", "-o", dest="output", required=True, help="output motion file")
    p.add_argument("--scale", "-s", type=float, default=None, help="meters per mocap unit")

    p = sub.add_parser("analyze", help="run the full pipeline and write reports")
    p.add_argument("--in", "-i", dest="input", required=True, help="input motion file")
    p.add_argument("--out", "-o", dest="output", default=None, help="output directory")
    p.add_argument("--mass", "-m", dest="mass", type=float, default=None, help="body mass (kg)")
    p.add_argument("--rules", "-r", default=None, help="rule-set file")
    p.add_argument("--bindings", "-b", default=None, help="binding-table file")
    p.add_argument("--segments", "-g", default=None, help="segment-table file")
    p.add_argument("--scale", "-s", type=float, default=None, help="meters per mocap unit")
    p.add_argument("--cutoff", "-f", type=float, default=None, help="filter cutoff (Hz)")
    p.add_argument("--order", type=int, default=None, help="effective filter order")

    p = sub.add_parser("export", help="compute and export the stream table only")
    p.add_argument("--in", "-i", dest="input", required=True, help="input motion file")
    p.add_argument("--out", "-o", dest="output", required=True, help="output CSV path")
    p.add_argument("--mass", "-m", dest="mass", type=float, default=None, help="body mass (kg)")
    p.add_argument("--bindings", "-b", default=None, help="binding-table file")
    p.add_argument("--segments", "-g", default=None, help="segment-table file")
    p.add_argument("--scale", "-s", type=float, default=None, help="meters per mocap unit")
    p.add_argument("--cutoff", "-f", type=float, default=None, help="filter cutoff (Hz)")
    p.add_argument("--order", type=int, default=None, help="effective filter order")

    p = sub.add_parser("serve", help="start the analysis service")
    p.add_argument("--port", "-p", type=int, default=None, help="port to bind (0 = ephemeral)")
    p.add_argument("--host", default=None, help="bind address")
    p.add_argument("--persist-dir", default=None, help="directory for analysis persistence")
    p.add_argument("--strict", action="store_true", help="reject port 0 instead of letting the OS pick")
    p.add_argument("--mass", "-m", dest="mass", type=float, default=None, help="default body mass (kg)")
    p.add_argument("--scale", "-s", type=float, default=None, help="default meters per mocap unit")

    return parser


def _filter_spec(args, config: dict) -> FilterSpec:
    order = _pick(args.order, config, "order", _pick(None, config, "filter_order", 4))
    return FilterSpec(
        cutoff_hz=float(_pick(args.cutoff, config, "cutoff_hz", 6.0)),
        order=int(order),
    )


def _cmd_convert(args, config: dict) -> int:
    scale = float(_pick(args.scale, config, "scale", DEFAULT_SCALE))
    skeleton, seq = load_motion_file(args.input, scale=scale)
    save_motion_file(skeleton, seq, args.output, scale=scale)
    print(f"wrote {args.output} ({seq.frame_count} frames, {skeleton.joint_count} joints)")
    return 0


def _cmd_analyze(args, config: dict) -> int:
    out_dir = _pick(args.output, config, "out_dir", None)
    if not out_dir:
        print("error: analyze needs --out or out_dir in the config", file=sys.stderr)
        return 2
    session = SessionConfig(
        input_path=args.input,
        out_dir=out_dir,
        body_mass_kg=float(_pick(args.mass, config, "body_mass_kg", 70.0)),
        scale=float(_pick(args.scale, config, "scale", DEFAULT_SCALE)),
        filter_spec=_filter_spec(args, config),
        rules_path=_pick(args.rules, config, "rules", None),
        bindings_path=_pick(args.bindings, config, "bindings", None),
        segments_path=_pick(args.segments, config, "segments", None),
    )
    report = analyze(session)
    totals = report.totals
    print(
        f"wrote {Path(out_dir) / 'report.json'}: {totals['incidents']} incidents, "
        f"max severity {totals['max_severity']}"
    )
    return 0


def _cmd_export(args, config: dict) -> int:
    from . import dynamics, kinematics
    from .pipeline import compute_streams

    scale = float(_pick(args.scale, config, "scale", DEFAULT_SCALE))
    skeleton, seq = load_motion_file(args.input, scale=scale)
    bindings_path = _pick(args.bindings, config, "bindings", None)
    segments_path = _pick(args.segments, config, "segments", None)
    bindings = (
        kinematics.load_binding_table(Path(bindings_path))
        if bindings_path
        else kinematics.default_bindings()
    )
    table = (
        dynamics.load_segment_table(Path(segments_path))
        if segments_path
        else dynamics.default_segment_table()
    )
    model = dynamics.segment_parameters(
        skeleton, float(_pick(args.mass, config, "body_mass_kg", 70.0)), table=table
    )
    streams = compute_streams(skeleton, seq, bindings, model, _filter_spec(args, config))
    export_streams(list(streams.values()), args.output)
    print(f"wrote {args.output} ({len(streams)} streams, {seq.frame_count} rows)")
    return 0


def _cmd_serve(args, config: dict) -> int:
    from .service import AnalysisService

    port = int(_pick(args.port, config, "port", 8600))
    host = str(_pick(args.host, config, "host", "127.0.0.1"))
    if args.strict and port == 0:
        print("error: port 0 is not allowed with --strict", file=sys.stderr)
        return 2
    if not (0 <= port <= 65535):
        print(f"error: invalid port {port}", file=sys.stderr)
        return 2
    defaults = {
        "body_mass_kg": float(_pick(args.mass, config, "body_mass_kg", 70.0)),
        "scale": float(_pick(args.scale, config, "scale", DEFAULT_SCALE)),
    }
    service = AnalysisService(
        host=host,
        port=port,
        persist_dir=_pick(args.persist_dir, config, "persist_dir", None),
        defaults=defaults,
    )
    service.start()
    print(f"serving on http://{host}:{service.port}/ (ctrl-c to stop)", flush=True)
    try:
        service.wait()
    except KeyboardInterrupt:
        print("stopping")
    finally:
        service.stop()
    return 0


_COMMANDS = {
    "convert": _cmd_convert,
    "analyze": _cmd_analyze,
    "export": _cmd_export,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except (
        ParseError,
        SchemaError,
        RuleValidationError,
        ValueError,
        KeyError,
        OSError,
    ) as e:
        detail = e if str(e) else type(e).__name__
        print(f"error: {detail}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
