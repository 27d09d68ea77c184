"""Parser and writer for the two-section hierarchical mocap text format.

The format carries a HIERARCHY section (nested joints with offsets and
channel declarations) and a MOTION section (frame count, frame time, one
whitespace-separated row of channel values per frame). The format is
unitless; offsets and root translations are multiplied by a meters-per-unit
scale on ingest (default 0.01, the common centimeter convention).

Every parse failure raises ParseError carrying the offending line number.
"""
from __future__ import annotations

import numpy as np

from . import quat
from .types import JointDef, PoseSequence, Skeleton

DEFAULT_SCALE = 0.01

_POSITION_CHANNELS = {"Xposition": 0, "Yposition": 1, "Zposition": 2}
_ROTATION_CHANNELS = {"Xrotation": "X", "Yrotation": "Y", "Zrotation": "Z"}


class ParseError(ValueError):
    """Malformed mocap input, with the 1-based line number of the fault."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _fmt(value: float) -> str:
    out = f"{value:.6f}"
    return "0.000000" if out == "-0.000000" else out


class _Cursor:
    """Token cursor over the input lines, tracking line numbers."""

    def __init__(self, text: str):
        self.tokens: list[tuple[str, int]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            for tok in line.split():
                self.tokens.append((tok, lineno))
        self.pos = 0
        self.last_line = self.tokens[-1][1] if self.tokens else 1

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def line(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return self.last_line

    def next(self, context: str) -> str:
        if self.pos >= len(self.tokens):
            raise ParseError(f"unexpected end of input while reading {context}", self.last_line)
        tok, _ = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, literal: str) -> None:
        line = self.line()
        tok = self.next(literal)
        if tok != literal:
            raise ParseError(f"expected {literal!r}, found {tok!r}", line)

    def next_float(self, context: str) -> float:
        line = self.line()
        tok = self.next(context)
        try:
            value = float(tok)
        except ValueError:
            raise ParseError(f"expected a number for {context}, found {tok!r}", line) from None
        if not np.isfinite(value):
            raise ParseError(f"non-finite value for {context}: {tok}", line)
        return value

    def next_int(self, context: str) -> int:
        line = self.line()
        tok = self.next(context)
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected an integer for {context}, found {tok!r}", line) from None


class _JointSpec:
    __slots__ = ("name", "parent", "offset", "channels", "line")

    def __init__(self, name, parent, offset, channels, line):
        self.name = name
        self.parent = parent
        self.offset = offset
        self.channels = channels  # list of channel names; empty for sites
        self.line = line


def parse_mocap_text(text: str, scale: float = DEFAULT_SCALE) -> tuple[Skeleton, PoseSequence]:
    """Parse hierarchical mocap text into (Skeleton, PoseSequence).

    Euler channel triples are converted to unit quaternions using each
    joint's declared channel order as intrinsic rotations in declaration
    order. frame_rate = 1 / frame_time; offsets and root translations are
    multiplied by scale. End Site entries become zero-channel joints named
    "<parent>_end".
    """
    if not (scale > 0):
        raise ValueError(f"scale must be > 0, got {scale}")
    cur = _Cursor(text)
    if cur.peek() is None:
        raise ParseError("empty input", 1)

    cur.expect("HIERARCHY")
    specs: list[_JointSpec] = []
    cur.expect("ROOT")
    _parse_joint(cur, specs, parent=None, is_site=False)
    if cur.peek() == "ROOT":
        raise ParseError("multiple ROOT declarations; skeleton must have exactly one root", cur.line())

    cur.expect("MOTION")
    line = cur.line()
    cur.expect("Frames:")
    declared_frames = cur.next_int("frame count")
    if declared_frames < 1:
        raise ParseError(f"frame count must be >= 1, declared {declared_frames}", line)
    line = cur.line()
    cur.expect("Frame")
    cur.expect("Time:")
    frame_time = cur.next_float("frame time")
    if frame_time <= 0:
        raise ParseError(f"frame time must be > 0, got {frame_time}", line)

    joints = tuple(
        JointDef(
            name=s.name,
            parent=s.parent,
            offset=np.asarray(s.offset) * scale,
            channel_order=_rotation_order(s.channels) or "ZXY",
            site=not s.channels,
        )
        for s in specs
    )
    skeleton = Skeleton(joints)

    channels_per_frame = sum(len(s.channels) for s in specs)
    values = _parse_motion_rows(cur, declared_frames, channels_per_frame)

    root_translation = np.zeros((declared_frames, 3))
    rotations = np.tile(quat.identity(), (declared_frames, len(specs), 1))
    col = 0
    for j, s in enumerate(specs):
        if not s.channels:
            continue
        block = values[:, col : col + len(s.channels)]
        col += len(s.channels)
        angles = np.zeros((declared_frames, 3))
        order = _rotation_order(s.channels)
        rot_k = 0
        for c, name in enumerate(s.channels):
            if name in _POSITION_CHANNELS:
                if s.parent is not None:
                    raise ParseError(
                        f"joint {s.name!r}: position channels are only supported on the root",
                        s.line,
                    )
                root_translation[:, _POSITION_CHANNELS[name]] = block[:, c]
            else:
                angles[:, rot_k] = block[:, c]
                rot_k += 1
        if order:
            rotations[:, j, :] = quat.from_euler_deg(angles, order)
    root_translation *= scale

    seq = PoseSequence(
        frame_rate_hz=1.0 / frame_time,
        root_translation=root_translation,
        rotations=rotations,
    )
    return skeleton, seq


def _parse_joint(cur: _Cursor, specs: list[_JointSpec], parent: int | None, is_site: bool) -> None:
    """Parse one joint block (name already consumed up to the keyword)."""
    decl_line = cur.line()
    if is_site:
        cur.expect("Site")
        parent_name = specs[parent].name
        name = f"{parent_name}_end"
        n = 2
        while any(s.name == name for s in specs):
            name = f"{parent_name}_end{n}"
            n += 1
    else:
        name = cur.next("joint name")
        if name == "{":
            raise ParseError("missing joint name", decl_line)
        if any(s.name == name for s in specs):
            raise ParseError(f"duplicate joint name {name!r}", decl_line)

    cur.expect("{")
    cur.expect("OFFSET")
    offset = [cur.next_float(f"offset of {name!r}") for _ in range(3)]

    channels: list[str] = []
    if cur.peek() == "CHANNELS":
        ch_line = cur.line()
        cur.next("CHANNELS")
        count = cur.next_int("channel count")
        for _ in range(count):
            ch = cur.next("channel name")
            if ch not in _POSITION_CHANNELS and ch not in _ROTATION_CHANNELS:
                raise ParseError(f"unknown channel type {ch!r}", ch_line)
            channels.append(ch)
        rot = [c for c in channels if c in _ROTATION_CHANNELS]
        pos = [c for c in channels if c in _POSITION_CHANNELS]
        if len(rot) != 3 or len(set(rot)) != 3:
            raise ParseError(
                f"joint {name!r} must declare exactly the three rotation channels, got {channels}",
                ch_line,
            )
        if pos and (len(pos) != 3 or len(set(pos)) != 3):
            raise ParseError(
                f"joint {name!r} declares a partial position channel set {pos}", ch_line
            )
        if pos and parent is not None:
            raise ParseError(
                f"joint {name!r}: position channels are only supported on the root", ch_line
            )
    elif is_site:
        pass
    else:
        raise ParseError(f"joint {name!r} is missing a CHANNELS declaration", cur.line())

    index = len(specs)
    specs.append(_JointSpec(name, parent, offset, channels, decl_line))

    while True:
        tok = cur.peek()
        if tok == "}":
            cur.next("}")
            return
        if tok == "JOINT":
            cur.next("JOINT")
            _parse_joint(cur, specs, parent=index, is_site=False)
        elif tok == "End":
            cur.next("End")
            _parse_joint(cur, specs, parent=index, is_site=True)
        elif tok is None:
            raise ParseError(f"unclosed joint block for {name!r}", cur.line())
        else:
            raise ParseError(f"unexpected token {tok!r} inside joint {name!r}", cur.line())


def _rotation_order(channels: list[str]) -> str | None:
    order = "".join(_ROTATION_CHANNELS[c] for c in channels if c in _ROTATION_CHANNELS)
    return order or None


def _parse_motion_rows(cur: _Cursor, frames: int, per_frame: int) -> np.ndarray:
    """Read the remaining tokens as one frame row per line."""
    rows: list[tuple[int, list[str]]] = []
    current_line = -1
    for tok, lineno in cur.tokens[cur.pos :]:
        if lineno != current_line:
            rows.append((lineno, []))
            current_line = lineno
        rows[-1][1].append(tok)
    cur.pos = len(cur.tokens)

    if len(rows) != frames:
        line = rows[frames][0] if len(rows) > frames else cur.last_line
        raise ParseError(
            f"motion section declares {frames} frames but contains {len(rows)} rows", line
        )

    values = np.empty((frames, per_frame))
    for r, (lineno, toks) in enumerate(rows):
        if len(toks) != per_frame:
            raise ParseError(
                f"frame row {r + 1} has {len(toks)} values, expected {per_frame} channel values",
                lineno,
            )
        for c, tok in enumerate(toks):
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(
                    f"frame row {r + 1}: expected a number, found {tok!r}", lineno
                ) from None
            if not np.isfinite(v):
                raise ParseError(f"frame row {r + 1}: non-finite value {tok}", lineno)
            values[r, c] = v
    return values


def serialize_mocap_text(skeleton: Skeleton, seq: PoseSequence, scale: float = DEFAULT_SCALE) -> str:
    """Write (Skeleton, PoseSequence) back to mocap text.

    Quaternions are converted to Euler degrees using each joint's channel
    order; offsets and translations are divided by scale. Parsing the
    result reproduces the inputs within text precision (1e-6 units).
    """
    if not (scale > 0):
        raise ValueError(f"scale must be > 0, got {scale}")
    seq.check_matches(skeleton)

    lines: list[str] = ["HIERARCHY"]
    children: dict[int, list[int]] = {i: [] for i in range(skeleton.joint_count)}
    for i, j in enumerate(skeleton.joints):
        if j.parent is not None:
            children[j.parent].append(i)

    def emit(index: int, depth: int) -> None:
        j = skeleton.joints[index]
        indent = "\t" * depth
        off = j.offset / scale
        if j.site:
            lines.append(f"{indent}End Site")
            lines.append(f"{indent}{{")
            lines.append(f"{indent}\tOFFSET {_fmt(off[0])} {_fmt(off[1])} {_fmt(off[2])}")
        else:
            kind = "ROOT" if j.parent is None else "JOINT"
            lines.append(f"{indent}{kind} {j.name}")
            lines.append(f"{indent}{{")
            lines.append(f"{indent}\tOFFSET {_fmt(off[0])} {_fmt(off[1])} {_fmt(off[2])}")
            rot = " ".join(f"{axis}rotation" for axis in j.channel_order)
            if j.parent is None:
                lines.append(f"{indent}\tCHANNELS 6 Xposition Yposition Zposition {rot}")
            else:
                lines.append(f"{indent}\tCHANNELS 3 {rot}")
            for child in children[index]:
                emit(child, depth + 1)
        lines.append(f"{indent}}}")

    emit(0, 0)

    lines.append("MOTION")
    lines.append(f"Frames: {seq.frame_count}")
    lines.append(f"Frame Time: {1.0 / seq.frame_rate_hz:.8f}")

    for f in range(seq.frame_count):
        row: list[str] = []
        trans = seq.root_translation[f] / scale
        for i, j in enumerate(skeleton.joints):
            if j.site:
                continue
            if j.parent is None:
                row.extend(_fmt(v) for v in trans)
            angles = quat.to_euler_deg(seq.rotations[f, i], j.channel_order)
            row.extend(_fmt(a) for a in angles)
        lines.append(" ".join(row))

    return "\n".join(lines) + "\n"
