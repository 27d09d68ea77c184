"""Motion-risk analysis toolkit.

Ingests 3D human pose sequences (hierarchical mocap text or the pose
interchange format), computes biomechanical streams (anatomical joint
angles, angular velocity/acceleration, quasi-static joint loads),
evaluates literature-derived injury-risk rules, and segments incidents
into deterministic session reports served over a CLI and a small HTTP
service.
"""

from .types import (
    GlobalPose,
    JointDef,
    MetricStream,
    PoseSequence,
    Skeleton,
)
from .motion_io import (
    ParseError,
    SchemaError,
    load_motion_file,
    parse_mocap_text,
    parse_pose_interchange,
    resample,
    save_motion_file,
    serialize_mocap_text,
    write_pose_interchange,
)
from .kinematics import (
    AnatomicalBinding,
    anatomical_angle_stream,
    default_bindings,
    extract_all_streams,
    forward_kinematics,
    forward_kinematics_sequence,
    load_binding_table,
    to_euler,
)
from .signals import FilterSpec, differentiate, smooth
from .dynamics import (
    ContactState,
    SegmentModel,
    SegmentTable,
    default_segment_table,
    detect_contact,
    joint_load_stream,
    load_segment_table,
    segment_parameters,
)
from .risk import (
    Condition,
    Incident,
    RiskReport,
    RiskRule,
    RuleValidationError,
    SessionInfo,
    aggregate,
    build_report,
    default_rules,
    detect_incidents,
    evaluate_rule,
    evaluate_session,
    grade_severity,
    load_rule_set,
)
from .pipeline import (
    AnalysisResult,
    SessionConfig,
    analyze,
    export_streams,
    run_analysis,
)

__version__ = "0.1.0"
