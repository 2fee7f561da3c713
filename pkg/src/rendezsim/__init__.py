"""Exact continuous-time simulator for two-agent rendezvous with
distance-sniffing sensors, plus the meeting algorithms for the monotone
(order-comparable readings) and binary (near/far threshold) sensing models.
"""

from .binary import BinaryProgram
from .exact import Scalar, ScalarParseError, decimal_str, format_scalar, parse_scalar
from .geometry import (
    MotionSegment,
    Point,
    TouchTime,
    first_touch_time,
    squared_distance,
    squared_distance_polynomial,
)
from .kernel import (
    ABSENT,
    DISTORTIONS,
    FAR,
    HALT,
    NEAR,
    AgentProtocolError,
    BinaryReading,
    HaltForever,
    Move,
    OpaqueOrderedLevel,
    Present,
    Wait,
    compare_levels,
)
from .labels import LabelSpace, TransformedLabel, first_differing_index, transform
from .monotone import MonotoneProgram
from .oracle import OracleConfig, OracleResult, oracle_run
from .simulator import (
    InputError,
    MeetingReport,
    ProtocolViolation,
    Scenario,
    TraceEvent,
    run_scenario,
    trace_lines,
)

__all__ = [
    "ABSENT",
    "AgentProtocolError",
    "BinaryProgram",
    "BinaryReading",
    "DISTORTIONS",
    "FAR",
    "HALT",
    "HaltForever",
    "InputError",
    "LabelSpace",
    "MeetingReport",
    "MonotoneProgram",
    "MotionSegment",
    "Move",
    "NEAR",
    "OpaqueOrderedLevel",
    "OracleConfig",
    "OracleResult",
    "Point",
    "Present",
    "ProtocolViolation",
    "Scalar",
    "ScalarParseError",
    "Scenario",
    "TouchTime",
    "TraceEvent",
    "TransformedLabel",
    "Wait",
    "compare_levels",
    "decimal_str",
    "first_differing_index",
    "first_touch_time",
    "format_scalar",
    "oracle_run",
    "parse_scalar",
    "run_scenario",
    "squared_distance",
    "squared_distance_polynomial",
    "trace_lines",
    "transform",
]

__version__ = "0.1.0"
