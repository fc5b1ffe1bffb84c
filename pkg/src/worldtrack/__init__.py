"""World-frame object tracking that keeps objects in mind while out of sight."""

__version__ = "0.1.0"

from .baselines import OSLTracker, OSOMTracker, RandomTracker, RetrievalTracker, make_tracker
from .bench import EvalConfig, EvalReport, evaluate, pcl, projection_error_stats, select_keyframes
from .cognition import CognitionConfig, Motion, Reach, Visibility
from .geometry import CameraFrame, CameraIntrinsics, CameraPose, align_depth, project, unproject
from .simulator import GroundTruth, Scenario, ScenarioConfig, generate
from .tracker import FrameData, LiftedObservation, LMKTracker, MatcherConfig, TrackSet

__all__ = [
    "CameraFrame", "CameraIntrinsics", "CameraPose", "CognitionConfig", "EvalConfig", "EvalReport",
    "FrameData", "GroundTruth", "LMKTracker", "LiftedObservation", "MatcherConfig", "Motion",
    "OSLTracker", "OSOMTracker", "RandomTracker", "Reach", "RetrievalTracker", "Scenario",
    "ScenarioConfig", "TrackSet", "Visibility", "align_depth", "evaluate", "generate",
    "make_tracker", "pcl", "project", "projection_error_stats", "select_keyframes", "unproject",
]
