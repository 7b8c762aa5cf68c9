"""Access-driven simulator of redundancy controllers for DAX-mapped NVM."""

from .controllers import ControllerMode, CorruptionEvent
from .counters import AccessCounters, CostModel, accrue
from .report import ExperimentReport, compare, emit
from .system import MachineConfig, System
from .workloads import AccessEvent, WorkloadSpec, generate

__version__ = "0.1.0"

__all__ = [
    "ControllerMode", "CorruptionEvent", "AccessCounters", "CostModel", "accrue",
    "ExperimentReport", "compare", "emit", "MachineConfig", "System",
    "AccessEvent", "WorkloadSpec", "generate",
]
