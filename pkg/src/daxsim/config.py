"""Experiment configuration files (TOML).

A minimal config names only the workload kind and the mode; everything else
defaults to the simulated machine's published parameters::

    mode = "evu"

    [workload]
    kind = "seq_write"
"""

import sys
from dataclasses import dataclass, field, fields, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cache import CacheLevelConfig, WayPartitionPlan
from .controllers import ControllerMode
from .errors import ConfigError
from .nvm import FAULT_KINDS, NvmConfig
from .system import MachineConfig
from .workloads import WorkloadSpec

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class FaultSpec:
    """A fault keyed by logical data offsets (translated to physical lines at run time)."""

    kind: str
    offset: int
    occurrence: int = 1
    misdirect_offset: int = None

    def to_dict(self):
        return {k.name: getattr(self, k.name) for k in fields(self)}


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    machine: MachineConfig = field(default_factory=MachineConfig.desk)
    machine_preset: str = "desk"
    mode: ControllerMode = field(default_factory=lambda: ControllerMode("off"))
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    faults: list = field(default_factory=list)
    seeds: list = field(default_factory=lambda: [1])
    recovery_enabled: bool = True
    audit: bool = True
    debug: bool = False
    output: str = None
    format: str = "json"

    def validate(self):
        try:
            self.machine.validate()
        except ConfigError as exc:
            raise ConfigError(f"machine.{exc.field}", exc.message) from None
        self.workload.validate()
        if not self.seeds or not all(isinstance(s, int) for s in self.seeds):
            raise ConfigError("seeds", "need a non-empty list of integers")
        if self.format not in FORMATS:
            raise ConfigError("output.format", f"expected one of {FORMATS}")
        footprint = self.workload.footprint
        for i, f in enumerate(self.faults):
            where = f"faults[{i}]"
            if f.kind not in FAULT_KINDS:
                raise ConfigError(f"{where}.kind", f"expected one of {FAULT_KINDS}")
            offsets = [("offset", f.offset)]
            if f.misdirect_offset is not None:
                offsets.append(("misdirect_offset", f.misdirect_offset))
            for key, off in offsets:
                if not 0 <= off < footprint:
                    raise ConfigError(f"{where}.{key}", f"{off} is outside the mapped range [0, {footprint})")
                if off % 64:
                    raise ConfigError(f"{where}.{key}", "must be line aligned")
            if f.occurrence < 1:
                raise ConfigError(f"{where}.occurrence", "ordinals start at 1")
            if (f.misdirect_offset is None) != (f.kind == "lost_write"):
                raise ConfigError(f"{where}.misdirect_offset", "required for misdirected kinds only")
        return self

    def echo(self):
        """JSON-friendly description of everything that shaped the run."""
        m = self.machine

        def level(c):
            return {k.name: getattr(c, k.name) for k in fields(c)}

        return {
            "name": self.name,
            "mode": str(self.mode),
            "machine": {
                "preset": self.machine_preset,
                "l1": level(m.l1), "l2": level(m.l2), "llc": level(m.llc), "on_controller": level(m.oc),
                "partition": level(m.partition), "nvm": level(m.nvm),
                "page_size": m.page_size, "clock_ghz": m.clock_ghz,
                "range_match_cycles": m.range_match_cycles, "checksum_cycles": m.checksum_cycles,
                "txb_word_bytes": m.txb_word_bytes,
            },
            "workload": self.workload.to_dict(),
            "faults": [f.to_dict() for f in self.faults],
            "recovery_enabled": self.recovery_enabled,
        }


def _take(table, allowed, where):
    unknown = set(table) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}.{sorted(unknown)[0]}", "unknown key")
    return table


def _typed(cls, table, where, base=None):
    names = {f.name: f for f in fields(cls)}
    _take(table, names, where)
    for k, v in table.items():
        want = names[k].type
        if want in ("int", int) and (not isinstance(v, int) or isinstance(v, bool)):
            raise ConfigError(f"{where}.{k}", f"expected an integer, got {v!r}")
        if want in ("float", float) and not isinstance(v, (int, float)):
            raise ConfigError(f"{where}.{k}", f"expected a number, got {v!r}")
    try:
        return replace(base, **table) if base is not None else cls(**table)
    except TypeError as exc:
        raise ConfigError(where, str(exc)) from None


def _machine(table):
    table = dict(table)
    preset = table.pop("preset", "desk")
    m = MachineConfig.preset(preset)
    kw = {}
    for key, attr in (("l1", "l1"), ("l2", "l2"), ("llc", "llc"), ("on_controller", "oc")):
        if key in table:
            kw[attr] = _typed(CacheLevelConfig, table.pop(key), f"machine.{key}", getattr(m, attr))
    if "partition" in table:
        kw["partition"] = _typed(WayPartitionPlan, table.pop("partition"), "machine.partition", m.partition)
    if "nvm" in table:
        kw["nvm"] = _typed(NvmConfig, table.pop("nvm"), "machine.nvm", m.nvm)
    scalars = ("page_size", "clock_ghz", "range_match_cycles", "checksum_cycles", "txb_word_bytes")
    _take(table, scalars, "machine")
    kw.update(table)
    return preset, replace(m, **kw)


def from_dict(d):
    d = dict(d)
    top = ("name", "mode", "object_size", "seeds", "recovery", "audit", "debug",
           "machine", "workload", "faults", "output")
    _take(d, top, "config")
    cfg = ExperimentConfig()
    cfg.name = str(d.get("name", cfg.name))
    cfg.machine_preset, cfg.machine = _machine(d.get("machine", {}))
    if "mode" not in d:
        raise ConfigError("mode", "required")
    cfg.mode = ControllerMode.parse(d["mode"], d.get("object_size", 64))
    if "workload" not in d or "kind" not in d["workload"]:
        raise ConfigError("workload.kind", "required")
    cfg.workload = _typed(WorkloadSpec, d["workload"], "workload")
    faults = d.get("faults", [])
    cfg.faults = [_typed(FaultSpec, f, f"faults[{i}]") for i, f in enumerate(faults)]
    cfg.seeds = list(d.get("seeds", [cfg.workload.seed]))
    cfg.recovery_enabled = bool(d.get("recovery", True))
    cfg.audit = bool(d.get("audit", True))
    cfg.debug = bool(d.get("debug", False))
    out = _take(d.get("output", {}), ("path", "format"), "output")
    cfg.output = out.get("path")
    cfg.format = out.get("format", "json")
    return cfg.validate()


def loads(text):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"not valid TOML: {exc}") from None
    return from_dict(data)


def load(path):
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"{path} is not valid TOML: {exc}") from None
    return from_dict(data)
