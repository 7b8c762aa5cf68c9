"""Running experiments: one (config, seed) per simulation, sweeps over one axis."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .controllers import MODE_NAMES, ControllerMode
from .errors import ConfigError
from .nvm import FaultScheduleEntry
from .report import ExperimentReport, summarize
from .system import System
from .workloads import generate

AXES = ("mode", "redundancy_ways", "diff_ways", "num_dimms", "nvm_latency")
DEFAULT_AXIS_VALUES = {
    "mode": list(MODE_NAMES),
    "redundancy_ways": list(range(1, 9)),
    "diff_ways": list(range(1, 9)),
    "num_dimms": [3, 4, 6, 8],
    "nvm_latency": ["60/150", "100/300", "300/1000"],
}


def build_system(config, seed):
    spec = replace(config.workload, seed=seed)
    system = System(config.machine, config.mode, threads=spec.threads,
                    recovery_enabled=config.recovery_enabled, debug=config.debug)
    page = config.machine.page_size
    system.map_file(0, -(-spec.footprint // page) * page)
    for f in config.faults:
        target = None if f.misdirect_offset is None else system.phys(f.misdirect_offset)
        system.nvm.arm(FaultScheduleEntry(f.kind, system.phys(f.offset), f.occurrence, target))
    return system, spec


def run_once(config, seed):
    """Simulate one seed: map, replay the stream, drain, audit, unmap."""
    system, spec = build_system(config, seed)
    for ev in generate(spec):
        system.execute(ev)
    system.drain()
    audit = system.audit() if config.audit else None
    system.unmap_all()
    return ExperimentReport(
        experiment=config.name,
        mode=str(config.mode),
        seed=seed,
        workload=spec.to_dict(),
        config=config.echo(),
        counters=system.counters,
        setup_counters=system.setup_counters,
        costs=config.machine.costs(),
        events=[e.to_dict() for e in system.events],
        silent_corruptions=len(system.silent),
        miscorrections=len(system.miscorrections),
        audit=audit,
    )


def run(config, seeds=None):
    """(per-seed reports, mean/RMS-error summary)."""
    config.validate()
    reports = [run_once(config, s) for s in (seeds or config.seeds)]
    return reports, summarize(reports)


def apply_axis(config, axis, value):
    """A copy of ``config`` moved to one sweep point."""
    m = config.machine
    if axis == "mode":
        mode = value if isinstance(value, ControllerMode) else ControllerMode.parse(value)
        cfg = replace(config, mode=mode)
    elif axis in ("redundancy_ways", "diff_ways"):
        cfg = replace(config, machine=m.with_partition(**{axis: int(value)}))
    elif axis == "num_dimms":
        cfg = replace(config, machine=m.with_nvm(num_dimms=int(value)))
    elif axis == "nvm_latency":
        r, _, w = str(value).partition("/")
        try:
            cfg = replace(config, machine=m.with_nvm(read_latency=float(r), write_latency=float(w or r)))
        except ValueError:
            raise ConfigError("sweep.nvm_latency", f"expected READ/WRITE in ns, got {value!r}") from None
    else:
        raise ConfigError("sweep.axis", f"unknown axis {axis!r}; expected one of {AXES}")
    cfg.name = f"{config.name}:{axis}={value}"
    return cfg.validate()


def _run_point(args):
    cfg, seeds = args
    return run(cfg, seeds)[0]


def sweep(config, axis, values=None, seeds=None, jobs=1):
    """One report per (axis point, seed); every point shares the same seeds."""
    values = DEFAULT_AXIS_VALUES[axis] if values is None else values
    seeds = seeds or config.seeds
    points = [(apply_axis(config, axis, v), seeds) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_point, points))
    else:
        chunks = [_run_point(p) for p in points]
    return [r for chunk in chunks for r in chunk]
