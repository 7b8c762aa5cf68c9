"""Experiment reports: counters, energy, runtime, events; JSON / tidy CSV output."""

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from .counters import EVENTS, AccessCounters, CostModel, accrue, energy_pj
from .errors import EmitError, ReportMismatch

SCHEMA_VERSION = 1
CSV_HEADER = ("experiment", "mode", "metric", "value")


@dataclass
class ExperimentReport:
    experiment: str
    mode: str
    seed: int
    workload: dict
    config: dict
    counters: AccessCounters
    setup_counters: AccessCounters
    costs: CostModel
    events: list = field(default_factory=list)
    silent_corruptions: int = 0
    miscorrections: int = 0
    audit: list = None

    @property
    def energy_pj(self):
        return energy_pj(self.counters, self.costs)

    @property
    def energy_j(self):
        return accrue(self.counters, self.costs)[0]

    @property
    def runtime_ns(self):
        return accrue(self.counters, self.costs)[1]

    @property
    def detections(self):
        return len(self.events)

    @property
    def recovered(self):
        return sum(1 for e in self.events if e["recovered"])

    def derived(self):
        t = self.counters.totals()
        data_reads = t["nvm_data_reads"]
        reads = data_reads + t["nvm_redundancy_reads"]
        lookups = t["oc_hits"] + t["oc_misses"]
        hit_rate = None
        if lookups:
            hit_rate = max(0.0, 1.0 - t["nvm_redundancy_reads"] / lookups)
        return {
            "read_amplification": reads / data_reads if data_reads else None,
            "redundancy_cache_hit_rate": hit_rate,
        }

    def metrics(self):
        """Flat metric -> value mapping (what compare() and the CSV use)."""
        c = self.counters
        m = dict(c.totals())
        m["nvm_accesses"] = c.nvm_accesses()
        m["nvm_redundancy_traffic"] = c.redundancy_nvm_traffic()
        for level, n in c.per_level().items():
            m[f"cache_accesses_{level}"] = n
        m["cache_accesses"] = c.cache_accesses()
        m["total_accesses"] = m["cache_accesses"] + m["nvm_accesses"]
        m["energy_pj"] = self.energy_pj
        m["energy_j"] = self.energy_j
        m["runtime_ns"] = self.runtime_ns
        m["detections"] = self.detections
        m["recovered"] = self.recovered
        m["silent_corruptions"] = self.silent_corruptions
        m["miscorrections"] = self.miscorrections
        for k, v in self.derived().items():
            if v is not None:
                m[k] = v
        return m

    def to_dict(self):
        energy, runtime = accrue(self.counters, self.costs)
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "mode": self.mode,
            "seed": self.seed,
            "workload": self.workload,
            "config": self.config,
            "costs": {
                "energy_pj": dict(zip(EVENTS, self.costs.energy_pj)),
                "latency_ns": dict(zip(EVENTS, self.costs.latency_ns)),
            },
            "counters": self.counters.to_dict(),
            "totals": self.counters.totals(),
            "setup_counters": self.setup_counters.to_dict(),
            "energy_pj": self.energy_pj,
            "energy_j": energy,
            "runtime_ns": runtime,
            "events": self.events,
            "silent_corruptions": self.silent_corruptions,
            "miscorrections": self.miscorrections,
            "audit": self.audit,
            "derived": self.derived(),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        costs = CostModel(
            tuple(d["costs"]["energy_pj"][k] for k in EVENTS),
            tuple(d["costs"]["latency_ns"][k] for k in EVENTS),
        )
        return cls(
            experiment=d["experiment"], mode=d["mode"], seed=d["seed"],
            workload=d["workload"], config=d["config"],
            counters=AccessCounters.from_dict(d["counters"]),
            setup_counters=AccessCounters.from_dict(d["setup_counters"]),
            costs=costs, events=d["events"],
            silent_corruptions=d["silent_corruptions"], miscorrections=d["miscorrections"],
            audit=d["audit"],
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, ExperimentReport) and self.to_dict() == other.to_dict()


def compare(report, baseline):
    """Per-metric ratio (report / baseline) and delta; needs the same workload and seed."""
    if report.workload != baseline.workload or report.seed != baseline.seed:
        raise ReportMismatch("overheads need the same workload spec and seed")
    a, b = report.metrics(), baseline.metrics()
    out = {}
    for k in a:
        if k not in b:
            continue
        x, y = a[k], b[k]
        if y:
            ratio = x / y
        else:
            ratio = 1.0 if x == 0 else None
        out[k] = {"value": x, "baseline": y, "ratio": ratio, "delta": x - y}
    return out


def summarize(reports):
    """Mean and root-mean-square error of every metric across seeds."""
    if not reports:
        return {}
    keys = [k for k in reports[0].metrics() if all(k in r.metrics() for r in reports)]
    out = {}
    for k in keys:
        xs = [r.metrics()[k] for r in reports]
        mean = sum(xs) / len(xs)
        out[k] = {"mean": mean, "rmse": math.sqrt(sum((x - mean) ** 2 for x in xs) / len(xs))}
    return out


def tidy_rows(reports):
    for r in reports:
        for metric, value in r.metrics().items():
            yield r.experiment, r.mode, metric, value


def to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in tidy_rows(reports):
        w.writerow([*row[:3], repr(row[3]) if isinstance(row[3], float) else row[3]])
    return buf.getvalue()


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {rows[0]}")
    out = []
    for exp, mode, metric, value in rows[1:]:
        num = float(value) if any(ch in value for ch in ".eEn") else int(value)
        out.append((exp, mode, metric, num))
    return out


def render(reports, fmt="json"):
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    if fmt == "csv":
        return to_csv(reports)
    if fmt == "json":
        if len(reports) == 1:
            return reports[0].to_json()
        return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(reports, fmt="json", destination=None):
    """Write reports to ``destination`` (path, open file, or stdout when None / "-")."""
    text = render(reports, fmt)
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise EmitError(f"cannot write report to {destination}: {exc.strerror or exc}") from exc


def load_reports(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, list):
        return [ExperimentReport.from_dict(d) for d in data]
    return [ExperimentReport.from_dict(data)]
