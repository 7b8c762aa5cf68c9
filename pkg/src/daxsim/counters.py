"""Per-lane event counters and the energy / latency accrual over them."""

from dataclasses import dataclass

EVENTS = (
    "l1_hits",
    "l1_misses",
    "l2_hits",
    "l2_misses",
    "llc_hits",            # LLC data partition
    "llc_misses",
    "llc_red_hits",        # LLC redundancy partition
    "llc_red_misses",
    "llc_diff_hits",       # LLC data-diff partition
    "llc_diff_misses",
    "oc_hits",             # on-controller redundancy cache
    "oc_misses",
    "nvm_data_reads",
    "nvm_data_writes",
    "nvm_redundancy_reads",
    "nvm_redundancy_writes",
    "range_matches",
    "checksum_ops",
)
(
    L1_HIT, L1_MISS, L2_HIT, L2_MISS, LLC_HIT, LLC_MISS, LLC_RED_HIT, LLC_RED_MISS,
    LLC_DIFF_HIT, LLC_DIFF_MISS, OC_HIT, OC_MISS, NVM_DATA_READ, NVM_DATA_WRITE,
    NVM_RED_READ, NVM_RED_WRITE, RANGE_MATCH, CSUM_OP,
) = range(len(EVENTS))
N_EVENTS = len(EVENTS)

CLOCK_GHZ = 2.27


class AccessCounters:
    """Event counts per logical lane.

    Lanes ``0..n-1`` are workload threads; the extra last lane (``sys``)
    collects work no thread waits on (end-of-run drain, unmap flushes).
    """

    def __init__(self, lanes=1):
        self.num_lanes = lanes
        self.lanes = [[0] * N_EVENTS for _ in range(lanes + 1)]

    @property
    def sys(self):
        return self.num_lanes

    def lane(self, i):
        return self.lanes[i]

    def total(self, event):
        return sum(row[event] for row in self.lanes)

    def totals(self):
        return {name: sum(row[i] for row in self.lanes) for i, name in enumerate(EVENTS)}

    def per_level(self):
        t = self.totals()
        return {
            "l1": t["l1_hits"] + t["l1_misses"],
            "l2": t["l2_hits"] + t["l2_misses"],
            "llc": sum(t[k] for k in EVENTS if k.startswith("llc_")),
            "on_controller": t["oc_hits"] + t["oc_misses"],
        }

    def nvm_accesses(self):
        t = self.totals()
        return (t["nvm_data_reads"] + t["nvm_data_writes"]
                + t["nvm_redundancy_reads"] + t["nvm_redundancy_writes"])

    def redundancy_nvm_traffic(self):
        t = self.totals()
        return t["nvm_redundancy_reads"] + t["nvm_redundancy_writes"]

    def cache_accesses(self):
        return sum(self.per_level().values())

    def scaled(self, k):
        out = AccessCounters(self.num_lanes)
        out.lanes = [[k * v for v in row] for row in self.lanes]
        return out

    def __add__(self, other):
        if self.num_lanes != other.num_lanes:
            raise ValueError("cannot add counters with different lane counts")
        out = AccessCounters(self.num_lanes)
        out.lanes = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.lanes, other.lanes)]
        return out

    def __eq__(self, other):
        return isinstance(other, AccessCounters) and self.lanes == other.lanes

    def to_dict(self):
        return {
            "lanes": self.num_lanes,
            "per_lane": [dict(zip(EVENTS, row)) for row in self.lanes],
        }

    @classmethod
    def from_dict(cls, d):
        out = cls(d["lanes"])
        out.lanes = [[row[name] for name in EVENTS] for row in d["per_lane"]]
        return out


@dataclass(frozen=True)
class CostModel:
    """Per-event energy (pJ) and service latency (ns).

    Misses carry energy but no latency: the latency of an access is that of
    the level which finally serviced it.
    """

    energy_pj: tuple
    latency_ns: tuple

    @classmethod
    def build(cls, l1=(15, 33, 4), l2=(46, 94, 7), llc=(240, 500, 27), oc=(15, 33, 1),
              nvm_read_nj=1.6, nvm_write_nj=9.0, nvm_read_ns=60.0, nvm_write_ns=150.0,
              range_match_cycles=2, checksum_cycles=1, clock_ghz=CLOCK_GHZ):
        def pj(nj):
            v = nj * 1000
            return int(round(v)) if abs(v - round(v)) < 1e-9 else v

        e = [0] * N_EVENTS
        lat = [0.0] * N_EVENTS
        for hit, miss, (eh, em, cyc) in (
            (L1_HIT, L1_MISS, l1), (L2_HIT, L2_MISS, l2), (LLC_HIT, LLC_MISS, llc),
            (LLC_RED_HIT, LLC_RED_MISS, llc), (LLC_DIFF_HIT, LLC_DIFF_MISS, llc),
            (OC_HIT, OC_MISS, oc),
        ):
            e[hit], e[miss] = eh, em
            lat[hit] = cyc / clock_ghz
        e[NVM_DATA_READ] = e[NVM_RED_READ] = pj(nvm_read_nj)
        e[NVM_DATA_WRITE] = e[NVM_RED_WRITE] = pj(nvm_write_nj)
        lat[NVM_DATA_READ] = lat[NVM_RED_READ] = float(nvm_read_ns)
        lat[NVM_DATA_WRITE] = lat[NVM_RED_WRITE] = float(nvm_write_ns)
        lat[RANGE_MATCH] = range_match_cycles / clock_ghz
        lat[CSUM_OP] = checksum_cycles / clock_ghz
        return cls(tuple(e), tuple(lat))


DEFAULT_COSTS = CostModel.build()


def energy_pj(counters, costs=DEFAULT_COSTS):
    return sum(c * e for row in counters.lanes for c, e in zip(row, costs.energy_pj))


def lane_runtime_ns(row, costs=DEFAULT_COSTS):
    return sum(c * t for c, t in zip(row, costs.latency_ns))


def accrue(counters, costs=DEFAULT_COSTS):
    """(energy in joules, model runtime in ns) for a counter set.

    Runtime serialises each worker lane's service latencies and reports the
    slowest lane; the ``sys`` lane is excluded.
    """
    energy = energy_pj(counters, costs) / 1e12
    workers = counters.lanes[: counters.num_lanes]
    runtime = max((lane_runtime_ns(row, costs) for row in workers), default=0.0)
    return energy, runtime
