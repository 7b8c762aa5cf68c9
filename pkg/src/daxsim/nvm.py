"""Multi-DIMM NVM back-end with firmware-bug fault injection."""

from dataclasses import dataclass

from .counters import NVM_DATA_READ, NVM_DATA_WRITE, NVM_RED_READ, NVM_RED_WRITE
from .errors import ConfigError, LayoutError

LOST_WRITE = "lost_write"
MISDIRECTED_WRITE = "misdirected_write"
MISDIRECTED_READ = "misdirected_read"
FAULT_KINDS = (LOST_WRITE, MISDIRECTED_WRITE, MISDIRECTED_READ)


@dataclass(frozen=True)
class NvmConfig:
    num_dimms: int = 4
    read_latency: float = 60.0      # ns
    write_latency: float = 150.0    # ns
    energy_read: float = 1.6        # nJ
    energy_write: float = 9.0       # nJ
    dimm_capacity: int = 1 << 30    # bytes

    def validate(self):
        for name in ("read_latency", "write_latency", "energy_read", "energy_write"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"nvm.{name}", "must be strictly positive")
        if self.num_dimms < 2:
            raise ConfigError("nvm.num_dimms", "parity needs at least 2 DIMMs")
        if self.dimm_capacity <= 0:
            raise ConfigError("nvm.dimm_capacity", "must be positive")
        return self


@dataclass
class FaultScheduleEntry:
    """One firmware bug that fires on the ``occurrence``-th read/write of ``target``.

    Lost and misdirected writes count writes of ``target``; misdirected reads
    count reads. Ordinals start at 1.
    """

    kind: str
    target: int
    occurrence: int = 1
    misdirect_target: int = None
    armed: bool = True
    fired: bool = False

    def __post_init__(self):
        if self.kind not in FAULT_KINDS:
            raise ConfigError("fault.kind", f"unknown fault kind {self.kind!r}")
        if self.occurrence < 1:
            raise ConfigError("fault.occurrence", "ordinals start at 1")
        if self.kind == LOST_WRITE:
            if self.misdirect_target is not None:
                raise ConfigError("fault.misdirect_target", "lost writes have no misdirect target")
        else:
            if self.misdirect_target is None:
                raise ConfigError("fault.misdirect_target", f"{self.kind} needs a misdirect target")
            if self.misdirect_target == self.target:
                raise ConfigError("fault.misdirect_target", "must differ from the trigger address")

    @property
    def op(self):
        return "r" if self.kind == MISDIRECTED_READ else "w"

    def affected_lines(self):
        if self.kind == MISDIRECTED_WRITE:
            return (self.target, self.misdirect_target)
        return (self.target,)


class NvmDevice:
    """Sparse byte-addressable media plus an acknowledged-contents ledger.

    ``media`` is what the DIMMs really hold; ``truth`` is what the host was
    told it holds (every acknowledged write). They differ only after a fault,
    which is what lets tests and the run loop spot silent corruption.
    """

    def __init__(self, layout, counters=None):
        self.layout = layout
        self.counters = counters
        self.line_size = layout.geometry.line_size
        self.media = {}
        self.truth = {}
        self._occ = {}
        self._faults = {}
        self.fault_log = []

    # -- fault schedule --------------------------------------------------

    def arm(self, entry):
        for addr in (entry.target, entry.misdirect_target):
            if addr is not None:
                self._check(addr)
        self._faults.setdefault((entry.op, entry.target), []).append(entry)
        return entry

    def count(self, op, addr):
        """How many ``op`` ('r' or 'w') accesses ``addr`` has seen so far."""
        return self._occ.get((op, addr), 0)

    def _fire(self, op, addr):
        n = self._occ.get((op, addr), 0) + 1
        self._occ[(op, addr)] = n
        entries = self._faults.get((op, addr))
        if not entries:
            return None
        for e in entries:
            if e.armed and e.occurrence == n:
                e.armed = False
                e.fired = True
                self.fault_log.append(e)
                return e
        return None

    # -- access ----------------------------------------------------------

    def _check(self, addr):
        if addr % self.line_size or not 0 <= addr < self.layout.total_size:
            raise LayoutError(f"{addr:#x} is not a line address on the device")

    def _stored(self, addr):
        v = self.media.get(addr)
        return v if v is not None else self.layout.initial_line(addr)

    def read(self, addr, redundancy=False, lane=0):
        self._check(addr)
        if self.counters is not None:
            self.counters.lanes[lane][NVM_RED_READ if redundancy else NVM_DATA_READ] += 1
        fault = self._fire("r", addr)
        if fault is not None:
            return self._stored(fault.misdirect_target)
        return self._stored(addr)

    def write(self, addr, value, redundancy=False, lane=0):
        self._check(addr)
        if len(value) != self.line_size:
            raise ValueError("NVM writes are whole lines")
        if self.counters is not None:
            self.counters.lanes[lane][NVM_RED_WRITE if redundancy else NVM_DATA_WRITE] += 1
        self.truth[addr] = value
        fault = self._fire("w", addr)
        if fault is None:
            self.media[addr] = value
        elif fault.kind == MISDIRECTED_WRITE:
            self.media[fault.misdirect_target] = value
        # lost write: acknowledged, media untouched

    # -- side doors (no counters, no faults) -----------------------------

    def peek(self, addr):
        self._check(addr)
        return self._stored(addr)

    def poke(self, addr, value):
        self._check(addr)
        self.media[addr] = value
        self.truth[addr] = value

    def expected(self, addr):
        """Last acknowledged content of ``addr``."""
        v = self.truth.get(addr)
        return v if v is not None else self.layout.initial_line(addr)

    def corrupted_lines(self):
        """Addresses whose media differs from the acknowledged content."""
        keys = set(self.media) | set(self.truth)
        return sorted(a for a in keys if self._stored(a) != self.expected(a))

    def charge(self, lane, reads=0, writes=0, redundancy=True):
        if self.counters is None:
            return
        row = self.counters.lanes[lane]
        row[NVM_RED_READ if redundancy else NVM_DATA_READ] += reads
        row[NVM_RED_WRITE if redundancy else NVM_DATA_WRITE] += writes
