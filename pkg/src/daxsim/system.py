"""The simulated machine: private L1/L2 per lane, shared inclusive LLC, controller, NVM.

``System`` is the single-threaded event loop.  Workload addresses are logical
data offsets; they are translated to physical NVM line addresses here.
"""

from dataclasses import dataclass, field, replace

from .cache import DATA, DIFF, REDUNDANCY, CacheLevel, CacheLevelConfig, Line, WayPartitionPlan
from .controllers import ControllerMode, build_controller
from .counters import (
    L1_HIT, L1_MISS, L2_HIT, L2_MISS, LLC_HIT, LLC_MISS, AccessCounters, CostModel,
)
from .crc import crc32c, xor_bytes
from .errors import ConfigError, MappingError
from .layout import (
    DATA as DATA_REGION, BufferAllocator, PageGeometry, RedundancyLayout, system_checksum_addr,
)
from .nvm import NvmConfig, NvmDevice


def _full_l1():
    return CacheLevelConfig("l1", 32 * 1024, 8, 4, 15, 33)


def _full_l2():
    return CacheLevelConfig("l2", 256 * 1024, 8, 7, 46, 94)


def _full_llc():
    return CacheLevelConfig("llc", 24 * 1024 * 1024, 16, 27, 240, 500, banks=12, inclusive=True)


def _oc():
    return CacheLevelConfig("on_controller", 4096, 4, 1, 15, 33)


@dataclass(frozen=True)
class MachineConfig:
    l1: CacheLevelConfig = field(default_factory=_full_l1)
    l2: CacheLevelConfig = field(default_factory=_full_l2)
    llc: CacheLevelConfig = field(default_factory=_full_llc)
    oc: CacheLevelConfig = field(default_factory=_oc)
    partition: WayPartitionPlan = field(default_factory=WayPartitionPlan)
    nvm: NvmConfig = field(default_factory=NvmConfig)
    page_size: int = 4096
    clock_ghz: float = 2.27
    range_match_cycles: int = 2
    checksum_cycles: int = 1
    txb_word_bytes: int = 8

    @classmethod
    def full(cls):
        return cls()

    @classmethod
    def desk(cls):
        """Scaled-down caches (same associativities and costs) for quick runs."""
        return cls(
            l1=CacheLevelConfig("l1", 4 * 1024, 8, 4, 15, 33),
            l2=CacheLevelConfig("l2", 32 * 1024, 8, 7, 46, 94),
            llc=CacheLevelConfig("llc", 768 * 1024, 16, 27, 240, 500, banks=12, inclusive=True),
        )

    @classmethod
    def preset(cls, name):
        try:
            return {"full": cls.full, "desk": cls.desk}[name]()
        except KeyError:
            raise ConfigError("machine.preset", f"unknown preset {name!r} (full, desk)") from None

    def validate(self):
        for level in (self.l1, self.l2, self.llc, self.oc):
            level.validate()
        if self.partition.associativity != self.llc.associativity:
            raise ConfigError("partition.associativity", "must equal the LLC associativity")
        self.partition.validate()
        self.nvm.validate()
        if self.clock_ghz <= 0:
            raise ConfigError("machine.clock_ghz", "must be positive")
        if self.txb_word_bytes <= 0 or self.l1.line_size % self.txb_word_bytes:
            raise ConfigError("machine.txb_word_bytes", "must divide the line size")
        PageGeometry(self.page_size, self.l1.line_size)
        return self

    def costs(self):
        lv = lambda c: (c.energy_hit, c.energy_miss, c.latency)
        n = self.nvm
        return CostModel.build(
            l1=lv(self.l1), l2=lv(self.l2), llc=lv(self.llc), oc=lv(self.oc),
            nvm_read_nj=n.energy_read, nvm_write_nj=n.energy_write,
            nvm_read_ns=n.read_latency, nvm_write_ns=n.write_latency,
            range_match_cycles=self.range_match_cycles, checksum_cycles=self.checksum_cycles,
            clock_ghz=self.clock_ghz,
        )

    def with_partition(self, **kw):
        return replace(self, partition=replace(self.partition, **kw))

    def with_nvm(self, **kw):
        return replace(self, nvm=replace(self.nvm, **kw))


class System:
    """One experiment's machine state.

    ``counters`` collects the run; ``setup_counters`` collects the one-off
    cost of initialising checksum buffers when a range is mapped.
    """

    def __init__(self, machine=None, mode="off", threads=1, recovery_enabled=True, debug=False):
        self.machine = (machine or MachineConfig()).validate()
        self.mode = mode if isinstance(mode, ControllerMode) else ControllerMode.parse(mode)
        self.threads = threads
        self.recovery_enabled = recovery_enabled
        self.debug = debug
        m = self.machine
        self.layout = RedundancyLayout(
            m.nvm.num_dimms, m.nvm.dimm_capacity, PageGeometry(m.page_size, m.l1.line_size))
        self.line_size = m.l1.line_size
        self.counters = AccessCounters(threads)
        self.setup_counters = AccessCounters(threads)
        self.nvm = NvmDevice(self.layout, self.counters)
        self.allocator = BufferAllocator(self.layout)
        self.l1 = [CacheLevel(m.l1) for _ in range(threads)]
        self.l2 = [CacheLevel(m.l2) for _ in range(threads)]
        self.llc = CacheLevel(m.llc, self.mode.llc_partitions(m.partition))
        self.ordinal = 0
        self.silent = []            # (ordinal, addr) of wrong data consumed without detection
        self.miscorrections = []    # wrong data returned after a "successful" recovery
        self.controller = build_controller(self)

    @property
    def sys_lane(self):
        return self.counters.sys

    @property
    def events(self):
        return self.controller.events

    # -- address translation ---------------------------------------------

    def phys(self, offset):
        return self.layout.data_addr(offset - offset % self.line_size)

    # -- mapping ---------------------------------------------------------

    def _pages(self, start, length):
        page = self.machine.page_size
        if start % page or length % page or length <= 0:
            raise MappingError("mapped ranges must be page aligned and non-empty")
        return start // page, length // page

    def map_file(self, start, length):
        """DAX-map logical bytes ``[start, start+length)``; buffer setup is charged separately."""
        first, n = self._pages(start, length)
        self.nvm.counters = self.setup_counters
        try:
            return self.controller.map_file(first, n, 0)
        finally:
            self.nvm.counters = self.counters

    def unmap_file(self, start):
        first = start // self.machine.page_size
        entry = self.controller.table.lookup_page(first)
        if entry is None or entry.first_page != first:
            raise MappingError(f"no mapping starts at offset {start}")
        page = self.machine.page_size
        pages = {self.layout.page_addr(p) for p in range(entry.first_page, entry.end_page)}
        # software checksum buffers live in the data caches and go with the mapping
        bufs = [range(b.base, b.base + b.size) for b in entry.buffers()] if self.mode.software else []

        def covered(a):
            return a - a % page in pages or any(a in r for r in bufs)

        self.writeback_dirty(covered)
        for r in bufs:
            for a in r[::self.line_size]:
                self.inclusive_invalidate(a)
                self.llc.remove(a)
        return self.controller.unmap_file(first, self.sys_lane)

    # -- the access path -------------------------------------------------

    def load(self, lane, addr):
        return self._access(lane, addr, None, False)

    def store(self, lane, addr, value, track=True):
        self._access(lane, addr, value, track)

    def _access(self, lane, addr, value, track):
        self.ordinal += 1
        row = self.counters.lanes[lane]
        line = self.l1[lane].lookup(addr)
        if line is not None:
            row[L1_HIT] += 1
        else:
            row[L1_MISS] += 1
            line = self._miss_l1(lane, addr, row)
        if value is None:
            return line.value
        if track:
            self.controller.note_store(lane, addr, line.value)
        if self.threads > 1:
            llc_line = self.llc.peek(addr)
            others = llc_line.sharers & ~(1 << lane)
            if others:
                self._recall(addr, llc_line, others, True)
        line.value = value
        line.dirty = True
        return value

    def _miss_l1(self, lane, addr, row):
        l2 = self.l2[lane]
        l2line = l2.lookup(addr)
        if l2line is not None:
            row[L2_HIT] += 1
        else:
            row[L2_MISS] += 1
            l2line = Line(self._miss_l2(lane, addr, row))
            victim = l2.insert(addr, l2line)
            if victim is not None:
                self._evict_l2(lane, *victim)
        line = Line(l2line.value)
        victim = self.l1[lane].insert(addr, line)
        if victim is not None:
            self._evict_l1(lane, *victim)
        return line

    def _miss_l2(self, lane, addr, row):
        llc = self.llc
        line = llc.lookup(addr)
        if line is not None:
            row[LLC_HIT] += 1
            others = line.sharers & ~(1 << lane)
            if others:
                self._recall(addr, line, others, False)
        else:
            row[LLC_MISS] += 1
            line = Line(self._fill(lane, addr))
            victim = llc.insert(addr, line)
            if victim is not None:
                self._evict_llc(lane, *victim)
        line.sharers |= 1 << lane
        return line.value

    def _fill(self, lane, addr):
        events = self.controller.events
        before = len(events)
        value = self.controller.fill(lane, addr)
        if value != self.nvm.expected(addr):
            new = events[before:]
            if not new:
                self.silent.append((self.ordinal, addr))
            elif new[-1].recovered:
                self.miscorrections.append((self.ordinal, addr))
        return value

    def _install_dirty(self, lane, addr, llc_line, value):
        self.controller.dirty_install(lane, addr, llc_line.value, value)
        llc_line.value = value
        llc_line.dirty = True

    def _evict_l1(self, lane, addr, line):
        if line.dirty:
            self.counters.lanes[lane][L2_HIT] += 1
            l2line = self.l2[lane].peek(addr)
            l2line.value = line.value
            l2line.dirty = True

    def _evict_l2(self, lane, addr, line):
        value, dirty = line.value, line.dirty
        up = self.l1[lane].remove(addr)
        if up is not None and up.dirty:
            value, dirty = up.value, True
        llc_line = self.llc.peek(addr)
        llc_line.sharers &= ~(1 << lane)
        if dirty:
            self.counters.lanes[lane][LLC_HIT] += 1
            self._install_dirty(lane, addr, llc_line, value)

    def _evict_llc(self, lane, addr, line):
        if line.sharers:
            self._recall(addr, line, line.sharers, True)
        if line.dirty:
            self.controller.writeback(lane, addr, line.value)

    def _recall(self, addr, llc_line, mask, invalidate):
        """Pull the newest copy of ``addr`` from the lanes in ``mask`` into the LLC."""
        lane = 0
        while mask:
            if mask & 1:
                c1 = self.l1[lane].peek(addr)
                c2 = self.l2[lane].peek(addr)
                newest = None
                if c1 is not None and c1.dirty:
                    newest = c1.value
                elif c2 is not None and c2.dirty:
                    newest = c2.value
                if newest is not None:
                    self._install_dirty(lane, addr, llc_line, newest)
                if invalidate:
                    self.l1[lane].remove(addr)
                    self.l2[lane].remove(addr)
                    llc_line.sharers &= ~(1 << lane)
                else:
                    for c in (c1, c2):
                        if c is not None:
                            c.value = llc_line.value
                            c.dirty = False
            mask >>= 1
            lane += 1

    def push_down(self, lane, addr):
        """Evict ``addr`` from ``lane``'s L1/L2 into the LLC (the L2 eviction path)."""
        line = self.l2[lane].remove(addr)
        if line is not None:
            self._evict_l2(lane, addr, line)

    def evict(self, addr, lane=0):
        """Force ``addr`` out of every cache level, writing it back if dirty."""
        line = self.llc.remove(addr)
        if line is not None:
            self._evict_llc(lane, addr, line)

    def inclusive_invalidate(self, addr):
        """Drop ``addr`` from every L1/L2, merging dirty copies into the LLC."""
        line = self.llc.peek(addr)
        if line is not None and line.sharers:
            self._recall(addr, line, line.sharers, True)

    # -- workload driving ------------------------------------------------

    def execute(self, ev):
        addr = self.phys(ev.address)
        if ev.op == "load":
            self.load(ev.thread, addr)
        else:
            self.store(ev.thread, addr, ev.payload)
        if ev.txn_boundary:
            self.controller.commit(ev.thread)
        if self.debug:
            self.check_invariants()

    def commit_all(self):
        for lane in range(self.threads):
            self.controller.commit(lane)

    def writeback_dirty(self, select=None, lane=None):
        """Push dirty data (matching ``select``) from every level to NVM; copies stay, clean."""
        lane = self.sys_lane if lane is None else lane
        sysrow = self.counters.lanes[lane]
        for t in range(self.threads):
            for addr, line in list(self.l1[t].lines()):
                if line.dirty and (select is None or select(addr)):
                    sysrow[L2_HIT] += 1
                    l2line = self.l2[t].peek(addr)
                    l2line.value = line.value
                    l2line.dirty = True
                    line.dirty = False
            for addr, line in list(self.l2[t].lines()):
                if line.dirty and (select is None or select(addr)):
                    sysrow[LLC_HIT] += 1
                    self._install_dirty(lane, addr, self.llc.peek(addr), line.value)
                    line.dirty = False
        for addr, line in list(self.llc.lines(DATA)):
            if line.dirty and (select is None or select(addr)):
                self.controller.writeback(lane, addr, line.value)
                line.dirty = False

    def drain(self):
        """End of run: commit open transactions, write everything back, empty all caches."""
        self.commit_all()
        self.writeback_dirty()
        self.controller.flush(self.sys_lane)
        for c in self.l1 + self.l2:
            c.clear()
        self.llc.clear(DATA)
        self.controller.invalidate()

    def unmap_all(self):
        page = self.machine.page_size
        for entry in list(self.controller.table):
            self.unmap_file(entry.first_page * page)

    # -- checking --------------------------------------------------------

    def check_invariants(self):
        """Inclusion and partition-class checks; raises AssertionError on violation."""
        layout = self.layout
        for lane in range(self.threads):
            for addr, _ in self.l1[lane].lines():
                assert self.l2[lane].peek(addr) is not None, f"L1 line {addr:#x} missing from L2"
            for addr, _ in self.l2[lane].lines():
                line = self.llc.peek(addr)
                assert line is not None, f"L2 line {addr:#x} missing from LLC"
                assert line.sharers >> lane & 1, f"LLC sharer bit missing for {addr:#x}"
        if self.mode.hardware:
            for addr, _ in self.llc.lines(DATA):
                assert not layout.is_redundancy_addr(addr), f"redundancy line {addr:#x} in data ways"
            for addr, _ in self.controller.cached_redundancy_lines():
                assert layout.is_redundancy_addr(addr), f"data line {addr:#x} in a redundancy cache"
        if DIFF in self.llc.parts and self.llc.ways(DIFF):
            for addr, _ in self.llc.lines(DIFF):
                line = self.llc.peek(addr)
                assert line is not None and line.dirty, f"diff for {addr:#x} without dirty LLC line"

    def audit(self):
        """Recompute the mode's redundancy from media for every mapped page.

        Call after :meth:`drain`.  Returns a list of mismatch descriptions
        (empty when everything is consistent).
        """
        kinds = self.controller.maintained()
        if not kinds:
            return []
        layout = self.layout
        geom = layout.geometry
        ls = geom.line_size
        peek = self.nvm.peek
        problems = []
        stripes = set()
        for entry in self.controller.table:
            for lp in range(entry.first_page, entry.end_page):
                page = layout.page_addr(lp)
                stripes.add(layout.stripe_of(page))
                lines = [peek(a) for a in range(page, page + geom.page_size, ls)]
                if "syscsum" in kinds:
                    caddr = system_checksum_addr(page, layout)
                    cl = caddr - caddr % ls
                    stored = int.from_bytes(peek(cl)[caddr - cl:caddr - cl + 4], "little")
                    if stored != crc32c(b"".join(lines)):
                        problems.append(f"syscsum page {page:#x}")
                for name, buf in (("dax_cl", entry.dax_cl), ("object_csum", entry.object_csums)):
                    if name not in kinds or buf is None:
                        continue
                    per = buf.granule // ls
                    for i in range(0, len(lines), per):
                        addr = page + i * ls
                        eaddr = buf.entry_addr(addr)
                        el = eaddr - eaddr % ls
                        stored = int.from_bytes(peek(el)[eaddr - el:eaddr - el + 4], "little")
                        if stored != crc32c(b"".join(lines[i:i + per])):
                            problems.append(f"{name} line {addr:#x}")
        if "parity" in kinds:
            for s in sorted(stripes):
                data_pages, ppage = layout.stripe_members(s)
                for off in range(0, geom.page_size, ls):
                    acc = bytes(ls)
                    for p in data_pages:
                        acc = xor_bytes(acc, peek(p + off))
                    if acc != peek(ppage + off):
                        problems.append(f"parity line {ppage + off:#x}")
        return problems
