"""Redundancy controllers: Off, Naive, EV, EVC, EVU and the TxB software baselines.

The hardware controllers sit between the LLC and NVM.  Every LLC fill and
write-back is range-matched against the DAX mapping table; only DAX-mapped
lines get redundancy work.  The feature ladder is

    naive  page-checksum verification (whole page read) + diff-based updates
    ev     + per-line DAX-CL checksums (verification reads 2 lines)
    evc    + redundancy lines cached (on-controller cache, LLC partition)
    evu    + data diffs kept in an LLC partition (no old-data reads)

The software baselines (``txb-page``, ``txb-object``) leave the hardware path
alone and instead issue ordinary loads and stores through the cache
hierarchy at transaction boundaries.
"""

import bisect
from dataclasses import dataclass, field

from .cache import DATA, DIFF, REDUNDANCY, Line
from .counters import (
    CSUM_OP, L1_HIT, LLC_DIFF_HIT, LLC_DIFF_MISS, LLC_RED_HIT, LLC_RED_MISS,
    OC_HIT, OC_MISS, RANGE_MATCH,
)
from .crc import (
    crc32c, incremental_page_checksum, line_checksum_update, parity_update,
    reconstruct_line, xor_bytes,
)
from .errors import ConfigError, LayoutError, MappingError
from .layout import DATA as DATA_REGION
from .layout import ChecksumBuffer, parity_addr, parity_line_addr, system_checksum_addr

MODE_NAMES = ("off", "naive", "ev", "evc", "evu", "txb-object", "txb-page")
_ALIASES = {"baseline": "off", "tvarak": "evu", "txb_object": "txb-object",
            "txb_page": "txb-page", "txbobject": "txb-object", "txbpage": "txb-page"}


@dataclass(frozen=True)
class ControllerMode:
    name: str
    object_size: int = 64

    def __post_init__(self):
        if self.name not in MODE_NAMES:
            raise ConfigError("mode", f"unknown mode {self.name!r}; expected one of {MODE_NAMES}")
        if self.object_size <= 0 or self.object_size % 64:
            raise ConfigError("mode.object_size", "must be a positive multiple of 64")

    @classmethod
    def parse(cls, text, object_size=64):
        name, _, arg = str(text).strip().lower().partition(":")
        name = _ALIASES.get(name, name)
        if arg:
            object_size = int(arg)
        return cls(name, object_size)

    def __str__(self):
        if self.name == "txb-object" and self.object_size != 64:
            return f"{self.name}:{self.object_size}"
        return self.name

    @property
    def hardware(self):
        return self.name in ("naive", "ev", "evc", "evu")

    @property
    def software(self):
        return self.name.startswith("txb")

    @property
    def detects(self):
        return self.hardware

    @property
    def dax_cl(self):
        return self.name in ("ev", "evc", "evu")

    @property
    def caching(self):
        return self.name in ("evc", "evu")

    @property
    def diffs(self):
        return self.name == "evu"

    def llc_partitions(self, plan):
        """Way split of the LLC for this mode; non-caching modes keep every way for data."""
        red = plan.redundancy_ways if self.caching else 0
        dif = plan.diff_ways if self.diffs else 0
        parts = {DATA: plan.associativity - red - dif}
        if self.caching:
            parts[REDUNDANCY] = red
        if self.diffs:
            parts[DIFF] = dif
        return parts


@dataclass
class CorruptionEvent:
    detected_at: int
    line_addr: int
    expected: int
    computed: int
    scope: str = "line"          # "line" (DAX-CL) or "page" (system-checksum)
    recovered: bool = False

    def to_dict(self):
        return {
            "detected_at": self.detected_at, "line_addr": self.line_addr,
            "expected": self.expected, "computed": self.computed,
            "scope": self.scope, "recovered": self.recovered,
        }


@dataclass
class MappingEntry:
    first_page: int
    num_pages: int
    dax_cl: ChecksumBuffer = None
    object_csums: ChecksumBuffer = None

    @property
    def end_page(self):
        return self.first_page + self.num_pages

    def buffers(self):
        return [b for b in (self.dax_cl, self.object_csums) if b is not None]


class DaxMappingTable:
    """Disjoint logical page ranges currently DAX-mapped."""

    def __init__(self, layout):
        self.layout = layout
        self._starts = []
        self._entries = []

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(list(self._entries))

    def add(self, entry):
        i = bisect.bisect_right(self._starts, entry.first_page)
        if i > 0 and self._entries[i - 1].end_page > entry.first_page:
            raise MappingError(f"pages {entry.first_page}+{entry.num_pages} overlap a mapping")
        if i < len(self._entries) and self._entries[i].first_page < entry.end_page:
            raise MappingError(f"pages {entry.first_page}+{entry.num_pages} overlap a mapping")
        self._starts.insert(i, entry.first_page)
        self._entries.insert(i, entry)

    def remove(self, first_page):
        i = bisect.bisect_left(self._starts, first_page)
        if i == len(self._starts) or self._starts[i] != first_page:
            raise MappingError(f"no mapping starts at page {first_page}")
        del self._starts[i]
        return self._entries.pop(i)

    def lookup_page(self, logical_page):
        i = bisect.bisect_right(self._starts, logical_page) - 1
        if i >= 0 and logical_page < self._entries[i].end_page:
            return self._entries[i]
        return None

    def lookup(self, addr):
        layout = self.layout
        try:
            if layout.region_kind(addr) != DATA_REGION:
                return None
            return self.lookup_page(layout.logical_page(addr))
        except LayoutError:
            return None


# -- redundancy line access paths ---------------------------------------


class DirectRedundancy:
    """Naive/EV: every redundancy line access goes straight to NVM."""

    def __init__(self, system):
        self.nvm = system.nvm

    def read(self, lane, addr):
        return self.nvm.read(addr, True, lane)

    def update(self, lane, addr, fn):
        new = fn(self.nvm.read(addr, True, lane))
        self.nvm.write(addr, new, True, lane)
        return new

    def flush(self, lane):
        pass

    def invalidate(self, region=None):
        pass

    def lines(self):
        return []


class OnControllerCache:
    """Small redundancy-only cache backed, exclusively, by the LLC redundancy partition.

    A miss in both levels reads NVM and installs in the on-controller cache.
    Its victims drop into the LLC partition; LLC partition victims are written
    to NVM only when dirty.
    """

    def __init__(self, system):
        from .cache import CacheLevel

        self.system = system
        self.nvm = system.nvm
        self.llc = system.llc
        self.oc = CacheLevel(system.machine.oc)
        self.llc_ways = self.llc.ways(REDUNDANCY) if REDUNDANCY in self.llc.parts else 0

    def _line(self, lane, addr):
        row = self.system.counters.lanes[lane]
        line = self.oc.lookup(addr)
        if line is not None:
            row[OC_HIT] += 1
            return line
        row[OC_MISS] += 1
        line = None
        if self.llc_ways:
            line = self.llc.lookup(addr, REDUNDANCY)
            if line is not None:
                row[LLC_RED_HIT] += 1
                self.llc.remove(addr, REDUNDANCY)
            else:
                row[LLC_RED_MISS] += 1
        if line is None:
            line = Line(self.nvm.read(addr, True, lane))
        victim = self.oc.insert(addr, line)
        if victim is not None:
            self._demote(lane, *victim)
        return line

    def _demote(self, lane, addr, line):
        if self.llc_ways:
            self.system.counters.lanes[lane][LLC_RED_HIT] += 1
            victim = self.llc.insert(addr, line, REDUNDANCY)
            if victim is None:
                return
            addr, line = victim
        if line.dirty:
            self.nvm.write(addr, line.value, True, lane)

    def read(self, lane, addr):
        return self._line(lane, addr).value

    def update(self, lane, addr, fn):
        line = self._line(lane, addr)
        line.value = fn(line.value)
        line.dirty = True
        return line.value

    def lines(self):
        out = list(self.oc.lines())
        if self.llc_ways:
            out += list(self.llc.lines(REDUNDANCY))
        return out

    def flush(self, lane):
        for addr, line in self.lines():
            if line.dirty:
                self.nvm.write(addr, line.value, True, lane)
                line.dirty = False

    def invalidate(self, region=None):
        """Drop cached lines (all, or those inside ``region``); call after :meth:`flush`."""
        levels = [(self.oc, DATA)]
        if self.llc_ways:
            levels.append((self.llc, REDUNDANCY))
        for cache, part in levels:
            for addr, line in list(cache.lines(part)):
                if region is None or addr in region:
                    if line.dirty:
                        raise AssertionError("invalidating a dirty redundancy line")
                    cache.remove(addr, part)


class DiffStore:
    """XOR data diffs of dirty LLC lines, held in the LLC diff partition."""

    def __init__(self, system):
        self.system = system
        self.llc = system.llc

    @property
    def capacity(self):
        return self.llc.ways(DIFF) * self.llc.config.sets

    def __len__(self):
        return self.llc.occupancy(DIFF)

    def __contains__(self, addr):
        return self.llc.peek(addr, DIFF) is not None

    def get(self, addr):
        line = self.llc.peek(addr, DIFF)
        return None if line is None else line.value

    def items(self):
        return [(a, l.value) for a, l in self.llc.lines(DIFF)]

    def fold(self, lane, addr, diff):
        """XOR ``diff`` into the stored diff of ``addr``; returns an evicted ``(addr, diff)``."""
        row = self.system.counters.lanes[lane]
        line = self.llc.lookup(addr, DIFF)
        if line is not None:
            row[LLC_DIFF_HIT] += 1
            line.value = xor_bytes(line.value, diff)
            return None
        row[LLC_DIFF_MISS] += 1
        victim = self.llc.insert(addr, Line(diff), DIFF)
        if victim is None:
            return None
        return victim[0], victim[1].value

    def take(self, lane, addr):
        line = self.llc.remove(addr, DIFF)
        row = self.system.counters.lanes[lane]
        if line is None:
            row[LLC_DIFF_MISS] += 1
            return None
        row[LLC_DIFF_HIT] += 1
        return line.value


# -- controllers ----------------------------------------------------------


class Controller:
    """Baseline (mode ``off``): LLC misses and write-backs go straight to NVM."""

    def __init__(self, system):
        self.system = system
        self.mode = system.mode
        self.layout = system.layout
        self.geom = system.layout.geometry
        self.nvm = system.nvm
        self.llc = system.llc
        self.table = DaxMappingTable(system.layout)
        self.events = []
        self.recovery_enabled = system.recovery_enabled

    # hooks used by the cache hierarchy

    def fill(self, lane, addr):
        return self.nvm.read(addr, False, lane)

    def dirty_install(self, lane, addr, old, new):
        pass

    def writeback(self, lane, addr, value):
        self.nvm.write(addr, value, False, lane)

    def flush(self, lane):
        pass

    def invalidate(self):
        pass

    def commit(self, lane):
        pass

    def note_store(self, lane, addr, old_value):
        pass

    def cached_redundancy_lines(self):
        return []

    # file mapping

    def _buffers_for(self, first_page, num_pages):
        return {}

    def map_file(self, first_page, num_pages, lane):
        entry = MappingEntry(first_page, num_pages)
        self.table.add(entry)
        try:
            for name, granule in self._buffers_for(first_page, num_pages).items():
                probe = ChecksumBuffer(0, first_page, num_pages, self.layout, granule)
                base, _ = self.system.allocator.allocate(probe.size)
                buf = ChecksumBuffer(base, first_page, num_pages, self.layout, granule)
                self._initialise_buffer(buf, lane)
                setattr(entry, name, buf)
        except Exception:
            self.table.remove(first_page)
            raise
        return entry

    def unmap_file(self, first_page, lane):
        entry = self.table.lookup_page(first_page)
        if entry is None or entry.first_page != first_page:
            raise MappingError(f"no mapping starts at page {first_page}")
        self.flush(lane)
        for buf in entry.buffers():
            self._drop_cached(buf)
            self.system.allocator.free(buf.base, buf.size)
        self.table.remove(first_page)
        return entry

    def _drop_cached(self, buf):
        pass

    def _initialise_buffer(self, buf, lane):
        """Fill ``buf`` with checksums of the current media contents.

        Charged as one redundancy read per covered data line and one
        redundancy write per buffer line.  Pages never written are known to
        be zero, which keeps this cheap for large sparse mappings.
        """
        layout = self.layout
        line = self.geom.line_size
        page = self.geom.page_size
        media = self.nvm.media
        touched = {layout.page_base(a) for a in media if layout.region_kind(a) == DATA_REGION}
        zero_csum = crc32c(bytes(buf.granule)).to_bytes(4, "little")
        per_page = page // buf.granule
        entries = []
        for lp in range(buf.first_page, buf.first_page + buf.num_pages):
            pbase = layout.page_addr(lp)
            if pbase not in touched:
                entries.append(zero_csum * per_page)
                continue
            raw = b"".join(self.nvm.peek(pbase + i) for i in range(0, page, line))
            entries.append(b"".join(
                crc32c(raw[g:g + buf.granule]).to_bytes(4, "little") for g in range(0, page, buf.granule)
            ))
        blob = b"".join(entries)
        blob += bytes(buf.size - len(blob))
        for off in range(0, buf.size, line):
            self.nvm.poke(buf.base + off, blob[off:off + line])
        self.nvm.charge(lane, reads=buf.num_pages * self.geom.lines_per_page,
                        writes=buf.size // line, redundancy=True)

    # auditing

    def maintained(self):
        """Which redundancy kinds this mode keeps consistent."""
        return set()


def _slot(line_value, byte_off):
    return int.from_bytes(line_value[byte_off:byte_off + 4], "little")


def _with_slot(line_value, byte_off, csum):
    return line_value[:byte_off] + csum.to_bytes(4, "little") + line_value[byte_off + 4:]


class HardwareController(Controller):
    """Naive, EV, EVC and EVU; the mode's feature flags select the behaviour."""

    def __init__(self, system):
        super().__init__(system)
        self.use_dax_cl = self.mode.dax_cl
        self.use_diffs = self.mode.diffs
        if self.mode.caching:
            self.red = OnControllerCache(system)
        else:
            self.red = DirectRedundancy(system)
        self.diffs = DiffStore(system) if self.use_diffs else None

    def maintained(self):
        kinds = {"syscsum", "parity"}
        if self.use_dax_cl:
            kinds.add("dax_cl")
        return kinds

    def _buffers_for(self, first_page, num_pages):
        return {"dax_cl": self.geom.line_size} if self.use_dax_cl else {}

    def _match(self, lane, addr):
        if not len(self.table):
            return None
        self.system.counters.lanes[lane][RANGE_MATCH] += 1
        return self.table.lookup(addr)

    def cached_redundancy_lines(self):
        return self.red.lines()

    # -- read path -------------------------------------------------------

    def fill(self, lane, addr):
        entry = self._match(lane, addr)
        if entry is None:
            return self.nvm.read(addr, False, lane)
        return self.verified_fill(lane, addr, entry)

    def _read_and_verify(self, lane, addr, entry):
        """(value, expected, computed) for one verification attempt."""
        row = self.system.counters.lanes[lane]
        if self.use_dax_cl:
            value = self.nvm.read(addr, False, lane)
            caddr = entry.dax_cl.entry_addr(addr)
            cline = caddr - caddr % self.geom.line_size
            expected = _slot(self.red.read(lane, cline), caddr - cline)
            row[CSUM_OP] += 1
            return value, expected, crc32c(value)
        page = self.layout.page_base(addr)
        ls = self.geom.line_size
        lines = [self.nvm.read(a, a != addr, lane) for a in range(page, page + self.geom.page_size, ls)]
        caddr = system_checksum_addr(page, self.layout)
        cline = caddr - caddr % ls
        expected = _slot(self.red.read(lane, cline), caddr - cline)
        row[CSUM_OP] += 1
        return lines[(addr - page) // ls], expected, crc32c(b"".join(lines))

    def verified_fill(self, lane, addr, entry=None):
        """Read a DAX line from NVM and verify it; detects and optionally recovers."""
        entry = entry or self.table.lookup(addr)
        value, expected, computed = self._read_and_verify(lane, addr, entry)
        if expected == computed:
            return value
        event = CorruptionEvent(self.system.ordinal, addr, expected, computed,
                                "line" if self.use_dax_cl else "page")
        self.events.append(event)
        if self.recovery_enabled:
            if self.recover_page(lane, self.layout.page_base(addr)) is not None:
                value2, expected, computed = self._read_and_verify(lane, addr, entry)
                if expected == computed:
                    event.recovered = True
                    return value2
        return value

    # -- write path ------------------------------------------------------

    def dirty_install(self, lane, addr, old, new):
        if not self.use_diffs:
            return
        if self._match(lane, addr) is None:
            return
        victim = self.diffs.fold(lane, addr, xor_bytes(old, new))
        if victim is not None:
            self.diff_eviction(lane, *victim)

    def writeback(self, lane, addr, value):
        entry = self._match(lane, addr)
        if entry is None:
            self.nvm.write(addr, value, False, lane)
            return
        if self.use_diffs:
            diff = self.diffs.take(lane, addr)
            if diff is None:
                raise AssertionError(f"dirty DAX line {addr:#x} has no stored diff")
        else:
            old = self.nvm.read(addr, True, lane)
            diff = xor_bytes(old, value)
        self._apply_diff(lane, entry, addr, diff)
        self.nvm.write(addr, value, False, lane)

    def diff_eviction(self, lane, addr, diff):
        """Write back a line whose diff lost its slot; the LLC copy stays, now clean."""
        line = self.llc.peek(addr, DATA)
        if line is None or not line.dirty:
            raise AssertionError(f"diff for {addr:#x} without a dirty LLC line")
        entry = self.table.lookup(addr)
        self._apply_diff(lane, entry, addr, diff)
        self.nvm.write(addr, line.value, False, lane)
        line.dirty = False

    def _apply_diff(self, lane, entry, addr, diff):
        row = self.system.counters.lanes[lane]
        ls = self.geom.line_size
        in_page = addr % self.geom.page_size

        caddr = system_checksum_addr(addr, self.layout)
        cline = caddr - caddr % ls
        coff = caddr - cline
        geom = self.geom
        self.red.update(lane, cline, lambda v: _with_slot(
            v, coff, incremental_page_checksum(_slot(v, coff), diff, in_page, geom)))
        row[CSUM_OP] += 1

        if self.use_dax_cl:
            daddr = entry.dax_cl.entry_addr(addr)
            dline = daddr - daddr % ls
            doff = daddr - dline
            self.red.update(lane, dline, lambda v: _with_slot(
                v, doff, line_checksum_update(_slot(v, doff), diff)))
            row[CSUM_OP] += 1

        self.red.update(lane, parity_line_addr(addr, self.layout), lambda v: parity_update(v, diff))
        row[CSUM_OP] += 1

    # -- maintenance -----------------------------------------------------

    def flush(self, lane):
        self.red.flush(lane)

    def invalidate(self):
        if self.diffs is not None and len(self.diffs):
            raise AssertionError("invalidating controller state with live diffs")
        self.red.invalidate()

    def _drop_cached(self, buf):
        from .layout import Region

        self.red.invalidate(Region(buf.base, buf.size))

    # -- recovery --------------------------------------------------------

    def _read_page(self, lane, page):
        ls = self.geom.line_size
        return [self.nvm.read(a, True, lane) for a in range(page, page + self.geom.page_size, ls)]

    def _page_checksum(self, lane, page):
        caddr = system_checksum_addr(page, self.layout)
        cline = caddr - caddr % self.geom.line_size
        return _slot(self.nvm.read(cline, True, lane), caddr - cline)

    def recover_page(self, lane, page_addr):
        """Rebuild a corrupt data page from its stripe.

        Returns the page bytes, or None when the stripe has a second bad
        member (or the rebuilt page still fails its system-checksum).
        """
        layout = self.layout
        page_addr = layout.page_base(page_addr)
        self.red.flush(lane)                       # NVM redundancy must be current
        stripe = layout.stripe_of(page_addr)
        data_pages, parity_page = layout.stripe_members(stripe)
        survivors = []
        for q in data_pages:
            if q == page_addr:
                continue
            lines = self._read_page(lane, q)
            if crc32c(b"".join(lines)) != self._page_checksum(lane, q):
                return None
            survivors.append(lines)
        survivors.append(self._read_page(lane, parity_page))
        width = layout.num_dimms - 1
        rebuilt = [reconstruct_line([s[i] for s in survivors], width)
                   for i in range(self.geom.lines_per_page)]
        if crc32c(b"".join(rebuilt)) != self._page_checksum(lane, page_addr):
            return None
        ls = self.geom.line_size
        for i, value in enumerate(rebuilt):
            self.nvm.write(page_addr + i * ls, value, True, lane)
        entry = self.table.lookup(page_addr)
        if self.use_dax_cl and entry is not None:
            for i, value in enumerate(rebuilt):
                daddr = entry.dax_cl.entry_addr(page_addr + i * ls)
                dline = daddr - daddr % ls
                csum = crc32c(value)
                self.red.update(lane, dline, lambda v, o=daddr - dline, c=csum: _with_slot(v, o, c))
            self.red.flush(lane)
        return b"".join(rebuilt)


class TxBController(Controller):
    """Software redundancy updated at transaction boundaries (no read verification).

    Work is modelled as the loads and stores a library would issue: checksums
    and parity are computed word by word (``word_bytes`` per access), so a
    64-byte line costs ``64 // word_bytes`` L1 accesses once resident.
    Pre-transaction values of dirtied lines come from the transaction's undo
    log, which is not charged here.
    """

    def __init__(self, system):
        super().__init__(system)
        self.page_granular = self.mode.name == "txb-page"
        self.object_size = self.mode.object_size
        if self.geom.page_size % self.object_size:
            raise ConfigError("mode.object_size", "must divide the page size")
        self.words = max(1, self.geom.line_size // system.machine.txb_word_bytes)
        self.pending = {}       # lane -> lines dirtied in its open transaction
        self.committed = {}     # line -> value the redundancy currently reflects

    def maintained(self):
        return {"syscsum", "parity"} if self.page_granular else {"object_csum", "parity"}

    def _buffers_for(self, first_page, num_pages):
        return {} if self.page_granular else {"object_csums": self.object_size}

    # software redundancy lines travel the data path but are counted as redundancy

    def fill(self, lane, addr):
        return self.nvm.read(addr, self.layout.is_redundancy_addr(addr), lane)

    def writeback(self, lane, addr, value):
        self.nvm.write(addr, value, self.layout.is_redundancy_addr(addr), lane)

    def note_store(self, lane, addr, old_value):
        if not len(self.table) or self.table.lookup(addr) is None:
            return
        self.pending.setdefault(lane, set()).add(addr)
        self.committed.setdefault(addr, old_value)

    # word-granular software accesses through the hierarchy

    def _load_line(self, lane, addr):
        value = self.system.load(lane, addr)
        self.system.counters.lanes[lane][L1_HIT] += self.words - 1
        return value

    def _update_line(self, lane, addr, fn):
        old = self._load_line(lane, addr)
        self.system.store(lane, addr, fn(old), track=False)
        self.system.counters.lanes[lane][L1_HIT] += self.words - 1

    def _update_slot(self, lane, byte_addr, csum):
        ls = self.geom.line_size
        line = byte_addr - byte_addr % ls
        off = byte_addr - line
        old = self.system.load(lane, line)
        self.system.store(lane, line, _with_slot(old, off, csum), track=False)

    def commit(self, lane):
        dirtied = self.pending.pop(lane, None)
        if not dirtied:
            return
        ls = self.geom.line_size
        current = {}
        if self.page_granular:
            for page in sorted({self.layout.page_base(a) for a in dirtied}):
                lines = [self._load_line(lane, a) for a in range(page, page + self.geom.page_size, ls)]
                for i, v in enumerate(lines):
                    current[page + i * ls] = v
                self._update_slot(lane, system_checksum_addr(page, self.layout), crc32c(b"".join(lines)))
        else:
            per_obj = self.object_size // ls
            objects = sorted({a - self.layout.data_offset(a) % self.object_size for a in dirtied})
            for obj in objects:
                lines = [self._load_line(lane, obj + i * ls) for i in range(per_obj)]
                for i, v in enumerate(lines):
                    current[obj + i * ls] = v
                buf = self.table.lookup(obj).object_csums
                self._update_slot(lane, buf.entry_addr(obj), crc32c(b"".join(lines)))
        for addr in sorted(dirtied):
            base = self.committed.pop(addr, None)
            if base is None:        # another lane's commit already covered it
                continue
            diff = xor_bytes(base, current[addr])
            self._update_line(lane, parity_line_addr(addr, self.layout),
                              lambda v, d=diff: parity_update(v, d))


def build_controller(system):
    mode = system.mode
    if mode.hardware:
        return HardwareController(system)
    if mode.software:
        return TxBController(system)
    return Controller(system)


__all__ = [
    "ControllerMode", "CorruptionEvent", "DaxMappingTable", "MappingEntry", "DiffStore",
    "OnControllerCache", "DirectRedundancy", "Controller", "HardwareController",
    "TxBController", "build_controller", "parity_addr", "MODE_NAMES",
]
