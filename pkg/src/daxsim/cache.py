"""Set-associative LRU cache levels with way partitioning."""

from dataclasses import dataclass

from .errors import ConfigError

DATA = "data"
REDUNDANCY = "redundancy"
DIFF = "diff"


@dataclass(frozen=True)
class CacheLevelConfig:
    name: str
    capacity: int
    associativity: int
    latency: int                # cycles
    energy_hit: float           # pJ
    energy_miss: float          # pJ
    line_size: int = 64
    banks: int = 1
    inclusive: bool = False

    @property
    def sets_per_bank(self):
        return self.capacity // (self.associativity * self.line_size * self.banks)

    @property
    def sets(self):
        return self.sets_per_bank * self.banks

    def validate(self):
        if self.capacity <= 0 or self.associativity <= 0 or self.banks <= 0:
            raise ConfigError(self.name, "capacity, associativity and banks must be positive")
        if self.capacity % (self.associativity * self.line_size * self.banks):
            raise ConfigError(
                f"{self.name}.capacity",
                f"{self.capacity} not divisible by associativity*line_size*banks",
            )
        n = self.sets_per_bank
        if n & (n - 1):
            raise ConfigError(f"{self.name}.capacity", f"{n} sets per bank is not a power of two")
        return self


@dataclass(frozen=True)
class WayPartitionPlan:
    redundancy_ways: int = 2
    diff_ways: int = 1
    associativity: int = 16

    @property
    def data_ways(self):
        return self.associativity - self.redundancy_ways - self.diff_ways

    def validate(self):
        if self.redundancy_ways < 0 or self.diff_ways < 0:
            raise ConfigError("partition", "way counts must be non-negative")
        if self.data_ways < 1:
            raise ConfigError(
                "partition",
                f"redundancy_ways + diff_ways = {self.redundancy_ways + self.diff_ways} "
                f"leaves no data ways out of {self.associativity}",
            )
        return self


class Line:
    __slots__ = ("value", "dirty", "way", "sharers")

    def __init__(self, value, dirty=False):
        self.value = value
        self.dirty = dirty
        self.way = -1
        self.sharers = 0

    def __repr__(self):
        return f"Line(dirty={self.dirty}, way={self.way})"


class _Partition:
    __slots__ = ("ways", "sets", "used", "hits", "misses")

    def __init__(self, ways, nsets):
        self.ways = ways
        self.sets = [{} for _ in range(nsets)] if ways else []
        self.used = [0] * nsets if ways else []
        self.hits = 0
        self.misses = 0


class CacheLevel:
    """One cache level; each partition owns a disjoint subset of every set's ways.

    Sets keep their lines in a dict ordered from least to most recently used.
    A miss into a full set evicts that partition's LRU line and hands it back
    to the caller, who decides what a dirty victim means.
    """

    def __init__(self, config, partitions=None):
        self.config = config.validate()
        self.name = config.name
        if partitions is None:
            partitions = {DATA: config.associativity}
        if sum(partitions.values()) != config.associativity:
            raise ConfigError(f"{config.name}.partitions", "ways must sum to associativity")
        self._line_shift = config.line_size.bit_length() - 1
        self._banks = config.banks
        self._spb_mask = config.sets_per_bank - 1
        self._spb = config.sets_per_bank
        self.parts = {name: _Partition(ways, config.sets) for name, ways in partitions.items()}

    def set_index(self, addr):
        ln = addr >> self._line_shift
        if self._banks == 1:
            return ln & self._spb_mask
        bank = ln % self._banks
        return bank * self._spb + ((ln // self._banks) & self._spb_mask)

    def ways(self, part=DATA):
        return self.parts[part].ways

    def lookup(self, addr, part=DATA):
        """Find ``addr``; on a hit it becomes MRU. Counts a hit or a miss."""
        p = self.parts[part]
        if not p.ways:
            p.misses += 1
            return None
        s = p.sets[self.set_index(addr)]
        line = s.pop(addr, None)
        if line is None:
            p.misses += 1
            return None
        s[addr] = line
        p.hits += 1
        return line

    def peek(self, addr, part=DATA):
        p = self.parts[part]
        if not p.ways:
            return None
        return p.sets[self.set_index(addr)].get(addr)

    def insert(self, addr, line, part=DATA):
        """Install ``line`` as MRU; returns the evicted ``(addr, line)`` or None."""
        p = self.parts[part]
        if not p.ways:
            raise ValueError(f"{self.name}: partition {part!r} has no ways")
        idx = self.set_index(addr)
        s = p.sets[idx]
        if addr in s:
            raise ValueError(f"{self.name}: {addr:#x} already present")
        victim = None
        if len(s) >= p.ways:
            vaddr = next(iter(s))
            vline = s.pop(vaddr)
            line.way = vline.way
            victim = (vaddr, vline)
        else:
            used = p.used[idx]
            way = (~used & (used + 1)).bit_length() - 1
            p.used[idx] = used | (1 << way)
            line.way = way
        s[addr] = line
        return victim

    def remove(self, addr, part=DATA):
        p = self.parts[part]
        if not p.ways:
            return None
        idx = self.set_index(addr)
        line = p.sets[idx].pop(addr, None)
        if line is not None:
            p.used[idx] &= ~(1 << line.way)
        return line

    def access(self, addr, write=False, part=DATA, value=None):
        """Look up ``addr`` and allocate on a miss.

        Returns ``(hit, victim)`` where ``victim`` is ``(addr, line)`` of the
        evicted line (its ``dirty`` flag tells whether it needs writing back).
        """
        line = self.lookup(addr, part)
        victim = None
        if line is None:
            line = Line(value)
            victim = self.insert(addr, line, part)
            hit = False
        else:
            hit = True
            if value is not None:
                line.value = value
        if write:
            line.dirty = True
        return hit, victim

    def lines(self, part=DATA):
        p = self.parts[part]
        for s in p.sets:
            yield from list(s.items())

    def contains(self, addr, part=DATA):
        return self.peek(addr, part) is not None

    def occupancy(self, part=DATA):
        return sum(len(s) for s in self.parts[part].sets)

    def stats(self, part=DATA):
        p = self.parts[part]
        return p.hits, p.misses

    def clear(self, part=None):
        parts = self.parts.values() if part is None else [self.parts[part]]
        for p in parts:
            for s in p.sets:
                s.clear()
            p.used = [0] * len(p.used)
