"""Seeded synthetic access streams.

Addresses are logical byte offsets into the DAX-mapped data space; thread
``t`` owns ``[t * region_bytes, (t + 1) * region_bytes)``.  Streams from the
threads are interleaved round-robin.  A transaction is ``txn_size``
operations, where one operation is a kernel element (stream kinds), a single
line access (fio-style kinds), a key lookup/update or a log append.
"""

import random
from dataclasses import dataclass

from .errors import ConfigError

KINDS = (
    "seq_read", "seq_write", "rand_read", "rand_write",
    "stream_copy", "stream_scale", "stream_add", "stream_triad",
    "kv_skewed", "log_append",
)
READ_ONLY = ("seq_read", "rand_read")
WRITE_HEAVY = tuple(k for k in KINDS if k not in READ_ONLY)

LOAD = "load"
STORE = "store"


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str = "seq_write"
    threads: int = 12
    region_bytes: int = 16 * 1024 * 1024
    access_granularity: int = 64
    seed: int = 1
    txn_size: int = 1
    ops: int = None                 # kv_skewed / log_append; default one per line
    update_fraction: float = 0.5    # kv_skewed
    hot_fraction: float = 0.1       # kv_skewed: share of keys that is hot
    hot_ops: float = 0.9            # kv_skewed: share of operations sent to hot keys

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError("workload.kind", f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.threads < 1:
            raise ConfigError("workload.threads", "must be at least 1")
        if self.access_granularity != 64:
            raise ConfigError("workload.access_granularity", "only 64-byte accesses are modelled")
        if self.region_bytes < self.access_granularity or self.region_bytes % self.access_granularity:
            raise ConfigError("workload.region_bytes", "must be a positive multiple of 64")
        if self.txn_size < 1:
            raise ConfigError("workload.txn_size", "must be at least 1")
        if not 0.0 <= self.update_fraction <= 1.0:
            raise ConfigError("workload.update_fraction", "must be in [0, 1]")
        if not 0.0 < self.hot_fraction < 1.0 or not 0.0 <= self.hot_ops <= 1.0:
            raise ConfigError("workload.hot_fraction", "hot_fraction in (0, 1), hot_ops in [0, 1]")
        if self.ops is not None and self.ops < 0:
            raise ConfigError("workload.ops", "must be non-negative")
        lines = self.lines_per_thread
        if self.kind.startswith("stream") and lines < 3:
            raise ConfigError("workload.region_bytes", "stream kernels need at least 3 lines per thread")
        if self.kind == "log_append" and self.ops is not None and self.ops > lines - 1:
            raise ConfigError("workload.ops", f"log_append has only {lines - 1} node slots per thread")
        if self.kind == "kv_skewed" and int(lines * self.hot_fraction) < 1:
            raise ConfigError("workload.region_bytes", "region too small for a hot key set")
        return self

    @property
    def lines_per_thread(self):
        return self.region_bytes // self.access_granularity

    @property
    def footprint(self):
        return self.threads * self.region_bytes

    @property
    def write_heavy(self):
        return self.kind in WRITE_HEAVY

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class AccessEvent:
    thread: int
    op: str
    address: int
    payload: bytes = None
    txn_boundary: bool = False


def _thread_ops(spec, t):
    """Yield one list of (op, line index) per operation of thread ``t``."""
    rng = random.Random(f"{spec.seed}:{t}:{spec.kind}")
    n = spec.lines_per_thread
    kind = spec.kind
    if kind in ("seq_read", "seq_write", "rand_read", "rand_write"):
        order = list(range(n))
        if kind.startswith("rand"):
            rng.shuffle(order)
        op = LOAD if kind.endswith("read") else STORE
        for i in order:
            yield [(op, i)]
    elif kind.startswith("stream"):
        m = n // 3
        a, b, c = 0, m, 2 * m
        for i in range(m):
            if kind == "stream_copy":
                yield [(LOAD, a + i), (STORE, c + i)]
            elif kind == "stream_scale":
                yield [(LOAD, c + i), (STORE, b + i)]
            elif kind == "stream_add":
                yield [(LOAD, a + i), (LOAD, b + i), (STORE, c + i)]
            else:
                yield [(LOAD, b + i), (LOAD, c + i), (STORE, a + i)]
    elif kind == "kv_skewed":
        hot = int(n * spec.hot_fraction)
        ops = n if spec.ops is None else spec.ops
        for _ in range(ops):
            if rng.random() < spec.hot_ops:
                key = rng.randrange(hot)
            else:
                key = rng.randrange(hot, n)
            if rng.random() < spec.update_fraction:
                yield [(LOAD, key), (STORE, key)]
            else:
                yield [(LOAD, key)]
    elif kind == "log_append":
        # slot 0 is the log head; nodes go to allocator-shuffled slots and the
        # previous node's link is patched to point at the new one
        slots = list(range(1, n))
        rng.shuffle(slots)
        ops = len(slots) if spec.ops is None else spec.ops
        prev = None
        for i in range(ops):
            node = slots[i]
            group = [(STORE, node)]
            if prev is not None:
                group.append((STORE, prev))
            group.append((STORE, 0))
            yield group
            prev = node
    else:  # pragma: no cover - validate() guards this
        raise ConfigError("workload.kind", kind)


def thread_events(spec, t):
    base = t * spec.region_bytes
    g = spec.access_granularity
    payloads = random.Random(f"{spec.seed}:{t}:payload")
    for k, group in enumerate(_thread_ops(spec, t), 1):
        boundary_op = k % spec.txn_size == 0
        last = len(group) - 1
        for j, (op, line) in enumerate(group):
            payload = payloads.randbytes(g) if op == STORE else None
            yield AccessEvent(t, op, base + line * g, payload, boundary_op and j == last)


def generate(spec):
    """Round-robin interleaving of every thread's stream.

    The final operation of each thread always closes its transaction so no
    software-redundancy work is left pending when the stream ends.
    """
    spec.validate()
    streams = [_with_final_boundary(thread_events(spec, t)) for t in range(spec.threads)]
    while streams:
        alive = []
        for s in streams:
            ev = next(s, None)
            if ev is not None:
                yield ev
                alive.append(s)
        streams = alive


def _with_final_boundary(events):
    prev = None
    for ev in events:
        if prev is not None:
            yield prev
        prev = ev
    if prev is not None:
        if not prev.txn_boundary:
            prev = AccessEvent(prev.thread, prev.op, prev.address, prev.payload, True)
        yield prev
