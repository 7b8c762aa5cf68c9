import pytest

from daxsim.cache import DATA, DIFF, REDUNDANCY, CacheLevel, CacheLevelConfig, Line, WayPartitionPlan
from daxsim.errors import ConfigError

CFG = CacheLevelConfig("t", 4 * 4 * 64, 4, 1, 1, 1)    # 4 sets x 4 ways


def same_set(cache, n, part=DATA, start=0):
    out, a = [], start
    target = cache.set_index(start)
    while len(out) < n:
        if cache.set_index(a) == target:
            out.append(a)
        a += 64
    return out


def test_repeat_access_hits():
    c = CacheLevel(CFG)
    assert c.access(0x40) == (False, None)
    for _ in range(5):
        assert c.access(0x40)[0]
    assert c.stats() == (5, 1)


def test_lru_eviction():
    c = CacheLevel(CFG)
    addrs = same_set(c, 5)
    for a in addrs[:4]:
        c.access(a)
    hit, victim = c.access(addrs[4])
    assert not hit and victim[0] == addrs[0]
    assert not c.access(addrs[0])[0]


def test_lru_refresh_on_hit():
    c = CacheLevel(CFG)
    a = same_set(c, 5)
    for x in a[:4]:
        c.access(x)
    c.access(a[0])
    _, victim = c.access(a[4])
    assert victim[0] == a[1]


def test_dirty_victim_reported():
    c = CacheLevel(CFG)
    a = same_set(c, 5)
    c.access(a[0], write=True, value=b"x")
    for x in a[1:4]:
        c.access(x)
    _, victim = c.access(a[4])
    assert victim[0] == a[0] and victim[1].dirty and victim[1].value == b"x"


def test_cold_ways_lowest_index_first():
    c = CacheLevel(CFG)
    a = same_set(c, 4)
    for i, x in enumerate(a):
        line = Line(b"")
        c.insert(x, line)
        assert line.way == i
    c.remove(a[1])
    line = Line(b"")
    c.insert(same_set(c, 5)[4], line)
    assert line.way == 1


def test_partition_isolation_sweep():
    cfg = CacheLevelConfig("llc", 16 * 8 * 64, 16, 27, 240, 500)
    c = CacheLevel(cfg, {DATA: 13, REDUNDANCY: 2, DIFF: 1})
    data = [i * 64 for i in range(0, 8 * 13)]
    for a in data:
        c.insert(a, Line(b"d"))
    for a in range(1 << 20, (1 << 20) + 64 * 4000, 64):
        if c.peek(a, REDUNDANCY) is None:
            c.insert(a, Line(b"r"), REDUNDANCY)
        assert c.peek(a) is None          # never visible in data ways
    assert all(c.peek(a) is not None for a in data)
    assert c.occupancy(REDUNDANCY) == 2 * 8
    assert c.lookup(data[0], REDUNDANCY) is None


def test_partition_plan_validation():
    assert WayPartitionPlan().data_ways == 13
    WayPartitionPlan(8, 7).validate()
    with pytest.raises(ConfigError):
        WayPartitionPlan(0, 16).validate()
    with pytest.raises(ConfigError):
        WayPartitionPlan(-1, 1).validate()


def test_config_validation():
    with pytest.raises(ConfigError):
        CacheLevelConfig("x", 3 * 64 * 4, 4, 1, 1, 1).validate()
    with pytest.raises(ConfigError):
        CacheLevelConfig("x", 1000, 4, 1, 1, 1).validate()
    with pytest.raises(ConfigError):
        CacheLevel(CFG, {DATA: 3})


def test_banked_set_index_spreads_lines():
    cfg = CacheLevelConfig("llc", 12 * 4 * 16 * 64, 16, 27, 240, 500, banks=12)
    c = CacheLevel(cfg)
    assert cfg.sets == 48
    idx = {c.set_index(i * 64) for i in range(48)}
    assert idx == set(range(48))


def test_conservation(rng):
    c = CacheLevel(CFG)
    n = 2000
    for _ in range(n):
        c.access(rng.randrange(64) * 64)
    assert sum(c.stats()) == n
