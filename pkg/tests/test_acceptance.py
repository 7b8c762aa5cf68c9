"""Acceptance gate: one PASS/FAIL line per criterion, printed in the terminal summary."""

import random
import time
from contextlib import contextmanager

import crc32c
import pytest

from daxsim import System
from daxsim.config import ExperimentConfig
from daxsim.controllers import ControllerMode
from daxsim.counters import (
    AccessCounters, DEFAULT_COSTS, L1_HIT, L2_MISS, LLC_HIT, LLC_MISS, NVM_DATA_READ,
    NVM_DATA_WRITE, NVM_RED_WRITE, OC_HIT, OC_MISS, accrue, energy_pj,
)
from daxsim.crc import incremental_page_checksum, xor_bytes
from daxsim.layout import PageGeometry
from daxsim.nvm import LOST_WRITE, MISDIRECTED_READ, MISDIRECTED_WRITE, FaultScheduleEntry
from daxsim.runner import run_once
from daxsim.workloads import KINDS, WRITE_HEAVY, WorkloadSpec

import test_faults
from conftest import line_addr, make_system

RESULTS = {}
DETECTING = ("naive", "ev", "evu")
BREAKDOWN = ("naive", "ev", "evc", "evu")      # each step adds one feature
THREADS, REGION = 4, 64 * 1024                 # desk-scale matrix point


@contextmanager
def criterion(n, title, budget_s):
    t0 = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < budget_s, f"took {elapsed:.1f}s, budget {budget_s}s"
        status = "PASS"
    except BaseException as exc:
        note = " :: " + (str(exc).splitlines() or [type(exc).__name__])[0][:160]
        raise
    finally:
        elapsed = time.perf_counter() - t0
        RESULTS[n] = f"criterion {n:>2} {status}  {title} ({elapsed:.1f}s of {budget_s}s){note}"


_cache = {}


def report(mode, kind, threads=THREADS, region=REGION, seed=1):
    key = (mode, kind, threads, region, seed)
    if key not in _cache:
        cfg = ExperimentConfig(mode=ControllerMode.parse(mode),
                               workload=WorkloadSpec(kind, threads=threads, region_bytes=region))
        _cache[key] = run_once(cfg, seed)
    return _cache[key]


# -- 1 ---------------------------------------------------------------------

def test_c01_crc_oracle_equivalence():
    geom = PageGeometry()
    rnd = random.Random(101)
    with criterion(1, "incremental page CRC == full recompute, 10,000 cases", 5):
        cases = 0
        for _ in range(10_000):
            page = bytearray(rnd.randbytes(geom.page_size))
            csum = crc32c.crc32c(page)
            for _ in range(rnd.randint(1, 6)):
                off = rnd.randrange(geom.lines_per_page) * geom.line_size
                old = bytes(page[off:off + geom.line_size])
                new = bytearray(old)
                lo = rnd.randrange(geom.line_size)
                hi = rnd.randint(lo + 1, geom.line_size)
                new[lo:hi] = rnd.randbytes(hi - lo)
                csum = incremental_page_checksum(csum, xor_bytes(old, bytes(new)), off, geom)
                page[off:off + geom.line_size] = new
                assert csum == crc32c.crc32c(page)
            cases += 1
        assert cases == 10_000


# -- 2 ---------------------------------------------------------------------

def test_c02_read_amplification():
    with criterion(2, "cold random verified reads: Naive 65x, EV 2x", 10):
        for mode, want in (("naive", 65), ("ev", 2)):
            t = report(mode, "rand_read").counters.totals()
            data = t["nvm_data_reads"]
            assert data == THREADS * REGION // 64
            total = data + t["nvm_redundancy_reads"]
            assert total == want * data, f"{mode}: {total}/{data}"


# -- 3 ---------------------------------------------------------------------

def test_c03_checksum_line_sharing():
    with criterion(3, "EVU 12-lane seq_read redundancy/data reads = 1/16 +- 5%", 30):
        t = report("evu", "seq_read", threads=12, region=128 * 1024).counters.totals()
        ratio = t["nvm_redundancy_reads"] / t["nvm_data_reads"]
        assert abs(ratio - 1 / 16) <= 0.05 / 16, ratio


# -- 4 and 5 ---------------------------------------------------------------

def _write_through(s, addr, value):
    s.store(0, addr, value)
    s.evict(addr)


def _arm(s, kind, target, misdirect=None):
    op = "r" if kind == MISDIRECTED_READ else "w"
    s.nvm.arm(FaultScheduleEntry(kind, target, s.nvm.count(op, target) + 1, misdirect))


def _random_line(s, rnd, pages):
    return line_addr(s, rnd.randrange(pages), rnd.randrange(64))


def _other_stripe(s, rnd, pages, a):
    while True:
        b = _random_line(s, rnd, pages)
        if s.layout.stripe_of(b) != s.layout.stripe_of(a):
            return b


def fault_trials(mode, trials, seed, pages=24, check_recovery=False):
    """Inject ``trials`` random faults; returns (faults, affected reads, detections).

    Every affected line is read back (uncached) right after its fault; a
    detection only counts if it names that line at that very read.
    """
    rnd = random.Random(seed)
    s = make_system(mode, pages=pages)
    faults = reads = hits = 0
    for _ in range(trials):
        kind = rnd.choice((LOST_WRITE, MISDIRECTED_WRITE, MISDIRECTED_READ))
        a = _random_line(s, rnd, pages)
        if kind == LOST_WRITE:
            _write_through(s, a, rnd.randbytes(64))
            _arm(s, kind, a)
            _write_through(s, a, rnd.randbytes(64))
            affected = [a]
            assert s.nvm.peek(a) != s.nvm.expected(a)
        elif kind == MISDIRECTED_WRITE:
            b = _other_stripe(s, rnd, pages, a)
            _write_through(s, b, rnd.randbytes(64))
            _arm(s, kind, a, b)
            _write_through(s, a, rnd.randbytes(64))
            affected = [b, a]
            assert all(s.nvm.peek(x) != s.nvm.expected(x) for x in affected)
        else:
            b = _other_stripe(s, rnd, pages, a)
            _write_through(s, a, rnd.randbytes(64))
            _write_through(s, b, rnd.randbytes(64))
            _arm(s, kind, a, b)
            affected = [a]
            assert s.nvm.peek(a) != s.nvm.peek(b)
        faults += 1
        for x in affected:
            before = len(s.events)
            got = s.load(0, x)
            new = s.events[before:]
            reads += 1
            if any(e.line_addr == x and e.detected_at == s.ordinal for e in new):
                hits += 1
            if mode == "off":
                assert new == []
                continue
            if check_recovery:
                assert new and all(e.recovered for e in new)
                assert got == s.nvm.expected(x)
        if check_recovery and mode != "off":
            # every affected line has been read back, so nothing may stay damaged
            assert s.nvm.corrupted_lines() == []
            s.drain()
            assert s.audit() == [], s.audit()
    assert s.miscorrections == []
    return faults, reads, hits


def test_c04_detection_completeness():
    with criterion(4, "100% detection in Naive/EV/EVU, 0% in Off, >= 1000 faults", 60):
        total = 0
        for i, mode in enumerate(DETECTING):
            faults, reads, hits = fault_trials(mode, 400, seed=400 + i)
            assert hits == reads, f"{mode}: {hits}/{reads} affected reads detected"
            total += faults
        faults, reads, hits = fault_trials("off", 400, seed=499)
        assert hits == 0
        assert total >= 1000
        # the scripted timelines, every mode
        for mode in ("off",) + DETECTING:
            test_faults.test_fig1_lost_write_timeline(mode)
            test_faults.test_fig2_misdirected_write_timeline(mode)
            test_faults.test_fig2_misdirected_read_timeline(mode)


def test_c05_recovery_correctness():
    with criterion(5, "recovery restores media, audit passes; 2-member loss unrecoverable", 60):
        for i, mode in enumerate(DETECTING):
            faults, reads, hits = fault_trials(mode, 120, seed=500 + i, check_recovery=True)
            assert hits == reads
        for mode in DETECTING:
            test_faults.test_two_corrupt_members_unrecoverable(mode)
            test_faults.test_misdirect_within_one_stripe_is_unrecoverable(mode)


# -- 6 ---------------------------------------------------------------------

def _extra(mode, kind):
    return report(mode, kind).metrics()["total_accesses"] - report("off", kind).metrics()["total_accesses"]


def test_c06_traffic_ordering():
    with criterion(6, "EVU <= EV <= Naive everywhere; EVU < TxB-Object < TxB-Page when writing", 300):
        for kind in KINDS:
            red = {m: report(m, kind).counters.redundancy_nvm_traffic() for m in DETECTING}
            assert red["evu"] <= red["ev"] <= red["naive"], (kind, red)
        for kind in WRITE_HEAVY:
            extra = {m: _extra(m, kind) for m in ("evu", "txb-object", "txb-page")}
            assert extra["evu"] < extra["txb-object"] < extra["txb-page"], (kind, extra)


# -- 7 ---------------------------------------------------------------------

def test_c07_locality_sensitivity():
    with criterion(7, "EVU redundancy-cache hit rate seq_write > rand_write", 60):
        seq, rnd = report("evu", "seq_write"), report("evu", "rand_write")
        assert seq.workload["region_bytes"] == rnd.workload["region_bytes"]
        hs = seq.derived()["redundancy_cache_hit_rate"]
        hr = rnd.derived()["redundancy_cache_hit_rate"]
        assert hs > hr, (hs, hr)


# -- 8 ---------------------------------------------------------------------

def test_c08_design_breakdown():
    with criterion(8, "breakdown monotone on seq-friendly kinds; rand_write NVM inversion", 120):
        for kind in ("seq_write", "stream_triad", "kv_skewed"):
            red = [report(m, kind).counters.redundancy_nvm_traffic() for m in BREAKDOWN]
            assert all(x >= y for x, y in zip(red, red[1:])), (kind, red)
        nvm = [report(m, "rand_write").metrics()["nvm_accesses"] for m in BREAKDOWN[1:]]
        assert any(y > x for x, y in zip(nvm, nvm[1:])), \
            f"no NVM-traffic inversion on rand_write (ev, evc, evu = {nvm})"


# -- 9 ---------------------------------------------------------------------

def test_c09_determinism_fixed_work(monkeypatch):
    with criterion(9, "byte-identical reports; identical access streams across modes", 60):
        modes = ("off", "naive", "ev", "evc", "evu", "txb-object:256", "txb-page")
        streams = {}
        real = System.execute

        def recording(self, ev):
            streams[self._tag].append((ev.thread, ev.op, ev.address, ev.payload, ev.txn_boundary))
            return real(self, ev)

        monkeypatch.setattr(System, "execute", recording)
        for kind in ("kv_skewed", "stream_triad", "log_append"):
            for mode in modes:
                cfg = ExperimentConfig(mode=ControllerMode.parse(mode),
                                       workload=WorkloadSpec(kind, threads=2, region_bytes=16 * 1024))
                jsons = []
                for rep in range(2):
                    System._tag = (kind, mode, rep)
                    streams[System._tag] = []
                    jsons.append(run_once(cfg, 9).to_json().encode())
                assert jsons[0] == jsons[1], (kind, mode)
            base = streams[(kind, "off", 0)]
            assert base
            for key, s in streams.items():
                if key[0] == kind:
                    assert s == base, key
        del System._tag


# -- 10 --------------------------------------------------------------------

def test_c10_energy_linearity():
    with criterion(10, "accrue matches hand-computed energy", 1):
        c = AccessCounters(2)
        c.lanes[0][NVM_DATA_READ] = 1
        c.lanes[1][NVM_DATA_READ] = 2
        c.lanes[0][NVM_DATA_WRITE] = 1
        c.lanes[c.sys][NVM_RED_WRITE] = 2
        c.lanes[0][LLC_HIT] = 5
        c.lanes[1][LLC_MISS] = 1
        c.lanes[0][L1_HIT] = 7
        c.lanes[1][L2_MISS] = 3
        c.lanes[0][OC_HIT] = 2
        c.lanes[1][OC_MISS] = 4
        # 3*1.6nJ + 1*9nJ + 2*9nJ + 5*240pJ + 500pJ + 7*15pJ + 3*94pJ + 2*15pJ + 4*33pJ
        hand_pj = 4800 + 9000 + 18000 + 1200 + 500 + 105 + 282 + 30 + 132
        assert hand_pj == 34049
        assert energy_pj(c, DEFAULT_COSTS) == 34049
        assert accrue(c)[0] == 3.4049e-08
        one = AccessCounters(1)
        one.lanes[0][NVM_DATA_READ] = 1
        assert accrue(one) == (1.6e-09, 60.0)
        one.lanes[0][NVM_DATA_READ] = 0
        one.lanes[0][LLC_HIT] = 1
        assert accrue(one)[0] == 2.4e-10
