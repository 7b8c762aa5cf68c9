import pytest

from daxsim.errors import LayoutError
from daxsim.layout import (
    DATA, PARITY, SPARE, SYSCSUM, BufferAllocator, ChecksumBuffer, PageGeometry, RedundancyLayout,
    dax_cl_checksum_addr, parity_addr, parity_line_addr, system_checksum_addr,
)

PAGE = 4096
SMALL = RedundancyLayout(4, 1 << 20)


def test_geometry():
    g = PageGeometry()
    assert (g.lines_per_page, g.checksums_per_line) == (64, 16)
    with pytest.raises(LayoutError):
        PageGeometry(4000, 64)
    with pytest.raises(LayoutError):
        PageGeometry(4096, 62)


def test_regions_disjoint_and_ordered():
    for d in range(SMALL.num_dimms):
        data, cs, spare = SMALL.data_region(d), SMALL.syscsum_region(d), SMALL.spare_region(d)
        assert data.end <= cs.base and cs.end <= spare.base
        assert spare.end == (d + 1) * SMALL.dimm_capacity
        # enough checksum slots for every data page on the DIMM
        assert cs.size >= 4 * SMALL.slots_per_dimm
        assert SMALL.region_kind(cs.base) == SYSCSUM
        assert SMALL.region_kind(spare.base) == SPARE


def test_parity_rotation():
    assert parity_addr(SMALL.page_addr(0), SMALL)[0] == 0
    # stripe 5 with 4 DIMMs: logical pages 15..17
    assert parity_addr(SMALL.page_addr(15), SMALL)[0] == 1
    for s in range(64):
        data, ppage = SMALL.stripe_members(s)
        assert ppage // SMALL.dimm_capacity == s % 4
        assert SMALL.region_kind(ppage) == PARITY
        assert {parity_addr(p, SMALL) for p in data} == {(s % 4, ppage)}


def test_parity_addr_rejects_parity_page():
    _, ppage = SMALL.stripe_members(3)
    with pytest.raises(LayoutError):
        parity_addr(ppage, SMALL)


def test_page_mapping_is_bijective():
    seen = set()
    for lp in range(SMALL.data_pages):
        addr = SMALL.page_addr(lp)
        assert SMALL.region_kind(addr) == DATA
        assert SMALL.logical_page(addr + 100) == lp
        seen.add(addr)
    assert len(seen) == SMALL.data_pages
    with pytest.raises(LayoutError):
        SMALL.page_addr(SMALL.data_pages)


def test_consecutive_pages_spread_over_dimms():
    dimms = [SMALL.dimm_of(SMALL.page_addr(p)) for p in range(3)]
    assert len(set(dimms)) == 3


def test_syscsum_same_dimm_and_packing():
    lay = SMALL
    by_dimm = {}
    for lp in range(lay.data_pages):
        page = lay.page_addr(lp)
        a = system_checksum_addr(page, lay)
        d = lay.dimm_of(page)
        assert a in lay.syscsum_region(d)
        by_dimm.setdefault(d, []).append((lay.per_dimm_data_index(page), a))
    for d, items in by_dimm.items():
        items.sort()
        base = lay.syscsum_region(d).base
        # injective, ascending, 4 bytes apart
        assert [a for _, a in items] == [base + 4 * i for i in range(len(items))]


def test_syscsum_examples():
    lay = SMALL
    firsts = {}
    for lp in range(lay.data_pages):
        page = lay.page_addr(lp)
        firsts.setdefault(lay.dimm_of(page), []).append(page)
    assert system_checksum_addr(firsts[0][0], lay) == lay.syscsum_region(0).base
    assert system_checksum_addr(firsts[2][16], lay) == lay.syscsum_region(2).base + 64
    lines = {system_checksum_addr(p, lay) // 64 for p in firsts[1][:16]}
    assert len(lines) == 1


def test_syscsum_rejects_non_data():
    _, ppage = SMALL.stripe_members(0)
    with pytest.raises(LayoutError):
        system_checksum_addr(ppage, SMALL)
    with pytest.raises(LayoutError):
        system_checksum_addr(SMALL.spare_region(0).base, SMALL)


def test_parity_line_same_offset():
    page = SMALL.page_addr(7)
    _, ppage = parity_addr(page, SMALL)
    assert parity_line_addr(page + 640, SMALL) == ppage + 640


def test_initial_media():
    assert SMALL.initial_line(SMALL.page_addr(0)) == bytes(64)
    cs = SMALL.initial_line(SMALL.syscsum_region(0).base)
    assert cs == SMALL.zero_page_checksum.to_bytes(4, "little") * 16


def test_dax_cl_buffer_addressing():
    buf = ChecksumBuffer(SMALL.spare_region(1).base, 3, 4, SMALL)
    first = SMALL.page_addr(3)
    assert dax_cl_checksum_addr(first, buf) == buf.base
    assert buf.entries == 4 * 64 and buf.size == 4 * 64 * 4
    seen = set()
    for i in range(buf.entries):
        lp, ln = divmod(i, 64)
        addr = SMALL.page_addr(3 + lp) + 64 * ln
        a = dax_cl_checksum_addr(addr, buf)
        assert a == buf.base + 4 * i
        seen.add(a)
    assert len(seen) == buf.entries
    assert dax_cl_checksum_addr(SMALL.page_addr(3) + 16 * 64, buf) == buf.base + 64
    with pytest.raises(LayoutError):
        dax_cl_checksum_addr(SMALL.page_addr(7), buf)
    with pytest.raises(LayoutError):
        dax_cl_checksum_addr(first + 4, buf)


def test_allocator_alloc_free_coalesce():
    alloc = BufferAllocator(SMALL)
    spare = SMALL.spare_region(0).size
    a = alloc.allocate(100)
    assert a[1] == 128
    b = alloc.allocate(4096)
    assert SMALL.region_kind(a[0]) == SPARE and SMALL.region_kind(b[0]) == SPARE
    alloc.free(*a)
    alloc.free(*b)
    assert alloc.allocate(spare)[1] == spare
    with pytest.raises(LayoutError):
        alloc.allocate(10 * spare)


def test_layout_validation():
    with pytest.raises(LayoutError):
        RedundancyLayout(1, 1 << 20)
    with pytest.raises(LayoutError):
        RedundancyLayout(4, 1000)
