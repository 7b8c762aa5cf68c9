"""Physical NVM layout: page striping, parity rotation and checksum regions.

Physical addresses are DIMM-concatenated: ``addr = dimm * dimm_capacity + off``.
Each DIMM is carved into three disjoint regions::

    [ striped page slots | system-checksum region | spare (buffers) ]

Slot ``s`` on every DIMM forms stripe ``s``.  DIMM ``s % num_dimms`` holds the
parity page of that stripe, the others hold data pages.  Logical data pages
(what a DAX-mapped file sees) fill stripes in order, so consecutive logical
pages land on different DIMMs of the same stripe.
"""

from dataclasses import dataclass, field

from .crc import crc32c
from .errors import LayoutError

# Region kinds returned by RedundancyLayout.region_kind
DATA = "data"
PARITY = "parity"
SYSCSUM = "syscsum"
SPARE = "spare"


@dataclass(frozen=True)
class PageGeometry:
    page_size: int = 4096
    line_size: int = 64

    def __post_init__(self):
        if self.line_size <= 0 or self.line_size % 4:
            raise LayoutError(f"line_size {self.line_size} must be a positive multiple of 4")
        if self.page_size <= 0 or self.page_size % self.line_size:
            raise LayoutError(
                f"page_size {self.page_size} must be a multiple of line_size {self.line_size}"
            )

    @property
    def lines_per_page(self):
        return self.page_size // self.line_size

    @property
    def checksums_per_line(self):
        return self.line_size // 4


@dataclass(frozen=True)
class Region:
    base: int
    size: int

    @property
    def end(self):
        return self.base + self.size

    def __contains__(self, addr):
        return self.base <= addr < self.base + self.size


def _ceil_div(a, b):
    return -(-a // b)


class RedundancyLayout:
    """Immutable description of where data, checksums and parity live."""

    def __init__(self, num_dimms=4, dimm_capacity=1 << 30, geometry=None):
        geometry = geometry or PageGeometry()
        if num_dimms < 2:
            raise LayoutError("parity striping needs at least 2 DIMMs")
        if dimm_capacity % geometry.page_size:
            raise LayoutError("dimm_capacity must be a multiple of page_size")
        self.num_dimms = num_dimms
        self.dimm_capacity = dimm_capacity
        self.geometry = geometry
        page = geometry.page_size

        spare = (dimm_capacity // 4) // page * page
        remaining = dimm_capacity - spare
        slots = remaining // page
        while slots > 0 and (slots + _ceil_div(slots * 4, page)) * page > remaining:
            slots -= 1
        if slots < num_dimms:
            raise LayoutError("dimm_capacity too small for one full stripe")
        self.slots_per_dimm = slots
        csum_bytes = _ceil_div(slots * 4, page) * page
        self._striped_size = slots * page
        self._csum_off = self._striped_size
        self._csum_size = csum_bytes
        self._spare_off = self._striped_size + csum_bytes
        self._spare_size = dimm_capacity - self._spare_off

        self._zero_page_csum = crc32c(bytes(page))
        self._csum_init_line = self._zero_page_csum.to_bytes(4, "little") * geometry.checksums_per_line

    def __repr__(self):
        return (
            f"RedundancyLayout(num_dimms={self.num_dimms}, "
            f"dimm_capacity={self.dimm_capacity}, geometry={self.geometry})"
        )

    def __eq__(self, other):
        return (
            isinstance(other, RedundancyLayout)
            and self.num_dimms == other.num_dimms
            and self.dimm_capacity == other.dimm_capacity
            and self.geometry == other.geometry
        )

    def __hash__(self):
        return hash((self.num_dimms, self.dimm_capacity, self.geometry))

    # -- regions ---------------------------------------------------------

    @property
    def stripe_width(self):
        return self.num_dimms

    @property
    def total_size(self):
        return self.num_dimms * self.dimm_capacity

    @property
    def data_pages(self):
        """Number of logical data pages the layout can hold."""
        return self.slots_per_dimm * (self.num_dimms - 1)

    @property
    def zero_page_checksum(self):
        return self._zero_page_csum

    def data_region(self, dimm):
        """Striped slot area of ``dimm`` (its data pages plus rotated parity pages)."""
        return Region(dimm * self.dimm_capacity, self._striped_size)

    def syscsum_region(self, dimm):
        return Region(dimm * self.dimm_capacity + self._csum_off, self._csum_size)

    def spare_region(self, dimm):
        return Region(dimm * self.dimm_capacity + self._spare_off, self._spare_size)

    def dimm_of(self, addr):
        if not 0 <= addr < self.total_size:
            raise LayoutError(f"address {addr:#x} outside NVM")
        return addr // self.dimm_capacity

    def region_kind(self, addr):
        dimm = self.dimm_of(addr)
        off = addr - dimm * self.dimm_capacity
        if off < self._striped_size:
            slot = off // self.geometry.page_size
            return PARITY if slot % self.num_dimms == dimm else DATA
        if off < self._spare_off:
            return SYSCSUM
        return SPARE

    def is_redundancy_addr(self, addr):
        """True for anything that is not a data page (parity, checksums, buffers)."""
        return self.region_kind(addr) != DATA

    # -- logical <-> physical --------------------------------------------

    def parity_dimm(self, stripe):
        return stripe % self.num_dimms

    def page_addr(self, logical_page):
        """Physical base address of logical data page ``logical_page``."""
        if not 0 <= logical_page < self.data_pages:
            raise LayoutError(f"logical page {logical_page} outside data capacity")
        width = self.num_dimms - 1
        stripe, member = divmod(logical_page, width)
        pd = stripe % self.num_dimms
        dimm = member if member < pd else member + 1
        return dimm * self.dimm_capacity + stripe * self.geometry.page_size

    def logical_page(self, addr):
        """Inverse of :meth:`page_addr` for any address inside a data page."""
        dimm = self.dimm_of(addr)
        off = addr - dimm * self.dimm_capacity
        if off >= self._striped_size:
            raise LayoutError(f"address {addr:#x} is not in a data region")
        stripe = off // self.geometry.page_size
        pd = stripe % self.num_dimms
        if dimm == pd:
            raise LayoutError(f"address {addr:#x} lies on a parity page")
        member = dimm if dimm < pd else dimm - 1
        return stripe * (self.num_dimms - 1) + member

    def data_addr(self, offset):
        """Physical address of logical data byte ``offset``."""
        page, within = divmod(offset, self.geometry.page_size)
        return self.page_addr(page) + within

    def data_offset(self, addr):
        within = addr % self.geometry.page_size
        return self.logical_page(addr) * self.geometry.page_size + within

    def page_base(self, addr):
        return addr - addr % self.geometry.page_size

    def stripe_of(self, addr):
        self.logical_page(addr)
        return (addr % self.dimm_capacity) // self.geometry.page_size

    def stripe_members(self, stripe):
        """(data page addresses, parity page address) for ``stripe``."""
        if not 0 <= stripe < self.slots_per_dimm:
            raise LayoutError(f"stripe {stripe} out of range")
        page = self.geometry.page_size
        pd = self.parity_dimm(stripe)
        data = [
            d * self.dimm_capacity + stripe * page for d in range(self.num_dimms) if d != pd
        ]
        return data, pd * self.dimm_capacity + stripe * page

    def per_dimm_data_index(self, addr):
        """Ordinal of the data page holding ``addr`` among its DIMM's data pages."""
        self.logical_page(addr)
        dimm = addr // self.dimm_capacity
        slot = (addr % self.dimm_capacity) // self.geometry.page_size
        parity_before = _ceil_div(slot - dimm, self.num_dimms) if slot > dimm else 0
        return slot - parity_before

    # -- media defaults --------------------------------------------------

    def initial_line(self, addr):
        """Content of a never-written line on a freshly formatted device.

        Data and parity are zero; system-checksum slots hold the CRC of a zero
        page so the redundancy is consistent from the start.
        """
        if self.region_kind(addr) == SYSCSUM:
            return self._csum_init_line
        return bytes(self.geometry.line_size)


def system_checksum_addr(page_addr, layout):
    """Byte address of the 4-byte system-checksum of the page holding ``page_addr``.

    The checksum lives on the same DIMM as the page, packed 16 per line in
    ascending per-DIMM data page order.
    """
    dimm = layout.dimm_of(page_addr)
    index = layout.per_dimm_data_index(page_addr)
    return layout.syscsum_region(dimm).base + 4 * index


def parity_addr(page_addr, layout):
    """(parity DIMM, parity page address) of the stripe containing ``page_addr``."""
    if layout.region_kind(page_addr) == PARITY:
        raise LayoutError(f"address {page_addr:#x} is a parity page, not data")
    stripe = layout.stripe_of(page_addr)
    pd = layout.parity_dimm(stripe)
    return pd, pd * layout.dimm_capacity + stripe * layout.geometry.page_size


def parity_line_addr(line_addr, layout):
    """Parity line covering ``line_addr``: same line offset within the parity page."""
    _, ppage = parity_addr(line_addr, layout)
    within = line_addr % layout.geometry.page_size
    return ppage + within - within % layout.geometry.line_size


@dataclass(frozen=True)
class ChecksumBuffer:
    """Contiguous NVM buffer of 4-byte checksums over a logical page range.

    ``granule`` is the number of data bytes each checksum covers: the line
    size for DAX-CL checksums, the object size for per-object checksums.
    """

    base: int
    first_page: int
    num_pages: int
    layout: RedundancyLayout = field(repr=False, compare=False)
    granule: int = 64

    @property
    def covered_range(self):
        """Logical byte range [start, end) of the covered data."""
        page = self.layout.geometry.page_size
        return self.first_page * page, (self.first_page + self.num_pages) * page

    @property
    def entries(self):
        start, end = self.covered_range
        return (end - start) // self.granule

    @property
    def size(self):
        line = self.layout.geometry.line_size
        return _ceil_div(self.entries * 4, line) * line

    def covers_page(self, logical_page):
        return self.first_page <= logical_page < self.first_page + self.num_pages

    def entry_index(self, addr):
        offset = self.layout.data_offset(addr)
        start, end = self.covered_range
        if not start <= offset < end:
            raise LayoutError(f"address {addr:#x} outside the buffer's covered range")
        return (offset - start) // self.granule

    def entry_addr(self, addr):
        return self.base + 4 * self.entry_index(addr)


def dax_cl_checksum_addr(line_addr, buf):
    """Byte address of the DAX-CL checksum for data line ``line_addr``."""
    if line_addr % buf.layout.geometry.line_size:
        raise LayoutError(f"address {line_addr:#x} is not line aligned")
    return buf.entry_addr(line_addr)


class BufferAllocator:
    """First-fit allocator over the spare regions of every DIMM."""

    def __init__(self, layout):
        self.layout = layout
        self._free = {d: [(r.base, r.size)] for d in range(layout.num_dimms)
                      for r in [layout.spare_region(d)]}

    def allocate(self, size):
        line = self.layout.geometry.line_size
        size = _ceil_div(size, line) * line
        # prefer the DIMM with the largest free extent, lowest index on ties
        best = None
        for dimm, extents in self._free.items():
            for i, (base, length) in enumerate(extents):
                if length >= size and (best is None or length > best[3]):
                    best = (dimm, i, base, length)
        if best is None:
            raise LayoutError(f"no spare extent of {size} bytes left")
        dimm, i, base, length = best
        if length == size:
            del self._free[dimm][i]
        else:
            self._free[dimm][i] = (base + size, length - size)
        return base, size

    def free(self, base, size):
        dimm = self.layout.dimm_of(base)
        extents = sorted(self._free[dimm] + [(base, size)])
        merged = []
        for b, s in extents:
            if merged and merged[-1][0] + merged[-1][1] == b:
                merged[-1] = (merged[-1][0], merged[-1][1] + s)
            else:
                merged.append((b, s))
        self._free[dimm] = merged
