"""CRC-32C, linear CRC algebra and XOR parity primitives.

The full checksum uses the Castagnoli polynomial (reflected 0x82F63B78,
init and final XOR 0xFFFFFFFF), computed by the ``crc32c`` extension.
``crc_raw`` is the same register with init 0 and no final XOR, which makes
it linear over XOR; ``crc_shift`` multiplies by x^(8n) mod P so a checksum
can be moved past ``n`` zero bytes without touching them. Those two are what
lets a 64-byte data diff update a 4 KiB page checksum in O(log n).
"""

from functools import lru_cache

import crc32c as _crc32c_ext

from .errors import MalformedStripe

MASK32 = 0xFFFFFFFF
POLY_REFLECTED = 0x82F63B78

# x^0 in the reflected representation is the top bit.
_X0 = 0x80000000


def crc32c(data):
    """Standard CRC-32C of ``data``."""
    return _crc32c_ext.crc32c(data)


def _multmodp(a, b):
    """Multiply two reflected polynomials modulo the CRC polynomial."""
    m = _X0
    p = 0
    while m:
        if a & m:
            p ^= b
        m >>= 1
        b = (b >> 1) ^ POLY_REFLECTED if b & 1 else b >> 1
    return p


def _build_x2n(count=64):
    # table[k] = x^(2^k) mod P
    table = [_X0 >> 1]
    for _ in range(1, count):
        table.append(_multmodp(table[-1], table[-1]))
    return tuple(table)


_X2N = _build_x2n()


@lru_cache(maxsize=4096)
def _x8n_mod_p(n):
    """x^(8n) mod P, by binary exponentiation over the squaring table."""
    p = _X0
    bits = 8 * n
    k = 0
    while bits:
        if bits & 1:
            p = _multmodp(_X2N[k], p)
        bits >>= 1
        k += 1
    return p


def crc_shift(c, n):
    """Return crc_raw(m + b'\\0' * n) given ``c == crc_raw(m)``."""
    if n < 0:
        raise ValueError("shift length must be non-negative")
    if n == 0 or c == 0:
        return c
    return _multmodp(_x8n_mod_p(n), c)


def crc_raw(data):
    """CRC-32C register with init 0 and no final XOR (linear in ``data``)."""
    # crc32c(m) = raw(m) ^ shift(init, len) ^ final, with init == final == ~0
    return crc32c(data) ^ MASK32 ^ crc_shift(MASK32, len(data))


def xor_bytes(a, b):
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    n = len(a)
    return (int.from_bytes(a, "little") ^ int.from_bytes(b, "little")).to_bytes(n, "little")


def line_diff(old_line, new_line):
    """Bytewise XOR of the old and new contents of a line."""
    return xor_bytes(old_line, new_line)


def parity_update(parity_line, diff):
    """Fold a data diff into the matching parity line."""
    return xor_bytes(parity_line, diff)


def incremental_page_checksum(old, diff, offset, geom):
    """New page CRC-32C after XORing ``diff`` into the line at ``offset``.

    No page read is needed: the diff's raw CRC is shifted past the bytes that
    follow it in the page and XORed into the old checksum.
    """
    if offset % geom.line_size or not 0 <= offset < geom.page_size:
        raise ValueError(f"offset {offset} is not a line offset within the page")
    if len(diff) != geom.line_size:
        raise ValueError("diff must be exactly one line")
    return old ^ crc_shift(crc_raw(diff), geom.page_size - offset - geom.line_size)


def line_checksum_update(old, diff):
    """Per-line CRC-32C after applying ``diff`` (the one-line page case)."""
    return old ^ crc_raw(diff)


def reconstruct_line(surviving_lines, expected_count=None):
    """XOR the surviving members of a stripe position to recover the lost one."""
    if not surviving_lines:
        raise MalformedStripe("no surviving stripe members")
    if expected_count is not None and len(surviving_lines) != expected_count:
        raise MalformedStripe(
            f"expected {expected_count} surviving members, got {len(surviving_lines)}"
        )
    size = len(surviving_lines[0])
    acc = 0
    for line in surviving_lines:
        if len(line) != size:
            raise MalformedStripe("stripe members differ in length")
        acc ^= int.from_bytes(line, "little")
    return acc.to_bytes(size, "little")
