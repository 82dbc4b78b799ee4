"""Integer range coder used by all models.

32-bit low/range registers, byte-wise renormalization with explicit carry
propagation.  Symbols are described by cumulative-frequency slices; keeping
every total at or below MAX_TOTAL guarantees range // total never hits zero
(range stays >= 2^24 between symbols).
"""

from math import log2
from typing import NamedTuple

from .errors import TruncatedPayloadError

MAX_TOTAL = 1 << 16

_TOP = 1 << 24
_MASK32 = 0xFFFFFFFF

# Flush emits the top 4 bytes of low plus the pending carry byte.
FLUSH_BYTES = 5


class FreqSlice(NamedTuple):
    """A symbol's cumulative-frequency interval under a shared total."""

    cum_lo: int
    cum_hi: int
    total: int

    @property
    def width(self) -> int:
        return self.cum_hi - self.cum_lo


class RangeEncoder:
    """One-shot encoder: feed slices via encode_interval, then encode_end.

    Set track_cost to accumulate the information content of the slices seen
    so far (in bits) in cost_bits; the payload itself is unaffected.
    """

    def __init__(self):
        self._low = 0  # up to 33 bits until the next byte is shifted out
        self._range = _MASK32
        self._cache = 0
        self._pending = 1  # cache byte plus a run of 0xFF bytes awaiting carry
        self._out = bytearray()
        self.track_cost = False
        self.cost_bits = 0.0

    def encode_interval(self, s: FreqSlice) -> None:
        cum_lo, cum_hi, total = s
        if not 0 <= cum_lo < cum_hi <= total <= MAX_TOTAL:
            raise ValueError(f"invalid frequency slice {s!r}")
        r = self._range // total
        self._low += r * cum_lo
        self._range = r * (cum_hi - cum_lo)
        if self.track_cost:
            self.cost_bits += log2(total / (cum_hi - cum_lo))
        while self._range < _TOP:
            self._shift_low()
            self._range = (self._range << 8) & _MASK32

    def encode_end(self) -> bytes:
        for _ in range(FLUSH_BYTES):
            self._shift_low()
        return bytes(self._out)

    def _shift_low(self) -> None:
        low = self._low
        if low < 0xFF000000 or low > _MASK32:
            # Carry (if any) resolves the pending 0xFF run now.
            carry = low >> 32
            out = self._out
            out.append((self._cache + carry) & 0xFF)
            filler = (0xFF + carry) & 0xFF
            for _ in range(self._pending - 1):
                out.append(filler)
            self._cache = (low >> 24) & 0xFF
            self._pending = 0
        self._pending += 1
        self._low = (low << 8) & _MASK32


class RangeDecoder:
    """Mirror of RangeEncoder over a finished payload.

    decode_point(total) must be called with the same total the encoder used
    at this step; decode_consume must then be passed the slice containing
    the returned point.
    """

    def __init__(self, payload: bytes):
        self._buf = payload
        self._pos = 0
        self._range = _MASK32
        code = 0
        for _ in range(FLUSH_BYTES):
            code = (code << 8) | self._next_byte()
        self._code = code & _MASK32

    def _next_byte(self) -> int:
        pos = self._pos
        if pos >= len(self._buf):
            raise TruncatedPayloadError(
                f"payload exhausted after {pos} bytes")
        self._pos = pos + 1
        return self._buf[pos]

    def decode_point(self, total: int) -> int:
        t = self._code // (self._range // total)
        # t >= total only on corrupt input (the encoder never selects the
        # rounding residue at the top of the range); clamp and let the
        # container checks catch the damage.
        return t if t < total else total - 1

    def decode_consume(self, s: FreqSlice) -> None:
        cum_lo, cum_hi, total = s
        r = self._range // total
        self._code -= r * cum_lo
        self._range = r * (cum_hi - cum_lo)
        while self._range < _TOP:
            self._code = ((self._code << 8) | self._next_byte()) & _MASK32
            self._range = (self._range << 8) & _MASK32
