"""Whole-file encoder/decoder: word parsing FSM, model wiring, container.

Both sides run a 3-state machine over the stream.  S0/S1 code single
characters through the context model while a candidate prefix accumulates;
once the prefix is complete the dictionary model takes over for the rest of
the word (S2).  The switch itself costs no bits: the decoder sees the same
prefix and switches by itself.  Characters conveyed by a dictionary hit are
replayed into the context model ("priming") so its statistics match a pure
character run.
"""

import struct
from dataclasses import dataclass

from .coder import RangeDecoder, RangeEncoder
from .context import EOF, ContextModel
from .dictionary import DictStore, SuffixOutcome
from .errors import ContainerFormatError, LengthMismatchError

MAGIC = b"VLPM"
VERSION = 1
HEADER = struct.Struct("<4sBBBBQ")

MODE_PPM = "ppm"
MODE_VLPPM = "vlppm"
_MODE_BYTE = {MODE_PPM: 0, MODE_VLPPM: 1}
_BYTE_MODE = {0: MODE_PPM, 1: MODE_VLPPM}

_ENGLISH = bytearray(256)
for _c in range(0x41, 0x5B):
    _ENGLISH[_c] = 1
for _c in range(0x61, 0x7B):
    _ENGLISH[_c] = 1


def is_english(sym: int) -> bool:
    """True for the byte values of A-Z and a-z; EOF is not a letter."""
    return sym < 256 and _ENGLISH[sym] != 0


def read_suffix(data, pos: int) -> bytes:
    """Maximal run of English letters starting at pos (pure lookahead)."""
    eng = _ENGLISH
    end = pos
    n = len(data)
    while end < n and eng[data[end]]:
        end += 1
    return bytes(data[pos:end])


@dataclass(frozen=True)
class CodecConfig:
    order: int = 3
    prefix_len: int = 3
    mode: str = MODE_VLPPM

    def __post_init__(self):
        if not 0 <= self.order <= 8:
            raise ValueError(f"order must be in [0, 8], got {self.order}")
        if not 1 <= self.prefix_len <= 255:
            raise ValueError(f"prefix_len must be in [1, 255], got {self.prefix_len}")
        if self.mode not in _MODE_BYTE:
            raise ValueError(f"mode must be one of {sorted(_MODE_BYTE)}, got {self.mode!r}")


@dataclass(frozen=True)
class Container:
    """Parsed compressed file: header fields plus the coded payload."""

    mode: str
    order: int
    prefix_len: int
    original_len: int
    payload: bytes

    def pack(self) -> bytes:
        header = HEADER.pack(MAGIC, VERSION, _MODE_BYTE[self.mode],
                             self.order, self.prefix_len, self.original_len)
        return header + self.payload

    @classmethod
    def parse(cls, blob: bytes) -> "Container":
        if len(blob) < HEADER.size:
            raise ContainerFormatError("container shorter than its header")
        magic, version, mode_b, order, prefix_len, original_len = \
            HEADER.unpack_from(blob)
        if magic != MAGIC:
            raise ContainerFormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ContainerFormatError(f"unsupported version {version}")
        if mode_b not in _BYTE_MODE:
            raise ContainerFormatError(f"unknown mode byte {mode_b}")
        if order > 8:
            raise ContainerFormatError(f"order {order} out of range")
        if prefix_len < 1:
            raise ContainerFormatError("prefix length must be positive")
        return cls(_BYTE_MODE[mode_b], order, prefix_len, original_len,
                   blob[HEADER.size:])

    @property
    def config(self) -> CodecConfig:
        return CodecConfig(order=self.order, prefix_len=self.prefix_len,
                           mode=self.mode)


_S0, _S1, _S2 = 0, 1, 2


class Encoder:
    """One compression job; exposes its models for instrumentation."""

    def __init__(self, cfg: CodecConfig):
        self.cfg = cfg
        self.model = ContextModel(cfg.order)
        self.store = DictStore()
        self.coder = RangeEncoder()

    def run(self, data, on_word=None, profile=None) -> bytes:
        """Encode data and return the arithmetic payload (no header).

        on_word, if given, is called as on_word(prefix, suffix) right after
        each completed word is recorded.  profile, if given, collects
        (word_length, bits) for every maximal letter run; delimiters and the
        EOF symbol are excluded from the attribution.
        """
        if profile is not None:
            self.coder.track_cost = True
        if self.cfg.mode == MODE_PPM:
            self._run_plain(data, profile)
        else:
            self._run_fsm(data, on_word, profile)
        return self.coder.encode_end()

    def _run_plain(self, data, profile) -> None:
        cm = self.model
        enc = self.coder
        if profile is None:
            for i in range(len(data)):
                cm.encode_char(data, i, data[i], enc)
            cm.encode_char(data, len(data), EOF, enc)
            return
        eng = _ENGLISH
        w_len = 0
        w_bits = 0.0
        for i in range(len(data)):
            sym = data[i]
            pre = enc.cost_bits
            cm.encode_char(data, i, sym, enc)
            if eng[sym]:
                w_len += 1
                w_bits += enc.cost_bits - pre
            elif w_len:
                profile.add(w_len, w_bits)
                w_len = 0
                w_bits = 0.0
        cm.encode_char(data, len(data), EOF, enc)
        if w_len:
            profile.add(w_len, w_bits)

    def _run_fsm(self, data, on_word, profile) -> None:
        cfg = self.cfg
        cm = self.model
        store = self.store
        enc = self.coder
        eng = _ENGLISH
        plen = cfg.prefix_len
        n = len(data)
        i = 0
        state = _S0
        p_start = 0
        pending = None  # word recorded only once its delimiter is coded,
        w_len = 0       # mirroring when the decoder can know the word ended
        w_bits = 0.0
        while True:
            if state == _S2:
                w = read_suffix(data, i)
                prefix = bytes(data[p_start:i])
                pre = enc.cost_bits
                outcome = store.encode_suffix(prefix, w, enc)
                if outcome is SuffixOutcome.HIT:
                    for j in range(i, i + len(w)):
                        cm.prime_char(data, j)
                    store.record_word(prefix, w)
                    if on_word is not None:
                        on_word(prefix, w)
                else:
                    for j in range(i, i + len(w)):
                        cm.encode_char(data, j, data[j], enc)
                    pending = (prefix, w)
                if profile is not None:
                    w_len += len(w)
                    w_bits += enc.cost_bits - pre
                i += len(w)
                state = _S0
                continue
            sym = data[i] if i < n else EOF
            pre = enc.cost_bits
            cm.encode_char(data, i, sym, enc)
            if pending is not None:
                store.record_word(*pending)
                if on_word is not None:
                    on_word(*pending)
                pending = None
            if profile is not None:
                if sym != EOF and eng[sym]:
                    w_len += 1
                    w_bits += enc.cost_bits - pre
                elif w_len:
                    profile.add(w_len, w_bits)
                    w_len = 0
                    w_bits = 0.0
            if sym == EOF:
                break
            i += 1
            if state == _S0:
                if eng[sym]:
                    p_start = i - 1
                    state = _S2 if plen == 1 else _S1
            elif eng[sym]:
                if i - p_start == plen:
                    state = _S2
            else:
                state = _S0


class Decoder:
    """One decompression job; mirror of Encoder."""

    def __init__(self, cfg: CodecConfig, payload: bytes):
        self.cfg = cfg
        self.model = ContextModel(cfg.order)
        self.store = DictStore()
        self.coder = RangeDecoder(payload)

    def run(self, original_len: int, on_word=None) -> bytes:
        if self.cfg.mode == MODE_PPM:
            out = self._run_plain(original_len)
        else:
            out = self._run_fsm(original_len, on_word)
        if len(out) != original_len:
            raise LengthMismatchError(
                f"decoded {len(out)} bytes, header says {original_len}")
        return bytes(out)

    def _run_plain(self, original_len: int) -> bytearray:
        cm = self.model
        dec = self.coder
        out = bytearray()
        while True:
            sym = cm.decode_char(out, len(out), dec)
            if sym == EOF:
                return out
            out.append(sym)
            if len(out) > original_len:
                raise LengthMismatchError("decoded past the recorded length")

    def _run_fsm(self, original_len: int, on_word) -> bytearray:
        cm = self.model
        store = self.store
        dec = self.coder
        eng = _ENGLISH
        plen = self.cfg.prefix_len
        out = bytearray()
        state = _S0
        in_suffix = False  # S2 after an escape / without a dictionary
        p_start = 0
        w_start = 0
        while True:
            if state == _S2:
                prefix = bytes(out[p_start:p_start + plen])
                outcome, w = store.decode_suffix(prefix, dec)
                if outcome is SuffixOutcome.HIT:
                    pos0 = len(out)
                    out += w
                    if len(out) > original_len:
                        raise LengthMismatchError(
                            "decoded past the recorded length")
                    for j in range(pos0, pos0 + len(w)):
                        cm.prime_char(out, j)
                    store.record_word(prefix, w)
                    if on_word is not None:
                        on_word(prefix, w)
                    state = _S0
                    continue
                # dictionary escape or no dictionary: characters follow
                in_suffix = True
                w_start = len(out)
                state = _S1  # placeholder; in_suffix drives the transitions
            sym = cm.decode_char(out, len(out), dec)
            letter = sym != EOF and eng[sym] != 0
            if in_suffix and not letter:
                prefix = bytes(out[p_start:p_start + plen])
                suffix = bytes(out[w_start:])
                store.record_word(prefix, suffix)
                if on_word is not None:
                    on_word(prefix, suffix)
                in_suffix = False
                state = _S0
            if sym == EOF:
                break
            out.append(sym)
            if len(out) > original_len:
                raise LengthMismatchError("decoded past the recorded length")
            if in_suffix:
                continue
            if state == _S0:
                if letter:
                    p_start = len(out) - 1
                    state = _S2 if plen == 1 else _S1
            elif letter:
                if len(out) - p_start == plen:
                    state = _S2
            else:
                state = _S0
        return out


def compress(data, cfg: CodecConfig = CodecConfig()) -> bytes:
    """Compress data into a self-describing container."""
    payload = Encoder(cfg).run(data)
    return Container(cfg.mode, cfg.order, cfg.prefix_len,
                     len(data), payload).pack()


def decompress(blob: bytes) -> bytes:
    """Restore the exact bytes compress() was given."""
    c = Container.parse(blob)
    return Decoder(c.config, c.payload).run(c.original_len)
