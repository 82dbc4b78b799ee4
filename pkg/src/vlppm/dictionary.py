"""Prefix-keyed dictionaries of word suffixes.

Every dictionary holds the suffixes seen after one fixed-length letter
prefix, with counts in first-seen order.  The escape slot sits first with
fixed width 1, so a dictionary with counts C_i codes suffix i with
probability C_i / (1 + sum(C)) and an escape with 1 / (1 + sum(C)).
Three-letter words poison their own prefix: the prefix joins a blacklist
and dictionary coding is skipped for it forever after.
"""

import enum
from zlib import crc32

from .coder import MAX_TOTAL, FreqSlice
from .context import _mix64, _M64


class SuffixOutcome(enum.Enum):
    HIT = "dict_hit"          # suffix coded as one dictionary symbol
    ESCAPE = "dict_escape"    # escape coded; caller codes the suffix itself
    NO_DICT = "no_dict"       # no dictionary / blacklisted; nothing coded


class LookupStatus(enum.Enum):
    FOUND = "found"
    ABSENT = "absent"
    BLACKLISTED = "blacklisted"


class Dictionary:
    """Suffixes and counts for one prefix, in first-seen order."""

    __slots__ = ("prefix", "suffixes", "counts", "total")

    def __init__(self, prefix: bytes):
        self.prefix = prefix
        self.suffixes = []
        self.counts = []
        self.total = 0  # sum of counts, escape excluded


def suffix_distribution(d: Dictionary):
    """(pairs, escape): escape first at cum 0..1, entries in first-seen order."""
    total = 1 + d.total
    pairs = []
    cum = 1
    for w, c in zip(d.suffixes, d.counts):
        pairs.append((w, FreqSlice(cum, cum + c, total)))
        cum += c
    return pairs, FreqSlice(0, 1, total)


_BLACK_SALT = 0xB1AC4115DE7EC7ED


class DictStore:
    """All per-prefix dictionaries plus the blacklist."""

    def __init__(self):
        self.dicts = {}
        self.blacklist = set()
        self._fp = 0
        self._track = False

    # -- coding -----------------------------------------------------------

    def lookup(self, prefix: bytes):
        """(status, Dictionary | None); blacklist takes priority."""
        if prefix in self.blacklist:
            return LookupStatus.BLACKLISTED, None
        d = self.dicts.get(prefix)
        if d is None:
            return LookupStatus.ABSENT, None
        return LookupStatus.FOUND, d

    def encode_suffix(self, prefix: bytes, suffix: bytes, coder) -> SuffixOutcome:
        if prefix in self.blacklist:
            return SuffixOutcome.NO_DICT
        d = self.dicts.get(prefix)
        if d is None:
            return SuffixOutcome.NO_DICT
        total = 1 + d.total
        try:
            i = d.suffixes.index(suffix) if suffix else -1
        except ValueError:
            i = -1
        if i < 0:
            coder.encode_interval(FreqSlice(0, 1, total))
            return SuffixOutcome.ESCAPE
        lo = 1 + sum(d.counts[:i])
        coder.encode_interval(FreqSlice(lo, lo + d.counts[i], total))
        return SuffixOutcome.HIT

    def decode_suffix(self, prefix: bytes, coder):
        """(outcome, suffix | None); mirror of encode_suffix."""
        if prefix in self.blacklist:
            return SuffixOutcome.NO_DICT, None
        d = self.dicts.get(prefix)
        if d is None:
            return SuffixOutcome.NO_DICT, None
        total = 1 + d.total
        t = coder.decode_point(total)
        if t == 0:
            coder.decode_consume(FreqSlice(0, 1, total))
            return SuffixOutcome.ESCAPE, None
        cum = 1
        for w, c in zip(d.suffixes, d.counts):
            if t < cum + c:
                coder.decode_consume(FreqSlice(cum, cum + c, total))
                return SuffixOutcome.HIT, w
            cum += c
        raise AssertionError("unreachable: decode point past dictionary total")

    # -- update -----------------------------------------------------------

    def record_word(self, prefix: bytes, suffix: bytes) -> None:
        """Account a completed word; called identically by both sides.

        Empty suffix means the word was exactly the prefix: the dictionary
        (if any) is discarded and the prefix blacklisted for good.
        """
        if not suffix:
            d = self.dicts.pop(prefix, None)
            if self._track:
                if d is not None:
                    for w, c in zip(d.suffixes, d.counts):
                        self._fp = (self._fp - _entry_term(prefix, w, c)) & _M64
                if prefix not in self.blacklist:
                    self._fp = (self._fp + _black_term(prefix)) & _M64
            self.blacklist.add(prefix)
            return
        if prefix in self.blacklist:
            return
        d = self.dicts.get(prefix)
        if d is None:
            d = Dictionary(prefix)
            self.dicts[prefix] = d
        try:
            i = d.suffixes.index(suffix)
        except ValueError:
            d.suffixes.append(suffix)
            d.counts.append(1)
            d.total += 1
            if self._track:
                self._fp = (self._fp + _entry_term(prefix, suffix, 1)) & _M64
        else:
            c = d.counts[i]
            d.counts[i] = c + 1
            d.total += 1
            if self._track:
                self._fp = (self._fp
                            - _entry_term(prefix, suffix, c)
                            + _entry_term(prefix, suffix, c + 1)) & _M64
        if 1 + d.total > MAX_TOTAL:
            self._rescale(d)

    def _rescale(self, d: Dictionary) -> None:
        total = 0
        for i, c in enumerate(d.counts):
            nc = c >> 1
            if nc == 0:
                nc = 1
            if nc != c:
                d.counts[i] = nc
                if self._track:
                    self._fp = (self._fp
                                - _entry_term(d.prefix, d.suffixes[i], c)
                                + _entry_term(d.prefix, d.suffixes[i], nc)) & _M64
            total += nc
        d.total = total

    # -- introspection ----------------------------------------------------

    def entry_count(self) -> int:
        """Total suffix entries stored; the memory proxy."""
        return sum(len(d.suffixes) for d in self.dicts.values())

    def enable_hash_tracking(self) -> None:
        if not self._track:
            self._fp = self._full_fingerprint()
            self._track = True

    def state_hash(self) -> int:
        """64-bit digest of dictionaries plus blacklist; stable within a build."""
        if self._track:
            return self._fp
        return self._full_fingerprint()

    def _full_fingerprint(self) -> int:
        fp = 0
        for prefix, d in self.dicts.items():
            for w, c in zip(d.suffixes, d.counts):
                fp = (fp + _entry_term(prefix, w, c)) & _M64
        for prefix in self.blacklist:
            fp = (fp + _black_term(prefix)) & _M64
        return fp


def _entry_term(prefix: bytes, suffix: bytes, count: int) -> int:
    base = _mix64((crc32(suffix, crc32(prefix)) << 17) ^ len(suffix))
    return _mix64(base ^ count)


def _black_term(prefix: bytes) -> int:
    return _mix64(crc32(prefix) ^ _BLACK_SALT)
