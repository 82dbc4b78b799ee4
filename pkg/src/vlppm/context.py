"""Adaptive character contexts (PPMC, escape method C).

Orders n..0 each map a context (the k preceding bytes) to per-symbol counts
kept in first-seen order.  Escape weight equals the number of distinct
non-excluded symbols; full exclusion applies across one escape chain and
updates use update exclusion (the coded symbol is added to the context where
it was coded and to every higher-order context visited on the way down).
Order -1 is uniform over the 257-symbol alphabet; the EOF symbol lives only
there, so context tables never store it.
"""

from zlib import crc32

from .coder import MAX_TOTAL, FreqSlice

EOF = 256
ALPHABET_SIZE = 257  # 256 byte values + EOF

_M64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    # splitmix64 finalizer
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _entry_term(key: bytes, sym: int, count: int) -> int:
    base = _mix64(((crc32(key) << 9) | len(key)) ^ (sym << 41))
    return _mix64(base ^ count)


class SymbolStats:
    """Counts for one context, in first-seen order."""

    __slots__ = ("syms", "counts", "total")

    def __init__(self):
        self.syms = []
        self.counts = []
        self.total = 0


def distribution(stats: SymbolStats, excluded=frozenset()):
    """Method-C slices for one context.

    Returns (pairs, escape) where pairs is [(symbol, FreqSlice), ...] over
    the non-excluded symbols in first-seen order and escape is the trailing
    escape slice.  With every symbol excluded there is nothing to code:
    returns ([], None), a deterministic escape costing zero bits.
    """
    if excluded:
        syms = [s for s in stats.syms if s not in excluded]
        if not syms:
            return [], None
        counts = [c for s, c in zip(stats.syms, stats.counts)
                  if s not in excluded]
    else:
        syms = stats.syms
        counts = stats.counts
    q = len(syms)
    total = sum(counts) + q
    pairs = []
    cum = 0
    for s, c in zip(syms, counts):
        pairs.append((s, FreqSlice(cum, cum + c, total)))
        cum += c
    return pairs, FreqSlice(cum, total, total)


class ContextModel:
    """One adaptive PPMC model instance (single-threaded)."""

    def __init__(self, order: int):
        if not 0 <= order <= 8:
            raise ValueError(f"order must be in [0, 8], got {order}")
        self.order = order
        self.tables = [dict() for _ in range(order + 1)]
        self._fp = 0
        self._track = False

    # -- coding -----------------------------------------------------------

    def encode_char(self, buf, pos: int, sym: int, coder) -> int:
        """Code buf's symbol at pos (or EOF) given the bytes before pos.

        Returns the order the symbol was coded at (-1..n) and applies the
        model update.
        """
        tables = self.tables
        top = self.order if self.order <= pos else pos
        keys = [bytes(buf[pos - k:pos]) for k in range(top + 1)]
        excluded = None
        coded = None
        for k in range(top, -1, -1):
            st = tables[k].get(keys[k])
            if st is None:
                continue
            syms = st.syms
            counts = st.counts
            if excluded is None:
                q = len(syms)
                total = st.total + q
                try:
                    i = syms.index(sym)
                except ValueError:
                    coder.encode_interval(FreqSlice(st.total, total, total))
                    excluded = set(syms)
                    continue
                lo = sum(counts[:i])
                coder.encode_interval(FreqSlice(lo, lo + counts[i], total))
                coded = k
                break
            m = q = 0
            lo = width = 0
            for s, c in zip(syms, counts):
                if s in excluded:
                    continue
                if s == sym:
                    lo = m
                    width = c
                m += c
                q += 1
            if q == 0:
                continue  # everything already ruled out: free escape
            total = m + q
            if width:
                coder.encode_interval(FreqSlice(lo, lo + width, total))
                coded = k
                break
            coder.encode_interval(FreqSlice(m, total, total))
            excluded.update(syms)
        if coded is None:
            # order -1: uniform over the alphabet minus exclusions
            if excluded:
                idx = sym - sum(1 for e in excluded if e < sym)
                total = ALPHABET_SIZE - len(excluded)
            else:
                idx = sym
                total = ALPHABET_SIZE
            coder.encode_interval(FreqSlice(idx, idx + 1, total))
            coded = -1
        if sym != EOF:
            self._update(keys, sym, 0 if coded < 0 else coded, top)
        return coded

    def decode_char(self, buf, pos: int, coder) -> int:
        """Exact mirror of encode_char; returns the decoded symbol."""
        tables = self.tables
        top = self.order if self.order <= pos else pos
        keys = [bytes(buf[pos - k:pos]) for k in range(top + 1)]
        excluded = None
        sym = None
        coded = None
        for k in range(top, -1, -1):
            st = tables[k].get(keys[k])
            if st is None:
                continue
            if excluded is None:
                syms = st.syms
                counts = st.counts
                m = st.total
                q = len(syms)
            else:
                syms = []
                counts = []
                m = 0
                for s, c in zip(st.syms, st.counts):
                    if s in excluded:
                        continue
                    syms.append(s)
                    counts.append(c)
                    m += c
                q = len(syms)
                if q == 0:
                    continue
            total = m + q
            t = coder.decode_point(total)
            if t >= m:
                coder.decode_consume(FreqSlice(m, total, total))
                if excluded is None:
                    excluded = set(syms)
                else:
                    excluded.update(syms)
                continue
            cum = 0
            for i, c in enumerate(counts):
                if t < cum + c:
                    coder.decode_consume(FreqSlice(cum, cum + c, total))
                    sym = syms[i]
                    break
                cum += c
            coded = k
            break
        if sym is None:
            if excluded:
                total = ALPHABET_SIZE - len(excluded)
                t = coder.decode_point(total)
                idx = -1
                for s in range(ALPHABET_SIZE):
                    if s in excluded:
                        continue
                    idx += 1
                    if idx == t:
                        sym = s
                        break
            else:
                total = ALPHABET_SIZE
                t = coder.decode_point(total)
                sym = t
            coder.decode_consume(FreqSlice(t, t + 1, total))
            coded = -1
        if sym != EOF:
            self._update(keys, sym, 0 if coded < 0 else coded, top)
        return sym

    def prime_char(self, buf, pos: int) -> int:
        """Apply the same update coding buf[pos] would have, emitting nothing.

        Used for characters conveyed by a dictionary hit so both models see
        every character exactly once.  Returns the order the symbol would
        have been coded at.
        """
        sym = buf[pos]
        top = self.order if self.order <= pos else pos
        keys = [bytes(buf[pos - k:pos]) for k in range(top + 1)]
        coded = -1
        for k in range(top, -1, -1):
            st = self.tables[k].get(keys[k])
            if st is not None and sym in st.syms:
                coded = k
                break
        self._update(keys, sym, 0 if coded < 0 else coded, top)
        return coded

    # -- update -----------------------------------------------------------

    def _update(self, keys, sym: int, from_order: int, top: int) -> None:
        track = self._track
        for k in range(from_order, top + 1):
            key = keys[k]
            tbl = self.tables[k]
            st = tbl.get(key)
            if st is None:
                st = SymbolStats()
                tbl[key] = st
            try:
                i = st.syms.index(sym)
            except ValueError:
                st.syms.append(sym)
                st.counts.append(1)
                st.total += 1
                if track:
                    self._fp = (self._fp + _entry_term(key, sym, 1)) & _M64
            else:
                c = st.counts[i]
                st.counts[i] = c + 1
                st.total += 1
                if track:
                    self._fp = (self._fp
                                - _entry_term(key, sym, c)
                                + _entry_term(key, sym, c + 1)) & _M64
            if st.total + len(st.syms) > MAX_TOTAL:
                self._rescale(st, key)

    def _rescale(self, st: SymbolStats, key: bytes) -> None:
        track = self._track
        total = 0
        for i, c in enumerate(st.counts):
            nc = c >> 1
            if nc == 0:
                nc = 1
            if nc != c:
                st.counts[i] = nc
                if track:
                    self._fp = (self._fp
                                - _entry_term(key, st.syms[i], c)
                                + _entry_term(key, st.syms[i], nc)) & _M64
            total += nc
        st.total = total

    # -- introspection ----------------------------------------------------

    def entry_count(self) -> int:
        """Total (context, symbol) pairs stored; the memory proxy."""
        return sum(len(st.syms) for tbl in self.tables for st in tbl.values())

    def enable_hash_tracking(self) -> None:
        """Keep state_hash() O(1) from here on (used by synchrony tests)."""
        if not self._track:
            self._fp = self._full_fingerprint()
            self._track = True

    def state_hash(self) -> int:
        """64-bit digest of the table contents; stable within a build."""
        if self._track:
            return self._fp
        return self._full_fingerprint()

    def _full_fingerprint(self) -> int:
        fp = 0
        for tbl in self.tables:
            for key, st in tbl.items():
                for s, c in zip(st.syms, st.counts):
                    fp = (fp + _entry_term(key, s, c)) & _M64
        return fp
