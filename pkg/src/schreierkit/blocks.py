"""Best admissible block partitions over a finite increasing support.

Positions ``0..n-1`` index a support ``values[0] < ... < values[n-1]``. A
*piece* is a half-open run of positions ``[a, b)``; a partition of ``[q, j)``
into consecutive pieces starting exactly at ``q`` is *admissible* for a family
when the set of support values at the piece starts belongs to the family.
``best(q, j)`` is the largest total piece value over admissible partitions.

The same engine answers three questions by changing the piece valuation:
the Tsirelson norm (piece = norm of the restricted vector), the heaviest
family member inside a weighted set (piece = weight of its first element),
and plain membership.

Piece valuations must satisfy ``v(a, c) <= v(a, b) + v(b, c)``; then
splitting never hurts, and once a partition may use as many pieces as there
are positions the optimum is the all-singletons partition.
"""

from __future__ import annotations

import sys
from typing import Callable, Optional, Sequence

from .ordinal import Ordinal
from .schreier import Compose, FamilySpec, Power, Relabel, Schreier

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

Piece = tuple[int, int]


class PieceProvider:
    def __init__(self, engine: "BlockEngine", valuation: Callable[[int, int], Optional[int]]):
        self.engine = engine
        self.valuation = valuation

    def best(self, q: int, j: int) -> Optional[int]:
        return self.valuation(q, j)

    def trace(self, q: int, j: int) -> list[Piece]:
        return [(q, j)]


class _Node:
    def __init__(self, engine: "BlockEngine", provider, vals: Sequence[Optional[int]]):
        self.engine = engine
        self.provider = provider
        self.vals = vals
        self.memo: dict = {}

    def _store(self, key, q: int, j: int, value):
        if self.engine.current != (q, j):
            self.memo[key] = value
        return value


class _Single(_Node):
    """S_0: one piece."""

    def best(self, q, j):
        if self.vals[q] is None:
            return None
        return self.provider.best(q, j)

    def trace(self, q, j):
        return self.provider.trace(q, j)


class _Schreier1(_Node):
    """S_1 over the provider's pieces: at most ``vals[q]`` of them."""

    def __init__(self, engine, provider, vals):
        super().__init__(engine, provider, vals)
        self._singles = None

    def _singleton_sums(self):
        # prefix sums of singleton-piece values, and prefix counts of
        # positions where a singleton piece is not allowed
        if self._singles is None:
            acc, bad = [0], [0]
            for k in range(len(self.vals)):
                v = self.provider.best(k, k + 1) if self.vals[k] is not None else None
                acc.append(acc[-1] + (v or 0))
                bad.append(bad[-1] + (v is None))
            self._singles = (acc, bad)
        return self._singles

    def best(self, q, j):
        c = self.vals[q]
        if c is None:
            return None
        return self.parts(q, j, c)[0]

    def parts(self, r, j, t):
        """(value, next cut) of the best partition of [r, j) into <= t pieces."""
        key = (r, j, t)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if t >= j - r:
            acc, bad = self._singleton_sums()
            if bad[j] == bad[r]:
                return self._store(key, r, j, (acc[j] - acc[r], -1))
        best, cut = None, None
        provider = self.provider
        for r2 in range(r + 1, j + 1):
            v = provider.best(r, r2)
            if v is None:
                continue
            if r2 < j:
                if t <= 1 or self.vals[r2] is None:
                    continue
                rest = self.parts(r2, j, t - 1)[0]
                if rest is None:
                    continue
                v += rest
            if best is None or v > best:
                best, cut = v, r2
        return self._store(key, r, j, (best, cut))

    def trace(self, q, j):
        out: list[Piece] = []
        r, t = q, self.vals[q]
        while r < j:
            value, cut = self.parts(r, j, t)
            if cut == -1:
                for k in range(r, j):
                    out.extend(self.provider.trace(k, k + 1))
                return out
            out.extend(self.provider.trace(r, cut))
            r, t = cut, t - 1
        return out


class _Limit(_Node):
    def __init__(self, engine, provider, vals, spec: Schreier, valkey):
        super().__init__(engine, provider, vals)
        self.spec = spec
        self.valkey = valkey
        self.children: dict[int, object] = {}

    def child(self, n: int):
        if n not in self.children:
            sub = Schreier(self.spec.policy.sequence(self.spec.xi, n), self.spec.policy)
            self.children[n] = self.engine.compile(sub, self.provider, self.valkey)
        return self.children[n]

    def best(self, q, j):
        key = (q, j)
        if key in self.memo:
            return self.memo[key][0]
        c = self.vals[q]
        best, arg = None, None
        if c is not None:
            for n in range(1, c + 1):
                v = self.child(n).best(q, j)
                if v is not None and (best is None or v > best):
                    best, arg = v, n
        self._store(key, q, j, (best, arg))
        return best

    def trace(self, q, j):
        self.best(q, j)
        hit = self.memo.get((q, j))
        if hit is None:
            # recompute without caching (only happens for the current interval)
            c = self.vals[q]
            hit = max(
                ((self.child(n).best(q, j), n) for n in range(1, c + 1)),
                key=lambda p: (p[0] is not None, p[0] or 0),
            )
        return self.child(hit[1]).trace(q, j)


class BlockEngine:
    """Holds the support, the piece valuation and compiled family nodes."""

    def __init__(self, values: Sequence[int], valuation: Callable[[int, int], Optional[int]]):
        self.values = tuple(values)
        self.base = PieceProvider(self, valuation)
        self.current: Optional[Piece] = None
        self._compiled: dict = {}
        self._vals: dict = {(): list(self.values)}

    def vals_for(self, valkey: tuple) -> list[Optional[int]]:
        if valkey not in self._vals:
            prev = self.vals_for(valkey[:-1])
            seq = valkey[-1]
            self._vals[valkey] = [None if v is None else seq.position(v) for v in prev]
        return self._vals[valkey]

    def compile(self, spec: FamilySpec, provider=None, valkey: tuple = ()):
        provider = provider or self.base
        key = (spec, id(provider), valkey)
        if key in self._compiled:
            return self._compiled[key]
        vals = self.vals_for(valkey)
        if isinstance(spec, Schreier):
            xi = spec.xi
            if xi.is_zero():
                node = _Single(self, provider, vals)
            elif xi == Ordinal.of(1):
                node = _Schreier1(self, provider, vals)
            elif xi.is_successor():
                inner = self.compile(Schreier(xi.predecessor(), spec.policy), provider, valkey)
                node = _Schreier1(self, inner, vals)
            else:
                node = _Limit(self, provider, vals, spec, valkey)
        elif isinstance(spec, Compose):
            inner = self.compile(spec.inner, provider, valkey)
            node = self.compile(spec.outer, inner, valkey)
        elif isinstance(spec, Power):
            node = self.compile(spec.unfold(), provider, valkey)
        elif isinstance(spec, Relabel):
            node = self.compile(spec.base, provider, valkey + (spec.seq,))
        else:
            raise TypeError(f"unknown family spec {spec!r}")
        self._compiled[key] = node
        # keep the provider alive so id() stays unique
        self._compiled[("keepalive", id(provider))] = provider
        return node
