"""Schreier families S_xi, their compositions, powers and relabelings.

Finite sets are plain tuples of strictly increasing positive integers.
Every family here is hereditary, which is what makes both membership
(greedy block decomposition) and enumeration (pruned DFS) cheap.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import CapExceeded, PreconditionError
from .ordinal import CANONICAL, FundamentalPolicy, Ordinal, OrdinalLike

FiniteSet = tuple[int, ...]

#: default cap on the universe size for enumeration
UNIVERSE_CAP = 24


def finite_set(elements: Iterable[int]) -> FiniteSet:
    out = tuple(sorted(set(int(e) for e in elements)))
    if out and out[0] < 1:
        raise ValueError("finite sets live in the positive integers")
    return out


def parse_set(text: str) -> FiniteSet:
    text = text.strip().strip("{}[]")
    if not text:
        return ()
    return finite_set(int(t) for t in text.split(","))


# ---------------------------------------------------------------------------
# family specifications


class FamilySpec:
    """Base class; subclasses are frozen dataclasses and therefore hashable."""

    spreading = True

    def __contains__(self, F) -> bool:
        return member(F, self)


@dataclass(frozen=True)
class Schreier(FamilySpec):
    xi: Ordinal
    policy: FundamentalPolicy = CANONICAL

    def __post_init__(self):
        object.__setattr__(self, "xi", Ordinal.of(self.xi))

    def __str__(self):
        return f"S_{{{self.xi}}}"


@dataclass(frozen=True)
class Compose(FamilySpec):
    """``outer[inner]``: unions of successive inner-blocks whose minima lie in outer."""

    outer: FamilySpec
    inner: FamilySpec

    @property
    def spreading(self):
        return self.outer.spreading and self.inner.spreading


@dataclass(frozen=True)
class Power(FamilySpec):
    """``[base]^n`` with ``[F]^1 = F`` and ``[F]^{n+1} = F[[F]^n]``."""

    base: FamilySpec
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("power exponent must be at least 1")

    @property
    def spreading(self):
        return self.base.spreading

    def unfold(self) -> FamilySpec:
        if self.n == 1:
            return self.base
        return Compose(self.base, Power(self.base, self.n - 1))


class Subsequence:
    """Strictly increasing sequence ``n_1 < n_2 < ...`` of positive integers.

    Built from a finite tuple (elements past its end are absent) or from a
    callable ``i -> n_i`` with ``i`` starting at 1.
    """

    def __init__(self, source: Union[Sequence[int], Callable[[int], int]], name: str = ""):
        self._fn = None
        self._items: Optional[tuple[int, ...]] = None
        if callable(source):
            self._fn = source
        else:
            self._items = tuple(int(v) for v in source)
            if any(b <= a for a, b in zip(self._items, self._items[1:])):
                raise PreconditionError("subsequence must be strictly increasing")
            if self._items and self._items[0] < 1:
                raise PreconditionError("subsequence must consist of positive integers")
        self.name = name or (repr(self._items) if self._items is not None else repr(source))

    @classmethod
    def identity(cls) -> "Subsequence":
        return IDENTITY

    def __getitem__(self, i: int) -> int:
        """1-based access."""
        if i < 1:
            raise IndexError(i)
        if self._fn is not None:
            return int(self._fn(i))
        return self._items[i - 1]

    def position(self, value: int) -> Optional[int]:
        """1-based index of ``value`` in the sequence, or None."""
        if self._items is not None:
            k = bisect.bisect_left(self._items, value)
            if k < len(self._items) and self._items[k] == value:
                return k + 1
            return None
        # n_i >= i, so the position of value is at most value
        lo, hi = 1, value
        while lo <= hi:
            mid = (lo + hi) // 2
            v = self[mid]
            if v == value:
                return mid
            if v < value:
                lo = mid + 1
            else:
                hi = mid - 1
        return None

    def take_upto(self, bound: int) -> list[int]:
        out = []
        i = 1
        while True:
            if self._items is not None and i > len(self._items):
                break
            v = self[i]
            if v > bound:
                break
            out.append(v)
            i += 1
        return out

    def __repr__(self):
        return f"Subsequence({self.name})"


IDENTITY = Subsequence(lambda i: i, name="N")


@dataclass(frozen=True)
class Relabel(FamilySpec):
    """``F(N) = {(n_i)_{i in F} : F in base}``."""

    base: FamilySpec
    seq: Subsequence
    spreading = False


def schreier(xi: OrdinalLike, policy: FundamentalPolicy = CANONICAL) -> Schreier:
    return Schreier(Ordinal.of(xi), policy)


# ---------------------------------------------------------------------------
# membership


def member(F: Iterable[int], spec: FamilySpec) -> bool:
    F = F if isinstance(F, tuple) else finite_set(F)
    return _member(F, spec)


@lru_cache(maxsize=1 << 20)
def _member(F: FiniteSet, spec: FamilySpec) -> bool:
    if not F:
        return True
    if isinstance(spec, Schreier):
        xi = spec.xi
        if xi.is_zero():
            return len(F) == 1
        if xi.is_successor():
            pred = xi.predecessor()
            if pred.is_zero():
                return len(F) <= F[0]
            starts = _greedy_starts(F, Schreier(pred, spec.policy))
            return starts is not None and len(starts) <= F[0]
        # "n <= min F and F in S_{xi_n}" for some n: try every admissible n
        return any(
            _member(F, Schreier(spec.policy.sequence(xi, n), spec.policy))
            for n in range(1, F[0] + 1)
        )
    if isinstance(spec, Power):
        return _member(F, spec.unfold())
    if isinstance(spec, Compose):
        if spec.outer.spreading:
            starts = _greedy_starts(F, spec.inner)
            return starts is not None and _member(starts, spec.outer)
        return _decomposition_search(F, spec) is not None
    if isinstance(spec, Relabel):
        positions = []
        for v in F:
            p = spec.seq.position(v)
            if p is None:
                return False
            positions.append(p)
        return _member(tuple(positions), spec.base)
    raise TypeError(f"unknown family spec {spec!r}")


def _longest_prefix(F: FiniteSet, spec: FamilySpec) -> int:
    """Length of the longest member prefix of F; prefix membership is monotone."""
    if not _member(F[:1], spec):
        return 0
    lo, hi = 1, len(F)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _member(F[:mid], spec):
            lo = mid
        else:
            hi = mid - 1
    return lo


def _greedy_blocks(F: FiniteSet, inner: FamilySpec) -> Optional[list[FiniteSet]]:
    blocks = []
    i = 0
    while i < len(F):
        k = _longest_prefix(F[i:], inner)
        if k == 0:
            return None
        blocks.append(F[i : i + k])
        i += k
    return blocks


def _greedy_starts(F: FiniteSet, inner: FamilySpec) -> Optional[FiniteSet]:
    # Greedy longest blocks give minima that are coordinatewise >= those of
    # any other decomposition, and no more of them; a hereditary spreading
    # outer family therefore accepts them iff it accepts some decomposition.
    blocks = _greedy_blocks(F, inner)
    if blocks is None:
        return None
    return tuple(b[0] for b in blocks)


def decompose(F: Iterable[int], spec: Compose) -> Optional[list[FiniteSet]]:
    """A witnessing block decomposition ``G_1 < ... < G_n`` of F, or None."""
    F = finite_set(F)
    if not F:
        return []
    if spec.outer.spreading:
        blocks = _greedy_blocks(F, spec.inner)
        if blocks is not None and _member(tuple(b[0] for b in blocks), spec.outer):
            return blocks
        return None
    return _decomposition_search(F, spec)


def _decomposition_search(F: FiniteSet, spec: Compose) -> Optional[list[FiniteSet]]:
    # exhaustive fallback for outer families that are not spreading
    def go(i: int, starts: tuple[int, ...]):
        if i == len(F):
            return []
        for j in range(len(F), i, -1):
            block = F[i:j]
            if not _member(block, spec.inner):
                continue
            new_starts = starts + (F[i],)
            if not _member(new_starts, spec.outer):
                continue
            rest = go(j, new_starts)
            if rest is not None:
                return [block] + rest
        return None

    return go(0, ())


# ---------------------------------------------------------------------------
# maximality and enumeration


def maximal(F: Iterable[int], spec: FamilySpec, bound: int) -> bool:
    """No proper superset inside [1..bound] is a member.

    By heredity it suffices to try adding one element at a time.
    """
    F = finite_set(F)
    if not _member(F, spec):
        raise PreconditionError(f"{F} is not a member of {spec}")
    present = set(F)
    return not any(
        _member(finite_set(F + (k,)), spec) for k in range(1, bound + 1) if k not in present
    )


def extend_to_maximal(F: Iterable[int], spec: FamilySpec, bound: int) -> FiniteSet:
    """Extend F to a member that is maximal inside [1..bound].

    Elements above max F are tried first, smallest first; a final sweep then
    admits anything still addable (needed only for non-spreading families).
    """
    F = finite_set(F)
    if not _member(F, spec):
        raise PreconditionError(f"{F} is not a member of {spec}")
    top = F[-1] if F else 0
    for k in range(top + 1, bound + 1):
        cand = F + (k,)
        if _member(cand, spec):
            F = cand
    changed = True
    while changed:
        changed = False
        present = set(F)
        for k in range(1, bound + 1):
            if k not in present and _member(finite_set(F + (k,)), spec):
                F = finite_set(F + (k,))
                changed = True
                break
    return F


def _canonical_order(sets: Iterable[FiniteSet]) -> list[FiniteSet]:
    return sorted(sets, key=lambda s: (len(s), s))


def enumerate_family(
    spec: FamilySpec, universe: int, cap: int = UNIVERSE_CAP
) -> list[FiniteSet]:
    """All members contained in ``[1..universe]``, ordered by size then lexicographically."""
    return enumerate_within(spec, range(1, universe + 1), cap)


def enumerate_within(
    spec: FamilySpec, ground: Iterable[int], cap: int = UNIVERSE_CAP
) -> list[FiniteSet]:
    ground = finite_set(ground)
    if len(ground) > cap:
        raise CapExceeded(f"universe of size {len(ground)} exceeds cap {cap}")
    out: list[FiniteSet] = [()]

    def dfs(prefix: FiniteSet, start: int):
        for idx in range(start, len(ground)):
            cand = prefix + (ground[idx],)
            # heredity: a non-member has no member supersets
            if _member(cand, spec):
                out.append(cand)
                dfs(cand, idx + 1)

    dfs((), 0)
    return _canonical_order(out)


# ---------------------------------------------------------------------------
# doubling, tail thresholds, transfer


def doubling(A: Iterable[int]) -> FiniteSet:
    """``A^{x2} = union of {2i, 2i+1} over i in A``."""
    return finite_set(itertools.chain.from_iterable((2 * i, 2 * i + 1) for i in A))


def tail_threshold(
    xi: OrdinalLike,
    zeta: OrdinalLike,
    universe: int,
    policy: FundamentalPolicy = CANONICAL,
    cap: int = UNIVERSE_CAP,
) -> Optional[int]:
    """Smallest n such that every S_xi member F in [1..universe] with n <= min F is in S_zeta.

    Finite-scale evidence only; returns None when no n <= universe works.
    """
    xi, zeta = Ordinal.of(xi), Ordinal.of(zeta)
    if not xi < zeta:
        raise PreconditionError(f"need xi < zeta, got {xi} and {zeta}")
    small, big = Schreier(xi, policy), Schreier(zeta, policy)
    worst = 0
    for F in enumerate_family(small, universe, cap):
        if F and not _member(F, big):
            worst = max(worst, F[0])
    n = worst + 1
    return n if n <= universe else None


@dataclass
class TransferResult:
    holds: bool
    counterexample: Optional[FiniteSet] = None
    checked: int = 0

    def __bool__(self):
        return self.holds


def transfer_check(
    alpha: OrdinalLike,
    beta: OrdinalLike,
    seq: Subsequence,
    universe: int,
    policy: FundamentalPolicy = CANONICAL,
    cap: int = UNIVERSE_CAP,
) -> TransferResult:
    """Check ``S_alpha[S_beta](N) subset of S_{beta+alpha}`` on sets inside [1..universe]."""
    alpha, beta = Ordinal.of(alpha), Ordinal.of(beta)
    if alpha.is_zero() or beta.is_zero():
        raise PreconditionError("alpha and beta must be at least 1")
    composed = Compose(Schreier(alpha, policy), Schreier(beta, policy))
    target = Schreier(beta + alpha, policy)
    visible = seq.take_upto(universe)
    count = 0
    for P in enumerate_family(composed, len(visible), cap):
        F = tuple(visible[p - 1] for p in P)
        count += 1
        if not _member(F, target):
            return TransferResult(False, F, count)
    return TransferResult(True, None, count)
