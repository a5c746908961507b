"""Exact Tsirelson-type norms ``T[S_xi, theta]`` on finitely supported vectors.

The norm is the least solution of

    ||x|| = max(||x||_inf, theta * sup sum_i ||E_i x||)

over successive sets ``E_1 < E_2 < ...`` whose minima form an ``S_xi`` set.
Coordinates are ``Fraction``s and the computation is exact. Besides the
value, :func:`norm` returns a norming functional (a :class:`Node`/:class:`Leaf`
tree) that attains it, so any caller can re-check the result with
:func:`eval_functional` and :func:`check_functional`.

Why a finite search suffices: by 1-unconditionality only ``|x|`` matters;
a block ``E_i`` can be shrunk to a run of consecutive support points (moving
its minimum right keeps admissibility because ``S_xi`` is spreading) and then
widened up to the next block (norms are monotone under restriction); a
one-child node ``theta*f`` is beaten by ``f`` itself. So the norm is a DP
over runs of support positions, see :mod:`schreierkit.blocks`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .blocks import BlockEngine
from .errors import CapExceeded, PreconditionError
from .ordinal import CANONICAL, FundamentalPolicy, Ordinal, mul_nat
from .schreier import FiniteSet, Schreier, finite_set, member

#: largest support the exact norm accepts by default
SUPPORT_CAP = 20
#: caps for explicit norming-set enumeration
ENUM_UNIVERSE_CAP = 12
ENUM_DEPTH_CAP = 4

Rational = Union[Fraction, int, str]


def as_fraction(value: Rational) -> Fraction:
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


# ---------------------------------------------------------------------------
# vectors


class SparseVector(Mapping[int, Fraction]):
    """Finitely supported rational vector indexed by positive integers; zeros are dropped."""

    __slots__ = ("_data",)

    def __init__(self, entries: Union[Mapping, Iterable, None] = None):
        items = entries.items() if isinstance(entries, Mapping) else (entries or ())
        data = {}
        for k, v in items:
            k, v = int(k), as_fraction(v)
            if k < 1:
                raise ValueError(f"index {k} is not a positive integer")
            if v:
                data[k] = v
        self._data = dict(sorted(data.items()))

    @classmethod
    def unit(cls, k: int, value: Rational = 1) -> "SparseVector":
        return cls({k: value})

    @classmethod
    def on(cls, support: Iterable[int], coefficients: Iterable[Rational]) -> "SparseVector":
        return cls(zip(support, coefficients))

    @classmethod
    def from_json(cls, text: Union[str, Mapping]) -> "SparseVector":
        data = json.loads(text) if isinstance(text, str) else text
        return cls({int(k): Fraction(str(v)) for k, v in data.items()})

    def to_json(self) -> dict[str, str]:
        return {str(k): str(v) for k, v in self._data.items()}

    def __getitem__(self, k):
        return self._data.get(k, Fraction(0))

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    @property
    def support(self) -> FiniteSet:
        return tuple(self._data)

    def __add__(self, other: "SparseVector") -> "SparseVector":
        out = dict(self._data)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return SparseVector(out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Rational) -> "SparseVector":
        c = as_fraction(c)
        return SparseVector({k: c * v for k, v in self._data.items()})

    def restrict(self, indices: Iterable[int]) -> "SparseVector":
        keep = set(indices)
        return SparseVector({k: v for k, v in self._data.items() if k in keep})

    def abs(self) -> "SparseVector":
        return SparseVector({k: abs(v) for k, v in self._data.items()})

    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self._data.values()), default=Fraction(0))

    def l1_norm(self) -> Fraction:
        return sum((abs(v) for v in self._data.values()), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, SparseVector):
            return self._data == other._data
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._data.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in self._data.items())
        return f"SparseVector({{{inner}}})"


@dataclass(frozen=True)
class NormSpec:
    xi: Ordinal = Ordinal.of(1)
    theta: Fraction = Fraction(1, 2)
    policy: FundamentalPolicy = CANONICAL

    def __post_init__(self):
        object.__setattr__(self, "xi", Ordinal.of(self.xi))
        object.__setattr__(self, "theta", as_fraction(self.theta))
        if not 0 < self.theta < 1:
            raise PreconditionError(f"theta must lie in (0, 1), got {self.theta}")
        if self.xi.is_zero():
            raise PreconditionError("xi must be at least 1")

    @property
    def family(self) -> Schreier:
        return Schreier(self.xi, self.policy)


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Leaf:
    sign: int
    index: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise PreconditionError("leaf sign must be +1 or -1")
        if self.index < 1:
            raise PreconditionError("leaf index must be positive")


@dataclass(frozen=True)
class Node:
    """``theta * (f_1 + ... + f_d)``; the empty node is the zero functional."""

    children: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


FunctionalTree = Union[Leaf, Node]


def support(f: FunctionalTree) -> FiniteSet:
    if isinstance(f, Leaf):
        return (f.index,)
    return finite_set(itertools.chain.from_iterable(support(c) for c in f.children))


def coefficients(f: FunctionalTree, theta: Rational) -> dict[int, Fraction]:
    """The functional as a coefficient map ``k -> f(e_k)``."""
    theta = as_fraction(theta)
    out: dict[int, Fraction] = {}

    def walk(g, scale):
        if isinstance(g, Leaf):
            out[g.index] = out.get(g.index, 0) + g.sign * scale
        else:
            for c in g.children:
                walk(c, scale * theta)

    walk(f, Fraction(1))
    return {k: v for k, v in sorted(out.items()) if v}


def _check_structure(f: FunctionalTree) -> None:
    if isinstance(f, Leaf):
        return
    prev_max = 0
    for c in f.children:
        s = support(c)
        if not s:
            raise PreconditionError("functional has a child with empty support")
        if s[0] <= prev_max:
            raise PreconditionError("children supports are not successive")
        prev_max = s[-1]
        _check_structure(c)


def check_functional(f: FunctionalTree, spec: NormSpec) -> None:
    """Raise unless f has successive children whose support minima lie in S_xi at every node."""
    _check_structure(f)

    def walk(g):
        if isinstance(g, Node):
            mins = tuple(support(c)[0] for c in g.children)
            if not member(mins, spec.family):
                raise PreconditionError(f"child minima {mins} are not in {spec.family}")
            for c in g.children:
                walk(c)

    walk(f)


def eval_functional(f: FunctionalTree, x: Mapping[int, Rational], theta: Rational) -> Fraction:
    _check_structure(f)
    theta = as_fraction(theta)

    def ev(g):
        if isinstance(g, Leaf):
            return g.sign * as_fraction(x.get(g.index, 0))
        return theta * sum((ev(c) for c in g.children), Fraction(0))

    return ev(f)


def functional_to_json(f: FunctionalTree):
    if isinstance(f, Leaf):
        return {"sign": f.sign, "index": f.index}
    return {"children": [functional_to_json(c) for c in f.children]}


def functional_from_json(data) -> FunctionalTree:
    if isinstance(data, str):
        data = json.loads(data)
    if "index" in data:
        return Leaf(int(data["sign"]), int(data["index"]))
    return Node(tuple(functional_from_json(c) for c in data["children"]))


def depth(f: FunctionalTree) -> int:
    if isinstance(f, Leaf):
        return 0
    return 1 + max((depth(c) for c in f.children), default=0)


# ---------------------------------------------------------------------------
# the norm


@dataclass(frozen=True)
class NormResult:
    value: Fraction
    certificate: FunctionalTree

    def __iter__(self):
        return iter((self.value, self.certificate))


def norm(x: Mapping[int, Rational], spec: NormSpec = NormSpec(), cap: int = SUPPORT_CAP) -> NormResult:
    x = x if isinstance(x, SparseVector) else SparseVector(x)
    idx = x.support
    n = len(idx)
    if n > cap:
        raise CapExceeded(f"support of size {n} exceeds cap {cap}")
    if n == 0:
        return NormResult(Fraction(0), Node())

    # Work with integers: every candidate value is sum |x_k| theta^{d_k} with
    # d_k < n, so the common scale D * q^n makes all of them integral.
    p, q = spec.theta.numerator, spec.theta.denominator
    D = math.lcm(*(v.denominator for v in x.values()))
    scale = D * q**n
    X = [int(abs(x[k]) * scale) for k in idx]

    table: dict[tuple[int, int], int] = {}
    how: dict[tuple[int, int], object] = {}
    engine = BlockEngine(idx, lambda a, b: table.get((a, b)))

    for k in range(n):
        table[(k, k + 1)] = X[k]
        how[(k, k + 1)] = k
    root = engine.compile(spec.family)

    for j in range(2, n + 1):
        for i in range(j - 2, -1, -1):
            engine.current = (i, j)
            arg = max(range(i, j), key=lambda k: (X[k], -k))
            value, choice = X[arg], arg
            best_q, best_adm = None, None
            for start in range(i, j):
                v = root.best(start, j)
                if v is not None and (best_adm is None or v > best_adm):
                    best_q, best_adm = start, v
            if best_adm is not None:
                num = best_adm * p
                assert num % q == 0, "scale too small for exact arithmetic"
                if num // q > value:
                    value = num // q
                    choice = root.trace(best_q, j)
            table[(i, j)] = value
            how[(i, j)] = choice
    engine.current = None

    signs = {k: (1 if x[k] > 0 else -1) for k in idx}

    def build(i, j):
        choice = how[(i, j)]
        if isinstance(choice, int):
            return Leaf(signs[idx[choice]], idx[choice])
        return Node(tuple(build(a, b) for a, b in choice))

    cert = build(0, n)
    return NormResult(Fraction(table[(0, n)], scale), cert)


def norm_value(x, spec: NormSpec = NormSpec(), cap: int = SUPPORT_CAP) -> Fraction:
    return norm(x, spec, cap).value


# ---------------------------------------------------------------------------
# explicit norming sets


def enumerate_norming(
    spec: NormSpec,
    universe: Union[int, Iterable[int]],
    depth: int,
    universe_cap: int = ENUM_UNIVERSE_CAP,
    depth_cap: int = ENUM_DEPTH_CAP,
    signs: tuple[int, ...] = (1, -1),
) -> list[FunctionalTree]:
    """The functionals of the depth-``depth`` stage of the norming set, supported in the universe.

    Stage 0 is ``{+-e_n*} u {0}``; stage s+1 adds ``theta*(f_1+...+f_d)`` for
    stage-s functionals with successive supports whose minima lie in S_xi.
    Functionals with the same coefficients are reported once, and zero
    children are dropped. ``universe`` may be an int (meaning ``[1..N]``) or an
    explicit index set. ``signs=(1,)`` restricts to nonnegative functionals.
    """
    ground = tuple(range(1, universe + 1)) if isinstance(universe, int) else finite_set(universe)
    if len(ground) > universe_cap:
        raise CapExceeded(f"universe of size {len(ground)} exceeds cap {universe_cap}")
    if depth > depth_cap:
        raise CapExceeded(f"depth {depth} exceeds cap {depth_cap}")
    theta = spec.theta
    family = spec.family
    # entries: coefficient key -> (tree, min support, max support)
    stage: dict = {(): (Node(), None, None)}
    for k in ground:
        for s in signs:
            stage[((k, Fraction(s)),)] = (Leaf(s, k), k, k)
    for _ in range(depth):
        by_min: dict[int, list] = {}
        for key, (f, lo, hi) in stage.items():
            if key:
                by_min.setdefault(lo, []).append((key, f, hi))
        new = dict(stage)

        def extend(keys, trees, mins, last):
            if trees:
                key = tuple((k, theta * c) for part in keys for k, c in part)
                if key not in new:
                    new[key] = (Node(tuple(trees)), mins[0], last)
            for m in ground:
                if m <= last or m not in by_min:
                    continue
                cand = mins + (m,)
                if not member(cand, family):
                    continue
                for key, f, top in by_min[m]:
                    keys.append(key)
                    trees.append(f)
                    extend(keys, trees, cand, top)
                    keys.pop()
                    trees.pop()

        extend([], [], (), 0)
        stage = new
    return [f for f, _, _ in stage.values()]


def norm_by_enumeration(x: Mapping[int, Rational], spec: NormSpec, depth: int, **caps) -> Fraction:
    """Oracle: maximum of ``f(x)`` over the explicit norming stage restricted to supp x."""
    x = x if isinstance(x, SparseVector) else SparseVector(x)
    if not x:
        return Fraction(0)
    fs = enumerate_norming(spec, x.support, depth, **caps)
    return max(eval_functional(f, x, spec.theta) for f in fs)


def sufficient_depth(support_size: int) -> int:
    return max(0, math.ceil(math.log2(support_size))) + 1 if support_size > 1 else 0


# ---------------------------------------------------------------------------
# level sets


def level_set(f: FunctionalTree, threshold: Rational, theta: Rational,
              universe: Optional[Iterable[int]] = None) -> FiniteSet:
    """Coordinates k with ``|f(e_k)| >= threshold``."""
    threshold = as_fraction(threshold)
    coeffs = coefficients(f, theta)
    keys = coeffs if universe is None else [k for k in coeffs if k in set(universe)]
    return tuple(k for k in keys if abs(coeffs[k]) >= threshold)


def level_set_family(spec: NormSpec, ell: int):
    """The family that the level set at ``theta^ell`` lands in: ``S_{xi*ell}``."""
    if ell == 0:
        return Schreier(Ordinal.of(0), spec.policy)
    return Schreier(mul_nat(spec.xi, ell), spec.policy)


def level_set_checked(f: FunctionalTree, ell: int, spec: NormSpec) -> tuple[FiniteSet, bool]:
    """Level set at ``theta^ell`` and whether it belongs to ``S_{xi*ell}``."""
    L = level_set(f, spec.theta**ell, spec.theta)
    return L, member(L, level_set_family(spec, ell))
