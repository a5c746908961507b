"""Repeated averages: convex combinations on S_alpha sets that are small on every S_beta subset.

Averages are built on consecutive maximal sets: an
``(gamma+1)``-average starting at position ``p`` is the uniform mixture of
``p`` successive ``gamma``-averages, an average for a limit ordinal uses the
``p``-th term of its fundamental sequence, and a 1-average is the uniform
measure on ``{p, ..., 2p-1}``. Smallness is never taken on faith: every
result goes through :func:`verify_smallness`, which computes the heaviest
``S_beta`` subset exactly. If the check fails the start is moved right
(which makes the blocks longer) and the construction retried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .blocks import BlockEngine
from .errors import CapExceeded, PreconditionError, VerificationError
from .ordinal import CANONICAL, OMEGA, FundamentalPolicy, Ordinal, OrdinalLike, mul, mul_nat
from .schreier import (
    IDENTITY,
    UNIVERSE_CAP,
    FamilySpec,
    FiniteSet,
    Relabel,
    Schreier,
    Subsequence,
    enumerate_within,
    finite_set,
    member,
)
from .tsirelson import (
    SUPPORT_CAP,
    FunctionalTree,
    NormSpec,
    SparseVector,
    as_fraction,
    eval_functional,
    level_set_checked,
    norm,
)

#: largest support a repeated average may have
AVERAGE_CAP = 600
#: how many start positions to try before giving up
MAX_RETRIES = 64


@dataclass(frozen=True)
class WeightedSet:
    support: FiniteSet
    weights: Mapping[int, Fraction] = field(hash=False)

    def __post_init__(self):
        weights = {int(k): as_fraction(v) for k, v in self.weights.items()}
        object.__setattr__(self, "weights", dict(sorted(weights.items())))
        object.__setattr__(self, "support", finite_set(self.support))
        if tuple(self.weights) != self.support:
            raise PreconditionError("support must equal the set of weight keys")
        if any(w <= 0 for w in self.weights.values()):
            raise PreconditionError("weights must be positive")
        if sum(self.weights.values()) != 1:
            raise PreconditionError("weights must sum to exactly 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Fraction]]) -> "WeightedSet":
        w = dict(pairs)
        return cls(tuple(w), w)

    @classmethod
    def uniform(cls, F: Iterable[int]) -> "WeightedSet":
        F = finite_set(F)
        return cls(F, {k: Fraction(1, len(F)) for k in F})

    def mass(self, G: Iterable[int]) -> Fraction:
        return sum((self.weights.get(k, Fraction(0)) for k in G), Fraction(0))

    def as_vector(self) -> SparseVector:
        return SparseVector(self.weights)

    def to_json(self) -> dict:
        return {
            "support": list(self.support),
            "weights": {str(k): str(v) for k, v in self.weights.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "WeightedSet":
        w = {int(k): Fraction(v) for k, v in data["weights"].items()}
        return cls(tuple(data.get("support", w)), w)

    def __len__(self):
        return len(self.support)


@dataclass(frozen=True)
class Smallness:
    ok: bool
    worst: Fraction
    witness: FiniteSet

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# verification


def heaviest_member(w: WeightedSet, family: FamilySpec, cap: int = AVERAGE_CAP) -> tuple[Fraction, FiniteSet]:
    """Largest ``sum_{j in G} a_j`` over ``G subset of supp w`` with ``G`` in the family.

    Each candidate G is a partition of a run of support positions whose
    pieces each contribute their first element, so the block DP finds the
    optimum over all members exactly.
    """
    idx = w.support
    n = len(idx)
    if n > cap:
        raise CapExceeded(f"support of size {n} exceeds cap {cap}")
    if n == 0:
        return Fraction(0), ()
    D = math.lcm(*(v.denominator for v in w.weights.values()))
    W = [int(w.weights[k] * D) for k in idx]
    engine = BlockEngine(idx, lambda a, b: W[a])
    root = engine.compile(family)
    best, arg = 0, None
    for q in range(n):
        v = root.best(q, n)
        if v is not None and v > best:
            best, arg = v, q
    if arg is None:
        return Fraction(0), ()
    G = tuple(idx[a] for a, _ in root.trace(arg, n))
    return Fraction(best, D), G


def heaviest_member_by_enumeration(w: WeightedSet, family: FamilySpec, cap: int = UNIVERSE_CAP):
    """Oracle for :func:`heaviest_member`: walk every member inside the support."""
    best, arg = Fraction(0), ()
    for G in enumerate_within(family, w.support, cap):
        m = w.mass(G)
        if m > best:
            best, arg = m, G
    return best, arg


def _family(beta: Ordinal, policy: FundamentalPolicy, M: Subsequence) -> FamilySpec:
    base = Schreier(beta, policy)
    return base if M is IDENTITY else Relabel(base, M)


def verify_smallness(
    w: WeightedSet,
    beta: OrdinalLike,
    eps: Fraction,
    policy: FundamentalPolicy = CANONICAL,
    cap: int = AVERAGE_CAP,
    method: str = "dp",
    M: Subsequence = IDENTITY,
) -> Smallness:
    """Is every ``S_beta(M)`` subset of the support lighter than ``eps``? Returns the heaviest one."""
    family = _family(Ordinal.of(beta), policy, M)
    eps = as_fraction(eps)
    if method == "dp":
        worst, G = heaviest_member(w, family, cap)
    elif method == "enumerate":
        worst, G = heaviest_member_by_enumeration(w, family, min(cap, UNIVERSE_CAP))
    else:
        raise ValueError(f"unknown method {method!r}")
    return Smallness(worst < eps, worst, G)


# ---------------------------------------------------------------------------
# construction
#
# Averages are laid out on positions i = 1, 2, ... of M. The number of
# pieces opened at position i is ``count(i)``: i itself when sets are
# measured inside M, M[i] when they are measured on their actual values.


class _Layout:
    def __init__(self, policy: FundamentalPolicy, M: Subsequence, by_value: bool):
        self.policy = policy
        self.M = M
        self.by_value = by_value

    def count(self, i: int) -> int:
        if not self.by_value:
            return i
        try:
            return self.M[i]
        except IndexError:
            raise PreconditionError(f"subsequence {self.M!r} is too short") from None

    def size(self, alpha: Ordinal, i: int, limit: int) -> Optional[int]:
        """Positions used by the maximal alpha-average starting at i; None past ``limit``."""
        if alpha.is_zero():
            return 1
        c = self.count(i)
        if alpha == Ordinal.of(1):
            return c if c <= limit else None
        if alpha.is_limit():
            return self.size(self.policy.sequence(alpha, c), i, limit)
        pred = alpha.predecessor()
        total, pos = 0, i
        for _ in range(c):
            s = self.size(pred, pos, limit - total)
            if s is None:
                return None
            total += s
            pos += s
        return total

    def build(self, alpha: Ordinal, i: int) -> list[tuple[int, Fraction]]:
        if alpha.is_zero():
            return [(i, Fraction(1))]
        c = self.count(i)
        if alpha == Ordinal.of(1):
            return [(k, Fraction(1, c)) for k in range(i, i + c)]
        if alpha.is_limit():
            return self.build(self.policy.sequence(alpha, c), i)
        pred = alpha.predecessor()
        out: list[tuple[int, Fraction]] = []
        pos = i
        for _ in range(c):
            block = self.build(pred, pos)
            out.extend((k, a / c) for k, a in block)
            pos = block[-1][0] + 1
        return out

    def place(self, pairs) -> WeightedSet:
        try:
            return WeightedSet.from_pairs((self.M[k], a) for k, a in pairs)
        except IndexError:
            raise PreconditionError(f"subsequence {self.M!r} is too short") from None


def average_size(alpha: OrdinalLike, p: int, policy: FundamentalPolicy = CANONICAL, limit: int = AVERAGE_CAP):
    """Support size of the maximal alpha-average starting at p, or None if it exceeds ``limit``."""
    return _Layout(policy, IDENTITY, False).size(Ordinal.of(alpha), p, limit)


def repeated_average(
    alpha: OrdinalLike,
    beta: OrdinalLike,
    eps: Fraction,
    M: Subsequence = IDENTITY,
    policy: FundamentalPolicy = CANONICAL,
    cap: int = AVERAGE_CAP,
    start: Optional[int] = None,
    measure: str = "subsequence",
) -> WeightedSet:
    """A convex combination with mass below ``eps`` on every small subset.

    With ``measure="subsequence"`` the support is in ``S_alpha(M)`` and
    smallness is over ``S_beta(M)``. With ``measure="values"`` the support is
    a subset of M lying in ``S_alpha`` and smallness is over ``S_beta``. The
    two agree for ``M = N``. Measuring the support in ``S_alpha(M)`` but the
    subsets in ``S_beta`` is impossible in general: for ``M = (2^i)`` every
    ``F in S_2(M)`` splits into two ``S_1`` sets.
    """
    alpha, beta, eps = Ordinal.of(alpha), Ordinal.of(beta), as_fraction(eps)
    if beta.is_zero() or not beta < alpha:
        raise PreconditionError(f"need 1 <= beta < alpha, got beta={beta}, alpha={alpha}")
    if not 0 < eps <= 1:
        raise PreconditionError(f"eps must lie in (0, 1], got {eps}")
    if measure not in ("subsequence", "values"):
        raise PreconditionError(f"unknown measure {measure!r}")
    by_value = measure == "values"
    layout = _Layout(policy, M, by_value)
    ambient = IDENTITY if by_value else M
    # the top level mixes at least count(start) pieces, so start past 1/eps
    i = start if start is not None else 1
    while start is None and layout.count(i) <= 1 / eps:
        i += 1
    last_failure = None
    for _ in range(MAX_RETRIES):
        if layout.size(alpha, i, cap) is None:
            break
        w = layout.place(layout.build(alpha, i))
        if not member(w.support, _family(alpha, policy, ambient)):
            raise VerificationError(f"constructed support is not in S_{alpha}")
        check = verify_smallness(w, beta, eps, policy, cap, M=ambient)
        if check.ok:
            return w
        last_failure = check
        i += 1
    detail = f"; last attempt had an S_{beta} subset of mass {last_failure.worst}" if last_failure else ""
    raise CapExceeded(f"no verified ({alpha}, {beta}, {eps})-average within support cap {cap}{detail}")


# ---------------------------------------------------------------------------
# small-norm convex combinations


@dataclass
class Claim1Result:
    x: SparseVector
    norm_value: Fraction
    ell: int
    eps: Fraction
    route: str
    average: WeightedSet
    smallness: Smallness
    level_bound: Fraction
    in_limit_family: bool
    certificate: object = None

    def to_json(self) -> dict:
        from .tsirelson import functional_to_json

        return {
            "x": self.x.to_json(),
            "norm": str(self.norm_value),
            "ell": self.ell,
            "eps": str(self.eps),
            "route": self.route,
            "support_size": len(self.x),
            "max_beta_mass": str(self.smallness.worst),
            "level_bound": str(self.level_bound),
            "in_S_xi_omega": self.in_limit_family,
            "certificate": functional_to_json(self.certificate) if self.certificate else None,
        }


def level_split_holds(f: FunctionalTree, w: WeightedSet, ell: int, spec: NormSpec) -> bool:
    """``|f(x)| <= (mass of the level set at theta^ell) + theta^ell``, and that level set is in S_{xi*ell}."""
    L, in_family = level_set_checked(f, ell, spec)
    value = abs(eval_functional(f, w.weights, spec.theta))
    return in_family and value <= w.mass(L) + spec.theta**ell


def _routes(eta: Fraction, theta: Fraction, max_ell: int = 12):
    ell = 1
    while theta**ell >= eta / 2:
        ell += 1
    yield ell, eta / 2, "half-split"
    for k in range(1, max_ell + 1):
        if theta**k < eta and k != ell:
            yield k, eta - theta**k, "uneven-split"


def claim1_witness(
    xi: OrdinalLike,
    eta: Fraction,
    spec: Optional[NormSpec] = None,
    support_cap: int = SUPPORT_CAP,
    cap: int = AVERAGE_CAP,
) -> Claim1Result:
    """A convex combination of unit vectors whose exact norm is below ``eta``.

    For a level ``ell`` and a split ``eta = eps + theta^ell`` (first
    ``eps = eta/2``, then larger ``eps`` with smaller ``ell``), build an
    ``(xi*ell+1, xi*ell)``-average with mass below ``eps`` on every
    ``S_{xi*ell}`` set. Any norming functional is at least ``theta^ell`` only
    on an ``S_{xi*ell}`` set, which bounds the norm by ``eps + theta^ell``.
    The first route whose support fits ``support_cap`` is used and its norm
    is computed exactly.
    """
    xi, eta = Ordinal.of(xi), as_fraction(eta)
    spec = spec or NormSpec(xi)
    if spec.xi != xi:
        raise PreconditionError("spec.xi must equal xi")
    if not 0 < eta < 1:
        raise PreconditionError(f"eta must lie in (0, 1), got {eta}")
    theta = spec.theta
    tried = []
    for ell, eps, route in _routes(eta, theta):
        alpha, beta = mul_nat(xi, ell) + 1, mul_nat(xi, ell)
        try:
            w = repeated_average(alpha, beta, eps, policy=spec.policy, cap=min(cap, support_cap))
        except CapExceeded:
            tried.append((ell, eps))
            continue
        small = verify_smallness(w, beta, eps, spec.policy, cap)
        x = w.as_vector()
        result = norm(x, spec, cap=support_cap)
        bound = small.worst + theta**ell
        if not result.value < eta:
            raise VerificationError(f"norm {result.value} is not below eta={eta}")
        if result.value > bound:
            raise VerificationError(f"norm {result.value} exceeds level-set bound {bound}")
        if not level_split_holds(result.certificate, w, ell, spec):
            raise VerificationError("certificate breaks the level-set inequality")
        limit_policy = FundamentalPolicy.paper_product(xi, spec.policy)
        in_limit = member(w.support, Schreier(mul(xi, OMEGA), limit_policy))
        return Claim1Result(x, result.value, ell, eps, route, w, small, bound, in_limit, result.certificate)
    estimate = smallest_reachable_eta(xi, spec, support_cap)
    raise CapExceeded(
        f"support cap {support_cap} too small for eta={eta}; smallest reachable eta is about {estimate}"
    )


def smallest_reachable_eta(xi: Ordinal, spec: NormSpec, support_cap: int) -> Optional[Fraction]:
    """Smallest ``worst S_xi mass + theta`` over level-one averages that fit the cap."""
    best = None
    alpha = xi + 1
    layout = _Layout(spec.policy, IDENTITY, False)
    for p in range(1, support_cap + 1):
        if layout.size(alpha, p, support_cap) is None:
            break
        w = layout.place(layout.build(alpha, p))
        worst = heaviest_member(w, spec.family, support_cap)[0]
        cand = worst + spec.theta
        if best is None or cand < best:
            best = cand
    return best
