"""Ordinals below omega^omega in Cantor normal form, and fundamental sequences.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` pairs with
strictly decreasing exponents, so ``omega^2*3 + 5`` is ``((2, 3), (0, 5))``.
Lexicographic comparison of these tuples coincides with the ordinal order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Union

from .errors import OrdinalOverflowError, PreconditionError

#: largest exponent an ordinal may carry; arithmetic past it raises
EXPONENT_BUDGET = 64

Term = tuple[int, int]


def _normalize(terms: Iterable[Iterable[int]]) -> tuple[Term, ...]:
    out: list[Term] = []
    for e, c in terms:
        e, c = int(e), int(c)
        if e < 0 or c < 0:
            raise ValueError(f"negative exponent or coefficient in {(e, c)}")
        if c == 0:
            continue
        if e > EXPONENT_BUDGET:
            raise OrdinalOverflowError(f"exponent {e} exceeds budget {EXPONENT_BUDGET}")
        if out and out[-1][0] <= e:
            raise ValueError("exponents must be strictly decreasing")
        out.append((e, c))
    return tuple(out)


@dataclass(frozen=True, order=True)
class Ordinal:
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _normalize(self.terms))

    # -- constructors -------------------------------------------------
    @classmethod
    def of(cls, value: "OrdinalLike") -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not an ordinal")
        if isinstance(value, int):
            if value < 0:
                raise ValueError("negative integer is not an ordinal")
            return cls(((0, value),)) if value else ZERO
        if isinstance(value, str):
            return cls.from_json(value)
        return cls(tuple(tuple(t) for t in value))

    @classmethod
    def omega_power(cls, k: int, c: int = 1) -> "Ordinal":
        return cls(((k, c),))

    @classmethod
    def from_json(cls, text: str) -> "Ordinal":
        data = json.loads(text)
        if isinstance(data, int):
            return cls.of(data)
        return cls(tuple(tuple(t) for t in data))

    def to_json(self) -> list[list[int]]:
        return [[e, c] for e, c in self.terms]

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or self.terms[0][0] == 0

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def __int__(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def leading_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero has no leading exponent")
        return self.terms[0][0]

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise PreconditionError(f"{self} is not a successor ordinal")
        *head, (_, c) = self.terms
        return Ordinal(tuple(head) + (((0, c - 1),) if c > 1 else ()))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "OrdinalLike") -> "Ordinal":
        return add(self, Ordinal.of(other))

    def __radd__(self, other: "OrdinalLike") -> "Ordinal":
        return add(Ordinal.of(other), self)

    def __mul__(self, other: "OrdinalLike") -> "Ordinal":
        if isinstance(other, int):
            return mul_nat(self, other)
        return mul(self, Ordinal.of(other))

    def __rmul__(self, other: "OrdinalLike") -> "Ordinal":
        return mul(Ordinal.of(other), self)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
                continue
            base = "ω" if e == 1 else f"ω^{e}"
            parts.append(base if c == 1 else f"{base}·{c}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Ordinal({self.to_json()})"


OrdinalLike = Union[Ordinal, int, str, Iterable]

ZERO = Ordinal()
ONE = Ordinal(((0, 1),))
OMEGA = Ordinal(((1, 1),))


def compare(a: OrdinalLike, b: OrdinalLike) -> int:
    """Return -1, 0 or 1."""
    a, b = Ordinal.of(a), Ordinal.of(b)
    return (a > b) - (a < b)


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    lead = b.terms[0][0]
    kept = [t for t in a.terms if t[0] > lead]
    same = [c for e, c in a.terms if e == lead]
    head = (lead, b.terms[0][1] + (same[0] if same else 0))
    return Ordinal(tuple(kept) + (head,) + b.terms[1:])


def mul_nat(a: Ordinal, n: int) -> Ordinal:
    if n < 0:
        raise ValueError("negative multiplier")
    if n == 0 or not a.terms:
        return ZERO
    (e, c), rest = a.terms[0], a.terms[1:]
    return Ordinal(((e, c * n),) + rest)


def mul_omega(a: Ordinal) -> Ordinal:
    """``a * omega``; zero stays zero."""
    if not a.terms:
        return ZERO
    return Ordinal.omega_power(a.leading_exponent + 1)


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    """General product ``a * b`` for ordinals below omega^omega."""
    if not a.terms or not b.terms:
        return ZERO
    total = ZERO
    for e, c in b.terms:
        if e == 0:
            total = add(total, mul_nat(a, c))
        else:
            total = add(total, Ordinal.omega_power(a.leading_exponent + e, c))
    return total


# ---------------------------------------------------------------------------
# fundamental sequences


def canonical_fundamental(lam: Ordinal, n: int) -> Ordinal:
    if not lam.is_limit():
        raise PreconditionError(f"{lam} is not a limit ordinal")
    if n < 1:
        raise PreconditionError("fundamental sequences are indexed from 1")
    *head, (k, c) = lam.terms
    base = Ordinal(tuple(head) + (((k, c - 1),) if c > 1 else ()))
    return add(base, Ordinal.omega_power(k - 1, n))


@dataclass(frozen=True)
class ProductSequence:
    """``n -> base * n``, the fundamental sequence of ``base * omega`` starting at ``base``."""

    base: Ordinal

    def __call__(self, n: int) -> Ordinal:
        return mul_nat(self.base, n)


@dataclass(frozen=True)
class FundamentalPolicy:
    """Which fundamental sequence each limit ordinal uses.

    ``overrides`` maps a limit ordinal to a callable ``n -> Ordinal``; every
    other limit falls back to the canonical sequence.
    """

    name: str = "canonical"
    overrides: tuple[tuple[Ordinal, Callable[[int], Ordinal]], ...] = field(default=())

    def __post_init__(self):
        if isinstance(self.overrides, Mapping):
            items = tuple(sorted(self.overrides.items(), key=lambda kv: kv[0]))
            object.__setattr__(self, "overrides", items)
        for lam, _ in self.overrides:
            if not lam.is_limit():
                raise PreconditionError(f"override key {lam} is not a limit ordinal")

    @classmethod
    def canonical(cls) -> "FundamentalPolicy":
        return CANONICAL

    @classmethod
    def paper_product(cls, base: OrdinalLike, fallback: "FundamentalPolicy | None" = None):
        """Policy in which ``base * omega`` has the sequence ``base * n``."""
        base = Ordinal.of(base)
        if base.is_zero():
            raise PreconditionError("paper-product base must be at least 1")
        extra = dict(fallback.overrides) if fallback else {}
        extra[mul_omega(base)] = ProductSequence(base)
        return cls("paper-product", extra)

    def sequence(self, lam: Ordinal, n: int) -> Ordinal:
        for key, gen in self.overrides:
            if key == lam:
                if n < 1:
                    raise PreconditionError("fundamental sequences are indexed from 1")
                return Ordinal.of(gen(n))
        return canonical_fundamental(lam, n)

    def to_json(self) -> dict:
        out: dict = {"name": self.name}
        bases = [
            [lam.to_json(), gen.base.to_json()]
            for lam, gen in self.overrides
            if isinstance(gen, ProductSequence)
        ]
        if bases:
            out["product_overrides"] = bases
        return out


CANONICAL = FundamentalPolicy()


def fundamental(lam: OrdinalLike, n: int, policy: FundamentalPolicy = CANONICAL) -> Ordinal:
    return policy.sequence(Ordinal.of(lam), n)
