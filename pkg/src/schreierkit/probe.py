"""Finite-dimensional restricted gains and S_xi-singularity constants.

For a matrix ``T`` and a coordinate set ``F`` the restricted gain is
``inf ||Tz|| / ||z||`` over nonzero ``z`` supported on ``F``. Between
Euclidean spaces it is the smallest singular value of the columns of ``T``
indexed by ``F`` and is computed directly. For any other pair of norms the
problem is nonconvex, so the value reported is the best ratio actually
evaluated (a certified upper bound) and is flagged ``upper_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .errors import PreconditionError
from .ordinal import CANONICAL, OMEGA, FundamentalPolicy, Ordinal, OrdinalLike, mul
from .schreier import UNIVERSE_CAP, FiniteSet, Schreier, enumerate_family, finite_set, member
from .tsirelson import NormSpec, SparseVector, as_fraction, norm

EXACT = "exact"
UPPER_BOUND = "upper_bound"
#: absolute tolerance of the floating-point spectral path
SPECTRAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# norms on coordinate spaces


@dataclass(frozen=True)
class Euclidean:
    name = "euclidean"

    def __call__(self, z: Sequence) -> float:
        return float(np.linalg.norm(np.asarray(z, dtype=float)))

    def to_json(self):
        return {"kind": "euclidean"}


@dataclass(frozen=True)
class LpNorm:
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.p < 1:
            raise PreconditionError(f"lp norms need p >= 1, got {self.p}")

    def __call__(self, z: Sequence) -> float:
        return float(np.linalg.norm(np.asarray(z, dtype=float), ord=float(self.p)))

    def to_json(self):
        return {"kind": "lp", "p": str(self.p)}


@dataclass(frozen=True)
class TsirelsonNorm:
    spec: NormSpec = field(default_factory=NormSpec)

    def __call__(self, z: Sequence) -> float:
        return float(self.exact(z))

    def exact(self, z: Sequence) -> Fraction:
        # floats convert to Fractions without rounding
        vec = SparseVector({i + 1: as_fraction(v) for i, v in enumerate(z) if v != 0})
        return norm(vec, self.spec, cap=max(len(vec), 1)).value

    def to_json(self):
        return {"kind": "tsirelson", "xi": self.spec.xi.to_json(), "theta": str(self.spec.theta)}


CoordinateNorm = Union[Euclidean, LpNorm, TsirelsonNorm]


def norm_from_json(data) -> CoordinateNorm:
    if data in (None, "euclidean"):
        return Euclidean()
    if data == "tsirelson":
        return TsirelsonNorm()
    kind = data.get("kind")
    if kind == "euclidean":
        return Euclidean()
    if kind == "lp":
        return LpNorm(Fraction(data["p"]))
    if kind == "tsirelson":
        xi = Ordinal.of(data.get("xi", 1))
        return TsirelsonNorm(NormSpec(xi, Fraction(data.get("theta", "1/2"))))
    raise PreconditionError(f"unknown norm {data!r}")


# ---------------------------------------------------------------------------
# operators


def _entry(v) -> Union[Fraction, float]:
    if isinstance(v, float):
        return v
    return as_fraction(v)


@dataclass(frozen=True)
class Operator:
    """A matrix acting from ``(R^cols, domain_norm)`` to ``(R^rows, codomain_norm)``."""

    matrix: tuple
    domain_norm: CoordinateNorm = Euclidean()
    codomain_norm: CoordinateNorm = Euclidean()

    def __post_init__(self):
        rows = tuple(tuple(_entry(v) for v in row) for row in self.matrix)
        if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
            raise PreconditionError("matrix must be a nonempty rectangular array")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def diagonal(cls, entries: Iterable, **norms) -> "Operator":
        entries = list(entries)
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)), **norms)

    @classmethod
    def identity(cls, n: int, **norms) -> "Operator":
        return cls.diagonal([1] * n, **norms)

    @classmethod
    def zero(cls, n: int, **norms) -> "Operator":
        return cls.diagonal([0] * n, **norms)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.matrix[0])

    @property
    def dimension(self) -> int:
        return self.shape[1]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.matrix for v in row)

    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix], dtype=float)

    def apply(self, z: Sequence) -> list:
        return [sum((a * b for a, b in zip(row, z)), 0) for row in self.matrix]

    def euclidean(self) -> bool:
        return isinstance(self.domain_norm, Euclidean) and isinstance(self.codomain_norm, Euclidean)

    def to_json(self) -> dict:
        return {
            "matrix": [[str(v) if isinstance(v, Fraction) else v for v in row] for row in self.matrix],
            "domain_norm": self.domain_norm.to_json(),
            "codomain_norm": self.codomain_norm.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "Operator":
        if isinstance(data, list):
            data = {"matrix": data}
        matrix = [[Fraction(v) if isinstance(v, str) else v for v in row] for row in data["matrix"]]
        return cls(
            tuple(map(tuple, matrix)),
            norm_from_json(data.get("domain_norm")),
            norm_from_json(data.get("codomain_norm")),
        )


def compose(factors: Sequence[Operator]) -> Operator:
    """Matrix product ``factors[0] @ factors[1] @ ...``, kept exact when every factor is exact."""
    if not factors:
        raise PreconditionError("need at least one factor")
    for a, b in zip(factors, factors[1:]):
        if a.shape[1] != b.shape[0]:
            raise PreconditionError(f"dimension mismatch: {a.shape} then {b.shape}")
    out = factors[0]
    for nxt in factors[1:]:
        cols = list(zip(*nxt.matrix))
        rows = tuple(tuple(sum((x * y for x, y in zip(row, col)), 0) for col in cols) for row in out.matrix)
        out = Operator(rows, nxt.domain_norm, out.codomain_norm)
    return out


# ---------------------------------------------------------------------------
# restricted gains


@dataclass(frozen=True)
class Gain:
    value: float
    mode: str
    direction: tuple = ()

    def to_json(self) -> dict:
        return {"value": self.value, "mode": self.mode, "direction": list(self.direction)}


def _columns(T: Operator, F: FiniteSet) -> np.ndarray:
    return T.array()[:, [i - 1 for i in F]]


def euclidean_gain(T: Operator, F: Iterable[int]) -> Gain:
    """Smallest singular value of ``T`` restricted to the span of ``{e_i : i in F}``."""
    F = finite_set(F)
    A = _columns(T, F)
    if A.shape[0] < A.shape[1]:
        # a wide restriction has a kernel
        _, _, vt = np.linalg.svd(A)
        return Gain(0.0, EXACT, tuple(float(v) for v in vt[-1]))
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    return Gain(float(s[-1]), EXACT, tuple(float(v) for v in vt[-1]))


def min_gain(
    T: Operator,
    F: Iterable[int],
    seed: int = 0,
    samples: int = 64,
    rounds: int = 2,
) -> Gain:
    """``inf ||Tz|| / ||z||`` over nonzero ``z`` supported on ``F``.

    Exact for Euclidean norms on both sides. Otherwise the smallest ratio
    among seeded random directions, coordinate directions and the Euclidean
    minimizer, then locally refined; this is an upper bound on the infimum.
    """
    F = finite_set(F)
    if not F:
        raise PreconditionError("F must be nonempty")
    if F[-1] > T.dimension:
        raise PreconditionError(f"F reaches {F[-1]} beyond dimension {T.dimension}")
    if T.euclidean():
        return euclidean_gain(T, F)
    n = T.dimension

    def embed(c) -> list:
        z = [0.0] * n
        for i, v in zip(F, c):
            z[i - 1] = float(v)
        return z

    def ratio(c) -> float:
        z = embed(c)
        denom = T.domain_norm(z)
        if denom == 0:
            return math.inf
        return T.codomain_norm(T.apply(z)) / denom

    rng = np.random.default_rng(seed)
    starts = [np.eye(len(F))[k] for k in range(len(F))]
    starts.append(np.asarray(euclidean_gain(T, F).direction))
    starts.extend(rng.standard_normal((samples, len(F))))
    scored = sorted(((ratio(c), tuple(c)) for c in starts), key=lambda p: p[0])
    best_value, best_c = scored[0]
    for _, c in scored[: max(rounds, 0)]:
        res = minimize(ratio, np.asarray(c), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
        # re-evaluate so the reported number is a ratio we actually computed
        value = ratio(res.x)
        if value < best_value:
            best_value, best_c = value, tuple(res.x)
    return Gain(float(best_value), UPPER_BOUND, tuple(float(v) for v in best_c))


@dataclass(frozen=True)
class Singularity:
    value: float
    argmin: FiniteSet
    mode: str

    def to_json(self) -> dict:
        return {"value": self.value, "argmin": list(self.argmin), "mode": self.mode}


def sxi_singularity(
    T: Operator,
    xi: OrdinalLike,
    N: int,
    policy: FundamentalPolicy = CANONICAL,
    cap: int = UNIVERSE_CAP,
    **search,
) -> Singularity:
    """Minimum restricted gain over nonempty ``F in S_xi`` inside ``[1..N]``."""
    if not 1 <= N <= T.dimension:
        raise PreconditionError(f"N must lie in [1, {T.dimension}], got {N}")
    family = Schreier(Ordinal.of(xi), policy)
    best: Optional[tuple[float, FiniteSet]] = None
    mode = EXACT
    for F in enumerate_family(family, N, cap):
        if not F:
            continue
        g = min_gain(T, F, **search)
        mode = g.mode
        if best is None or g.value < best[0]:
            best = (g.value, F)
    return Singularity(best[0], best[1], mode)


# ---------------------------------------------------------------------------
# the inclusion identity


@dataclass
class InclusionCheck:
    holds: bool
    checked: int
    witness: Optional[dict] = None

    def __bool__(self):
        return self.holds


def _coefficients(F: FiniteSet, sample) -> dict[int, Fraction]:
    if isinstance(sample, Mapping):
        a = {int(k): as_fraction(v) for k, v in sample.items()}
        if set(a) - set(F):
            raise PreconditionError("sample has coordinates outside F")
        return a
    sample = list(sample)
    if len(sample) != len(F):
        raise PreconditionError(f"sample of length {len(sample)} does not match |F| = {len(F)}")
    return dict(zip(F, map(as_fraction, sample)))


def inclusion_ratio_check(
    xi: OrdinalLike,
    F: Iterable[int],
    samples: Iterable,
    policy: FundamentalPolicy = CANONICAL,
) -> InclusionCheck:
    """On ``span{e_i : i in F}`` with ``F in S_xi``, the ``xi`` and ``xi*omega`` norms agree.

    Both equal ``max(max |a_i|, sum |a_i| / 2)``; every sample is checked
    exactly against all three and the first disagreement is returned.
    """
    xi, F = Ordinal.of(xi), finite_set(F)
    if not member(F, Schreier(xi, policy)):
        raise PreconditionError(f"{F} is not in S_{xi}")
    half = Fraction(1, 2)
    small = NormSpec(xi, half, policy)
    large = NormSpec(mul(xi, OMEGA), half, FundamentalPolicy.paper_product(xi, policy))
    checked = 0
    for sample in samples:
        x = SparseVector(_coefficients(F, sample))
        a = norm(x, small, cap=max(len(F), 1)).value
        b = norm(x, large, cap=max(len(F), 1)).value
        closed = max(x.sup_norm(), half * x.l1_norm())
        checked += 1
        if not a == b == closed:
            return InclusionCheck(False, checked, {
                "x": x.to_json(), "norm_xi": str(a), "norm_xi_omega": str(b), "closed_form": str(closed),
            })
    return InclusionCheck(True, checked)


# ---------------------------------------------------------------------------
# products


def approximation_errors(T: Operator) -> list[float]:
    """Operator-norm distance from ``T`` to the rank-k matrices, k = 0, 1, ..."""
    s = np.linalg.svd(T.array(), compute_uv=False)
    return [float(v) for v in s]


def product_experiment(
    factors: Sequence[Operator],
    N: int,
    xis: Sequence[OrdinalLike] = (1,),
    policy: FundamentalPolicy = CANONICAL,
    **search,
) -> dict:
    """Rank-k approximation errors and singularity constants for each factor and their product."""
    product = compose(factors)

    def describe(T: Operator) -> dict:
        n = min(N, T.dimension)
        return {
            "shape": list(T.shape),
            "approximation_errors": approximation_errors(T),
            "singularity": {
                str(Ordinal.of(xi)): sxi_singularity(T, xi, n, policy, **search).to_json() for xi in xis
            },
        }

    return {
        "N": N,
        "spectral_tolerance": SPECTRAL_TOL,
        "product": describe(product),
        "factors": [describe(T) for T in factors],
    }
