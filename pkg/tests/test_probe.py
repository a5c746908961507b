import math
import random
from fractions import Fraction as Fr

import numpy as np
import pytest

from schreierkit.errors import PreconditionError
from schreierkit.probe import (
    EXACT,
    UPPER_BOUND,
    Euclidean,
    LpNorm,
    Operator,
    TsirelsonNorm,
    compose,
    inclusion_ratio_check,
    min_gain,
    product_experiment,
    sxi_singularity,
)
from schreierkit.schreier import enumerate_family, schreier

DIAG4 = Operator.diagonal([1, Fr(1, 2), Fr(1, 4), Fr(1, 8)])


def grid_gain(A: np.ndarray) -> float:
    """min |Az|/|z| over unit z in R^3 by a zooming angular grid."""

    def ratios(a, b):
        z = np.stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a)])
        return np.linalg.norm(A @ z.reshape(3, -1), axis=0).reshape(a.shape)

    lo_a, hi_a, lo_b, hi_b = -math.pi / 2, math.pi / 2, 0.0, math.pi
    best = math.inf
    for _ in range(12):
        a, b = np.meshgrid(np.linspace(lo_a, hi_a, 121), np.linspace(lo_b, hi_b, 121), indexing="ij")
        r = ratios(a, b)
        i, j = np.unravel_index(np.argmin(r), r.shape)
        best = min(best, float(r[i, j]))
        da, db = (hi_a - lo_a) / 12, (hi_b - lo_b) / 12
        lo_a, hi_a = a[i, j] - da, a[i, j] + da
        lo_b, hi_b = b[i, j] - db, b[i, j] + db
    return best


def test_min_gain_examples():
    assert min_gain(Operator.identity(5), [2, 4]).value == pytest.approx(1)
    assert min_gain(Operator.zero(5), [1, 3]).value == 0
    g = min_gain(DIAG4, [4])
    assert g.value == pytest.approx(1 / 8) and g.mode == EXACT


def test_min_gain_preconditions():
    with pytest.raises(PreconditionError):
        min_gain(DIAG4, [])
    with pytest.raises(PreconditionError):
        min_gain(DIAG4, [5])


def test_wide_restriction_has_zero_gain():
    T = Operator(((1, 2, 3),))
    assert min_gain(T, [1, 2]).value == 0


def test_euclidean_gain_matches_grid():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(3, 6)
        T = Operator(tuple(tuple(Fr(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n)) for _ in range(n)))
        F = sorted(rng.sample(range(1, n + 1), 3))
        A = T.array()[:, [i - 1 for i in F]]
        assert abs(min_gain(T, F).value - grid_gain(A)) < 1e-6


def test_singularity_examples():
    s = sxi_singularity(DIAG4, 1, 4)
    assert s.value == pytest.approx(1 / 8) and s.argmin == (4,)
    for xi in (1, 2, 3):
        assert sxi_singularity(Operator.identity(6), xi, 6).value == pytest.approx(1)
    decay = Operator.diagonal([Fr(1, k) for k in range(1, 8)])
    assert sxi_singularity(decay, 2, 7).value <= sxi_singularity(decay, 1, 7).value


def test_singularity_matches_exhaustive_minimum():
    rng = np.random.default_rng(5)
    T = Operator(tuple(tuple(float(v) for v in row) for row in rng.normal(size=(6, 6))))
    s = sxi_singularity(T, 1, 6)
    values = [min_gain(T, F).value for F in enumerate_family(schreier(1), 6) if F]
    assert s.value == min(values)


def test_singularity_monotone():
    rng = np.random.default_rng(11)
    T = Operator(tuple(tuple(float(v) for v in row) for row in rng.normal(size=(8, 8))))
    for xi in (1, 2):
        seq = [sxi_singularity(T, xi, N).value for N in range(1, 9)]
        assert all(b <= a for a, b in zip(seq, seq[1:]))
    for N in range(1, 9):
        assert sxi_singularity(T, 2, N).value <= sxi_singularity(T, 1, N).value
    with pytest.raises(PreconditionError):
        sxi_singularity(T, 1, 9)


def test_general_norm_gain_is_an_attained_upper_bound():
    T = Operator.diagonal([1, Fr(1, 2), Fr(1, 4)], domain_norm=LpNorm(1), codomain_norm=TsirelsonNorm())
    g = min_gain(T, [2, 3], seed=1)
    assert g.mode == UPPER_BOUND
    # the true infimum is 1/6, at z proportional to (1, 2)
    assert Fr(1, 6) <= Fr(g.value) + Fr(1, 10**9)
    assert g.value == pytest.approx(1 / 6, abs=1e-6)
    z = [0.0, *g.direction]
    assert g.value == pytest.approx(T.codomain_norm(T.apply(z)) / T.domain_norm(z))


def test_lp_gain_tracks_exact_value():
    rng = np.random.default_rng(2)
    M = rng.normal(size=(4, 4))
    exact = min_gain(Operator(tuple(map(tuple, M))), [1, 2, 3]).value
    approx = min_gain(Operator(tuple(map(tuple, M)), LpNorm(2), LpNorm(2)), [1, 2, 3], seed=0)
    assert approx.mode == UPPER_BOUND
    assert exact - 1e-9 <= approx.value <= exact + 1e-6


def test_seeded_search_is_deterministic():
    T = Operator.diagonal([1, Fr(1, 3), Fr(1, 5)], domain_norm=LpNorm(3), codomain_norm=LpNorm(1))
    assert min_gain(T, [1, 2, 3], seed=4) == min_gain(T, [1, 2, 3], seed=4)


def test_inclusion_examples():
    assert inclusion_ratio_check(1, [2, 3], [[1, 1]])
    assert inclusion_ratio_check(1, [3, 4, 5], [[1, 1, 1], [Fr(1, 2), -3, 2]])
    assert inclusion_ratio_check(2, [3, 4, 5, 6, 7], [{3: 1, 7: -2}])
    with pytest.raises(PreconditionError):
        inclusion_ratio_check(1, [1, 2], [[1, 1]])
    with pytest.raises(PreconditionError):
        inclusion_ratio_check(1, [2, 3], [[1, 1, 1]])


def test_product_examples():
    zero = Operator.zero(4)
    report = product_experiment([zero, zero], 4)
    assert report["product"]["approximation_errors"] == [0, 0, 0, 0]
    assert report["product"]["singularity"]["1"]["value"] == 0
    ident = Operator.identity(4)
    report = product_experiment([ident, ident], 4, xis=(1, 2))
    assert report["product"]["singularity"]["2"]["value"] == pytest.approx(1)
    D = Operator.diagonal([Fr(1, 2**k) for k in range(5)])
    report = product_experiment([D, D], 5)
    single = report["factors"][0]["approximation_errors"]
    assert report["product"]["approximation_errors"] == pytest.approx([v * v for v in single])


def test_compose_checks_dimensions():
    with pytest.raises(PreconditionError):
        compose([Operator.identity(3), Operator.identity(4)])
    P = compose([Operator(((1, 2),)), Operator(((3,), (4,)))])
    assert P.matrix == ((Fr(11),),)


def test_operator_json_roundtrip():
    T = Operator(((Fr(1, 2), 0.25), (1, -3)), Euclidean(), TsirelsonNorm())
    assert Operator.from_json(T.to_json()) == T
    with pytest.raises(PreconditionError):
        Operator(((1, 2), (3,)))
