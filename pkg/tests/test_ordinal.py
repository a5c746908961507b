import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import slow_add, slow_mul_nat
from schreierkit.errors import OrdinalOverflowError, PreconditionError
from schreierkit.ordinal import (
    CANONICAL,
    EXPONENT_BUDGET,
    OMEGA,
    ZERO,
    FundamentalPolicy,
    Ordinal,
    add,
    compare,
    fundamental,
    mul,
    mul_nat,
    mul_omega,
)

W = OMEGA


def w(k, c=1):
    return Ordinal.omega_power(k, c)


@st.composite
def ordinals(draw, max_exp=4, max_coef=5):
    exps = sorted(draw(st.sets(st.integers(0, max_exp), max_size=3)), reverse=True)
    return Ordinal(tuple((e, draw(st.integers(1, max_coef))) for e in exps))


limits = ordinals().filter(lambda a: a.is_limit())


def test_compare_examples():
    assert compare(0, 0) == 0
    assert compare(W, 2) == 1
    assert compare(W * 2 + 1, W * 3) == -1


def test_arithmetic_examples():
    assert add(Ordinal.of(1), W) == W
    assert mul_nat(W, 3) == Ordinal(((1, 3),))
    assert mul_omega(W * 2 + 5) == w(2)
    assert mul_omega(ZERO) == ZERO
    assert mul(W + 2, W) == w(2)
    assert mul(Ordinal.of(2), W) == W
    assert str(w(2, 3) + 5) == "ω^2·3 + 5"


def test_json_encoding():
    a = w(2, 3) + 5
    assert a.to_json() == [[2, 3], [0, 5]]
    assert Ordinal.from_json("[[2,3],[0,5]]") == a
    assert Ordinal.of("7") == Ordinal.of(7)


def test_rejects_malformed_terms():
    with pytest.raises(ValueError):
        Ordinal(((0, 1), (1, 1)))
    with pytest.raises(ValueError):
        Ordinal.of(-1)
    with pytest.raises(OrdinalOverflowError):
        mul_omega(w(EXPONENT_BUDGET))


def test_fundamental_examples():
    assert fundamental(W, 3) == Ordinal.of(3)
    assert fundamental(w(2), 4) == W * 4
    base = W + 2
    policy = FundamentalPolicy.paper_product(base)
    assert fundamental(mul_omega(base), 5, policy) == mul_nat(base, 5)
    # other limits keep the canonical sequence
    assert fundamental(W, 5, policy) == Ordinal.of(5)
    assert fundamental(W * 3, 2) == W * 2 + 2


def test_fundamental_requires_limit():
    with pytest.raises(PreconditionError):
        fundamental(W + 1, 2)
    with pytest.raises(PreconditionError):
        fundamental(W, 0)


def test_predecessor():
    assert (W + 3).predecessor() == W + 2
    assert Ordinal.of(1).predecessor() == ZERO
    with pytest.raises(PreconditionError):
        W.predecessor()


@given(ordinals(), ordinals())
def test_compare_is_ordinal_order(a, b):
    # a <= b iff b = a + c for some c; test through the witness a + b >= b
    assert compare(a, b) == -compare(b, a)
    assert add(a, b) >= b
    if b.terms:
        assert add(a, b) > a or b < Ordinal.of(1)


@given(ordinals(), ordinals())
def test_add_matches_flat_oracle(a, b):
    assert add(a, b) == slow_add(a, b)


@given(ordinals(), ordinals(), ordinals())
def test_add_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(ordinals())
def test_zero_is_neutral(a):
    assert a + ZERO == ZERO + a == a


@given(ordinals(), st.integers(0, 6), st.integers(0, 6))
def test_mul_nat_distributes(a, m, n):
    assert mul_nat(a, m + n) == add(mul_nat(a, m), mul_nat(a, n))
    assert mul_nat(a, n) == slow_mul_nat(a, n)


@given(ordinals(max_exp=3).filter(lambda a: not a.is_zero()))
def test_mul_omega_is_supremum_of_multiples(a):
    top = mul_omega(a)
    multiples = [slow_mul_nat(a, n) for n in range(1, 16)]
    assert all(m < top for m in multiples)
    # every smaller ordinal with the same leading exponent is passed by some a*n
    e = a.leading_exponent
    for c in range(1, 6):
        below = w(e, c) + 3
        assert below < top
        assert any(m > below for m in multiples)


@settings(max_examples=60)
@given(limits, st.integers(1, 50))
def test_fundamental_increasing_and_below(lam, n):
    assert fundamental(lam, n) < fundamental(lam, n + 1) < lam


@given(limits, ordinals())
def test_fundamental_reaches_everything_below(lam, mu):
    if not mu < lam:
        return
    assert any(fundamental(lam, n) > mu for n in range(1, 60))


def test_policy_sequences_increase():
    for base in (Ordinal.of(1), Ordinal.of(2), W, W + 2):
        policy = FundamentalPolicy.paper_product(base)
        lam = mul_omega(base)
        seq = [policy.sequence(lam, n) for n in range(1, 20)]
        assert all(x < y < lam for x, y in zip(seq, seq[1:]))
    with pytest.raises(PreconditionError):
        FundamentalPolicy.paper_product(0)


def test_policy_json():
    assert CANONICAL.to_json() == {"name": "canonical"}
    assert FundamentalPolicy.paper_product(2).to_json() == {
        "name": "paper-product",
        "product_overrides": [[[[1, 1]], [[0, 2]]]],
    }
