import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import derivative_rank
from schreierkit.errors import CapExceeded, PreconditionError
from schreierkit.schreier import schreier
from schreierkit.treerank import (
    chain,
    derivative,
    family_tree,
    is_monotone,
    make_tree,
    monotone_embeds,
    rank,
    rank_by_derivatives,
    tree_to_json,
)


def random_tree(rng: random.Random, size: int) -> frozenset:
    nodes = [(rng.randint(1, 3),)]
    while len(nodes) < size:
        if rng.random() < 0.3:
            cand = (rng.randint(1, 4),)
        else:
            parent = rng.choice(nodes)
            cand = parent + (parent[-1] + rng.randint(1, 3),)
        if cand not in nodes:
            nodes.append(cand)
    return make_tree(nodes)


@st.composite
def trees(draw, max_size=12):
    seed = draw(st.integers(0, 10**6))
    size = draw(st.integers(1, max_size))
    return random_tree(random.Random(seed), size)


def maps_exist(S, T) -> bool:
    """Try every map S -> T."""
    S, T = sorted(S), sorted(T)
    for image in itertools.product(T, repeat=len(S)):
        if is_monotone(dict(zip(S, image)), frozenset(S), frozenset(T)):
            return True
    return not S


def test_family_tree_examples():
    assert family_tree(schreier(0), 3) == {(1,), (2,), (3,)}
    assert family_tree(schreier(1), 3) == {(1,), (2,), (3,), (2, 3)}
    assert family_tree(schreier(1), 1) == {(1,)}
    with pytest.raises(CapExceeded):
        family_tree(schreier(1), 30)


def test_derivative_examples():
    assert derivative(frozenset()) == frozenset()
    assert derivative(family_tree(schreier(1), 3)) == {(2,)}
    assert derivative(chain(3)) == {(1,), (1, 2)}


def test_rank_examples():
    assert rank(frozenset()) == 0
    assert rank(family_tree(schreier(1), 3)) == 2
    assert rank(chain(5)) == 5


def test_make_tree_checks_closure():
    with pytest.raises(PreconditionError):
        make_tree([(1, 2)])
    with pytest.raises(PreconditionError):
        make_tree([()])
    assert tree_to_json(make_tree([(2,), (1,), (1, 3)])) == [[1], [2], [1, 3]]


@pytest.mark.parametrize("xi", [0, 1, 2])
def test_rank_matches_derivative_iteration(xi):
    for N in range(1, 9):
        T = family_tree(schreier(xi), N)
        assert rank(T) == rank_by_derivatives(T) == derivative_rank(T)


@pytest.mark.parametrize("xi", [0, 1, 2])
def test_family_rank_nondecreasing(xi):
    ranks = [rank(family_tree(schreier(xi), N)) for N in range(1, 11)]
    assert ranks == sorted(ranks)


@given(trees())
def test_derivative_laws(T):
    D = derivative(T)
    assert D <= T
    assert rank(D) == max(rank(T) - 1, 0)
    assert rank(T) == derivative_rank(T)


def test_monotone_examples():
    assert monotone_embeds(chain(2), chain(3)) is not None
    assert monotone_embeds(chain(3), chain(2)) is None
    phi = monotone_embeds(family_tree(schreier(1), 3), family_tree(schreier(2), 6))
    assert phi is not None and is_monotone(phi, family_tree(schreier(1), 3), family_tree(schreier(2), 6))


@settings(max_examples=150)
@given(trees(), trees())
def test_monotone_map_bounds_rank(S, T):
    phi = monotone_embeds(S, T)
    if phi is not None:
        assert is_monotone(phi, S, T)
        assert rank(S) <= rank(T)
    else:
        assert rank(S) > rank(T)


@settings(max_examples=60, deadline=None)
@given(trees(max_size=4), trees(max_size=4))
def test_monotone_search_is_exact(S, T):
    assert (monotone_embeds(S, T) is not None) == maps_exist(S, T)


def test_monotone_cap():
    with pytest.raises(CapExceeded):
        monotone_embeds(chain(3), chain(3), cap=2)
