from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from pathalg.errors import InvalidWord, NotALieElement
from pathalg.freelie import (
    HallElem,
    LiePoly,
    expand_to_words,
    hall_basis,
    is_lyndon,
    lie_normal_form,
    lie_to_words,
    lyndon_words,
    standard_bracketing,
    witt_dim,
    word_comm,
)


def brute_lyndon(n, d):
    return sorted(w for w in product(range(1, n + 1), repeat=d) if all(w < w[k:] for k in range(1, d)))


def necklace_count(n, d):
    # independent count: primitive necklaces via orbit enumeration
    seen, count = set(), 0
    for w in product(range(1, n + 1), repeat=d):
        if w in seen:
            continue
        rots = {w[k:] + w[:k] for k in range(d)}
        seen |= rots
        if len(rots) == d:
            count += 1
    return count


def test_lyndon_examples():
    assert lyndon_words(2, 3) == ((1, 1, 2), (1, 2, 2))
    assert lyndon_words(3, 2) == ((1, 2), (1, 3), (2, 3))
    assert is_lyndon((1, 1, 2)) and not is_lyndon((1, 2, 1)) and not is_lyndon((1, 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lyndon_matches_brute_force_and_witt(n):
    for d in range(1, 7 if n < 4 else 6):
        words = lyndon_words(n, d)
        assert list(words) == brute_lyndon(n, d)
        assert len(words) == witt_dim(n, d) == necklace_count(n, d)


def test_witt_values():
    assert [witt_dim(2, d) for d in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]
    assert [witt_dim(3, d) for d in range(1, 5)] == [3, 3, 8, 18]


def test_standard_bracketing():
    assert str(standard_bracketing((1, 1, 2))) == "[1,[1,2]]"
    assert str(standard_bracketing((1, 2, 2))) == "[[1,2],2]"
    assert str(standard_bracketing((1, 1, 2, 1, 2))) == "[[1,[1,2]],[1,2]]"
    assert HallElem.parse("[1,[1,2]]").word == (1, 1, 2)
    with pytest.raises(InvalidWord):
        HallElem((2, 1))


def test_expansion_of_simple_brackets():
    assert expand_to_words(HallElem((1, 2))) == {(1, 2): 1, (2, 1): -1}
    e = expand_to_words(HallElem((1, 1, 2)))
    assert e == {(1, 1, 2): 1, (1, 2, 1): -2, (2, 1, 1): 1}


@pytest.mark.parametrize("n,d", [(2, 5), (3, 4), (4, 3)])
def test_hall_expansions_leading_word(n, d):
    for h in hall_basis(n, d):
        e = expand_to_words(h)
        lead = min(e, key=lambda w: (len(w), w))
        assert lead == h.word and e[lead] == 1


@given(st.integers(2, 3), st.integers(1, 5), st.data())
def test_normal_form_roundtrip(n, d, data):
    basis = hall_basis(n, d)
    chosen = data.draw(st.lists(st.sampled_from(basis), min_size=1, max_size=4, unique=True))
    coords = {h: Fraction(data.draw(st.integers(-5, 5).filter(bool))) for h in chosen}
    assert lie_normal_form(lie_to_words(coords), d) == coords


@given(st.integers(1, 3), st.integers(1, 3))
def test_brackets_of_basis_are_lie(p, q):
    for a in hall_basis(2, p):
        for b in hall_basis(2, q):
            w = word_comm(expand_to_words(a), expand_to_words(b))
            coords = lie_normal_form(w)
            assert lie_to_words(coords) == {k: v for k, v in w.items() if v}


def test_non_lie_rejected():
    with pytest.raises(NotALieElement):
        lie_normal_form({(1, 2): Fraction(1)})
    with pytest.raises(NotALieElement):
        lie_normal_form({(1, 2): Fraction(1), (2, 1): Fraction(1)})


def test_liepoly_jacobi():
    a, b, c = (LiePoly({HallElem.parse(s): Fraction(1)}) for s in ("[1]", "[2]", "[1,2]"))
    total = a.bracket(b.bracket(c)) + b.bracket(c.bracket(a)) + c.bracket(a.bracket(b))
    assert not total.terms
