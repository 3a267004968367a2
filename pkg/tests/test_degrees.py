import pytest

from equideg.burnside import BurnsideElement
from equideg.degrees import (
    basic_degree,
    basic_degree_direct,
    coeff_fast,
    degree_of_linearization,
    fold_element,
)
from equideg.errors import CrossCheckMismatch
from equideg.orbit_types import fixed_dim_irrep, maximal_types, parse_symbol

from s5_fixtures import DEGREES


def as_dict(element):
    return dict(element.sorted_terms())


def test_degree_expansions_match_reference(ctx):
    for (m, j), want in DEGREES.items():
        got = as_dict(basic_degree(ctx, m, j).value)
        assert got == want, (m, j)


def test_unit_coefficient_is_one(ctx):
    for j in (0, 2, 3):
        for m in (0, 1, 3):
            assert basic_degree(ctx, m, j).value.coeff(ctx.unit) == 1


def test_folding_identity(ctx):
    for j in (0, 2, 3):
        base = basic_degree(ctx, 1, j).value
        for s in (2, 3):
            folded = fold_element(ctx, base, s)
            assert folded == basic_degree(ctx, s, j).value


def test_direct_computation_agrees_with_folding(ctx):
    for (m, j) in ((2, 0), (2, 2), (3, 0)):
        direct = basic_degree_direct(ctx, m, j).value
        assert direct == basic_degree(ctx, m, j).value, (m, j)


def test_existence_property(ctx):
    # every nonzero coefficient sits on a type with positive fixed dimension
    for j in (0, 2, 3):
        for m in (0, 1, 3):
            d = basic_degree(ctx, m, j)
            for t, c in d.value.terms.items():
                if t is ctx.unit:
                    continue
                assert c != 0
                assert fixed_dim_irrep(ctx, t, m, j) > 0


def test_coeff_fast_single_factor(ctx):
    for j in (0, 2, 3):
        for h in maximal_types(ctx, 1, j):
            for s in (1, 3):
                v = coeff_fast(ctx, h, s, [j])
                assert v != 0  # odd fixed dimension on maximal types


def test_coeff_fast_two_factors_cancel(ctx):
    for j in (0, 2, 3):
        for h in maximal_types(ctx, 1, j):
            assert coeff_fast(ctx, h, 1, [j, j]) == 0


def test_coeff_fast_zero_factors(ctx):
    h = maximal_types(ctx, 1, 2)[0]
    assert coeff_fast(ctx, h, 1, []) == 0


def test_coeff_fast_rejects_non_maximal(ctx):
    h = parse_symbol(ctx, "(D2^D1 x^V4 V4p)")  # an orbit type, not maximal
    with pytest.raises(CrossCheckMismatch):
        coeff_fast(ctx, h, 1, [2])


def test_degree_of_linearization(ctx, model):
    u = BurnsideElement.unit(ctx)
    mults = {0: 1, 2: 1, 3: 1}
    assert degree_of_linearization(ctx, [], mults) == u
    first = model.critical[0]
    assert first.id == (1, 3, 2)
    got = degree_of_linearization(ctx, [first.id[:3]], mults)
    # id carries (n, m, j); the degree only sees (m, j)
    got = degree_of_linearization(ctx, [(1, 3, 2)], mults)
    assert got == basic_degree(ctx, 3, 2).value
    # even multiplicity collapses to the unit
    assert degree_of_linearization(ctx, [(1, 3, 2)], {2: 2}) == u
    # squared crossings collapse too
    assert degree_of_linearization(ctx, [(1, 3, 2), (2, 3, 2)], mults) == u
