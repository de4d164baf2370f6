import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridkb import Certainty, DegreeConfig, DegreeStore, mu, parse_expression
from hybridkb.errors import IncoherentConcept
from hybridkb.fuzzy import (
    IMPLICATIONS, TNORM_FAMILIES, implication, interval_conjunction, mu_all_implication,
    mu_all_possibility, mu_at_least, mu_at_most, sigma_count, tconorm, tnorm,
)
from hybridkb.normal import normalize

from oracles import holds, random_concept, random_store

unit = st.floats(0, 1, allow_nan=False)


def two_children(grad=(0.9, 0.7), child=(1.0, 1.0)):
    return DegreeStore(
        concepts={("CG", "Philip"): grad[0], ("CG", "Angela"): grad[1]},
        roles={("Child", "John", "Philip"): child[0], ("Child", "John", "Angela"): child[1]},
    )


def test_value_restriction_spot_values():
    store = two_children()
    filler = normalize(parse_expression("CG"))
    role = frozenset({"Child"})
    assert mu_all_implication("John", role, filler, store) == pytest.approx(0.7, abs=1e-12)
    assert mu_all_possibility("John", role, filler, store) == pytest.approx(0.7, abs=1e-12)


def test_value_restriction_partial_child_degrees():
    store = two_children(grad=(0.9, 0.7), child=(0.5, 1.0))
    filler = normalize(parse_expression("CG"))
    role = frozenset({"Child"})
    kd = [max(1 - 0.5, 0.9), max(0.0, 0.7)]
    assert mu_all_implication("John", role, filler, store) == pytest.approx(min(kd))
    poss = 1 - max(min(0.1, 0.5), min(0.3, 1.0)) / 1.0
    assert mu_all_possibility("John", role, filler, store) == pytest.approx(poss)


def test_no_fillers_means_fully_satisfied():
    store = DegreeStore()
    filler = normalize(parse_expression("CG"))
    for f in (mu_all_implication, mu_all_possibility):
        assert f("John", frozenset({"Child"}), filler, store) == 1.0


def test_number_membership_spot_values():
    assert mu_at_least(2, 1.6) == pytest.approx(0.6)
    assert mu_at_most(1, 1.5) == pytest.approx(0.5)
    assert mu_at_least(0, 0.0) == 1.0
    assert mu_at_least(1, 0.0) == 0.0 and mu_at_most(0, 0.0) == 1.0


@given(st.integers(0, 5), st.floats(0, 8, allow_nan=False))
def test_number_memberships_bounded_and_complementary_shape(n, s):
    lo, hi = mu_at_least(n, s), mu_at_most(n, s)
    assert 0 <= lo <= 1 and 0 <= hi <= 1
    # just beyond n the two memberships are mirror images of each other
    if n > 0:
        assert mu_at_least(n, s) == pytest.approx(1 - mu_at_most(n - 1, s))


def test_number_memberships_continuous():
    xs = np.linspace(0, 6, 6001)
    for n in range(4):
        for f in (mu_at_least, mu_at_most):
            v = np.array([f(n, x) for x in xs])
            if f is mu_at_least and n == 0:
                assert (v == 1).all()
            assert np.max(np.abs(np.diff(v))) <= 0.0011


def test_sigma_count():
    store = two_children(child=(0.5, 0.75))
    assert sigma_count("John", frozenset({"Child"}), store) == pytest.approx(1.25)


def test_interval_conjunction_spot_value():
    got = interval_conjunction(Certainty.point(0.8), Certainty.point(0.7))
    assert got.lower == pytest.approx(0.5) and got.upper == pytest.approx(0.7)


def test_successful_father_degrees():
    store = DegreeStore(
        concepts={("Male", "John"): 1.0, ("CG", "Philip"): 0.8, ("CG", "Angela"): 1.0},
        roles={("Child", "John", "Philip"): 1.0, ("Child", "John", "Angela"): 1.0},
    )
    sf = normalize(parse_expression("(:and Male (:at-least 1 Child) (:all Child CG))"))
    assert mu("John", sf, store) == Certainty(0.8, 0.8)
    got = mu("John", sf, store, DegreeConfig(conjunction="tnorm-interval"))
    assert got.lower == pytest.approx(0.8) and got.upper == pytest.approx(0.8)
    store.concepts[("Male", "John")] = Certainty.point(0.9)
    got = mu("John", sf, store, DegreeConfig(conjunction="tnorm-interval"))
    assert got.lower == pytest.approx(0.7) and got.upper == pytest.approx(0.8)


def test_incoherent_concept_raises():
    with pytest.raises(IncoherentConcept):
        mu("x", normalize(parse_expression("(:and (:at-least 2 R) (:at-most 1 R))")), DegreeStore())


def test_config_validation():
    with pytest.raises(ValueError):
        DegreeConfig(implication="zadeh")
    with pytest.raises(ValueError):
        DegreeConfig(tnorm="drastic")


GRID = np.linspace(0, 1, 101)


@pytest.mark.parametrize("family", TNORM_FAMILIES)
def test_tnorm_axioms_on_grid(family):
    T = np.vectorize(lambda a, b: tnorm(a, b, family))
    a, b = np.meshgrid(GRID, GRID, indexing="ij")
    t = T(a, b)
    assert np.allclose(t, t.T, atol=1e-12, rtol=0)
    assert np.allclose(T(GRID, 1.0), GRID, atol=1e-12, rtol=0)
    assert (np.diff(t, axis=0) >= -1e-12).all() and (np.diff(t, axis=1) >= -1e-12).all()
    sub = GRID[::10]
    for x, y, z in itertools.product(sub, repeat=3):
        assert abs(tnorm(tnorm(x, y, family), z, family) - tnorm(x, tnorm(y, z, family), family)) <= 1e-12


@pytest.mark.parametrize("family", TNORM_FAMILIES)
def test_conorm_is_dual(family):
    for a, b in itertools.product(GRID[::5], repeat=2):
        assert tconorm(a, b, family) == pytest.approx(1 - tnorm(1 - a, 1 - b, family), abs=1e-12)


def test_tnorm_ordering():
    for a, b in itertools.product(GRID, repeat=2):
        assert tnorm(a, b, "lukasiewicz") <= tnorm(a, b, "product") + 1e-12
        assert tnorm(a, b, "product") <= tnorm(a, b, "min") + 1e-12


@pytest.mark.parametrize("kind", IMPLICATIONS)
def test_implications_extend_classical(kind):
    for a, b in itertools.product((0.0, 1.0), repeat=2):
        assert implication(a, b, kind) == float((not a) or b)
    for a, b in itertools.product(GRID[::10], repeat=2):
        v = implication(a, b, kind)
        assert 0 <= v <= 1
        assert implication(a, min(1, b + 0.1), kind) >= v - 1e-12  # nondecreasing in consequent
        assert implication(min(1, a + 0.1), b, kind) <= v + 1e-12  # nonincreasing in antecedent


CONFIGS = [DegreeConfig(i, s, c) for i in IMPLICATIONS for s in ("implication", "possibility")
           for c in ("min-scalar", "tnorm-interval")]


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: f"{c.implication}-{c.all_semantics}-{c.conjunction}")
def test_crisp_degrees_match_classical(cfg):
    rng = random.Random(hash(cfg) & 0xFFFF)
    instances = ["a", "b", "c"]
    for _ in range(60):
        cset, rset = random_store(rng, instances, ["A", "B"], ["R", "S"])
        store = DegreeStore({k: 1.0 for k in cset}, {k: 1.0 for k in rset}, absent=0.0)
        expr = random_concept(rng, rng.randint(1, 3), ["A", "B"], ["R", "S"])
        form = normalize(expr)
        for x in instances:
            truth = holds(expr, x, cset, rset)
            if form.bottom:
                assert not truth
                continue
            assert mu(x, form, store, cfg) == Certainty.point(float(truth))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(unit, min_size=12, max_size=12), unit)
def test_degree_monotone_in_primitive_memberships(seed, degrees, bump):
    # raising a concept degree never lowers membership in an expression without restrictions on it
    rng = random.Random(seed)
    instances = ["a", "b"]
    keys = [("A", x) for x in instances] + [("B", x) for x in instances]
    rkeys = [("R", x, y) for x in instances for y in instances]
    concepts = dict(zip(keys, degrees[:4]))
    roles = dict(zip(rkeys, degrees[4:8]))
    expr = random_concept(rng, 3, ["A", "B"], ["R"])
    form = normalize(expr)
    if form.bottom:
        return
    k = keys[seed % 4]
    higher = dict(concepts)
    higher[k] = max(concepts[k], bump)
    before = mu("a", form, DegreeStore(concepts, roles))
    after = mu("a", form, DegreeStore(higher, roles))
    assert after.lower >= before.lower - 1e-12
