"""Crossed monoid-sets and the squared-degree ideal."""

import pytest

from nucleal import xrel
from nucleal.core.errors import InvariantViolation
from nucleal.core.rng import Lcg

Z2 = xrel.cyclic_monoid(2)
Z3 = xrel.cyclic_monoid(3)
Z4 = xrel.cyclic_monoid(4)


def test_cyclic_monoid_table():
    assert Z4.mul(1, 3) == 0
    assert Z4.mul(2, 3) == 1
    assert Z4.e == 0


def test_monoid_rejects_broken_table():
    # left projection: 1.0 = 0 but 0.1 = 1, not commutative
    with pytest.raises(InvariantViolation):
        xrel.CommMonoid(xrel.FinSet((0, 1)), ((0, 1), (0, 1)), 0)


def test_object_rejects_incompatible_action():
    # swap under the generator but fixed under generator^2 would need 2-periodicity
    with pytest.raises(InvariantViolation):
        xrel.CrossedMSet(
            Z4,
            xrel.FinSet(("p", "q")),
            ((0, 1), (1, 0), (1, 0), (0, 1)),
            (0, 0),
        )


def test_object_rejects_degree_not_action_invariant():
    with pytest.raises(InvariantViolation):
        xrel.CrossedMSet(
            Z2,
            xrel.FinSet(("p", "q")),
            ((0, 1), (1, 0)),
            (0, 1),
        )


def test_morphism_rejects_unequal_degrees():
    a = xrel.trivial_object(Z4, ("p",), (1,))
    b = xrel.trivial_object(Z4, ("q",), (2,))
    with pytest.raises(InvariantViolation):
        xrel.from_pairs(a, b, [(0, 0)])


def test_morphism_rejects_action_leak():
    swap = xrel.CrossedMSet(Z2, xrel.FinSet(("p", "q")), ((0, 1), (1, 0)), (0, 0))
    fixed = xrel.trivial_object(Z2, ("r",))
    # (p, r) forces (q, r) under the generator
    with pytest.raises(InvariantViolation):
        xrel.XRelMorphism(swap, fixed, frozenset({(0, 0)}))
    assert xrel.from_pairs(swap, fixed, [(0, 0), (1, 0)]).pairs == {(0, 0), (1, 0)}


def test_tensor_degrees_multiply():
    x = xrel.trivial_object(Z4, ("p", "q"), (1, 2))
    y = xrel.trivial_object(Z4, ("r",), (3,))
    t = xrel.tensor_object(x, y)
    assert t.degree == (Z4.mul(1, 3), Z4.mul(2, 3)) == (0, 1)


def test_compose_preserves_invariants_on_random_cases():
    # constructor revalidation is the oracle: a bad composite would raise
    for mon in (Z2, Z3, Z4):
        inst, _, _ = xrel.structures(mon)
        rng = Lcg(31)
        done = 0
        while done < 100:
            a, b, c = (inst.sample_object(rng) for _ in range(3))
            r = inst.sample_hom(rng, a, b)
            s = inst.sample_hom(rng, b, c)
            out = xrel.compose(r, s)
            assert out.source is a and out.target is c
            done += 1


def test_identity_is_valid_everywhere():
    inst, _, _ = xrel.structures(Z4)
    rng = Lcg(32)
    for _ in range(50):
        a = inst.sample_object(rng)
        ident = xrel.identity(a)
        assert all(x == y for x, y in ident.pairs)


def test_nuclear_empty_relation():
    a = xrel.trivial_object(Z4, ("p",), (1,))
    assert xrel.is_nuclear(xrel.empty(a, a))


def test_nuclear_depends_on_squared_degree():
    two = xrel.trivial_object(Z4, ("p",), (2,))
    one = xrel.trivial_object(Z4, ("q",), (1,))
    assert xrel.is_nuclear(xrel.identity(two))  # 2+2 = 0 mod 4
    assert not xrel.is_nuclear(xrel.identity(one))  # 1+1 = 2 mod 4


def test_nuclear_object_criteria():
    rng = Lcg(33)
    inst, _, _ = xrel.structures(Z2)
    for _ in range(30):
        assert xrel.is_nuclear_object(inst.sample_object(rng))
    assert not xrel.is_nuclear_object(xrel.trivial_object(Z4, ("p",), (1,)))
    assert xrel.is_nuclear_object(xrel.trivial_object(Z4, ("p", "q")))


def test_theta_round_trip_exhaustive_z2():
    a = xrel.trivial_object(Z2, ("p", "q"), (0, 1))
    b = xrel.trivial_object(Z2, ("r", "s"), (1, 0))
    seen = 0
    for r in xrel.enum_morphisms(a, b):
        assert xrel.is_nuclear(r)
        assert xrel.theta_inv(xrel.theta(r), a, b) == r
        seen += 1
    assert seen > 1


def test_theta_audit_bijective_over_z2():
    a = xrel.trivial_object(Z2, ("p", "q"), (0, 1))
    rep = xrel.theta_bijectivity_report(a, a)
    assert rep.ok and not rep.is_finding


def test_theta_audit_z4_degree_pair_witness():
    left = xrel.trivial_object(Z4, ("x",), (1,))
    right = xrel.trivial_object(Z4, ("y",), (3,))
    rep = xrel.theta_bijectivity_report(left, right)
    assert rep.is_finding
    assert any("theta-not-surjective" in f for f in rep.flags)
    assert any("(1, 3)" in w for w in rep.failures)


def test_empty_state_is_in_theta_image():
    left = xrel.trivial_object(Z4, ("x",), (1,))
    right = xrel.trivial_object(Z4, ("y",), (3,))
    unit = xrel.unit_object(Z4)
    prod = xrel.tensor_object(left, right)
    state = xrel.empty(unit, prod)
    assert xrel.theta(xrel.empty(left, right)) == state


def test_json_round_trips():
    assert xrel.monoid_from_json(xrel.monoid_to_json(Z4)) == Z4
    obj = xrel.trivial_object(Z4, ("p", "q"), (1, 2))
    assert xrel.object_from_json(xrel.object_to_json(obj), Z4) == obj
    r = xrel.identity(obj)
    assert xrel.from_json(xrel.to_json(r)) == r


def test_sampled_morphisms_are_valid_over_nontrivial_actions():
    inst, nuc, _ = xrel.structures(Z3)
    rng = Lcg(34)
    nuclear_seen = 0
    for _ in range(200):
        a, b = inst.sample_object(rng), inst.sample_object(rng)
        f = nuc.sample_nuclear(rng, a, b)
        if f is not None and f.pairs:
            nuclear_seen += 1
            assert nuc.is_nuclear(f)
    assert nuclear_seen > 10
