"""Partial injections: the size-one ideal and its explicit traces."""

import pytest

from nucleal import pinj
from nucleal.core.errors import InvariantViolation, TraceClassError
from nucleal.finrel import FinSet, product

XYZ = FinSet(("x", "y", "z"))


def pmap(mapping, src=XYZ, tgt=XYZ):
    return pinj.from_map(src, tgt, mapping)


def test_compose_chains():
    f = pmap({"x": "y"})
    g = pmap({"y": "z"})
    assert pinj.compose(f, g) == pmap({"x": "z"})


def test_converse_swaps():
    assert pinj.converse(pmap({"x": "y"})) == pmap({"y": "x"})


def test_tensor_acts_componentwise():
    uv = FinSet(("u", "v"))
    f = pmap({"x": "y"})
    g = pinj.from_map(uv, uv, {"u": "v"})
    t = pinj.tensor(f, g)
    assert t.source == product(XYZ, uv)
    # set-product oracle: the only pair is ((x,u), (y,v))
    x_u = t.source.index(("x", "u"))
    y_v = t.target.index(("y", "v"))
    assert t.pairs == ((x_u, y_v),)


def test_constructor_rejects_non_injective_graph():
    with pytest.raises(InvariantViolation):
        pinj.PartialInjection(XYZ, XYZ, ((0, 2), (1, 2)))


def test_nuclear_membership_by_domain_size():
    assert pinj.is_nuclear(pmap({}))
    assert pinj.is_nuclear(pmap({"x": "y"}))
    assert not pinj.is_nuclear(pmap({"x": "y", "y": "z"}))


def test_theta_singleton():
    m = pinj.theta(pmap({"x": "y"}))
    assert m.source == pinj.UNIT
    assert m.pairs == ((0, m.target.index(("x", "y"))),)


def test_theta_empty():
    m = pinj.theta(pmap({}))
    assert m.pairs == ()


def test_theta_round_trip_exhaustive():
    for ns in range(3):
        for nt in range(3):
            a, b = FinSet(tuple(range(ns))), FinSet(tuple(range(10, 10 + nt)))
            for f in pinj.enum_pinj(a, b):
                if not pinj.is_nuclear(f):
                    continue
                assert pinj.theta_inv(pinj.theta(f), a, b) == f


def test_theta_rejects_two_point_domain():
    with pytest.raises(TraceClassError):
        pinj.theta(pmap({"x": "y", "y": "z"}))


def test_trace_fixed_point():
    assert pinj.trace_endo(pmap({"x": "x"})) is True


def test_trace_moved_point():
    assert pinj.trace_endo(pmap({"x": "y"})) is False


def test_trace_empty():
    assert pinj.trace_endo(pmap({})) is False


def test_trace_refuses_two_point_domain():
    with pytest.raises(TraceClassError):
        pinj.trace_endo(pmap({"x": "y", "y": "x"}))


def test_u_nuclear_conditions():
    x = FinSet(("x", "w"))
    u = FinSet(("u", "v"))
    y = FinSet(("y",))
    xu = product(x, u)

    one = pinj.from_map(xu, y, {("x", "u"): "y"})
    assert pinj.is_u_nuclear(one, x, u)

    # same left point with two parameters
    two = pinj.PartialInjection(xu, FinSet(("y", "y2")), ((0, 0), (1, 1)))
    assert not pinj.is_u_nuclear(two, x, u)

    # different left points may use different parameters
    split = pinj.PartialInjection(xu, FinSet(("y", "y2")), ((0, 0), (3, 1)))
    assert pinj.is_u_nuclear(split, x, u)


def test_param_trace_matching_parameter():
    x = FinSet(("x",))
    y = FinSet(("y",))
    u = FinSet(("u", "v"))
    f = pinj.from_map(product(x, u), product(y, u), {("x", "u"): ("y", "u")})
    assert pinj.param_trace(f, x, u, y) == pinj.from_map(x, y, {"x": "y"})


def test_param_trace_mismatched_parameter_undefined():
    x = FinSet(("x",))
    y = FinSet(("y",))
    u = FinSet(("u", "v"))
    f = pinj.from_map(product(x, u), product(y, u), {("x", "u"): ("y", "v")})
    assert pinj.param_trace(f, x, u, y).pairs == ()


def test_param_trace_empty():
    x = FinSet(("x",))
    u = FinSet(("u",))
    f = pinj.empty(product(x, u), product(x, u))
    assert pinj.param_trace(f, x, u, x).pairs == ()


def test_param_trace_output_always_injective():
    # constructor revalidates, so surviving construction is the assertion
    x = FinSet((0, 1))
    u = FinSet((10, 11))
    xu = product(x, u)
    for f in pinj.enum_pinj(xu, xu):
        if pinj.in_param_class(f, x, u, x):
            out = pinj.param_trace(f, x, u, x)
            assert len({j for _, j in out.pairs}) == len(out.pairs)


def test_enum_count_agreement():
    for ns in range(4):
        for nt in range(4):
            a, b = FinSet(tuple(range(ns))), FinSet(tuple(range(10, 10 + nt)))
            assert sum(1 for _ in pinj.enum_pinj(a, b)) == pinj.count_pinj(ns, nt)


def test_json_round_trip_exhaustive_small():
    a, b = FinSet(("x", "y")), FinSet(("u", "v"))
    for f in pinj.enum_pinj(a, b):
        assert pinj.from_json(pinj.to_json(f)) == f
