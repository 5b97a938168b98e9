"""Generic law-checking harness, exercised on real and sabotaged instances."""

import numpy as np
import pytest

from nucleal import finhilb, pinj
from nucleal.core import harness
from nucleal.core.errors import UnsupportedCheck
from nucleal.core.report import AxiomReport


class BrokenStarPinj(pinj.PInjInstance):
    """Swaps endpoints without flipping the graph: a wrong involution."""

    def star(self, f):
        return pinj.PartialInjection(f.target, f.source, f.pairs)

    def sample_object(self, rng):
        return pinj.fin_set(2)

    def objects(self, max_size=None):
        return [pinj.fin_set(2)]


def test_star_check_catches_sabotage():
    rep = harness.check_star_laws(BrokenStarPinj(), 2000, 5)
    assert rep.cases > 0
    assert not rep.ok


def test_star_check_passes_honest_instance():
    rep = harness.check_star_laws(pinj.instance(), 2000, 5, max_size=2)
    assert rep.ok and rep.cases > 0


def test_determinism_modulo_elapsed():
    a = harness.check_star_laws(pinj.instance(), 400, 9).to_dict()
    b = harness.check_star_laws(pinj.instance(), 400, 9).to_dict()
    a.pop("elapsed")
    b.pop("elapsed")
    assert a == b


def test_zero_budget_never_fails():
    rep = harness.check_star_laws(pinj.instance(), 0, 1)
    assert rep.ok


def test_factorization_two_point_domain_conclusively_absent():
    inst, nuc, _ = pinj.structures()
    two = pinj.fin_set(2)
    res = harness.find_nuclear_factorization(inst, nuc, pinj.identity(two))
    assert not res.found and res.conclusive


def test_factorization_empty_map_found():
    inst, nuc, _ = pinj.structures()
    two = pinj.fin_set(2)
    h = pinj.empty(two, two)
    res = harness.find_nuclear_factorization(inst, nuc, h)
    assert res.found
    assert inst.mor_eq(inst.compose(res.right, res.left), h)
    assert nuc.is_nuclear(res.left) and nuc.is_nuclear(res.right)


def test_factorization_matrix_and_derived_trace():
    inst, nuc, _ = finhilb.structures()
    h = finhilb.from_rows([[1.0, 2.0], [0.5, -1.0j]])
    res = harness.find_nuclear_factorization(inst, nuc, h)
    assert res.found
    back = inst.compose(res.right, res.left)
    assert finhilb.max_abs_diff(back, h) < 1e-10
    derived = harness.derive_trace(inst, nuc, res.left, res.right)
    assert abs(derived - finhilb.trace(h)) < 1e-8


def test_derive_trace_scaled_identity():
    inst, nuc, _ = finhilb.structures()
    s = 1 / np.sqrt(2)
    f = finhilb.from_rows([[s, 0.0], [0.0, s]])
    got = harness.derive_trace(inst, nuc, f, f)
    assert abs(got - 1.0) < 1e-10


def test_derive_trace_partial_injections():
    inst, nuc, _ = pinj.structures()
    two = pinj.fin_set(2)
    f = pinj.from_map(two, two, {0: 1})
    loop = pinj.from_map(two, two, {1: 0})
    stray = pinj.from_map(two, two, {0: 0})
    assert harness.derive_trace(inst, nuc, f, loop) is True
    assert harness.derive_trace(inst, nuc, f, stray) is False


def test_derive_trace_rejects_wide_factors():
    inst, nuc, _ = pinj.structures()
    two = pinj.fin_set(2)
    with pytest.raises(UnsupportedCheck):
        harness.derive_trace(inst, nuc, pinj.identity(two), pinj.empty(two, two))


def test_sliding_on_matrices():
    inst, nuc, _ = finhilb.structures()
    rep = harness.check_sliding(inst, nuc, 600, 11, samples=150)
    assert rep.ok and rep.cases > 0


def test_report_failure_cap():
    rep = AxiomReport("demo", 0)
    for i in range(25):
        rep.add_failure(f"witness {i}")
    assert len(rep.failures) == 21
    assert rep.failures[-1] == "... further failures suppressed"
    assert not rep.ok


def test_report_summary_verdicts():
    ok = AxiomReport("demo", 3)
    assert ok.summary().startswith("PASS")
    bad = AxiomReport("demo", 3, failures=["x"])
    assert bad.summary().startswith("FAIL")
    noted = AxiomReport("demo", 3, flags=["documented-finding:example"])
    assert noted.summary().startswith("FINDING")
    assert noted.is_finding


def test_report_dict_round_trip():
    rep = AxiomReport("demo", 7, failures=["a"], elapsed=0.25, flags=["f"])
    assert AxiomReport.from_dict(rep.to_dict()) == rep
