import numpy as np
import pytest

from hybridspdc.conditioning import (
    CLICK,
    NO_CLICK,
    apd_project,
    herald_pure,
    herald_three_source,
    herald_two_source,
    probability_scaling,
)
from hybridspdc.errors import NonZeroFrame
from hybridspdc.fock_algebra import StateVector


def test_apd_vacuum_and_single_photon():
    vac = StateVector.basis(("a", "d"), (0, 0)).density()
    _, p = apd_project(vac, "d", NO_CLICK)
    assert p == pytest.approx(1.0)
    one = StateVector.basis(("a", "d"), (0, 1)).density()
    _, p = apd_project(one, "d", CLICK)
    assert p == pytest.approx(1.0)


def test_apd_superposition():
    partner = StateVector(("a",), (0,), {(0,): 0.6, (1,): 0.8})
    s = StateVector(("a", "d"), (0, 0), {(0, 0): 1 / np.sqrt(2)}) + StateVector(
        ("a", "d"), (0, 0), {(0, 1): 0.6 / np.sqrt(2), (1, 1): 0.8 / np.sqrt(2)}
    )
    post, p = apd_project(s.density(), "d", CLICK)
    assert p == pytest.approx(0.5)
    assert (post * (1 / p)).fidelity(partner) == pytest.approx(1.0)
    assert post.modes == ("a",)


def test_apd_requires_undisplaced_mode():
    s = StateVector.basis(("a", "d"), (0, 0), frame=(0, 1.0))
    with pytest.raises(NonZeroFrame):
        apd_project(s.density(), "d", CLICK)
    with pytest.raises(NonZeroFrame):
        herald_pure(s, {"d": CLICK}, ("a",))


def test_pure_and_density_routes_agree():
    s = StateVector(("a", "b", "d"), (0, 0.3, 0), {(0, 0, 0): 0.5, (1, 0, 1): 0.5j, (0, 2, 2): -0.5, (1, 1, 0): 0.5})
    fast, pf = herald_pure(s, {"d": CLICK}, ("a", "b"))
    slow, ps = apd_project(s.density(), "d", CLICK)
    labels, A = fast.to_matrix()
    _, B = slow.to_matrix(labels)
    assert pf == pytest.approx(ps)
    assert np.max(np.abs(A - B)) < 1e-15


def test_zero_coupling_never_clicks():
    assert herald_two_source(2.0, 0.0).probability == 0.0
    assert all(r.probability == 0.0 for r in herald_three_source(2.0, 0.0))


@pytest.fixture(scope="module")
def two():
    return herald_two_source(3.0, 0.01)


@pytest.fixture(scope="module")
def three():
    return herald_three_source(3.0, 0.01)


def test_two_source_singlet(two):
    assert two.fidelities["Psi-"] >= 0.99
    assert two.fidelities["dominant"] > two.fidelities["Psi-"]
    assert two.components["P1"] / two.components["P2"] >= 100
    assert two.conditional.trace() == pytest.approx(1.0)


def test_two_source_click_weights_two_routes(two):
    c = two.components
    assert abs(c["P1_unnormalized"] - c["closed_form_P1"]) < 1e-9
    assert abs(c["P2_unnormalized"] - c["closed_form_P2"]) < 1e-9
    assert c["P1_unnormalized"] == pytest.approx(c["closed_form_P1"], rel=1e-5)


def test_three_source_qutrits(three):
    a, b = three
    assert a.fidelities["Psi_phi"] >= 0.99
    assert b.fidelities["Psi_2phi"] >= 0.99
    assert a.components["dominant_overlap"] <= 1e-6
    assert a.probability == pytest.approx(b.probability, rel=1e-10)
    assert 0 < a.components["discarded_weight"] < 1e-6


def test_fidelity_improves_with_weaker_squeezing():
    f = [herald_two_source(ae / 0.01, 0.01).fidelities["Psi-"] for ae in (0.1, 0.06, 0.03)]
    assert f[0] < f[1] < f[2]


def test_scaling_report():
    rep = probability_scaling(0.06, [0.005, 0.01, 0.02, 0.04])
    assert rep.slope_P2 == pytest.approx(2, abs=0.1)
    assert rep.slope_P3 == pytest.approx(2, abs=0.1)
    assert rep.slope_P1_over_P2 == pytest.approx(-2, abs=0.2)
    assert rep.slope_neighbor_ratio == pytest.approx(-1, abs=0.05)
    assert all(r == pytest.approx(2, rel=0.2) for r in rep.ratio_P3_P2)
    with pytest.raises(ValueError):
        probability_scaling(0.06, [0.01, 0.02])
