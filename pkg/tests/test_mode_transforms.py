import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridspdc.errors import CutoffTooSmall, FrameMismatch
from hybridspdc.fock_algebra import StateVector, change_frame
from hybridspdc.mode_transforms import (
    ModeUnitary,
    apply_mode_unitary,
    bs2,
    check_identity,
    dft3,
    fock_image,
    pump_identities,
)


def test_unitaries():
    assert bs2().is_unitary(1e-15)
    assert dft3().is_unitary(1e-15)
    assert np.allclose(dft3().matrix.T @ np.ones(3), [np.sqrt(3), 0, 0], atol=1e-15)
    assert np.allclose(bs2().matrix.T @ np.ones(2), [0, np.sqrt(2)], atol=1e-15)


def test_vacuum_frames_move_to_one_mode():
    s = StateVector.basis(("p1", "p2"), (0, 0), frame=(1.5, 1.5))
    out = apply_mode_unitary(s, bs2(), ("p1", "p2"))
    assert np.allclose(out.frame, (0, 1.5 * np.sqrt(2)))
    assert out.amplitude((0, 0)) == pytest.approx(1.0)


def test_single_photon_routes_by_row():
    img = fock_image((1, 0), bs2())
    assert img[(1, 0)] == pytest.approx(1 / np.sqrt(2))
    assert img[(0, 1)] == pytest.approx(1 / np.sqrt(2))
    img = fock_image((1, 1), bs2())
    # two-photon interference: no coincidences
    assert (1, 1) not in img or abs(img[(1, 1)]) < 1e-15


IDENTITIES = pump_identities(1.0)


@pytest.mark.parametrize("ident", [i for i in IDENTITIES if i.conserving is None], ids=lambda i: i.name)
def test_reference_images(ident):
    chk = check_identity(ident)
    assert chk.error < 1e-10
    assert abs(chk.phase) < 1e-12


@pytest.mark.parametrize("ident", [i for i in IDENTITIES if i.conserving is not None], ids=lambda i: i.name)
def test_photon_conserving_images(ident):
    # the reference form carries an extra quantum; the conserving form holds
    assert check_identity(ident).error == pytest.approx(np.sqrt(2))
    assert check_identity(ident, conserving=True).error < 1e-10


def test_only_two_reference_forms_are_inconsistent():
    assert sorted(i.name for i in IDENTITIES if i.conserving is not None) == [
        "dft_varphi_-2phi",
        "dft_varphi_-phi",
    ]


@pytest.mark.parametrize("alpha", [0.3, 2.0 + 1.0j])
def test_identities_hold_for_other_amplitudes(alpha):
    for ident in pump_identities(alpha):
        assert check_identity(ident, conserving=True).error < 1e-10


@pytest.mark.parametrize("ident", IDENTITIES[:6], ids=lambda i: i.name)
def test_frame_transport_consistency(ident):
    s = ident.source
    a = apply_mode_unitary(change_frame(s, 0.0, 40), ident.unitary, s.modes, max_photons=90)
    b = change_frame(apply_mode_unitary(s, ident.unitary, s.modes), 0.0, 40)
    assert (a - b).norm() < 1e-9


def _random_unitary(seed, d):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return ModeUnitary(q * (np.diag(r) / abs(np.diag(r))))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), occ=st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_norm_preserved_for_random_unitaries(seed, occ):
    u = _random_unitary(seed, 3)
    s = StateVector(("a", "b", "c"), (0.2, -0.1j, 0.5), {tuple(occ): 0.6, (0, 0, 1): 0.8})
    out = apply_mode_unitary(s, u, ("a", "b", "c"))
    assert abs(out.norm() - s.norm()) < 1e-12
    assert np.allclose(out.frame, u.matrix.T @ np.array(s.frame))


def test_errors():
    s = StateVector.basis(("a", "b"), (3, 0))
    with pytest.raises(FrameMismatch):
        apply_mode_unitary(s, dft3(), ("a", "b"))
    with pytest.raises(FrameMismatch):
        apply_mode_unitary(s, bs2(), ("a", "z"))
    with pytest.raises(CutoffTooSmall):
        apply_mode_unitary(s, bs2(), ("a", "b"), max_photons=2)
