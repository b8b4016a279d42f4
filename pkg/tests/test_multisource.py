import itertools

import numpy as np
import pytest

from hybridspdc.errors import MissingGEntry, UnknownLabel
from hybridspdc.gmatrix import GMatrix, gmatrix_numeric
from hybridspdc.multisource import (
    LABELS,
    MEMBERS,
    block_amplitudes,
    block_tail,
    build_basis,
    declared_tail,
    joint_state,
    verify_block_decomposition,
)


@pytest.fixture(scope="module")
def g():
    return gmatrix_numeric(2.0, 0.02, 2, 4)


@pytest.mark.parametrize("arity", [2, 3])
def test_bases_are_orthonormal_per_side(arity):
    states = [build_basis(lab, arity, 1.0).state for lab in LABELS[arity]]
    for a, b in itertools.combinations_with_replacement(states, 2):
        if a.modes != b.modes:
            continue
        expected = 1.0 if a is b else 0.0
        assert abs(a.inner(b) - expected) < 1e-14


def test_qutrit_phase_convention():
    s = build_basis("Psi_phi", 3).state
    v = np.array([s.amplitude(l) for l in [(1, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0), (0, 0, 0, 0, 1, 1)]])
    assert np.allclose(v * np.sqrt(3), [1, np.exp(2j * np.pi / 3), np.exp(4j * np.pi / 3)])
    d = build_basis("Delta_phi", 3).state
    assert d.amplitude((0, 0, 1, 1, 1, 1)) * np.sqrt(3) == pytest.approx(np.exp(2j * np.pi / 3))


def test_unknown_label():
    with pytest.raises(UnknownLabel):
        build_basis("Psi_3phi", 3)
    with pytest.raises(UnknownLabel):
        build_basis("Psi+", 4)


@pytest.mark.parametrize("arity", [2, 3])
def test_block_decomposition_matches_projection(g, arity):
    rows = verify_block_decomposition(g, arity)
    assert len(rows) == len(MEMBERS[arity]) + (5 if arity == 3 else 0)
    assert max(r["residual"] for r in rows) < 1e-12


@pytest.mark.parametrize("arity", [2, 3])
def test_block_tail_within_bound(g, arity):
    tail = block_tail(g, arity)
    assert 0 < tail <= declared_tail(2.0, 0.02, arity)


def test_joint_state_block_truncation(g):
    j = joint_state(g, 2, n_keep=1)
    assert max(sum(l[:4]) // 2 for l in j.amplitudes) == 1


def test_leading_amplitudes(g):
    p2 = block_amplitudes(g, 2)
    p3 = block_amplitudes(g, 3)
    # both heralded amplitudes are alpha*eta**2/3 to leading order, opposite in sign
    lead = 2.0 * 0.02**2 / 3
    assert p2[1, 2].real == pytest.approx(lead, rel=0.05)
    assert p3[1, 2].real == pytest.approx(-lead, rel=0.05)


def test_missing_entries_raise():
    small = GMatrix(1.0, 0.1, np.ones((2, 3)), np.ones((2, 3), dtype=bool), "numeric")
    with pytest.raises(MissingGEntry):
        block_amplitudes(small, 2)
