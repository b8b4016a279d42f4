import numpy as np
import pytest

from hybridspdc.errors import RescaleUndefined
from hybridspdc.pump_dynamics import (
    build_phi,
    build_phis,
    expm_oracle,
    generator_matrix,
    pair_levels_needed,
    pump_window,
    solve_blocks,
    solve_f,
    total_output_norm,
)


def test_generator_is_antisymmetric():
    M = generator_matrix(12, 0.3)
    assert np.allclose(M, -M.T, atol=0)


def test_single_pump_photon_is_a_rotation():
    # with one pump photon the block is two-dimensional: f = (cos eta, sin eta)
    for eta in (0.01, 0.3, 1.0):
        f = solve_f(1, eta).values
        assert np.allclose(f, [np.cos(eta), np.sin(eta)], atol=1e-13)


def test_zero_coupling_leaves_initial_state():
    f = solve_f(5, 0.0).values
    assert np.array_equal(f, np.eye(6)[0])


def test_small_coupling_leading_order():
    # f_2 ~ eta*sqrt(l), f_1 ~ 1 - eta^2 l / 2
    l, eta = 40, 1e-3
    f = solve_f(l, eta).values
    assert f[1] == pytest.approx(eta * np.sqrt(l), rel=1e-4)
    assert 1 - f[0] == pytest.approx(eta**2 * l / 2, rel=1e-3)


@pytest.mark.parametrize("l", [0, 3, 17, 60])
@pytest.mark.parametrize("eta", [0.05, 0.2])
def test_rk4_matches_expm(l, eta):
    assert np.max(np.abs(solve_f(l, eta).values - expm_oracle(l, eta).values)) < 1e-11


def test_block_norm_conserved():
    for l in (10, 90):
        f = solve_f(l, 0.2).values
        assert abs(f @ f - 1) < 1e-12


def test_stacked_blocks_match_single_blocks():
    ls = [0, 2, 7, 30]
    stacked = solve_blocks(ls, 0.1)
    for l, f in zip(ls, stacked):
        assert np.allclose(f, solve_f(l, 0.1).values, atol=1e-15)


def test_truncated_blocks_keep_low_levels():
    l, eta = 400, 1e-3
    levels = pair_levels_needed(l, eta, 3)
    assert 3 < levels < l
    full = solve_blocks([l], eta)[0]
    cut = solve_blocks([l], eta, max_levels=levels)[0]
    assert np.max(np.abs(full[:3] - cut[:3])) < 1e-15
    assert pair_levels_needed(400, 0.1, 3) == 0


def test_pump_window_brackets_mean():
    lo, hi = pump_window(10.0)
    assert lo < 100 < hi
    assert pump_window(0.0) == (0, 20)


def test_rescale_undefined_without_coupling():
    with pytest.raises(RescaleUndefined):
        build_phi(1, 1.0, 0.0)
    with pytest.raises(RescaleUndefined):
        build_phi(2, 0.0, 0.1)
    # the unscaled states remain available
    assert build_phi(1, 1.0, 0.0, rescale=False).norm_squared() == 0.0


def test_rescaled_and_raw_states_differ_by_power():
    alpha, eta = 1.3 + 0.4j, 0.05
    raw = build_phis(2, alpha, eta, rescale=False)
    scaled = build_phis(2, alpha, eta, rescale=True)
    for n in range(3):
        assert np.allclose(raw[n].coeffs, (alpha * eta) ** n * scaled[n].coeffs, atol=1e-15)


def test_total_output_norm_is_one():
    for alpha in (1, 2, 3, 4):
        for eta in (0.01, 0.05):
            assert abs(total_output_norm(alpha, eta, 8) - 1) < 1e-8
    assert abs(total_output_norm(2.0, 0.0, 4) - 1) < 1e-12
