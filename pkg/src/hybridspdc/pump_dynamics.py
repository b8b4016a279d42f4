"""Pair-creation dynamics inside one conserved-quanta block.

Starting from ``|0,0>|l>`` (signal, idler, pump) the interaction only couples
the ``l + 1`` states ``|k-1, k-1>|l-k+1>``.  Their real amplitudes ``f_k``
obey a tridiagonal linear system whose generator is antisymmetric, so the
flow is a rotation and ``sum_k f_k**2`` stays one.  The coupling only enters
through the product ``eta * tau`` and we always integrate to ``tau = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .errors import RescaleUndefined
from .fock_algebra import default_cutoff

DEFAULT_STEPS = 2000


@dataclass(frozen=True)
class FBlock:
    l: int
    eta: float
    values: np.ndarray
    steps: int


@dataclass(frozen=True)
class PhiState:
    """Pump-mode state paired with ``n`` photon pairs, in the Fock basis.

    ``coeffs[l]`` is the amplitude on ``|l>``.  With ``rescaled`` set the raw
    amplitudes have been divided by ``(alpha*eta)**n`` so the state stays
    O(1) as the coupling vanishes.
    """

    n: int
    alpha: complex
    eta: float
    coeffs: np.ndarray
    rescaled: bool

    def norm_squared(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)


def _couplings(l: int, eta: float, size: int | None = None):
    """Sub- and super-diagonals of the generator (0-based row index)."""
    size = l + 1 if size is None else size
    k = np.arange(1, size + 1, dtype=float)
    lower = eta * (k - 1) * np.sqrt(np.maximum(l - k + 2, 0.0))  # couples k-1 -> k
    upper = -eta * k * np.sqrt(np.maximum(l - k + 1, 0.0))  # couples k+1 -> k
    return lower, upper


def generator_matrix(l: int, eta: float) -> np.ndarray:
    """Dense ``(l+1) x (l+1)`` generator ``M`` with ``df/dtau = M f``."""
    if l < 0 or eta < 0:
        raise ValueError("need l >= 0 and eta >= 0")
    lower, upper = _couplings(l, eta)
    M = np.zeros((l + 1, l + 1))
    idx = np.arange(l)
    M[idx + 1, idx] = lower[1:]
    M[idx, idx + 1] = upper[:-1]
    return M


def _rk4(apply, f0: np.ndarray, steps: int) -> np.ndarray:
    h = 1.0 / steps
    f = f0.copy()
    for _ in range(steps):
        k1 = apply(f)
        k2 = apply(f + 0.5 * h * k1)
        k3 = apply(f + 0.5 * h * k2)
        k4 = apply(f + h * k3)
        f += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return f


def _initial(size: int) -> np.ndarray:
    f = np.zeros(size)
    f[0] = 1.0
    return f


def solve_f(l: int, eta: float, steps: int = DEFAULT_STEPS) -> FBlock:
    """Integrate one block from ``f = (1, 0, ..., 0)`` to ``tau = 1`` with RK4."""
    if steps < 1:
        raise ValueError("steps must be positive")
    lower, upper = _couplings(l, eta)

    def apply(f):
        out = np.zeros_like(f)
        out[1:] += lower[1:] * f[:-1]
        out[:-1] += upper[:-1] * f[1:]
        return out

    return FBlock(l, eta, _rk4(apply, _initial(l + 1), steps), steps)


def expm_oracle(l: int, eta: float) -> FBlock:
    """Exact block propagation by dense matrix exponential (test oracle)."""
    if l > 500:
        raise ValueError("oracle limited to l <= 500")
    values = scipy.linalg.expm(generator_matrix(l, eta))[:, 0]
    return FBlock(l, eta, values, 0)


def pair_levels_needed(l_max: int, eta: float, keep: int) -> int:
    """Block truncation that keeps ``keep`` pair levels accurate.

    Level ``k`` carries roughly ``x**k`` with ``x = eta*sqrt(l_max)``, the
    effective squeezing of the block, so levels beyond ``keep`` plus enough
    headroom for ``x**(2*headroom) < 1e-18`` never feed back measurably.
    Returns ``0`` when no truncation is safe.
    """
    x = eta * np.sqrt(max(l_max, 1))
    if x == 0:
        return keep
    if x >= 0.6:
        return 0
    headroom = int(np.ceil(9.0 / -np.log10(x))) + 6
    return keep + headroom


def solve_blocks(
    ls, eta: float, steps: int = DEFAULT_STEPS, max_levels: int = 0
) -> list[np.ndarray]:
    """Integrate many blocks at once.

    All blocks are stacked into one vector; the generator couplings vanish
    at block edges, so a single banded update advances every block.  With
    ``max_levels > 0`` each block is cut to its first ``max_levels`` pair
    levels (see :func:`pair_levels_needed`).
    """
    ls = [int(l) for l in ls]
    sizes = [l + 1 if max_levels <= 0 else min(l + 1, max_levels) for l in ls]
    total = sum(sizes)
    lower = np.empty(total)
    upper = np.empty(total)
    f0 = np.zeros(total)
    offsets = np.cumsum([0] + sizes)
    for l, size, start in zip(ls, sizes, offsets[:-1]):
        lo, up = _couplings(l, eta, size)
        lo[0] = 0.0
        up[-1] = 0.0
        lower[start:start + size] = lo
        upper[start:start + size] = up
        f0[start] = 1.0
    lower_s = lower[1:]
    upper_s = upper[:-1]

    def apply(f):
        out = np.empty_like(f)
        out[0] = 0.0
        out[1:] = lower_s * f[:-1]
        out[:-1] += upper_s * f[1:]
        return out

    f = _rk4(apply, f0, steps) if eta != 0 else f0
    return [f[s:s + n] for s, n in zip(offsets[:-1], sizes)]


def pump_window(alpha: complex, l_cut: int | None = None) -> tuple[int, int]:
    """Range of pump photon numbers carrying the coherent amplitude."""
    a = abs(alpha)
    hi = default_cutoff(a) if l_cut is None else int(l_cut)
    lo = max(0, int(np.floor(a * a - 10 * a - 20)))
    return min(lo, hi), hi


def _log_poisson_amp(alpha: complex, L: np.ndarray) -> np.ndarray:
    """``log|e^{-|a|^2/2} a^L / sqrt(L!)|``."""
    a = abs(alpha)
    if a == 0:
        return np.where(L == 0, 0.0, -np.inf)
    return -0.5 * a * a + L * np.log(a) - 0.5 * gammaln(L + 1.0)


def build_phis(
    n_max: int,
    alpha: complex,
    eta: float,
    l_cut: int | None = None,
    rescale: bool = True,
    steps: int = DEFAULT_STEPS,
) -> list[PhiState]:
    """Pump states for ``n = 0..n_max`` sharing one set of block solutions."""
    alpha = complex(alpha)
    if rescale and n_max >= 1 and alpha * eta == 0:
        raise RescaleUndefined("rescaling by (alpha*eta)**n needs alpha*eta != 0")
    lo, hi = pump_window(alpha, l_cut)
    L_all = np.arange(lo, hi + n_max + 1)
    levels = pair_levels_needed(int(L_all[-1]), eta, n_max + 1)
    blocks = solve_blocks(L_all, eta, steps, max_levels=levels)
    phase = np.angle(alpha)
    out = []
    for n in range(n_max + 1):
        l = np.arange(lo, hi + 1)
        L = l + n
        f = np.array([blocks[Li - lo][n] if n < len(blocks[Li - lo]) else 0.0 for Li in L])
        if rescale and n > 0:
            # alpha**(l+n) / (alpha*eta)**n == alpha**l / eta**n
            log_amp = _log_poisson_amp(alpha, L) - n * np.log(abs(alpha))
            coeff = np.exp(log_amp + 1j * l * phase) * f / eta**n
        else:
            log_amp = _log_poisson_amp(alpha, L)
            coeff = np.exp(log_amp + 1j * L * phase) * f
        full = np.zeros(hi + 1, dtype=complex)
        full[lo:] = coeff
        out.append(PhiState(n, alpha, float(eta), full, rescale))
    return out


def build_phi(
    n: int,
    alpha: complex,
    eta: float,
    l_cut: int | None = None,
    rescale: bool = True,
    steps: int = DEFAULT_STEPS,
) -> PhiState:
    """Pump state accompanying ``n`` photon pairs (see :func:`build_phis`)."""
    if rescale and n >= 1 and complex(alpha) * eta == 0:
        raise RescaleUndefined("rescaling by (alpha*eta)**n needs alpha*eta != 0")
    return build_phis(n, alpha, eta, l_cut, rescale, steps)[n]


def total_output_norm(
    alpha: complex,
    eta: float,
    n_cut: int,
    l_cut: int | None = None,
    steps: int = DEFAULT_STEPS,
) -> float:
    """Total output norm ``sum_n sum_l Poisson(l+n) f_{l+n, n+1}**2`` from raw data."""
    lo, hi = pump_window(alpha, l_cut)
    L_all = np.arange(lo, hi + n_cut + 1)
    levels = pair_levels_needed(int(L_all[-1]), eta, n_cut + 1)
    blocks = solve_blocks(L_all, eta, steps, max_levels=levels)
    weights = np.exp(2.0 * _log_poisson_amp(alpha, L_all))
    terms = []
    for n in range(n_cut + 1):
        l = np.arange(lo, hi + 1)
        f = np.array([blocks[Li - lo][n] if n < len(blocks[Li - lo]) else 0.0 for Li in l + n])
        terms.extend((weights[l + n - lo] * f**2).tolist())
    return math.fsum(terms)


@lru_cache(maxsize=64)
def _cached_phis(n_max, alpha, eta, l_cut, rescale, steps):
    return tuple(build_phis(n_max, alpha, eta, l_cut, rescale, steps))


def cached_phis(n_max, alpha, eta, l_cut=None, rescale=True, steps=DEFAULT_STEPS):
    """Memoised :func:`build_phis`; callers must not mutate the arrays."""
    return list(_cached_phis(int(n_max), complex(alpha), float(eta), l_cut, bool(rescale), int(steps)))
