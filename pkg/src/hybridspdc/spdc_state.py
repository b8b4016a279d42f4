"""Three-mode output state of a down-converter with a depleting pump.

The output is ``sum_n (alpha*eta)**n |n n>_{12} |Phi_n>_p`` with the pump
states written over displaced number states ``|m, alpha>``.  Mode names are
``"1"`` (signal), ``"2"`` (idler) and ``"p"`` (pump).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CutoffTooSmall
from .fock_algebra import DensityOperator, StateVector, displacement_matrix, reduced_density
from .gmatrix import GMatrix
from .pump_dynamics import DEFAULT_STEPS, cached_phis, pump_window, solve_blocks

MODES = ("1", "2", "p")
TAIL_TOL = 1e-10


def pair_cutoff(alpha: complex, eta: float, tail: float = TAIL_TOL, cap: int = 60) -> int:
    """Smallest pair number whose neglected tail ``(alpha*eta)**(2n)`` is below ``tail``."""
    s = abs(alpha * eta)
    if s == 0:
        return 0
    if s >= 1:
        return cap
    return int(min(cap, max(1, np.ceil(np.log(tail) / (2 * np.log(s))))))


@dataclass(frozen=True)
class CorrelationJ:
    entries: np.ndarray

    def __getitem__(self, nm):
        return complex(self.entries[nm])

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=atol, rtol=0))


@dataclass(frozen=True)
class HybridOutput:
    """Output state together with the G-matrix it was assembled from.

    ``state`` is normalised; ``raw_norm`` is the norm before normalising
    (below one by the pair and displaced-basis tails that were cut).
    """

    state: StateVector
    alpha: complex
    eta: float
    n_cut: int
    g: GMatrix
    raw_norm: float


def displaced_rows(
    alpha: complex,
    eta: float,
    n_cut: int,
    l_cut: int | None = None,
    m_max: int | None = None,
    steps: int = DEFAULT_STEPS,
    tol: float = 1e-13,
) -> GMatrix:
    """Rescaled pump states for ``n <= n_cut`` expanded over ``|m, alpha>``.

    Without ``m_max`` the column count grows until every row keeps all but
    ``tol`` of its norm; with ``m_max`` the truncation is checked against
    the same tolerance and :class:`CutoffTooSmall` is raised if it loses
    more.
    """
    alpha = complex(alpha)
    if eta == 0 or n_cut == 0:
        from .gmatrix import gmatrix_numeric

        return gmatrix_numeric(alpha, eta, n_cut, m_max if m_max is not None else 4, l_cut, steps)
    phis = cached_phis(n_cut, alpha, eta, l_cut, True, steps)
    coeffs = np.array([p.coeffs for p in phis])
    norms = np.einsum("ij,ij->i", coeffs.conj(), coeffs).real
    lo, hi = pump_window(alpha, l_cut)
    rows = np.arange(lo, hi + 1)
    cols = 8 if m_max is None else m_max + 1
    while True:
        D = displacement_matrix(alpha, rows, np.arange(cols))
        g = coeffs[:, lo:] @ D.conj()
        kept = np.sum(np.abs(g) ** 2, axis=1)
        deficit = np.max((norms - kept) / norms)
        if deficit <= tol:
            break
        if m_max is not None:
            raise CutoffTooSmall(f"m_max={m_max} loses relative norm {deficit:.2e}")
        if cols > hi:
            raise CutoffTooSmall("displaced expansion does not converge below the pump cutoff")
        cols = min(2 * cols, hi + 1)
    return GMatrix(alpha, float(eta), g, np.ones(g.shape, dtype=bool), "numeric")


def output_from_g(g: GMatrix, n_cut: int | None = None, normalize: bool = True) -> StateVector:
    """Assemble ``sum_n (alpha*eta)**n |nn> sum_m g[n,m] |m, alpha>``."""
    n_cut = g.n_max if n_cut is None else n_cut
    s = g.alpha * g.eta
    amps = {}
    for n in range(n_cut + 1):
        pref = s**n
        if pref == 0 and n > 0:
            continue
        for m in range(g.m_max + 1):
            if g.available[n, m] and g.entries[n, m] != 0:
                amps[(n, n, m)] = pref * g.entries[n, m]
    state = StateVector(MODES, (0.0, 0.0, g.alpha), amps)
    return state.normalize() if normalize else state


def assemble_output(
    alpha: complex,
    eta: float,
    n_cut: int | None = None,
    l_cut: int | None = None,
    m_max: int | None = None,
    steps: int = DEFAULT_STEPS,
) -> HybridOutput:
    """Hybrid output state; ``n_cut=2`` and ``n_cut=1`` give the short forms.

    ``n_cut=None`` picks the pair cutoff whose tail is below 1e-10.
    """
    alpha = complex(alpha)
    n_cut = pair_cutoff(alpha, eta) if n_cut is None else int(n_cut)
    g = displaced_rows(alpha, eta, n_cut, l_cut, m_max, steps)
    raw = output_from_g(g, n_cut, normalize=False)
    raw_norm = raw.norm()
    return HybridOutput(raw * (1.0 / raw_norm), alpha, float(eta), n_cut, g, raw_norm)


def undepleted_output(alpha: complex, eta: float, n_cut: int, g: GMatrix | None = None) -> StateVector:
    """Separable approximation: all pump states replaced by ``|0, alpha>``.

    With ``g`` the pair amplitudes are weighted by ``g[n, 0]``; without it
    every ``g[n, 0]`` is taken as one.
    """
    s = complex(alpha) * eta
    amps = {}
    for n in range(n_cut + 1):
        w = 1.0 if g is None else g[n, 0]
        amps[(n, n, 0)] = s**n * w
    return StateVector(MODES, (0.0, 0.0, complex(alpha)), amps).normalize()


def propagate_oracle(
    alpha: complex, eta: float, l_cut: int | None = None, steps: int = DEFAULT_STEPS
) -> StateVector:
    """Fock-basis output built block by block from the coherent input.

    Every pump number ``l`` of the coherent state evolves inside its own
    block; the amplitudes are summed without any rescaling or displaced
    basis.  Independent of :func:`assemble_output`.
    """
    alpha = complex(alpha)
    lo, hi = pump_window(alpha, l_cut)
    ls = np.arange(lo, hi + 1)
    blocks = solve_blocks(ls, eta, steps)
    from scipy.special import gammaln

    a = abs(alpha)
    amps = {}
    for l, f in zip(ls, blocks):
        if a == 0:
            if l != 0:
                continue
            c = 1.0 + 0j
        else:
            c = np.exp(-0.5 * a * a + l * np.log(a) - 0.5 * gammaln(l + 1.0) + 1j * l * np.angle(alpha))
        for k, fk in enumerate(f):
            if fk != 0:
                amps[(k, k, int(l) - k)] = c * fk
    return StateVector(MODES, (0.0, 0.0, 0.0), amps)


def tmsv_reference(r: float, n_cut: int) -> StateVector:
    """Two-mode squeezed vacuum ``sum tanh(r)**n |nn> / cosh(r)``, truncated and renormalised."""
    t = np.tanh(r)
    amps = {(n, n): t**n / np.cosh(r) for n in range(n_cut + 1)}
    return StateVector(("1", "2"), (0.0, 0.0), amps).normalize()


def correlation_matrix(g: GMatrix) -> CorrelationJ:
    return CorrelationJ(g.correlation())


def reduced_rho12(out: HybridOutput) -> tuple[DensityOperator, CorrelationJ]:
    """Signal-idler state after tracing the pump, and the pump Gram matrix ``J``."""
    rho = reduced_density(out.state, ("1", "2"))
    return rho, correlation_matrix(out.g)


def rho12_from_j(alpha: complex, eta: float, J: CorrelationJ) -> DensityOperator:
    """Signal-idler state rebuilt from ``J`` alone (normalised)."""
    s = complex(alpha) * eta
    n = J.entries.shape[0]
    entries = {}
    for i in range(n):
        for j in range(n):
            v = s**i * np.conj(s) ** j * J.entries[i, j]
            if v != 0:
                entries[((i, i), (j, j))] = v
    return DensityOperator(("1", "2"), (0.0, 0.0), entries).normalize()


def signal_idler_sector(out: HybridOutput) -> DensityOperator:
    return reduced_rho12(out)[0]
