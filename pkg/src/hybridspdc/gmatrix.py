"""Expansion of the pump states over displaced number states ``|m, alpha>``.

``g[n, m] = <m, alpha|Phi_n>`` where ``Phi_n`` is the *rescaled* pump state
that accompanies ``n`` photon pairs.  Two independent routes are provided:
the numerical one (block dynamics followed by a frame change) and the
low-order perturbative series in ``eta``.  The numerical route is the
reference; the series only covers ``n <= 2`` and a few columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionByZeroEntry, MissingGEntry, RescaleUndefined
from .fock_algebra import displacement_matrix
from .pump_dynamics import DEFAULT_STEPS, cached_phis

SQ2 = np.sqrt(2.0)
SQ6 = np.sqrt(6.0)


@dataclass(frozen=True)
class GMatrix:
    alpha: complex
    eta: float
    entries: np.ndarray
    available: np.ndarray
    method: str

    @property
    def n_max(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def m_max(self) -> int:
        return self.entries.shape[1] - 1

    def __getitem__(self, nm) -> complex:
        n, m = nm
        if n > self.n_max or m > self.m_max or not self.available[n, m]:
            raise MissingGEntry(f"g[{n},{m}] not available from the {self.method} G-matrix")
        return complex(self.entries[n, m])

    def get(self, n: int, m: int, default=0j) -> complex:
        try:
            return self[n, m]
        except MissingGEntry:
            return default

    def normalization(self) -> float:
        """Truncated ``sum_{n,m} |alpha*eta|**(2n) |g_nm|**2`` (should be ~1)."""
        s = abs(self.alpha * self.eta)
        weights = s ** (2 * np.arange(self.n_max + 1))
        mags = np.where(self.available, np.abs(self.entries) ** 2, 0.0)
        return float(weights @ mags.sum(axis=1))

    def correlation(self) -> np.ndarray:
        """``J[n, m] = sum_k g[n, k] conj(g[m, k])``."""
        g = np.where(self.available, self.entries, 0.0)
        return g @ g.conj().T


def gmatrix_numeric(
    alpha: complex,
    eta: float,
    n_max: int = 2,
    m_max: int = 3,
    l_cut: int | None = None,
    steps: int = DEFAULT_STEPS,
) -> GMatrix:
    """G-matrix from the integrated pump states.

    At ``eta == 0`` every rescaled pump state reduces to the coherent state
    ``|0, alpha>`` (its limit as the coupling vanishes), so the rows are
    filled with that limit instead of dividing by zero.
    """
    alpha = complex(alpha)
    if alpha == 0 and n_max >= 1:
        raise RescaleUndefined("rows n >= 1 need alpha != 0")
    if eta == 0:
        entries = np.zeros((n_max + 1, m_max + 1), dtype=complex)
        entries[:, 0] = 1.0
        return GMatrix(alpha, 0.0, entries, np.ones_like(entries, dtype=bool), "numeric")
    phis = cached_phis(n_max, alpha, eta, l_cut, True, steps)
    size = len(phis[0].coeffs)
    D = displacement_matrix(alpha, np.arange(size), np.arange(m_max + 1))
    coeffs = np.array([p.coeffs for p in phis])
    entries = coeffs @ D.conj()
    return GMatrix(alpha, float(eta), entries, np.ones(entries.shape, dtype=bool), "numeric")


def gmatrix_series(alpha: complex, eta: float) -> GMatrix:
    """Truncated perturbative series for ``n <= 2``, ``m <= 3``.

    Terms are transcribed verbatim from the closed forms; entries without a series
    are marked unavailable.  Row 2 contains terms of mismatched order that
    do not follow the pattern of rows 0 and 1; they are kept verbatim so a
    comparison with :func:`gmatrix_numeric` exposes them.
    """
    a = complex(alpha)
    mod2 = abs(a) ** 2
    e = float(eta)
    g = np.zeros((3, 4), dtype=complex)
    avail = np.zeros((3, 4), dtype=bool)

    g[0, 0] = (
        1
        - mod2 * e**2 / 2
        + (5 * mod2**2 * e**4 + mod2 * e**4) / 24
        - (61 * mod2**3 * e**6 + 35 * mod2**2 * e**6 + mod2 * e**6) / 720
    )
    g[0, 1] = e * (
        -a * e / 2
        + 10 * a * mod2 * e**3 / 24
        - (183 * a * mod2**2 * e**5 + 70 * a * mod2 * e**5 + a * e**5) / 720
    )
    g[0, 2] = e**2 * (
        5 * SQ2 * a**2 * e**2 / 24 - (183 * SQ2 * a**2 * mod2 * e**4 + 35 * SQ2 * a**2 * e**4) / 720
    )
    g[0, 3] = e**3 * (-61 * SQ6 * a**3 * e**3 / 720)
    avail[0, :] = True

    g[1, 0] = 1 - (5 * mod2 * e**2 + e**2) / 6 + (61 * mod2**2 * e**4 + 35 * mod2 * e**4 + e**4) / 120
    g[1, 1] = e * (-5 * a * e / 6 + (122 * a * mod2 * e**3 + 35 * a * e**3) / 120)
    g[1, 2] = e**2 * (-61 * SQ2 * a**2 * e**2 / 120)
    avail[1, :3] = True

    g[2, 0] = (
        1
        - (7 * mod2 * e**2 + 3 * e**2) / 6
        + (331 * a**2 * mod2**2 * e**6 + 337 * a**2 * mod2 * e**6 + 36 * a**2 * e**6) / (3 * 120)
    )
    g[2, 1] = e * (-7 * a * e / 6 + (662 * a**3 * mod2 * e**5 + 337 * a**3 * e**5) / (3 * 120))
    g[2, 2] = e**2 * (331 * SQ2 * a**4 * e**4 / (3 * 120))
    avail[2, :3] = True
    return GMatrix(a, e, g, avail, "series")


def series_tolerance(alpha: complex, eta: float) -> float:
    """Agreement bound expected between the series and the numerics."""
    return 50.0 * eta**6 * max(1.0, abs(alpha) ** 6)


def compare_series(alpha: complex, eta: float, steps: int = DEFAULT_STEPS) -> list[dict]:
    """Entry-by-entry comparison of series against numerics.

    Every entry with a series is reported; ``flagged`` marks entries whose
    difference exceeds :func:`series_tolerance`.
    """
    num = gmatrix_numeric(alpha, eta, 2, 3, steps=steps)
    ser = gmatrix_series(alpha, eta)
    tol = series_tolerance(alpha, eta)
    rows = []
    for n, m in zip(*np.nonzero(ser.available)):
        gn, gs = num[n, m], ser[n, m]
        diff = abs(gn - gs)
        rows.append(
            {
                "n": int(n),
                "m": int(m),
                "numeric": gn,
                "series": gs,
                "abs_diff": diff,
                "tolerance": tol,
                "flagged": bool(diff > tol),
            }
        )
    return rows


def neighbor_ratio(g: GMatrix, n: int) -> np.ndarray:
    """``|g[n, m]| / |g[n, m+1]|`` over the available columns of row ``n``."""
    row = [g[n, m] for m in range(g.m_max + 1) if g.available[n, m]]
    mags = np.abs(np.array(row))
    if np.any(mags[1:] == 0):
        raise DivisionByZeroEntry(f"row {n} has a vanishing entry")
    return mags[:-1] / mags[1:]
