"""Truncated Fock-space numerics, kept independent of the Gaussian closed forms.

Displacement operators come from a dense matrix exponential of the truncated
generator, never from Laguerre formulas. Supported states are single-mode
displaced thermal states ``(nu I2, d0)``, realized as
``D(d0 / 2) rho_th(nu) D(d0 / 2)^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InvalidObjectError
from .optimize import golden_section
from .states import GaussianState, char_function, cr_state

TAIL_TOL = 1e-10
EIG_FLOOR = 1e-14
# extra Fock levels used when building D(lam); the result is cropped back
DEFAULT_PAD = 40


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    rho: np.ndarray
    trace_deficit: float

    @property
    def cutoff(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "FockDensityMatrix":
        rho = np.asarray(rho, dtype=complex)
        return cls(rho, max(0.0, float(1.0 - np.trace(rho).real)))


def default_cutoff(nu: float, tail: float = TAIL_TOL, minimum: int = 2) -> int:
    """Smallest cutoff with thermal tail ``((nu - 1)/(nu + 1))^cutoff < tail``."""
    q = (nu - 1.0) / (nu + 1.0)
    if q <= 0.0:
        return minimum
    return max(minimum, int(np.ceil(np.log(tail) / np.log(q))) + 1)


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def _thermal_diag(nu: float, cutoff: int) -> np.ndarray:
    q = (nu - 1.0) / (nu + 1.0)
    return 2.0 / (nu + 1.0) * q ** np.arange(cutoff)


def thermal_fock(nu: float, cutoff: int) -> FockDensityMatrix:
    """Diagonal thermal density matrix ``2/(nu+1) ((nu-1)/(nu+1))^k``, ``k < cutoff``."""
    if nu < 1.0:
        raise InvalidObjectError(f"thermal parameter must satisfy nu >= 1, got {nu}")
    if cutoff < 2:
        raise ValueError(f"cutoff must be at least 2, got {cutoff}")
    p = _thermal_diag(nu, cutoff)
    return FockDensityMatrix(np.diag(p).astype(complex), max(0.0, float(1.0 - p.sum())))


def displacement_fock(lam: complex, cutoff: int, pad: int = 0) -> np.ndarray:
    """``exp(lam a^dag - lam^* a)`` built in ``cutoff + pad`` levels, cropped to ``cutoff``."""
    if cutoff < 2:
        raise ValueError(f"cutoff must be at least 2, got {cutoff}")
    a = annihilation(cutoff + pad)
    D = expm(lam * a.conj().T - np.conj(lam) * a)
    return D[:cutoff, :cutoff]


def _displaced_thermal(s: GaussianState):
    if s.n != 1:
        raise InvalidObjectError("the Fock oracle supports single-mode states only")
    V = s.V
    nu = 0.5 * (V[0, 0] + V[1, 1])
    if abs(V[0, 1]) > 1e-12 or abs(V[1, 0]) > 1e-12 or abs(V[0, 0] - V[1, 1]) > 1e-12 * max(1.0, nu):
        raise InvalidObjectError("the Fock oracle supports covariance matrices nu * I2 only")
    if nu < 1.0:
        raise InvalidObjectError(f"covariance nu * I2 needs nu >= 1, got {nu}")
    return nu, complex(s.d0[0], s.d0[1]) / 2.0


def gaussian_to_fock(s: GaussianState, cutoff: int, pad: int = DEFAULT_PAD) -> FockDensityMatrix:
    """Density matrix of a single-mode displaced thermal state in the truncated Fock basis."""
    nu, alpha = _displaced_thermal(s)
    dim = cutoff + pad
    D = displacement_fock(alpha, dim)
    rho = D @ np.diag(_thermal_diag(nu, dim)) @ D.conj().T
    rho = rho[:cutoff, :cutoff]
    rho = 0.5 * (rho + rho.conj().T)
    return FockDensityMatrix.from_matrix(rho)


def photon_number(rho: FockDensityMatrix) -> float:
    return float(np.real(np.diag(rho.rho)) @ np.arange(rho.cutoff))


def char_function_numeric(rho: FockDensityMatrix, lam: complex, pad: int = DEFAULT_PAD) -> complex:
    """``tr[rho D(lam)]`` in the truncated space."""
    D = displacement_fock(lam, rho.cutoff, pad)
    return complex(np.sum(rho.rho * D.T))


def _log2_safe(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > EIG_FLOOR
    out[mask] = np.log2(p[mask])
    return out


def relative_entropy_numeric(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """``tr rho log2 rho - tr rho log2 sigma`` via eigen-decompositions, in bits.

    Returns ``inf`` when ``rho`` has weight outside the support of ``sigma``.
    """
    p, U = np.linalg.eigh(rho.rho)
    q, W = np.linalg.eigh(sigma.rho)
    p = np.clip(p, 0.0, None)
    weights = np.real(np.einsum("ij,j,ij->i", (W.conj().T @ U), p, (W.conj().T @ U).conj()))
    off_support = q <= EIG_FLOOR
    if np.any(weights[off_support] > 1e-12):
        return float("inf")
    return float(p @ _log2_safe(p) - weights[~off_support] @ np.log2(q[~off_support]))


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin_nu: float
    cutoff: int
    trace_deficit: float
    flagged: bool


def cr_state_numeric(s: GaussianState, cutoff: int | None = None, xtol: float = 1e-9) -> OracleResult:
    """Coherence of a displaced thermal state by direct minimization over thermal references.

    Minimizes ``S(rho || rho_th(nu))`` over ``nu`` with golden-section search.
    ``flagged`` is set when the truncation loses more than 1e-6 of the trace.
    """
    nu_s, alpha = _displaced_thermal(s)
    if cutoff is None:
        cutoff = default_cutoff(nu_s + 4 * abs(alpha) ** 2) + 20
    rho = gaussian_to_fock(s, cutoff)
    nbar = photon_number(rho)
    hi = 2.0 * (2.0 * nbar + 1.0) + 2.0

    def objective(nu: float) -> float:
        return relative_entropy_numeric(rho, thermal_fock(nu, cutoff))

    nu_best, value, _ = golden_section(objective, 1.0, hi, xtol=xtol)
    return OracleResult(float(value), float(nu_best), cutoff, rho.trace_deficit,
                        rho.trace_deficit > 1e-6)


def compare_char(s: GaussianState, lam: complex, cutoff: int) -> dict:
    """Gaussian characteristic function against the numeric trace, as a report dict."""
    rho = gaussian_to_fock(s, cutoff)
    analytic = char_function(s, [lam.real, lam.imag])
    numeric = char_function_numeric(rho, lam)
    return {
        "analytic": [analytic.real, analytic.imag],
        "numeric": [numeric.real, numeric.imag],
        "abs_err": abs(analytic - numeric),
        "cutoff": cutoff,
        "trace_deficit": rho.trace_deficit,
    }


def compare_cr(s: GaussianState, cutoff: int) -> dict:
    res = cr_state_numeric(s, cutoff)
    analytic = cr_state(s)
    return {
        "analytic": analytic,
        "numeric": res.value,
        "abs_err": abs(analytic - res.value),
        "cutoff": cutoff,
        "trace_deficit": res.trace_deficit,
        "argmin_nu": res.argmin_nu,
    }
