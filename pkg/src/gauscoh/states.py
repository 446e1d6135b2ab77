"""Gaussian states described by a covariance matrix and a displacement vector.

Conventions: the vacuum has ``V = I``, and the displacement operator
``D(lam)`` shifts ``d0`` by ``2 * lam``. A coherent state of complex
amplitude ``alpha`` therefore has ``d0 = (2 Re alpha, 2 Im alpha)`` and mean
photon number ``|alpha|^2``. Entropies and coherence values are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidObjectError
from .symplectic import (
    DEFAULT_TOL,
    PSDReport,
    direct_sum,
    hermitian_psd,
    modes_of,
    symplectic_eigenvalues,
    symplectic_form,
)

CLAMP_EPS = 1e-9
NU_CLAMP = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """A Gaussian state ``rho(V, d0)`` on n modes."""

    V: np.ndarray
    d0: np.ndarray

    def __post_init__(self):
        V = _frozen(self.V)
        n = modes_of(V, "V")
        d0 = _frozen(self.d0)
        if d0.shape != (2 * n,):
            raise DimensionError(f"d0 must have length {2 * n} to match V, got shape {d0.shape}")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "d0", d0)

    @property
    def n(self) -> int:
        return self.V.shape[0] // 2

    def to_dict(self) -> dict:
        return {"n": self.n, "V": self.V.tolist(), "d0": self.d0.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        s = cls(np.array(data["V"], dtype=float), np.array(data["d0"], dtype=float))
        if "n" in data and int(data["n"]) != s.n:
            raise DimensionError(f"field 'n' is {data['n']} but V describes {s.n} modes")
        return s


@dataclass(frozen=True)
class StateReport:
    valid: bool
    symmetric: bool
    uncertainty: PSDReport | None
    symplectic_eigenvalues: np.ndarray | None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def validate_state(s: GaussianState, tol: float = DEFAULT_TOL) -> StateReport:
    """Check symmetry of V and the uncertainty relation ``V + i Omega >= 0``."""
    V = s.V
    symmetric = bool(np.abs(V - V.T).max() <= max(1e-12, tol) * max(1.0, np.abs(V).max()))
    if not symmetric:
        return StateReport(False, False, None, None, "V is not symmetric")
    psd = hermitian_psd(V, symplectic_form(s.n), tol)
    try:
        nu = symplectic_eigenvalues(V)
    except ValueError:
        nu = None
    reason = None if psd else (
        f"uncertainty relation violated (min eigenvalue {psd.min_eigenvalue:.6g})"
    )
    return StateReport(bool(psd), True, psd, nu, reason)


def thermal_state(nu: Sequence[float] | float) -> GaussianState:
    """Product of thermal states with covariance ``nu_j * I2`` per mode."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if nu.ndim != 1 or nu.size == 0:
        raise DimensionError("nu must be a non-empty 1-d sequence")
    if np.any(nu < 1.0):
        raise InvalidObjectError(f"thermal parameters must satisfy nu >= 1, got {nu.tolist()}")
    return GaussianState(np.diag(np.repeat(nu, 2)), np.zeros(2 * nu.size))


def vacuum_state(n: int = 1) -> GaussianState:
    return thermal_state(np.ones(n))


def coherent_state(alpha: Sequence[complex] | complex) -> GaussianState:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    d0 = 2.0 * np.column_stack([alpha.real, alpha.imag]).ravel()
    return GaussianState(np.eye(2 * alpha.size), d0)


def is_incoherent_state(s: GaussianState, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``s`` is a thermal state: ``d0 = 0`` and ``V`` is a direct sum of ``nu_j I2``, ``nu_j >= 1``."""
    scale = max(1.0, float(np.abs(s.V).max()))
    if np.abs(s.d0).max() > tol:
        return False
    diag = np.diag(s.V)
    nu = diag[0::2]
    if np.abs(s.V - np.diag(diag)).max() > tol * scale:
        return False
    if np.abs(diag[1::2] - nu).max() > tol * scale:
        return False
    return bool(np.all(nu >= 1.0 - tol * scale))


def char_function(s: GaussianState, lam: Sequence[float]) -> complex:
    """Characteristic function ``exp[-1/2 lam^t Omega V Omega^t lam - i (Omega d0)^t lam]``."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (2 * s.n,):
        raise DimensionError(f"lambda must have length {2 * s.n}, got shape {lam.shape}")
    Om = symplectic_form(s.n)
    quad = lam @ Om @ s.V @ Om.T @ lam
    return complex(np.exp(-0.5 * quad - 1j * (Om @ s.d0) @ lam))


def f_thermal(x):
    """Entropy of a thermal mode with mean photon number ``x``, in bits.

    ``f(x) = (x + 1) log2(x + 1) - x log2(x)`` with ``f(0) = 0``. Inputs down
    to ``-CLAMP_EPS`` are treated as 0; anything lower raises ``ValueError``.
    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -CLAMP_EPS) or np.any(np.isnan(x)):
        raise ValueError(f"f_thermal needs x >= 0, got min {np.nanmin(x) if x.size else x}")
    x = np.maximum(x, 0.0)
    # log2(1 + x) + x log2(1 + 1/x): no cancellation between large terms
    safe = np.where(x > 0, x, 1.0)
    out = (np.log1p(x) + np.where(x > 0, x * np.log1p(1.0 / safe), 0.0)) / np.log(2.0)
    return float(out) if out.ndim == 0 else out


def _mean_photons(V: np.ndarray, d: np.ndarray) -> np.ndarray:
    diag = np.diagonal(V, axis1=-2, axis2=-1)
    d2 = d * d
    nbar = 0.25 * (diag[..., 0::2] + diag[..., 1::2] + d2[..., 0::2] + d2[..., 1::2] - 2.0)
    return np.maximum(nbar, 0.0)


def _clamped_nu(nu: np.ndarray) -> np.ndarray:
    nu = np.where((nu < 1.0) & (nu >= 1.0 - NU_CLAMP), 1.0, nu)
    if np.any(nu < 1.0):
        raise InvalidObjectError(
            f"symplectic eigenvalue {nu.min():.12g} < 1: covariance matrix is not physical"
        )
    return nu


def _entropy_from_cov(V: np.ndarray) -> np.ndarray:
    nu = _clamped_nu(symplectic_eigenvalues(V))
    return f_thermal((nu - 1.0) / 2.0).sum(axis=-1)


def cr_from_moments(V: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Relative entropy of coherence for stacked covariance matrices and displacements."""
    V = np.asarray(V, dtype=float)
    d = np.asarray(d, dtype=float)
    return f_thermal(_mean_photons(V, d)).sum(axis=-1) - _entropy_from_cov(V)


def mean_photon_numbers(s: GaussianState) -> np.ndarray:
    """Per-mode mean photon number ``(V11 + V22 + dx^2 + dy^2 - 2) / 4``, clamped at 0."""
    return _mean_photons(s.V, s.d0)


def entropy(s: GaussianState) -> float:
    """Von Neumann entropy in bits, summed over symplectic eigenvalues."""
    return float(_entropy_from_cov(s.V))


def cr_state(s: GaussianState) -> float:
    """Relative entropy of coherence of a Gaussian state, in bits.

    Closed form: the thermal entropy at each mode's mean photon number,
    summed, minus the state's entropy.
    """
    return float(cr_from_moments(s.V, s.d0))


def tensor_states(a: GaussianState, b: GaussianState) -> GaussianState:
    return GaussianState(direct_sum(a.V, b.V), np.concatenate([a.d0, b.d0]))
