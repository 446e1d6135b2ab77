"""Gaussian superchannels ``Phi(A, O, Y, dbar)`` acting on Gaussian channels.

A superchannel maps ``phi(T, N, d)`` to
``(A T Sigma O^t Sigma, A N A^t + Y, A d + dbar)`` where ``Sigma`` is the
parity form. It factors as ``post o phi o pre``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .channels import (
    GaussianChannel,
    _diag_multiple_of_identity,
    compose_channels,
    minimal_noise,
    random_tn_structure,
)
from .errors import DimensionError
from .states import _frozen
from .symplectic import (
    DEFAULT_TOL,
    PSDReport,
    TnStructure,
    _classify,
    hermitian_psd,
    modes_of,
    orthogonal_symplectic,
    parity_form,
    q_rotation,
    symplectic_form,
)


@dataclass(frozen=True, eq=False)
class GaussianSuperchannel:
    A: np.ndarray
    O: np.ndarray
    Y: np.ndarray
    dbar: np.ndarray

    def __post_init__(self):
        A, O, Y, dbar = (_frozen(x) for x in (self.A, self.O, self.Y, self.dbar))
        n = modes_of(A, "A")
        for name, M in (("O", O), ("Y", Y)):
            if M.shape != A.shape:
                raise DimensionError(f"{name} must have shape {A.shape} to match A, got {M.shape}")
        if dbar.shape != (2 * n,):
            raise DimensionError(f"dbar must have length {2 * n} to match A, got shape {dbar.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "O", O)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "dbar", dbar)

    @property
    def n(self) -> int:
        return self.A.shape[0] // 2

    def to_dict(self) -> dict:
        return {"n": self.n, "A": self.A.tolist(), "O": self.O.tolist(),
                "Y": self.Y.tolist(), "dbar": self.dbar.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianSuperchannel":
        sc = cls(*(np.array(data[k], dtype=float) for k in ("A", "O", "Y", "dbar")))
        if "n" in data and int(data["n"]) != sc.n:
            raise DimensionError(f"field 'n' is {data['n']} but A describes {sc.n} modes")
        return sc


def identity_superchannel(n: int = 1) -> GaussianSuperchannel:
    return GaussianSuperchannel(np.eye(2 * n), np.eye(2 * n), np.zeros((2 * n, 2 * n)), np.zeros(2 * n))


@dataclass(frozen=True)
class SuperchannelReport:
    valid: bool
    symmetric: bool
    orthogonal: bool
    post_cp: PSDReport | None
    pre_cp: PSDReport | None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def validate_superchannel(sc: GaussianSuperchannel, tol: float = DEFAULT_TOL) -> SuperchannelReport:
    """Check ``Y = Y^t``, ``O O^t = I``, ``Y + i Omega - i A Omega A^t >= 0`` and
    ``i Omega - i O Omega O^t >= 0``."""
    n = sc.n
    Om = symplectic_form(n)
    symmetric = bool(np.abs(sc.Y - sc.Y.T).max() <= max(1e-12, tol) * max(1.0, np.abs(sc.Y).max()))
    orthogonal = bool(np.abs(sc.O @ sc.O.T - np.eye(2 * n)).max() <= tol)
    if not symmetric:
        return SuperchannelReport(False, False, orthogonal, None, None, "Y is not symmetric")
    post = hermitian_psd(sc.Y, Om - sc.A @ Om @ sc.A.T, tol)
    pre = hermitian_psd(np.zeros_like(Om), Om - sc.O @ Om @ sc.O.T, tol)
    reason = None
    if not orthogonal:
        reason = "O is not orthogonal"
    elif not post:
        reason = f"Y + iOmega - iA Omega A^t not PSD (min eigenvalue {post.min_eigenvalue:.6g})"
    elif not pre:
        reason = f"iOmega - iO Omega O^t not PSD (min eigenvalue {pre.min_eigenvalue:.6g})"
    return SuperchannelReport(reason is None, True, orthogonal, post, pre, reason)


def apply_superchannel(sc: GaussianSuperchannel, c: GaussianChannel) -> GaussianChannel:
    if sc.n != c.n:
        raise DimensionError(f"apply_superchannel: mode counts differ ({sc.n} vs {c.n})")
    Sig = parity_form(sc.n)
    return GaussianChannel(
        sc.A @ c.T @ Sig @ sc.O.T @ Sig,
        sc.A @ c.N @ sc.A.T + sc.Y,
        sc.A @ c.d + sc.dbar,
    )


def decompose_superchannel(sc: GaussianSuperchannel) -> tuple[GaussianChannel, GaussianChannel]:
    """Split ``sc`` into ``(pre, post)`` with ``sc(phi) = post o phi o pre``.

    ``pre`` is the unitary channel ``(Sigma O^t Sigma, 0, 0)`` and ``post`` is
    ``(A, Y, dbar)``.
    """
    n = sc.n
    Sig = parity_form(n)
    pre = GaussianChannel(Sig @ sc.O.T @ Sig, np.zeros((2 * n, 2 * n)), np.zeros(2 * n))
    post = GaussianChannel(sc.A, sc.Y, sc.dbar)
    return pre, post


def apply_via_decomposition(sc: GaussianSuperchannel, c: GaussianChannel) -> GaussianChannel:
    pre, post = decompose_superchannel(sc)
    return compose_channels(post, compose_channels(c, pre))


@dataclass(frozen=True)
class SuperchannelIncoherenceReport:
    """``failed_clause`` is one of ``"dbar"``, ``"A-structure"``, ``"O-structure"``,
    ``"Y-structure"`` or ``None``."""

    incoherent: bool
    A_structure: TnStructure | None = None
    O_structure: TnStructure | None = None
    etas: np.ndarray | None = None
    failed_clause: str | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.incoherent

    def to_dict(self) -> dict:
        return {
            "incoherent": self.incoherent,
            "failed_clause": self.failed_clause,
            "detail": self.detail,
            "A_structure": None if self.A_structure is None else self.A_structure.to_dict(),
            "O_structure": None if self.O_structure is None else self.O_structure.to_dict(),
            "etas": None if self.etas is None else self.etas.tolist(),
        }


def is_incoherent_superchannel(sc: GaussianSuperchannel,
                               tol: float = DEFAULT_TOL) -> SuperchannelIncoherenceReport:
    """Structural test: ``dbar = 0``, ``A`` and ``O`` single-block-per-column, ``Y = (+) eta_j I2``."""
    if np.abs(sc.dbar).max() > tol:
        return SuperchannelIncoherenceReport(False, failed_clause="dbar",
                                             detail=f"|dbar|_max = {np.abs(sc.dbar).max():.6g} != 0")
    A_st, why = _classify(sc.A, tol)
    if A_st is None:
        return SuperchannelIncoherenceReport(False, failed_clause="A-structure", detail=why)
    O_st, why = _classify(sc.O, tol)
    if O_st is None:
        return SuperchannelIncoherenceReport(False, A_st, failed_clause="O-structure", detail=why)
    etas = _diag_multiple_of_identity(sc.Y, tol)
    if etas is None:
        return SuperchannelIncoherenceReport(False, A_st, O_st, failed_clause="Y-structure",
                                             detail="Y is not a direct sum of multiples of I2")
    return SuperchannelIncoherenceReport(True, A_st, O_st, etas)


def random_incoherent_superchannel(n: int, seed: int = 0) -> GaussianSuperchannel:
    """Random incoherent superchannel.

    ``O`` routes each mode to a distinct mode through a rotation (orthogonal
    and symplectic, as the pre-processing constraint demands); ``A`` is a
    random single-block-per-column matrix; ``eta_j`` sits at most 1.5 above
    ``|1 - sum_{k: r(k)=j} s_k^2 det A_k|``.
    """
    rng = np.random.default_rng(seed)
    A_st = random_tn_structure(n, rng)
    perm = rng.permutation(n)
    O_st = TnStructure(
        rng.choice([-1.0, 1.0], size=n),
        np.array([q_rotation(rng.uniform(0, 2 * np.pi)) for _ in range(n)]),
        tuple(int(k) for k in perm),
    )
    etas = np.abs(1.0 - A_st.row_weights()) + rng.uniform(0.0, 1.5, size=n)
    return GaussianSuperchannel(A_st.reconstruct(), O_st.reconstruct(),
                                np.diag(np.repeat(etas, 2)), np.zeros(2 * n))


def random_superchannel(n: int, seed: int = 0, *, a_scale: float = 0.8,
                        slack: float = 0.5) -> GaussianSuperchannel:
    """Generic valid superchannel: random ``A``, compensating ``Y``, Haar-random passive ``O``."""
    rng = np.random.default_rng(seed)
    A = rng.normal(scale=a_scale, size=(2 * n, 2 * n))
    W = rng.normal(scale=slack, size=(2 * n, 2 * n))
    Y = minimal_noise(A) + W @ W.T + 1e-6 * np.eye(2 * n)
    U = unitary_group.rvs(n, random_state=rng) if n > 1 else np.array([[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    return GaussianSuperchannel(A, orthogonal_symplectic(U), Y, rng.normal(size=2 * n))
