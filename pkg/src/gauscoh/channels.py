"""Gaussian channels ``phi(T, N, d)``: ``d0 -> T d0 + d``, ``V -> T V T^t + N``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import sqrtm

from .errors import DimensionError, InvalidObjectError
from .states import GaussianState, _frozen, validate_state
from .symplectic import (
    DEFAULT_TOL,
    PSDReport,
    TnStructure,
    _classify,
    direct_sum,
    hermitian_psd,
    modes_of,
    parity_form,
    q_reflection,
    q_rotation,
    symplectic_form,
)


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    T: np.ndarray
    N: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        T, N, d = _frozen(self.T), _frozen(self.N), _frozen(self.d)
        n = modes_of(T, "T")
        if N.shape != T.shape:
            raise DimensionError(f"N must have shape {T.shape} to match T, got {N.shape}")
        if d.shape != (2 * n,):
            raise DimensionError(f"d must have length {2 * n} to match T, got shape {d.shape}")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.T.shape[0] // 2

    def to_dict(self) -> dict:
        return {"n": self.n, "T": self.T.tolist(), "N": self.N.tolist(), "d": self.d.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianChannel":
        c = cls(np.array(data["T"], dtype=float), np.array(data["N"], dtype=float),
                np.array(data["d"], dtype=float))
        if "n" in data and int(data["n"]) != c.n:
            raise DimensionError(f"field 'n' is {data['n']} but T describes {c.n} modes")
        return c


@dataclass(frozen=True)
class ChannelReport:
    valid: bool
    symmetric: bool
    complete_positivity: PSDReport | None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def _cp_form(T: np.ndarray, n: int) -> np.ndarray:
    Om = symplectic_form(n)
    return Om - T @ Om @ T.T


def validate_channel(c: GaussianChannel, tol: float = DEFAULT_TOL) -> ChannelReport:
    """Check symmetry of N and complete positivity ``N + i Omega - i T Omega T^t >= 0``."""
    N = c.N
    if np.abs(N - N.T).max() > max(1e-12, tol) * max(1.0, np.abs(N).max()):
        return ChannelReport(False, False, None, "N is not symmetric")
    psd = hermitian_psd(N, _cp_form(c.T, c.n), tol)
    reason = None if psd else (
        f"complete positivity violated (min eigenvalue {psd.min_eigenvalue:.6g})"
    )
    return ChannelReport(bool(psd), True, psd, reason)


def _same_modes(n1: int, n2: int, what: str):
    if n1 != n2:
        raise DimensionError(f"{what}: mode counts differ ({n1} vs {n2})")


def apply_channel(c: GaussianChannel, s: GaussianState, check: bool = False) -> GaussianState:
    """Send state ``s`` through channel ``c``.

    With ``check=True`` the output is validated and ``InvalidObjectError`` is
    raised if it is unphysical.
    """
    _same_modes(c.n, s.n, "apply_channel")
    out = GaussianState(c.T @ s.V @ c.T.T + c.N, c.T @ s.d0 + c.d)
    if check:
        report = validate_state(out)
        if not report:
            raise InvalidObjectError(f"channel output is not a valid state: {report.reason}")
    return out


def compose_channels(c2: GaussianChannel, c1: GaussianChannel) -> GaussianChannel:
    """The channel ``c2 o c1`` (apply ``c1`` first)."""
    _same_modes(c2.n, c1.n, "compose_channels")
    return GaussianChannel(
        c2.T @ c1.T,
        c2.T @ c1.N @ c2.T.T + c2.N,
        c2.T @ c1.d + c2.d,
    )


def tensor_channels(a: GaussianChannel, b: GaussianChannel) -> GaussianChannel:
    return GaussianChannel(direct_sum(a.T, b.T), direct_sum(a.N, b.N), np.concatenate([a.d, b.d]))


def identity_channel(n: int = 1) -> GaussianChannel:
    return GaussianChannel(np.eye(2 * n), np.zeros((2 * n, 2 * n)), np.zeros(2 * n))


def displacement_channel(lam: Sequence[complex] | complex) -> GaussianChannel:
    """Unitary channel of ``D(lam)``: identity ``T``, zero noise, ``d = 2 lam`` interleaved."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    n = lam.size
    d = 2.0 * np.column_stack([lam.real, lam.imag]).ravel()
    return GaussianChannel(np.eye(2 * n), np.zeros((2 * n, 2 * n)), d)


def constant_channel(sigma: GaussianState) -> GaussianChannel:
    """Channel that outputs ``sigma`` for every input."""
    return GaussianChannel(np.zeros_like(sigma.V), sigma.V, sigma.d0)


def is_unitary_channel(c: GaussianChannel, tol: float = DEFAULT_TOL) -> bool:
    Om = symplectic_form(c.n)
    return bool(np.abs(c.N).max() <= tol and np.abs(c.T @ Om @ c.T.T - Om).max() <= tol)


@dataclass(frozen=True)
class IncoherenceReport:
    """Structural incoherence test result.

    ``failed_clause`` is one of ``"displacement"``, ``"T-structure"``,
    ``"N-structure"``, ``"noise-bound"`` or ``None``.
    """

    incoherent: bool
    structure: TnStructure | None = None
    omegas: np.ndarray | None = None
    failed_clause: str | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.incoherent

    def to_dict(self) -> dict:
        return {
            "incoherent": self.incoherent,
            "failed_clause": self.failed_clause,
            "detail": self.detail,
            "structure": None if self.structure is None else self.structure.to_dict(),
            "omegas": None if self.omegas is None else self.omegas.tolist(),
        }


def _diag_multiple_of_identity(N: np.ndarray, tol: float):
    """Return ``omega`` when ``N`` is a direct sum of ``omega_j I2``, else ``None``."""
    scale = max(1.0, float(np.abs(N).max()))
    diag = np.diag(N)
    if np.abs(N - np.diag(diag)).max() > tol * scale:
        return None
    if np.abs(diag[0::2] - diag[1::2]).max() > tol * scale:
        return None
    return 0.5 * (diag[0::2] + diag[1::2])


def is_incoherent_channel(c: GaussianChannel, tol: float = DEFAULT_TOL) -> IncoherenceReport:
    """Decide whether ``c`` maps every thermal state to a thermal state.

    Checks, in order: ``d = 0``; ``T`` has one scaled orthogonal 2x2 block per
    column block; ``N`` is a direct sum of ``omega_j I2``; and for each row
    block ``j``, ``omega_j >= |1 - sum_{k: r(k)=j} t_k^2 det T_k|``.
    """
    if np.abs(c.d).max() > tol:
        return IncoherenceReport(False, failed_clause="displacement",
                                 detail=f"|d|_max = {np.abs(c.d).max():.6g} != 0")
    structure, why = _classify(c.T, tol)
    if structure is None:
        return IncoherenceReport(False, failed_clause="T-structure", detail=why)
    omegas = _diag_multiple_of_identity(c.N, tol)
    if omegas is None:
        return IncoherenceReport(False, structure, failed_clause="N-structure",
                                 detail="N is not a direct sum of multiples of I2")
    bound = np.abs(1.0 - structure.row_weights())
    slack = omegas - bound
    scale = max(1.0, float(np.abs(c.T).max()) ** 2, float(np.abs(omegas).max()))
    if np.any(slack < -tol * scale):
        j = int(np.argmin(slack))
        return IncoherenceReport(False, structure, omegas, "noise-bound",
                                 f"omega_{j} = {omegas[j]:.6g} < {bound[j]:.6g}")
    return IncoherenceReport(True, structure, omegas)


@dataclass(frozen=True)
class ChoiParams:
    r: float = 1.0

    @property
    def ch2r(self) -> float:
        return float(np.cosh(2.0 * self.r))

    @property
    def sh2r(self) -> float:
        return float(np.sinh(2.0 * self.r))


def choi_state(c: GaussianChannel, p: ChoiParams | float = ChoiParams()) -> GaussianState:
    """Choi state on 2n modes: ``c`` acting on the first half of a two-mode squeezed vacuum."""
    if not isinstance(p, ChoiParams):
        p = ChoiParams(float(p))
    n = c.n
    Sig = parity_form(n)
    ch, sh = p.ch2r, p.sh2r
    V = np.block([
        [c.T @ c.T.T * ch + c.N, c.T @ Sig * sh],
        [Sig @ c.T.T * sh, np.eye(2 * n) * ch],
    ])
    return GaussianState(V, np.concatenate([c.d, np.zeros(2 * n)]))


def random_tn_structure(n: int, rng: np.random.Generator, *, t_range=(0.2, 1.5),
                        zero_prob: float = 0.15, permutation: bool = False) -> TnStructure:
    """Random block structure with rotation/reflection factors and signed scales."""
    t = rng.uniform(*t_range, size=n) * rng.choice([-1.0, 1.0], size=n)
    t[rng.random(n) < zero_prob] = 0.0
    units = np.array([
        (q_rotation if rng.random() < 0.5 else q_reflection)(rng.uniform(0, 2 * np.pi))
        for _ in range(n)
    ])
    r = rng.permutation(n) if permutation else rng.integers(0, n, size=n)
    r = np.where(t == 0.0, np.arange(n), r)
    return TnStructure(t, units, tuple(int(k) for k in r))


def random_incoherent_channel(n: int, seed: int = 0) -> GaussianChannel:
    """Random channel built from the incoherent-channel structure.

    ``N = (+) omega_j I2`` with each ``omega_j`` placed between the
    complete-positivity bound and 1.5 above it.
    """
    rng = np.random.default_rng(seed)
    st = random_tn_structure(n, rng)
    omegas = np.abs(1.0 - st.row_weights()) + rng.uniform(0.0, 1.5, size=n)
    return GaussianChannel(st.reconstruct(), np.diag(np.repeat(omegas, 2)), np.zeros(2 * n))


def minimal_noise(T: np.ndarray) -> np.ndarray:
    """Smallest-trace ``N`` making ``(T, N)`` completely positive: ``|i(Omega - T Omega T^t)|``."""
    K = _cp_form(T, modes_of(T, "T"))
    N = np.real(sqrtm(K.T @ K))
    return 0.5 * (N + N.T)


def random_channel(n: int, seed: int = 0, *, t_scale: float = 0.8, slack: float = 0.5,
                   displace: float = 1.0) -> GaussianChannel:
    """Generic random completely positive channel.

    ``T`` is Gaussian random, ``N`` is the minimal compensating noise plus a
    random PSD slack, and ``d`` is Gaussian random.
    """
    rng = np.random.default_rng(seed)
    for _ in range(100):
        T = rng.normal(scale=t_scale, size=(2 * n, 2 * n))
        W = rng.normal(scale=slack, size=(2 * n, 2 * n))
        N = minimal_noise(T) + W @ W.T + 1e-6 * np.eye(2 * n)
        c = GaussianChannel(T, N, rng.normal(scale=displace, size=2 * n))
        if validate_channel(c):
            return c
    raise RuntimeError("failed to sample a completely positive channel")
