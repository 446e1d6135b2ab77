"""Matrix utilities for the symplectic formalism.

Phase-space vectors are ordered ``(x1, y1, x2, y2, ..., xn, yn)``, so every
2n x 2n matrix is viewed as an n x n grid of 2x2 blocks, one per mode pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, expm

from .errors import DimensionError, PairingError

OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SIGMA_1 = np.diag([1.0, -1.0])

DEFAULT_TOL = 1e-9
PAIR_TOL = 1e-6


def symplectic_form(n: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form, a direct sum of n copies of omega."""
    if n < 1:
        raise ValueError(f"mode count must be positive, got {n}")
    return np.kron(np.eye(n), OMEGA_1)


def parity_form(n: int) -> np.ndarray:
    """Return the direct sum of n copies of diag(1, -1)."""
    if n < 1:
        raise ValueError(f"mode count must be positive, got {n}")
    return np.kron(np.eye(n), SIGMA_1)


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    return block_diag(*blocks)


def modes_of(M: np.ndarray, name: str = "matrix") -> int:
    """Mode count of a square 2n x 2n matrix, raising on any other shape."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2 or M.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty 2n x 2n matrix, got shape {M.shape}")
    return M.shape[0] // 2


def block(M: np.ndarray, row: int, col: int) -> np.ndarray:
    """The 2x2 block of ``M`` at (0-based) block row ``row`` and block column ``col``."""
    return M[2 * row:2 * row + 2, 2 * col:2 * col + 2]


@dataclass(frozen=True)
class PSDReport:
    """Outcome of a positive-semidefiniteness test on R + iS."""

    is_psd: bool
    min_eigenvalue: float
    threshold: float

    def __bool__(self) -> bool:
        return self.is_psd


def hermitian_psd(R: np.ndarray, S: np.ndarray, tol: float = DEFAULT_TOL) -> PSDReport:
    """Test whether the Hermitian matrix ``R + iS`` is positive semidefinite.

    ``R`` must be symmetric and ``S`` antisymmetric (checked to ``tol``). The
    test is relative: the smallest eigenvalue must be at least
    ``-tol * max(1, ||R + iS||_2)``.
    """
    R = np.asarray(R, dtype=float)
    S = np.asarray(S, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"R must be square, got shape {R.shape}")
    if S.shape != R.shape:
        raise DimensionError(f"R and S shapes differ: {R.shape} vs {S.shape}")
    scale = max(1.0, float(np.abs(R).max(initial=0.0)), float(np.abs(S).max(initial=0.0)))
    if np.abs(R - R.T).max(initial=0.0) > tol * scale:
        raise ValueError("R is not symmetric")
    if np.abs(S + S.T).max(initial=0.0) > tol * scale:
        raise ValueError("S is not antisymmetric")
    H = 0.5 * (R + R.T) + 0.5j * (S - S.T)
    eig = np.linalg.eigvalsh(H)
    norm = float(np.abs(eig).max(initial=0.0))
    threshold = -tol * max(1.0, norm)
    lo = float(eig[0]) if eig.size else 0.0
    return PSDReport(is_psd=lo >= threshold, min_eigenvalue=lo, threshold=threshold)


def symplectic_eigenvalues(V: np.ndarray, pair_tol: float = PAIR_TOL) -> np.ndarray:
    """Symplectic eigenvalues of a real symmetric 2n x 2n matrix.

    The 2n eigenvalues of ``i Omega V`` come in +/- pairs. Their moduli are
    sorted, adjacent values paired and averaged. Also accepts a stack of
    matrices with shape ``(..., 2n, 2n)`` and returns shape ``(..., n)``.

    Raises:
        PairingError: if a pair disagrees by more than ``pair_tol * max(1, value)``.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim < 2 or V.shape[-1] != V.shape[-2] or V.shape[-1] % 2 or V.shape[-1] == 0:
        raise DimensionError(f"V must be (..., 2n, 2n), got shape {V.shape}")
    n = V.shape[-1] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ V)), axis=-1)
    lo, hi = moduli[..., 0::2], moduli[..., 1::2]
    gap = np.abs(hi - lo)
    if np.any(gap > pair_tol * np.maximum(1.0, hi)):
        raise PairingError(
            f"symplectic spectrum does not pair (largest gap {gap.max():.3e}); "
            "input is non-physical or ill-conditioned"
        )
    return 0.5 * (lo + hi)


def scaled_orthogonal_factor(B: np.ndarray, tol: float = DEFAULT_TOL):
    """Factor a 2x2 block as ``t * T`` with ``t >= 0`` and ``T`` orthogonal.

    Returns ``(t, T)`` or ``None`` when ``B B^t`` is not a multiple of the
    identity. A zero block gives ``(0.0, I2)``.
    """
    B = np.asarray(B, dtype=float)
    if B.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 block, got shape {B.shape}")
    t = float(np.linalg.norm(B) / np.sqrt(2.0))
    if t <= tol:
        return 0.0, np.eye(2)
    T = B / t
    if np.abs(T @ T.T - np.eye(2)).max() > tol:
        return None
    return t, T


@dataclass(frozen=True)
class TnStructure:
    """Block structure of a matrix in the class of single-block-per-column matrices.

    Column block ``j`` holds ``t[j] * T_unit[j]`` in row block ``r[j]`` and
    zeros elsewhere. Indices are 0-based. Column blocks with ``t[j] == 0``
    are flagged in ``zero_mask`` and routed to ``r[j] = j``.
    """

    t: np.ndarray
    T_unit: np.ndarray
    r: tuple[int, ...]
    zero_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        T_unit = np.asarray(self.T_unit, dtype=float)
        n = t.shape[0]
        if T_unit.shape != (n, 2, 2) or len(self.r) != n:
            raise DimensionError("t, T_unit and r disagree on the mode count")
        if any(not 0 <= k < n for k in self.r):
            raise ValueError(f"row map {self.r} out of range for n={n}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "T_unit", T_unit)
        object.__setattr__(self, "r", tuple(int(k) for k in self.r))
        if self.zero_mask is None:
            object.__setattr__(self, "zero_mask", t == 0.0)

    @property
    def n(self) -> int:
        return self.t.shape[0]

    @property
    def dets(self) -> np.ndarray:
        return np.linalg.det(self.T_unit)

    def reconstruct(self) -> np.ndarray:
        n = self.n
        M = np.zeros((2 * n, 2 * n))
        for j in range(n):
            i = self.r[j]
            M[2 * i:2 * i + 2, 2 * j:2 * j + 2] = self.t[j] * self.T_unit[j]
        return M

    def row_weights(self) -> np.ndarray:
        """For each row block i, the sum of ``t_k^2 det T_k`` over columns k routed to i."""
        w = np.zeros(self.n)
        dets = self.dets
        for k, i in enumerate(self.r):
            w[i] += self.t[k] ** 2 * dets[k]
        return w

    def to_dict(self) -> dict:
        return {
            "t": self.t.tolist(),
            "T_unit": self.T_unit.tolist(),
            "r": list(self.r),
        }


def _classify(T: np.ndarray, tol: float):
    n = modes_of(T, "T")
    T = np.asarray(T, dtype=float)
    scale = max(1.0, float(np.abs(T).max()))
    ts, units, rows = [], [], []
    for j in range(n):
        nonzero = [i for i in range(n) if np.abs(block(T, i, j)).max() > tol * scale]
        if len(nonzero) > 1:
            return None, f"column block {j} has nonzero blocks in rows {nonzero}"
        if not nonzero:
            ts.append(0.0)
            units.append(np.eye(2))
            rows.append(j)
            continue
        i = nonzero[0]
        factor = scaled_orthogonal_factor(block(T, i, j), tol)
        if factor is None:
            return None, f"block ({i}, {j}) is not a scaled orthogonal matrix"
        ts.append(factor[0])
        units.append(factor[1])
        rows.append(i)
    return TnStructure(np.array(ts), np.array(units), tuple(rows)), None


def classify_Tn(T: np.ndarray, tol: float = DEFAULT_TOL) -> TnStructure | None:
    """Decompose ``T`` into per-column scaled orthogonal blocks, or ``None``."""
    return _classify(T, tol)[0]


def explain_Tn(T: np.ndarray, tol: float = DEFAULT_TOL) -> str | None:
    """Reason ``classify_Tn`` rejects ``T`` (first offending block), or ``None`` if it accepts."""
    return _classify(T, tol)[1]


def q_rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def q_reflection(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]])


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random symplectic matrix ``expm(Omega H)`` for a random symmetric ``H``."""
    H = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return expm(symplectic_form(n) @ (H + H.T) / 2)


def orthogonal_symplectic(U: np.ndarray) -> np.ndarray:
    """Real 2n x 2n image of an n x n unitary; orthogonal and symplectic."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    O = np.zeros((2 * n, 2 * n))
    for i in range(n):
        for j in range(n):
            a, b = U[i, j].real, U[i, j].imag
            O[2 * i:2 * i + 2, 2 * j:2 * j + 2] = [[a, -b], [b, a]]
    return O
