"""Relative-entropy coherence of Gaussian channels.

The channel measure is the supremum, over thermal inputs with parameters
``nu_j >= 1``, of the state coherence of the channel output. The search
domain is unbounded, so the optimizer truncates it at ``nu_max`` and probes
past the truncation to flag divergence explicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channels import GaussianChannel, validate_channel, tensor_channels
from .errors import InvalidObjectError, OptimizerBudgetError
from .optimize import golden_section
from .states import GaussianState, cr_from_moments, cr_state, f_thermal, validate_state
from .superchannels import GaussianSuperchannel, apply_superchannel, is_incoherent_superchannel

CONVERGED = "converged"
DIVERGENT = "divergent"
BOUNDARY_MAX = "boundary-max"
STATUSES = (CONVERGED, DIVERGENT, BOUNDARY_MAX)

MONOTONICITY_TOL = 1e-7
ADDITIVITY_TOL = 1e-6


@dataclass(frozen=True)
class OptimizerOptions:
    nu_max: float = 1e3
    grid_points_per_decade: int = 8
    refine_tol: float = 1e-9
    divergence_growth_eps: float = 1e-6
    # caps the tensor grid; per-axis resolution is thinned above this size
    max_grid_points: int = 50_000
    max_evaluations: int = 2_000_000

    def __post_init__(self):
        if not self.nu_max > 1.0:
            raise ValueError(f"nu_max must exceed 1, got {self.nu_max}")
        if self.grid_points_per_decade < 1:
            raise ValueError("grid_points_per_decade must be positive")
        if not (self.refine_tol > 0 and self.divergence_growth_eps > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class CoherenceResult:
    """Outcome of the channel-coherence search.

    ``value`` is ``None`` when the search is flagged divergent; ``incumbent``
    always holds the largest objective value observed, a lower bound on the
    supremum.
    """

    value: float | None
    status: str
    argmax_nu: tuple[float, ...]
    evaluations: int
    incumbent: float
    trace: tuple | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "status": self.status,
            "argmax_nu": list(self.argmax_nu),
            "evaluations": self.evaluations,
            "incumbent": self.incumbent,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoherenceResult":
        if data["status"] not in STATUSES:
            raise ValueError(f"unknown status {data['status']!r}")
        return cls(data["value"], data["status"], tuple(data["argmax_nu"]),
                   int(data["evaluations"]), float(data.get("incumbent", data["value"] or 0.0)))


def channel_objective(c: GaussianChannel) -> Callable[[np.ndarray], np.ndarray]:
    """Batched ``g(nu) = C_r[c(thermal(nu))]`` for an ``(m, n)`` array of thermal parameters."""
    T, N, d = c.T, c.N, c.d

    def g(nus: np.ndarray) -> np.ndarray:
        nus = np.atleast_2d(np.asarray(nus, dtype=float))
        diag = np.repeat(nus, 2, axis=1)
        V = (T[None, :, :] * diag[:, None, :]) @ T.T + N
        return np.atleast_1d(cr_from_moments(V, np.broadcast_to(d, (len(nus), d.size))))

    return g


class _Counted:
    def __init__(self, g, budget: int, trace: list | None):
        self.g, self.budget, self.count, self.trace = g, budget, 0, trace

    def many(self, nus: np.ndarray, stage: str = "grid") -> np.ndarray:
        self.count += len(nus)
        if self.count > self.budget:
            raise OptimizerBudgetError(
                f"coherence search exceeded {self.budget} objective evaluations"
            )
        vals = self.g(nus)
        if self.trace is not None and stage != "grid":
            self.trace.extend((stage, tuple(map(float, x)), float(v)) for x, v in zip(nus, vals))
        return vals

    def one(self, nu: np.ndarray, stage: str) -> float:
        return float(self.many(np.asarray(nu, dtype=float)[None, :], stage)[0])


def _axis(opts: OptimizerOptions, n: int) -> np.ndarray:
    top = np.log10(opts.nu_max)
    num = max(2, int(np.ceil(top * opts.grid_points_per_decade)) + 1)
    if num ** n > opts.max_grid_points:
        num = max(2, int(np.floor(opts.max_grid_points ** (1.0 / n))))
    axis = 10.0 ** np.linspace(0.0, top, num)
    axis[0], axis[-1] = 1.0, opts.nu_max
    return axis


def _tie_tol(v: float) -> float:
    return 1e-12 * max(1.0, abs(v))


def _grid_search(ev: _Counted, axis: np.ndarray, n: int, chunk: int = 4096):
    best_v, best_x = -np.inf, None
    points = itertools.product(axis, repeat=n)
    while True:
        block = np.array(list(itertools.islice(points, chunk)))
        if block.size == 0:
            break
        vals = ev.many(block)
        top = vals.max()
        if top > best_v + _tie_tol(best_v if np.isfinite(best_v) else top):
            # lexicographic grid order: the first near-maximal point is the smallest nu
            best_v = float(top)
            best_x = block[np.argmax(vals >= top - _tie_tol(top))].copy()
    return best_x, best_v


def _bracket(axis: np.ndarray, x: float) -> tuple[float, float]:
    k = int(np.searchsorted(axis, x))
    k = min(k, len(axis) - 1)
    lo = axis[max(k - 1, 0)]
    hi = axis[min(k + 1, len(axis) - 1)] if axis[k] <= x else axis[k]
    return float(lo), float(hi)


def _refine(ev: _Counted, axis: np.ndarray, x: np.ndarray, fx: float, opts: OptimizerOptions):
    for _ in range(2):
        start = fx
        for i in range(len(x)):
            lo, hi = _bracket(axis, x[i])
            if hi <= lo:
                continue

            def along(v, i=i):
                y = x.copy()
                y[i] = v
                return ev.one(y, "refine")

            xi, fi, _ = golden_section(along, lo, hi, xtol=1e-10 * max(1.0, hi), maximize=True)
            if fi > fx + _tie_tol(fx):
                x = x.copy()
                x[i], fx = xi, fi
        if fx - start < opts.refine_tol:
            break
    return x, fx


def cr_channel(c: GaussianChannel, opts: OptimizerOptions | None = None,
               trace: bool = False) -> CoherenceResult:
    """Relative-entropy coherence of a Gaussian channel, in bits.

    Maximizes the output coherence over thermal inputs: a log-spaced grid on
    ``[1, nu_max]^n`` followed by two sweeps of per-coordinate golden-section
    refinement. When the maximizer touches ``nu_max`` the truncation is doubled
    twice; growth above ``divergence_growth_eps`` both times marks the result
    divergent, otherwise it is reported as ``boundary-max``.

    Raises:
        InvalidObjectError: if the channel is not completely positive.
        OptimizerBudgetError: if ``opts.max_evaluations`` is exceeded.
    """
    opts = opts or OptimizerOptions()
    report = validate_channel(c)
    if not report:
        raise InvalidObjectError(f"invalid channel: {report.reason}")
    n = c.n
    log = [] if trace else None
    ev = _Counted(channel_objective(c), opts.max_evaluations, log)
    axis = _axis(opts, n)
    x, fx = _grid_search(ev, axis, n)
    if log is not None:
        log.append(("grid", tuple(map(float, x)), fx))
    x, fx = _refine(ev, axis, x, fx, opts)

    status, value = CONVERGED, fx
    on_edge = x >= opts.nu_max * (1.0 - 1e-12)
    if on_edge.any():
        growth, prev, cap = [], fx, opts.nu_max
        for _ in range(2):
            cap *= 2.0
            y = x.copy()
            y[on_edge] = cap
            fy = ev.one(y, "divergence-probe")
            growth.append(fy - prev)
            if fy > prev:
                x, prev = y, fy
        fx = prev
        if all(gk > opts.divergence_growth_eps for gk in growth):
            status, value = DIVERGENT, None
        else:
            status, value = BOUNDARY_MAX, fx
    return CoherenceResult(
        value=None if value is None else float(value),
        status=status,
        argmax_nu=tuple(float(v) for v in x),
        evaluations=ev.count,
        incumbent=float(fx),
        trace=tuple(log) if log is not None else None,
    )


def cr_displacement_analytic(lam: Sequence[complex] | complex) -> float:
    """Coherence of the displacement channel ``D(lam)``: ``sum_j f(|lam_j|^2)``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    return float(np.sum(f_thermal(np.abs(lam) ** 2)))


def cr_constant_analytic(sigma: GaussianState) -> float:
    """Coherence of the constant channel with output ``sigma``: just ``C_r(sigma)``."""
    report = validate_state(sigma)
    if not report:
        raise InvalidObjectError(f"invalid state: {report.reason}")
    return cr_state(sigma)


def coherence_of_channel(c: GaussianChannel, opts: OptimizerOptions | None = None,
                         tol: float = 1e-12) -> CoherenceResult:
    """Like ``cr_channel`` but uses closed forms for constant and displacement channels."""
    n = c.n
    if np.abs(c.T).max() <= tol:
        v = cr_constant_analytic(GaussianState(c.N, c.d))
        return CoherenceResult(v, CONVERGED, (1.0,) * n, 0, v)
    if np.abs(c.T - np.eye(2 * n)).max() <= tol and np.abs(c.N).max() <= tol:
        lam = (c.d[0::2] + 1j * c.d[1::2]) / 2.0
        v = cr_displacement_analytic(lam)
        return CoherenceResult(v, CONVERGED, (1.0,) * n, 0, v)
    return cr_channel(c, opts)


@dataclass(frozen=True)
class MonotonicityReport:
    lhs: CoherenceResult
    rhs: CoherenceResult
    holds: bool
    excluded: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs.to_dict(), "rhs": self.rhs.to_dict(),
                "holds": self.holds, "excluded": self.excluded}


def check_monotonicity(c: GaussianChannel, sc: GaussianSuperchannel,
                       opts: OptimizerOptions | None = None,
                       tol: float = MONOTONICITY_TOL) -> MonotonicityReport:
    """Compare ``C_r(sc(c))`` against ``C_r(c)`` for an incoherent superchannel ``sc``.

    A pair is ``excluded`` when either side is divergent. If only the left
    side diverges its incumbent (a lower bound) is still compared, so a
    reported failure is always a genuine violation.
    """
    inc = is_incoherent_superchannel(sc)
    if not inc:
        raise ValueError(f"superchannel is not incoherent ({inc.failed_clause}: {inc.detail})")
    lhs = cr_channel(apply_superchannel(sc, c), opts)
    rhs = cr_channel(c, opts)
    if rhs.status == DIVERGENT:
        holds = True
    elif lhs.status == DIVERGENT:
        holds = lhs.incumbent <= rhs.value + tol
    else:
        holds = lhs.value <= rhs.value + tol
    return MonotonicityReport(lhs, rhs, bool(holds), DIVERGENT in (lhs.status, rhs.status))


@dataclass(frozen=True)
class AdditivityReport:
    joint: CoherenceResult
    first: CoherenceResult
    second: CoherenceResult
    abs_err: float | None
    holds: bool
    excluded: bool

    def to_dict(self) -> dict:
        return {"joint": self.joint.to_dict(), "first": self.first.to_dict(),
                "second": self.second.to_dict(), "abs_err": self.abs_err,
                "holds": self.holds, "excluded": self.excluded}


def check_additivity(c1: GaussianChannel, c2: GaussianChannel,
                     opts: OptimizerOptions | None = None,
                     tol: float = ADDITIVITY_TOL) -> AdditivityReport:
    """Compare ``C_r(c1 (x) c2)`` with ``C_r(c1) + C_r(c2)``; divergent inputs are excluded."""
    r1, r2 = cr_channel(c1, opts), cr_channel(c2, opts)
    joint = cr_channel(tensor_channels(c1, c2), opts)
    if DIVERGENT in (r1.status, r2.status, joint.status):
        return AdditivityReport(joint, r1, r2, None, True, True)
    err = abs(joint.value - r1.value - r2.value)
    return AdditivityReport(joint, r1, r2, err, err <= tol, False)
