"""Derivative-free 1-d search used by the coherence optimizer and the Fock oracle."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], a: float, b: float, xtol: float,
                   maximize: bool = False, max_iter: int = 200) -> tuple[float, float, int]:
    """Golden-section search for the extremum of a unimodal ``f`` on ``[a, b]``.

    Endpoints are never evaluated. Returns ``(x, f(x), evaluations)`` for the
    best interior point seen; on exact ties the smaller ``x`` wins.
    """
    sign = -1.0 if maximize else 1.0
    if b < a:
        a, b = b, a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    evals = 2
    best = (fc, c) if fc <= fd else (fd, d)
    while b - a > xtol and evals < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = sign * f(c)
            cand = (fc, c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = sign * f(d)
            cand = (fd, d)
        evals += 1
        if cand[0] < best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
    return best[1], sign * best[0], evals
