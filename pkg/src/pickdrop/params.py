"""Run-parameter derivation: skewness scale, matrix shape, drop threshold,
and the repetition schedule used when the residual moment is unknown."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .stream import ExactStats

DEFAULT_REPS_CONSTANT = 4.0


class DegenerateStreamError(ValueError):
    """Residual moment is zero: one element owns the whole stream; callers
    should fall back to the trivial single-candidate path."""


@dataclass(frozen=True)
class ParamSet:
    psi: float
    delta: int
    t: int
    lam: int
    r: int
    T: int

    def describe(self) -> dict:
        return {
            "psi": self.psi,
            "delta": self.delta,
            "t": self.t,
            "lambda": self.lam,
            "r": self.r,
            "repetitions": self.T,
        }


def delta_bound(n: int, k: int) -> float:
    """Upper end of the valid skewness range: 2 * n^((k-1)/2k)."""
    return 2.0 * n ** ((k - 1) / (2 * k))


def snap_delta(psi: float) -> int:
    """Power-of-two skewness scale 2^ceil(0.5*log2(psi)), at least 1.

    Ties at exact powers resolve upward via ceil; the result only needs to be
    within a factor two of the optimum.
    """
    if psi <= 0:
        raise DegenerateStreamError("psi must be positive")
    exponent = math.ceil(0.5 * math.log2(psi))
    return 2 ** max(0, exponent)


def derive_params(
    n: int,
    k: int,
    F1: int,
    Gk: int,
    eps: float = 0.25,
    reps_constant: float = DEFAULT_REPS_CONSTANT,
) -> ParamSet:
    """Derive (psi, delta, t, lambda, r, T) for a stream with known residual
    moment.  Row count is the divisibility-adjusted ceil(F1 / t); the stream
    is padded up to r*t with sentinels rather than truncating t."""
    if n < 2 or k < 3:
        raise ValueError("need n >= 2 and k >= 3")
    if F1 < 1:
        raise ValueError("stream length must be >= 1")
    if Gk <= 0:
        raise DegenerateStreamError(
            "zero residual moment: stream is a single repeated element"
        )
    psi = n ** (1.0 - 1.0 / k) * Gk ** (1.0 / k) / F1
    delta = snap_delta(psi)
    cap = delta_bound(n, k)
    while delta > cap and delta > 1:
        delta //= 2
    t = math.ceil(delta * F1 / n ** (1.0 / k))
    lam = math.ceil(F1 * delta**3 / n)
    r = max(1, math.ceil(F1 / t))
    T = repetitions(n, k, eps, delta, reps_constant)
    return ParamSet(psi=psi, delta=delta, t=t, lam=lam, r=r, T=T)


def derive_params_from_stats(
    stats: ExactStats, k: int, eps: float = 0.25,
    reps_constant: float = DEFAULT_REPS_CONSTANT, heavy_id: int | None = None
) -> ParamSet:
    if heavy_id is None:
        heavy_id = stats.heaviest()
    return derive_params(
        stats.n, k, stats.m, stats.residual_moment(k, heavy_id), eps, reps_constant
    )


def delta_grid(n: int, k: int) -> list[int]:
    """All power-of-two skewness scales a stream could require, ascending."""
    if n < 2 or k < 3:
        raise ValueError("need n >= 2 and k >= 3")
    cap = delta_bound(n, k)
    grid = []
    d = 1
    while d <= cap:
        grid.append(d)
        d *= 2
    return grid


def repetitions(
    n: int, k: int, eps: float, delta: int,
    reps_constant: float = DEFAULT_REPS_CONSTANT,
) -> int:
    """Independent sample count per skewness scale: ceil(c * n^(1-2/k) / (eps*delta))."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    return math.ceil(reps_constant * n ** (1.0 - 2.0 / k) / (eps * delta))


def sanity_inequalities(stats: ExactStats, p: ParamSet, k: int,
                        heavy_id: int | None = None) -> dict:
    """Check the three derived inequalities on a concrete instance.

    Report-only: they are theorems for the exact formulas, but ceilings and
    padding can introduce slack on tiny instances.
    """
    if heavy_id is None:
        heavy_id = stats.heaviest()
    gk_root = stats.residual_moment(k, heavy_id) ** (1.0 / k)
    g2 = stats.residual_moment(2, heavy_id)
    g3 = stats.residual_moment(3, heavy_id)
    checks = {
        "lambda_r": (p.lam * p.r, 4.0 * gk_root),
        "g2_over_t": (g2 / p.t, gk_root),
        "g3_over_lambda_t": (g3 / (p.lam * p.t), gk_root),
    }
    report = {
        name: {"lhs": float(lhs), "rhs": float(rhs), "holds": bool(lhs <= rhs)}
        for name, (lhs, rhs) in checks.items()
    }
    report["all_hold"] = all(v["holds"] for v in report.values())
    return report
