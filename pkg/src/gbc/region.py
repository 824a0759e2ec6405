"""Rate computation and capacity-region tracing.

Converts solver covariances into rate pairs/triples and sweeps the
weight parameters to trace boundary points.  Tracing is fault tolerant:
a failed solve yields a NaN-rated point carrying the error message, and
the output always has one point per requested weight.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .common import CommonInstance, CommonSolveReport, solve_common
from .errors import GbcError, InvalidInputError, InvalidSweepError
from .psd import DEFAULT_TOL, Tolerances, logdet, symmetrize
from .private import SolveOptions, solve_private
from .reduction import PrivateInstance


@dataclass(frozen=True)
class RatePoint:
    """One traced boundary point in nats.

    R0 is zero for private-message points.  lambda_tag records the weight
    parameterization that produced the point: the scalar lambda for private
    traces, the tuple (lambda0, lambda1, lambda2, alpha) for common ones.
    """

    R0: float
    R1: float
    R2: float
    lambda_tag: float | tuple[float, ...]
    objective: float = float("nan")
    iterations: int = 0
    error: str | None = None


class AlphaArgmin(NamedTuple):
    """Minimizing time-sharing weight and its weighted-rate value."""

    alpha: float
    value: float


def _clamp_rate(value: float, name: str) -> float:
    if value >= 0.0:
        return float(value)
    if value >= -1e-10:
        return 0.0
    raise InvalidInputError(
        f"{name} evaluated to {value:.3e}; the covariance pair is not feasible"
    )


def rates_private(K_U: np.ndarray, inst: PrivateInstance,
                  tol: Tolerances = DEFAULT_TOL) -> RatePoint:
    """Rate pair achieved by the private-message split K = K_U + K_V.

    R1 = (1/2)(ln|K_U + Sigma1| - ln|Sigma1|),
    R2 = (1/2)(ln|K + Sigma2| - ln|K_U + Sigma2|).
    Tiny negatives from roundoff (>= -1e-10) clamp to zero; anything more
    negative raises, since it signals an infeasible covariance.
    """
    K_U = symmetrize(np.asarray(K_U, dtype=float))
    ld1u = logdet(K_U + inst.Sigma1, tol)
    ld2u = logdet(K_U + inst.Sigma2, tol)
    r1 = 0.5 * (ld1u - logdet(inst.Sigma1, tol))
    r2 = 0.5 * (logdet(inst.K + inst.Sigma2, tol) - ld2u)
    return RatePoint(
        R0=0.0,
        R1=_clamp_rate(r1, "R1"),
        R2=_clamp_rate(r2, "R2"),
        lambda_tag=float(inst.lam),
        objective=float(ld1u - inst.lam * ld2u),
    )


def rates_common(K_U: np.ndarray, K_V: np.ndarray, inst: CommonInstance,
                 tol: Tolerances = DEFAULT_TOL) -> RatePoint:
    """Rate triple achieved by the split K_C = K_U + K_V + K_W.

    R0 is the alpha-weighted combination of the two common-message mutual
    informations (the time-shared stand-in for min{I(W;Y), I(W;Z)}),
    R2 = I(V;Z|W) and R1 = I(X;Y|V,W).
    """
    K_U = symmetrize(np.asarray(K_U, dtype=float))
    K_V = symmetrize(np.asarray(K_V, dtype=float))
    a = float(inst.alpha)
    ld1_uv = logdet(K_U + K_V + inst.Sigma1, tol)
    ld2_uv = logdet(K_U + K_V + inst.Sigma2, tol)
    iwy = 0.5 * (logdet(inst.K_C + inst.Sigma1, tol) - ld1_uv)
    iwz = 0.5 * (logdet(inst.K_C + inst.Sigma2, tol) - ld2_uv)
    r0 = a * iwy + (1.0 - a) * iwz
    r2 = 0.5 * (ld2_uv - logdet(K_U + inst.Sigma2, tol))
    r1 = 0.5 * (logdet(K_U + inst.Sigma1, tol) - logdet(inst.Sigma1, tol))
    return RatePoint(
        R0=_clamp_rate(r0, "R0"),
        R1=_clamp_rate(r1, "R1"),
        R2=_clamp_rate(r2, "R2"),
        lambda_tag=(float(inst.lambda0), float(inst.lambda1),
                    float(inst.lambda2), a),
    )


def weighted_rate_common(K_U: np.ndarray, K_V: np.ndarray, inst: CommonInstance,
                         tol: Tolerances = DEFAULT_TOL) -> float:
    """Weighted rate lambda0 R0 + lambda1 R1 + lambda2 R2 for the split."""
    pt = rates_common(K_U, K_V, inst, tol)
    return (float(inst.lambda0) * pt.R0 + float(inst.lambda1) * pt.R1
            + float(inst.lambda2) * pt.R2)


def trace_region_private(base: PrivateInstance, lambdas: Sequence[float],
                         opts: SolveOptions = SolveOptions(),
                         warm_start: bool = True) -> list[RatePoint]:
    """Trace boundary points of the private-message region over a lambda sweep.

    Weights are solved in ascending order (the returned list is ascending
    in lambda regardless of input order).  With warm_start each solve
    initializes from the previous reduced iterate, which is sound because
    the feasible box does not depend on lambda.  A solve that raises
    produces a NaN point carrying the error string; a solve that merely
    fails to converge still reports its rates, flagged in `error`.
    """
    lams = [float(v) for v in lambdas]
    if not lams:
        raise InvalidSweepError("lambda sweep must be non-empty")
    for v in lams:
        if not np.isfinite(v) or v <= 1.0:
            raise InvalidInputError(f"each lambda must be finite and > 1, got {v}")
    lams.sort()

    points: list[RatePoint] = []
    init = opts.init
    for lv in lams:
        inst = replace(base, lam=lv)
        run_opts = replace(opts, init=init)
        try:
            rep = solve_private(inst, run_opts)
        except GbcError as exc:
            points.append(RatePoint(R0=float("nan"), R1=float("nan"),
                                    R2=float("nan"), lambda_tag=lv,
                                    error=str(exc)))
            continue
        pt = rates_private(rep.final_KU, inst, opts.tol)
        note = None if rep.converged else (
            f"did not converge within {run_opts.max_iters} iterations"
        )
        points.append(replace(pt, objective=rep.objective,
                              iterations=rep.iterations, error=note))
        if warm_start:
            init = rep.final_AU
    return points


def sweep_alpha_common(inst: CommonInstance, alphas: Sequence[float],
                       opts: SolveOptions = SolveOptions()
                       ) -> tuple[list[CommonSolveReport | None], AlphaArgmin]:
    """Solve the common-message problem over a grid of time-sharing weights.

    Returns one report per alpha (None where the weight combination is
    infeasible, i.e. lambda2 - lambda0(1-alpha) <= 0, with a warning) and
    the argmin of the weighted rate over the feasible alphas, resolving
    ties to the smaller alpha.  Raises InvalidSweepError if no alpha is
    feasible.
    """
    avals = [float(a) for a in alphas]
    if not avals:
        raise InvalidSweepError("alpha sweep must be non-empty")
    for a in avals:
        if not np.isfinite(a) or a < 0.0 or a > 1.0:
            raise InvalidInputError(f"each alpha must lie in [0, 1], got {a}")

    reports: list[CommonSolveReport | None] = []
    best: AlphaArgmin | None = None
    for a in avals:
        if float(inst.lambda2) - float(inst.lambda0) * (1.0 - a) <= 0.0:
            _warnings.warn(
                f"alpha={a:g} skipped: lambda2 - lambda0*(1-alpha) <= 0",
                stacklevel=2,
            )
            reports.append(None)
            continue
        cinst = replace(inst, alpha=a)
        rep = solve_common(cinst, opts)
        reports.append(rep)
        value = weighted_rate_common(rep.K_U, rep.K_V, cinst, opts.tol)
        if best is None or value < best.value - 1e-15 or (
                abs(value - best.value) <= 1e-15 and a < best.alpha):
            best = AlphaArgmin(alpha=a, value=value)
    if best is None:
        raise InvalidSweepError(
            "no alpha in the sweep satisfies lambda2 - lambda0*(1-alpha) > 0"
        )
    return reports, best
