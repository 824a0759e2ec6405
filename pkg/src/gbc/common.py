"""Alternating solver for the private-plus-common message problem.

The objective, normalized by the private weight lambda1, is

    (lam2' - lam0'*abar) * logdet(K_U + K_V + Sigma2)
    - lam0'*alpha * logdet(K_U + K_V + Sigma1)
    + logdet(K_U + Sigma1) - lam2' * logdet(K_U + Sigma2)

over K_U, K_V >= 0 with K_U + K_V <= K_C, where lam0' = lambda0/lambda1,
lam2' = lambda2/lambda1 and abar = 1 - alpha.  With K_U fixed the K_V
subproblem has exactly the private-message shape (weight ratio
lam0*alpha/(lam2 - lam0*abar) and noise pair K_U+Sigma2, K_U+Sigma1), so
one projected fixed-point pass solves it.  With K_V fixed the K_U
subproblem picks up a coupling term through K_V; its fixed-point update
adds that term and a mixed barrier to the private-message update.  The
outer loop alternates the two inner solves until both lifted covariances
stop moving in relative spectral norm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInstanceError,
    InvalidInputError,
    InvalidInstanceError,
    NumericalBreakdownError,
)
from .psd import (
    DEFAULT_TOL,
    Tolerances,
    eig_sym,
    logdet,
    loewner_leq,
    project_box,
    spectral_norm,
    symmetrize,
)
from .private import SolveOptions, _check_reduced_box
from .reduction import box_transform, lift, schur_head, transform

INNER_CAP = 50_000


@dataclass(frozen=True)
class CommonInstance:
    """Private-plus-common problem data.

    K_C is the covariance constraint, Sigma1 and Sigma2 the receiver
    noise covariances, lambda0 > lambda2 > lambda1 > 0 the rate weights
    and alpha in [0, 1] the split of the common-rate weight between the
    receivers.  The update requires lambda2 - lambda0*(1 - alpha) > 0.
    """

    K_C: np.ndarray
    Sigma1: np.ndarray
    Sigma2: np.ndarray
    lambda0: float
    lambda1: float
    lambda2: float
    alpha: float

    @property
    def n(self) -> int:
        return int(np.asarray(self.K_C).shape[0])

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        """Raise InvalidInstanceError unless the instance invariants hold."""
        mats = {"K_C": self.K_C, "Sigma1": self.Sigma1, "Sigma2": self.Sigma2}
        n = self.n
        for name, M in mats.items():
            M = np.asarray(M, dtype=float)
            if M.shape != (n, n):
                raise InvalidInstanceError(f"{name} must be {n}x{n}, got {M.shape}")
            if not np.all(np.isfinite(M)):
                raise InvalidInstanceError(f"{name} has non-finite entries")
            if np.max(np.abs(M - M.T)) > tol.sym_tol:
                raise InvalidInstanceError(f"{name} is not symmetric")
        wk = eig_sym(self.K_C, tol).values
        if wk.size and wk[-1] < -1e-8 * max(1.0, abs(wk[0])):
            raise InvalidInstanceError(
                f"K_C must be positive semidefinite (min eigenvalue {wk[-1]:.3e})"
            )
        for name in ("Sigma1", "Sigma2"):
            w = eig_sym(mats[name], tol).values
            if w.size == 0 or w[-1] <= tol.rank_eps:
                raise InvalidInstanceError(f"{name} must be positive definite")
        l0, l1, l2 = (float(self.lambda0), float(self.lambda1), float(self.lambda2))
        a = float(self.alpha)
        if not all(np.isfinite(v) for v in (l0, l1, l2, a)):
            raise InvalidInstanceError("weights must be finite")
        if not (l0 > l2 > l1 > 0.0):
            raise InvalidInstanceError(
                f"weights must satisfy lambda0 > lambda2 > lambda1 > 0, "
                f"got {l0}, {l2}, {l1}"
            )
        if not (0.0 <= a <= 1.0):
            raise InvalidInstanceError(f"alpha must lie in [0, 1], got {a}")
        if l2 - l0 * (1.0 - a) <= 0.0:
            raise InvalidInstanceError(
                f"lambda2 - lambda0*(1 - alpha) must be positive, "
                f"got {l2 - l0 * (1.0 - a):.3e}"
            )


@dataclass(frozen=True)
class CommonSolveReport:
    """Outcome of one alternating solve.

    K_U, K_V        the returned covariances in original coordinates
    K_W             K_C - K_U - K_V, clamped to the PSD cone (reporting only)
    objective_trace objective at the start and after each outer pass
    inner_iterations
                    per-outer-pass iteration counts of the K_V and K_U
                    inner solves, as a pair of sequences
    converged       whether the outer stopping rule fired before the cap
    elapsed_seconds wall-clock time of the solve
    warnings        human-readable notes (feasibility slips, inner caps)
    step_rel_changes
                    per-outer-pass combined relative changes
    """

    K_U: np.ndarray
    K_V: np.ndarray
    K_W: np.ndarray
    objective_trace: np.ndarray
    inner_iterations: tuple[tuple[int, ...], tuple[int, ...]]
    converged: bool
    elapsed_seconds: float
    warnings: tuple[str, ...] = ()
    step_rel_changes: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


def objective_common(K_U: np.ndarray, K_V: np.ndarray, inst: CommonInstance,
                     tol: Tolerances = DEFAULT_TOL) -> float:
    """Normalized private-plus-common objective at (K_U, K_V)."""
    KU = symmetrize(K_U)
    KV = symmetrize(K_V)
    l0p = float(inst.lambda0) / float(inst.lambda1)
    l2p = float(inst.lambda2) / float(inst.lambda1)
    a = float(inst.alpha)
    S1 = symmetrize(inst.Sigma1)
    S2 = symmetrize(inst.Sigma2)
    return (
        (l2p - l0p * (1.0 - a)) * logdet(KU + KV + S2, tol)
        - l0p * a * logdet(KU + KV + S1, tol)
        + logdet(KU + S1, tol)
        - l2p * logdet(KU + S2, tol)
    )


def kv_subproblem_step(B_V: np.ndarray, NHat1: np.ndarray, NHat2: np.ndarray,
                       ratio: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """One projected fixed-point step of the K_V subproblem.

    Identical in shape to the private-message update with the noise pair
    (NHat1, NHat2) and weight ratio; ratio = 0 degenerates to projecting
    B_V NHat1^{-1} B_V + B_V.
    """
    ratio = float(ratio)
    if not (np.isfinite(ratio) and ratio >= 0.0):
        raise InvalidInputError(f"ratio must be finite and >= 0, got {ratio}")
    B = _check_reduced_box(B_V, np.asarray(NHat1).shape[0])
    try:
        T = B @ np.linalg.inv(NHat1) @ B + B
        if ratio == 0.0:
            return project_box(T, tol)
        raw = np.linalg.inv(np.linalg.inv(T) + ratio * np.linalg.inv(B + NHat2))
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"K_V update failed: {e}") from e
    return project_box(raw, tol)


def ku_subproblem_step(A_U: np.ndarray, SigmaHat1: np.ndarray, SigmaHat2: np.ndarray,
                       MHat1: np.ndarray, MHat2: np.ndarray, BVprime: np.ndarray,
                       inst: CommonInstance, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """One projected fixed-point step of the K_U subproblem.

    All hat matrices must come from the reduction of the current
    constraint K_C - K_V; MHat1 and MHat2 compress K_V + Sigma2 and
    K_V + Sigma1.  The coupling term through BVprime is symmetrized
    before assembly so the eigenvalue projection stays well defined.
    """
    A = _check_reduced_box(A_U, np.asarray(SigmaHat1).shape[0])
    l0 = float(inst.lambda0)
    l1 = float(inst.lambda1)
    l2 = float(inst.lambda2)
    a = float(inst.alpha)
    try:
        T1 = np.linalg.inv(A @ np.linalg.inv(SigmaHat1) @ A + A)
        mid = (l2 / l1) * (np.linalg.inv(A + SigmaHat2) @ symmetrize(BVprime)
                           @ np.linalg.inv(A + MHat1))
        mid = (mid + mid.T) / 2.0
        last = (l0 / l1) * (a * np.linalg.inv(A + MHat2)
                            + (1.0 - a) * np.linalg.inv(A + MHat1))
        raw = np.linalg.inv(T1 + mid + last)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"K_U update failed: {e}") from e
    return project_box(raw, tol)


def _inner_solve(step, r: int, inner_tol: float, warnings: list[str],
                 label: str, init: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Iterate a projected step until the relative change settles.

    Starts from I/2 unless an interior warm start is given.  The loop
    stops when the Frobenius change falls below inner_tol times the
    larger of the iterate norm and the box-midpoint norm ||I/2||_F; the
    absolute anchor keeps the test meaningful for blocks shrinking to
    zero, where a purely relative test could never fire.  Only the outer
    loop owes the spectral-norm criterion.
    """
    B = 0.5 * np.eye(r) if init is None else init
    anchor = 0.5 * float(np.sqrt(r))
    den = max(float(np.linalg.norm(B)), anchor)
    count = 0
    for count in range(1, INNER_CAP + 1):
        Bn = step(B)
        num = float(np.linalg.norm(Bn - B))
        B = Bn
        stop = num <= inner_tol * den
        den = max(float(np.linalg.norm(B)), anchor)
        if stop:
            return B, count
    warnings.append(f"{label} inner solve hit the {INNER_CAP}-step cap")
    return B, count


def _psd_part(M: np.ndarray) -> np.ndarray:
    """Zero out negative eigenvalues."""
    w, V = np.linalg.eigh(symmetrize(M))
    w = np.maximum(w, 0.0)
    return symmetrize((V * w) @ V.T)


def _rel_change(new: np.ndarray, prev: np.ndarray, floor: float) -> float:
    return spectral_norm(new - prev) / max(spectral_norm(prev), floor)


def _warm_start(bt, M: np.ndarray, scale_eps: float,
                tol: Tolerances) -> np.ndarray | None:
    """Previous outer iterate mapped into the current reduced box, or None.

    The previous covariance is feasible for the new constraint by
    construction (each subproblem was solved under the other variable's
    budget), so its transform lands in [0, I] up to roundoff and only
    needs the clamped projection.  Warm-starting the inner loops at it
    removes the cost of re-approaching a boundary-active solution from
    I/2 on every outer pass.  A block that is numerically zero carries no
    information; the inner loop then starts from I/2.
    """
    if spectral_norm(M) <= scale_eps:
        return None
    head = symmetrize(transform(bt, M)[:bt.rank, :bt.rank])
    return project_box(head, tol)


def solve_common(inst: CommonInstance, opts: SolveOptions = SolveOptions()) -> CommonSolveReport:
    """Alternate the K_V and K_U subproblems until the iterates settle.

    Starts from K_U = K_C/2.  Each outer pass reduces the current
    constraint, runs the matching inner fixed-point solve, and lifts the
    result back.  Inner solves run to a tolerance of opts.rel_tol/10;
    they start from I/2 on the first pass and from the previous outer
    iterate (mapped into the new coordinates) afterwards; any strictly
    interior start is admissible, and the warm one avoids re-paying the
    slow approach to boundary-active solutions each pass.  The outer
    loop stops when the summed relative spectral-norm changes of K_U and
    K_V fall below opts.rel_tol, or after opts.max_iters passes.
    """
    opts.validate()
    tol = opts.tol
    inst.validate(tol)
    t0 = time.perf_counter()
    n = inst.n
    K_C = symmetrize(inst.K_C)
    S1 = symmetrize(inst.Sigma1)
    S2 = symmetrize(inst.Sigma2)
    l0 = float(inst.lambda0)
    l2 = float(inst.lambda2)
    a = float(inst.alpha)
    ratio = l0 * a / (l2 - l0 * (1.0 - a))
    inner_tol = float(opts.rel_tol) / 10.0

    zero = np.zeros((n, n))
    wc = eig_sym(K_C, tol).values
    if wc[0] <= tol.rank_eps:
        return CommonSolveReport(
            K_U=zero, K_V=zero, K_W=zero,
            objective_trace=np.array([objective_common(zero, zero, inst, tol)]),
            inner_iterations=((), ()),
            converged=True,
            elapsed_seconds=time.perf_counter() - t0,
            warnings=("constraint matrix is zero; all covariances are zero",),
        )

    K_U = symmetrize(K_C / 2.0)
    K_V = zero
    # blocks and budgets below this scale are numerically zero
    scale_eps = tol.rank_eps * (1.0 + spectral_norm(K_C))
    warnings: list[str] = []
    kv_counts: list[int] = []
    ku_counts: list[int] = []
    trace = [objective_common(K_U, K_V, inst, tol)]
    rels: list[float] = []
    converged = False

    for _ in range(1, int(opts.max_iters) + 1):
        K_U_prev = K_U
        K_V_prev = K_V

        # K_V pass under the constraint K_C - K_U
        budget = symmetrize(K_C - K_U)
        if spectral_norm(budget) <= scale_eps:
            K_V = zero
            kv_counts.append(0)
        else:
            try:
                bt = box_transform(budget, tol)
            except DegenerateInstanceError:
                K_V = zero
                kv_counts.append(0)
            else:
                N1h = schur_head(transform(bt, K_U + S2), bt.rank)
                N2h = schur_head(transform(bt, K_U + S1), bt.rank)
                B, cnt = _inner_solve(
                    lambda B: kv_subproblem_step(B, N1h, N2h, ratio, tol),
                    bt.rank, inner_tol, warnings, "K_V",
                    init=_warm_start(bt, K_V, scale_eps, tol))
                K_V = lift(bt, B, tol)
                kv_counts.append(cnt)

        # K_U pass under the constraint K_C - K_V
        budget = symmetrize(K_C - K_V)
        if spectral_norm(budget) <= scale_eps:
            K_U = zero
            ku_counts.append(0)
        else:
            try:
                bt2 = box_transform(budget, tol)
            except DegenerateInstanceError:
                K_U = zero
                ku_counts.append(0)
            else:
                r2 = bt2.rank
                S1h = schur_head(transform(bt2, S1), r2)
                S2h = schur_head(transform(bt2, S2), r2)
                M1h = schur_head(transform(bt2, K_V + S2), r2)
                M2h = schur_head(transform(bt2, K_V + S1), r2)
                BVp = transform(bt2, K_V)[:r2, :r2]
                A, cnt = _inner_solve(
                    lambda A: ku_subproblem_step(
                        A, S1h, S2h, M1h, M2h, BVp, inst, tol),
                    r2, inner_tol, warnings, "K_U",
                    init=_warm_start(bt2, K_U, scale_eps, tol))
                K_U = lift(bt2, A, tol)
                ku_counts.append(cnt)

        trace.append(objective_common(K_U, K_V, inst, tol))
        rel = (_rel_change(K_U, K_U_prev, scale_eps)
               + _rel_change(K_V, K_V_prev, scale_eps))
        rels.append(rel)
        if rel <= float(opts.rel_tol):
            converged = True
            break

    if not (loewner_leq(zero, K_U) and loewner_leq(zero, K_V)
            and loewner_leq(K_U + K_V, K_C)):
        warnings.append("final covariances violate feasibility beyond slack 1e-8")
    drops = np.diff(np.asarray(trace))
    if drops.size and float(np.min(drops)) < -1e-6:
        warnings.append(
            f"objective decreased by {-float(np.min(drops)):.3e} across an outer pass"
        )

    return CommonSolveReport(
        K_U=K_U,
        K_V=K_V,
        K_W=_psd_part(K_C - K_U - K_V),
        objective_trace=np.asarray(trace),
        inner_iterations=(tuple(kv_counts), tuple(ku_counts)),
        converged=converged,
        elapsed_seconds=time.perf_counter() - t0,
        warnings=tuple(warnings),
        step_rel_changes=np.asarray(rels),
    )
