"""Fixed-point solvers for the private-message weighted rate problem.

Both algorithms maximize logdet(A_U + SigmaHat1) - lam * logdet(A_U +
SigmaHat2) over the box {0 <= A_U <= I} produced by the rank reduction:

GBA-P applies the unconstrained fixed-point update and projects the
result back onto the box by eigenvalue clipping.

GBA-A alternates closed-form coordinate updates: it assembles the
difference matrix B = D_U - lam * D_V from the current iterate, then
rebuilds the iterate eigenvalue by eigenvalue, each one the unique root
in (0, 1) of a scalar quadratic.  Its objective trace is non-decreasing.

Both stop when the spectral norm of the iterate change falls below
rel_tol times the spectral norm of the previous iterate.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInstanceError,
    InvalidInputError,
    NumericalBreakdownError,
)
from .psd import DEFAULT_TOL, Tolerances, logdet, project_box, symmetrize
from .reduction import PrivateInstance, ReducedPrivate, lift, reduce


class Algorithm(enum.Enum):
    """Private-message solver selector."""

    GBA_P = "gba-p"
    GBA_A = "gba-a"


class InitStrategy(enum.Enum):
    """Named starting points for the reduced iterate.

    HALF_IDENTITY   A_U = I/2
    UNIFORM_WEIGHT  A_U = I/(1 + lam)

    Passing an ndarray to SolveOptions.init instead of a member uses that
    matrix as the starting point (projected onto the clamped box).
    """

    HALF_IDENTITY = "half-identity"
    UNIFORM_WEIGHT = "uniform-weight"


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for solve_private and solve_common.

    algorithm   which private-message iteration to run
    max_iters   iteration cap (outer cap for the common solver)
    rel_tol     relative spectral-norm stopping threshold
    tol         numeric kernel thresholds
    init        InitStrategy member or an explicit reduced starting matrix
    """

    algorithm: Algorithm = Algorithm.GBA_P
    max_iters: int = 100
    rel_tol: float = 1e-4
    tol: Tolerances = DEFAULT_TOL
    init: InitStrategy | np.ndarray = InitStrategy.HALF_IDENTITY

    def validate(self) -> None:
        if not isinstance(self.algorithm, Algorithm):
            raise InvalidInputError(f"unknown algorithm {self.algorithm!r}")
        if int(self.max_iters) < 1:
            raise InvalidInputError("max_iters must be at least 1")
        if not (float(self.rel_tol) > 0.0 and np.isfinite(self.rel_tol)):
            raise InvalidInputError("rel_tol must be a positive finite real")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one private-message solve.

    final_AU            last iterate in reduced coordinates
    final_KU            the lifted covariance in original coordinates
    objective_trace     objective value in original coordinates at the
                        initial point and after every iteration
    iterations          number of update steps taken
    converged           whether the stopping rule fired before the cap
    stationarity_residual
                        Frobenius distance of final_AU from being a fixed
                        point of the unprojected update, relative to
                        ||final_AU||_F; small values certify interior
                        stationarity
    elapsed_seconds     wall-clock time of the solve
    warnings            human-readable notes (conditioning, clamped init)
    iterate_eig_min     smallest eigenvalue seen across all iterates
    iterate_eig_max     largest eigenvalue seen across all iterates
    step_rel_changes    per-step relative spectral-norm changes
    """

    final_AU: np.ndarray
    final_KU: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    converged: bool
    stationarity_residual: float
    elapsed_seconds: float
    warnings: tuple[str, ...] = ()
    iterate_eig_min: float = 0.0
    iterate_eig_max: float = 0.0
    step_rel_changes: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


@dataclass(frozen=True)
class FixedPointFields:
    """Quadratic-form matrices evaluated at one reduced iterate.

    D_U     (A_U SigmaHat1^{-1} A_U + A_U)^{-1}
    D_V     (I - A_U)^{-1} - (A_U + SigmaHat2)^{-1}
    Gamma   lam * (A_U + SigmaHat2)^{-1}, the active-constraint multiplier
    B       D_U - lam * D_V, the matrix whose eigenvalues drive GBA-A
    """

    D_U: np.ndarray
    D_V: np.ndarray
    Gamma: np.ndarray
    B: np.ndarray


def objective_reduced(A_U: np.ndarray, red: ReducedPrivate, lam: float) -> float:
    """Reduced objective logdet(A_U + SigmaHat1) - lam * logdet(A_U + SigmaHat2)."""
    A = symmetrize(A_U)
    return logdet(A + red.SigmaHat1) - float(lam) * logdet(A + red.SigmaHat2)


def gradient_reduced(A_U: np.ndarray, red: ReducedPrivate, lam: float) -> np.ndarray:
    """Gradient of the reduced objective: (A+SigmaHat1)^{-1} - lam (A+SigmaHat2)^{-1}."""
    A = symmetrize(A_U)
    try:
        G1 = np.linalg.inv(A + red.SigmaHat1)
        G2 = np.linalg.inv(A + red.SigmaHat2)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"gradient inverses failed: {e}") from e
    return symmetrize(G1 - float(lam) * G2)


def root_in_unit_interval(b, lam):
    """Root in (0, 1) of b*a^2 - (lam + 1 + b)*a + 1 = 0 for lam > 1.

    Accepts a scalar or an array of b values.  Evaluated in the
    subtraction-free form 2/(s + sqrt(s^2 - 4b)) with s = lam + 1 + b,
    which is stable for either sign of b; b = 0 (where the quadratic
    degenerates to a linear equation) returns exactly 1/(1 + lam).
    """
    lam_arr = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam_arr)) or np.any(lam_arr <= 1.0):
        raise InvalidInputError(f"lam must be a finite weight > 1, got {lam}")
    b_arr = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b_arr)):
        raise InvalidInputError("b must be finite")
    s = lam_arr + 1.0 + b_arr
    disc = s * s - 4.0 * b_arr
    with np.errstate(divide="ignore"):
        root = 2.0 / (s + np.sqrt(disc))
    root = np.where(b_arr == 0.0, 1.0 / (1.0 + lam_arr), root)
    if root.ndim == 0:
        return float(root)
    return root


def fixed_point_fields(A_U: np.ndarray, red: ReducedPrivate, lam: float,
                       tol: Tolerances = DEFAULT_TOL) -> FixedPointFields:
    """Evaluate the quadratic-form matrices at a strictly interior iterate."""
    A = symmetrize(A_U)
    lam = float(lam)
    r = red.rank
    try:
        H1i = np.linalg.inv(red.SigmaHat1)
        D_U = np.linalg.inv(A @ H1i @ A + A)
        S2inv = np.linalg.inv(A + red.SigmaHat2)
        D_V = np.linalg.inv(np.eye(r) - A) - S2inv
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(
            f"fixed-point fields need a strictly interior iterate: {e}"
        ) from e
    D_U = symmetrize(D_U)
    D_V = symmetrize(D_V)
    return FixedPointFields(
        D_U=D_U,
        D_V=D_V,
        Gamma=symmetrize(lam * S2inv),
        B=symmetrize(D_U - lam * D_V),
    )


def _check_reduced_box(A: np.ndarray, rank: int, slack: float = 1e-8) -> np.ndarray:
    """Symmetrize and verify an iterate lies in the [0, I] box up to slack."""
    A = symmetrize(A)
    if A.shape != (rank, rank):
        raise InvalidInputError(
            f"reduced iterate must be {rank}x{rank}, got {A.shape}"
        )
    w = np.linalg.eigvalsh(A)
    if w.size and (w[0] < -slack or w[-1] > 1.0 + slack):
        raise InvalidInputError(
            f"iterate leaves the [0, I] box (eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}])"
        )
    return A


def _p_step_raw(A: np.ndarray, H1i: np.ndarray, H2: np.ndarray, lam: float) -> np.ndarray:
    """Unprojected fixed-point update of GBA-P."""
    try:
        T = A @ H1i @ A + A
        return np.linalg.inv(np.linalg.inv(T) + lam * np.linalg.inv(A + H2))
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"fixed-point update failed: {e}") from e


def _p_step(A: np.ndarray, H1i: np.ndarray, H2: np.ndarray, lam: float,
            tol: Tolerances) -> np.ndarray:
    return project_box(_p_step_raw(A, H1i, H2, lam), tol)


def _a_step(A: np.ndarray, H1i: np.ndarray, H2: np.ndarray, lam: float,
            tol: Tolerances) -> np.ndarray:
    r = A.shape[0]
    try:
        D_U = np.linalg.inv(A @ H1i @ A + A)
        D_V = np.linalg.inv(np.eye(r) - A) - np.linalg.inv(A + H2)
        b, H = np.linalg.eigh(symmetrize(D_U - lam * D_V))
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"coordinate update failed: {e}") from e
    a = np.clip(root_in_unit_interval(b, lam), tol.pd_floor, 1.0 - tol.pd_floor)
    return symmetrize((H * a) @ H.T)


def gba_p_step(A_U: np.ndarray, red: ReducedPrivate, lam: float,
               tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """One projected fixed-point step from a feasible reduced iterate."""
    A = _check_reduced_box(A_U, red.rank)
    try:
        H1i = np.linalg.inv(red.SigmaHat1)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"noise inverse failed: {e}") from e
    return _p_step(A, H1i, red.SigmaHat2, float(lam), tol)


def gba_a_step(A_U: np.ndarray, red: ReducedPrivate, lam: float,
               tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """One alternating closed-form step from a strictly interior iterate."""
    A = _check_reduced_box(A_U, red.rank)
    try:
        H1i = np.linalg.inv(red.SigmaHat1)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"noise inverse failed: {e}") from e
    return _a_step(A, H1i, red.SigmaHat2, float(lam), tol)


def _fast_objective(A: np.ndarray, H1: np.ndarray, H2: np.ndarray, lam: float) -> float:
    """Reduced objective via LU log-determinants; iterates keep both PD."""
    s1, ld1 = np.linalg.slogdet(A + H1)
    s2, ld2 = np.linalg.slogdet(A + H2)
    if s1 <= 0.0 or s2 <= 0.0:
        raise NumericalBreakdownError("iterate lost positive definiteness")
    return float(ld1 - lam * ld2)


def _initial_iterate(opts: SolveOptions, red: ReducedPrivate,
                     warnings: list[str]) -> np.ndarray:
    r = red.rank
    if isinstance(opts.init, InitStrategy):
        if opts.init is InitStrategy.HALF_IDENTITY:
            return 0.5 * np.eye(r)
        return np.eye(r) / (1.0 + red.lam)
    A0 = symmetrize(np.asarray(opts.init, dtype=float))
    if A0.shape != (r, r):
        raise InvalidInputError(
            f"init matrix must be {r}x{r} for this instance, got {A0.shape}"
        )
    clamped = project_box(A0, opts.tol)
    if float(np.max(np.abs(clamped - A0))) > 1e-8:
        warnings.append("starting point was projected onto the clamped box")
    return clamped


def _degenerate_report(inst: PrivateInstance, t0: float,
                       tol: Tolerances) -> SolveReport:
    n = inst.n
    obj = logdet(np.asarray(inst.Sigma1, float), tol) \
        - float(inst.lam) * logdet(np.asarray(inst.Sigma2, float), tol)
    return SolveReport(
        final_AU=np.zeros((0, 0)),
        final_KU=np.zeros((n, n)),
        objective_trace=np.array([obj]),
        iterations=0,
        converged=True,
        stationarity_residual=0.0,
        elapsed_seconds=time.perf_counter() - t0,
        warnings=("constraint matrix is zero; K_U = 0 is the only feasible point",),
    )


def solve_private(inst: PrivateInstance, opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Run the selected iteration on a private-message instance.

    The instance is reduced to its r x r box form, iterated from
    opts.init until the relative spectral-norm change of the iterate
    falls below opts.rel_tol or opts.max_iters steps have run, and the
    final iterate is lifted back to original coordinates.  The objective
    trace is reported in original coordinates (reduced value plus the
    reduction offset) with one entry per iterate including the start.
    """
    opts.validate()
    tol = opts.tol
    inst.validate(tol)
    t0 = time.perf_counter()
    try:
        red = reduce(inst, tol)
    except DegenerateInstanceError:
        return _degenerate_report(inst, t0, tol)

    lam = red.lam
    warnings = list(red.warnings)
    A = _initial_iterate(opts, red, warnings)
    try:
        H1i = np.linalg.inv(red.SigmaHat1)
    except np.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"noise inverse failed: {e}") from e
    step = _p_step if opts.algorithm is Algorithm.GBA_P else _a_step

    w0 = np.linalg.eigvalsh(A)
    eig_min = float(w0[0])
    eig_max = float(w0[-1])
    den = float(max(abs(w0[0]), abs(w0[-1])))
    trace = [_fast_objective(A, red.SigmaHat1, red.SigmaHat2, lam) + red.offset]
    rels: list[float] = []
    converged = False
    iterations = 0

    for iterations in range(1, int(opts.max_iters) + 1):
        An = step(A, H1i, red.SigmaHat2, lam, tol)
        num = float(np.max(np.abs(np.linalg.eigvalsh(An - A))))
        stop = num <= opts.rel_tol * den
        wN = np.linalg.eigvalsh(An)
        eig_min = min(eig_min, float(wN[0]))
        eig_max = max(eig_max, float(wN[-1]))
        trace.append(_fast_objective(An, red.SigmaHat1, red.SigmaHat2, lam) + red.offset)
        rels.append(num / den if den > 0.0 else 0.0)
        A = An
        den = float(max(abs(wN[0]), abs(wN[-1])))
        if stop:
            converged = True
            break

    raw = _p_step_raw(A, H1i, red.SigmaHat2, lam)
    norm_A = float(np.linalg.norm(A))
    residual = float(np.linalg.norm(A - raw)) / norm_A if norm_A > 0.0 else 0.0

    return SolveReport(
        final_AU=A,
        final_KU=lift(red, A, tol),
        objective_trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
        stationarity_residual=residual,
        elapsed_seconds=time.perf_counter() - t0,
        warnings=tuple(warnings),
        iterate_eig_min=eig_min,
        iterate_eig_max=eig_max,
        step_rel_changes=np.asarray(rels),
    )
