"""Command-line front end.

Subcommands: solve (one weighted-rate maximization), trace-region
(boundary sweep), oracle (brute-force grid search), bench (random-
instance benchmark table).  Instances are JSON documents; results are
JSON on stdout or CSV files.  Outputs are deterministic for fixed
inputs and seeds once timing fields are suppressed with --no-timing.

Exit codes: 0 success, 1 invalid input or runtime failure, 2 solve ran
but did not converge within the iteration cap (results still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .common import CommonInstance, solve_common
from .errors import GbcError, InvalidInputError
from .oracle import GridSpec, grid_search_common_scalar, grid_search_private_2x2, random_instance
from .private import Algorithm, SolveOptions, solve_private
from .psd import symmetrize
from .reduction import PrivateInstance
from .region import rates_common, rates_private, sweep_alpha_common, trace_region_private

_PRIVATE_ALGOS = {"gba-p": Algorithm.GBA_P, "gba-a": Algorithm.GBA_A}


def _note(msg: str) -> None:
    print(f"note: {msg}", file=sys.stderr)


def _matrix_from(doc: dict, key: str, n: int) -> np.ndarray:
    if key not in doc:
        raise InvalidInputError(f"instance file is missing the {key!r} field")
    M = np.asarray(doc[key], dtype=float)
    if M.shape != (n, n):
        raise InvalidInputError(
            f"{key} must be an {n}x{n} array, got shape {M.shape}"
        )
    asym = float(np.max(np.abs(M - M.T))) if n else 0.0
    if asym > 1e-8:
        _note(f"{key} asymmetry {asym:.3e} exceeds 1e-8; averaging with transpose")
    return symmetrize(M)


def _scalar_from(doc: dict, key: str) -> float:
    if key not in doc:
        raise InvalidInputError(f"instance file is missing the {key!r} field")
    return float(doc[key])


def load_instance(path: str) -> PrivateInstance | CommonInstance:
    """Load and validate a JSON instance file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InvalidInputError("instance file must contain a JSON object")
    kind = doc.get("kind")
    if kind not in ("private", "common"):
        raise InvalidInputError(
            f"instance 'kind' must be 'private' or 'common', got {kind!r}"
        )
    n = int(_scalar_from(doc, "n"))
    S1 = _matrix_from(doc, "Sigma1", n)
    S2 = _matrix_from(doc, "Sigma2", n)
    if kind == "private":
        inst = PrivateInstance(
            K=_matrix_from(doc, "K", n), Sigma1=S1, Sigma2=S2,
            lam=_scalar_from(doc, "lambda"),
        )
    else:
        inst = CommonInstance(
            K_C=_matrix_from(doc, "K_C", n), Sigma1=S1, Sigma2=S2,
            lambda0=_scalar_from(doc, "lambda0"),
            lambda1=_scalar_from(doc, "lambda1"),
            lambda2=_scalar_from(doc, "lambda2"),
            alpha=_scalar_from(doc, "alpha"),
        )
    inst.validate()
    return inst


def _mat(M: np.ndarray) -> list:
    return symmetrize(np.asarray(M, dtype=float)).tolist()


def _emit_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_rows(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _write_trace(path: str, trace: np.ndarray, rels: np.ndarray, summary: dict) -> None:
    rows = [["0", repr(float(trace[0])), ""]]
    for i in range(1, len(trace)):
        rel = repr(float(rels[i - 1])) if i - 1 < len(rels) else ""
        rows.append([str(i), repr(float(trace[i])), rel])
    _write_rows(path, ["iter", "objective", "step_rel_change"], rows)
    with open(path + ".json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidInputError(f"could not parse {what} list {text!r}: {exc}")
    if not vals:
        raise InvalidInputError(f"{what} list is empty")
    return vals


def _parse_ints(text: str, what: str) -> list[int]:
    try:
        vals = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidInputError(f"could not parse {what} list {text!r}: {exc}")
    if not vals:
        raise InvalidInputError(f"{what} list is empty")
    return vals


def _solve_options(args, algorithm: Algorithm = Algorithm.GBA_P) -> SolveOptions:
    return SolveOptions(algorithm=algorithm, max_iters=args.max_iters,
                        rel_tol=args.rel_tol)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    if isinstance(inst, PrivateInstance):
        if args.algorithm not in _PRIVATE_ALGOS:
            raise InvalidInputError(
                f"algorithm {args.algorithm!r} requires a common instance"
            )
        opts = _solve_options(args, _PRIVATE_ALGOS[args.algorithm])
        rep = solve_private(inst, opts)
        pt = rates_private(rep.final_KU, inst)
        result = {
            "kind": "private",
            "algorithm": args.algorithm,
            "converged": bool(rep.converged),
            "iterations": int(rep.iterations),
            "objective": float(rep.objective),
            "stationarity_residual": float(rep.stationarity_residual),
            "K_U": _mat(rep.final_KU),
            "K_V": _mat(inst.K - rep.final_KU),
            "rates": {"R0": pt.R0, "R1": pt.R1, "R2": pt.R2},
            "warnings": list(rep.warnings),
        }
    else:
        if args.algorithm != "egba-p":
            raise InvalidInputError(
                f"algorithm {args.algorithm!r} requires a private instance"
            )
        opts = _solve_options(args)
        rep = solve_common(inst, opts)
        pt = rates_common(rep.K_U, rep.K_V, inst)
        result = {
            "kind": "common",
            "algorithm": "egba-p",
            "converged": bool(rep.converged),
            "outer_passes": int(len(rep.step_rel_changes)),
            "inner_iterations": {
                "K_V": list(rep.inner_iterations[0]),
                "K_U": list(rep.inner_iterations[1]),
            },
            "objective": float(rep.objective),
            "K_U": _mat(rep.K_U),
            "K_V": _mat(rep.K_V),
            "K_W": _mat(rep.K_W),
            "rates": {"R0": pt.R0, "R1": pt.R1, "R2": pt.R2},
            "warnings": list(rep.warnings),
        }
    if not args.no_timing:
        result["elapsed_seconds"] = float(rep.elapsed_seconds)
    if args.trace_out:
        _write_trace(args.trace_out, np.asarray(rep.objective_trace),
                     np.asarray(rep.step_rel_changes), result)
    _emit_json(result, args.json_out)
    return 0 if rep.converged else 2


def cmd_trace_region(args) -> int:
    inst = load_instance(args.instance)
    if args.lambdas is None and args.alpha_grid is None:
        raise InvalidInputError("provide --lambdas (private) or --alpha-grid (common)")
    if args.lambdas is not None and args.alpha_grid is not None:
        raise InvalidInputError("--lambdas and --alpha-grid are mutually exclusive")

    if args.lambdas is not None:
        if not isinstance(inst, PrivateInstance):
            raise InvalidInputError("--lambdas requires a private instance")
        lams = _parse_floats(args.lambdas, "lambda")
        if lams != sorted(lams):
            _note("lambda values were not ascending; output rows are sorted ascending")
        algo = _PRIVATE_ALGOS.get(args.algorithm)
        if algo is None:
            raise InvalidInputError(
                f"algorithm {args.algorithm!r} requires a common instance"
            )
        points = trace_region_private(inst, lams, _solve_options(args, algo))
        rows = []
        failed = False
        for pt in points:
            if pt.error:
                failed = True
                _note(f"lambda={pt.lambda_tag:g}: {pt.error}")
            rows.append([repr(float(pt.lambda_tag)), repr(pt.R1), repr(pt.R2),
                         repr(pt.objective), str(pt.iterations)])
        _write_rows(args.csv_out, ["lambda", "R1", "R2", "objective", "iterations"],
                    rows)
        return 2 if failed else 0

    if not isinstance(inst, CommonInstance):
        raise InvalidInputError("--alpha-grid requires a common instance")
    alphas = _parse_floats(args.alpha_grid, "alpha")
    if alphas != sorted(alphas):
        _note("alpha values were not ascending; output rows follow the input order")
    reports, argmin = sweep_alpha_common(inst, alphas, _solve_options(args))
    rows = []
    failed = False
    nan = repr(float("nan"))
    for a, rep in zip(alphas, reports):
        if rep is None:
            failed = True
            _note(f"alpha={a:g} skipped: weight combination infeasible")
            rows.append([repr(float(inst.lambda0)), nan, nan, nan,
                         repr(float(a)), nan, "0"])
            continue
        cinst = CommonInstance(K_C=inst.K_C, Sigma1=inst.Sigma1,
                               Sigma2=inst.Sigma2, lambda0=inst.lambda0,
                               lambda1=inst.lambda1, lambda2=inst.lambda2,
                               alpha=a)
        pt = rates_common(rep.K_U, rep.K_V, cinst)
        rows.append([repr(float(inst.lambda0)), repr(pt.R1), repr(pt.R2),
                     repr(pt.R0), repr(float(a)), repr(float(rep.objective)),
                     str(len(rep.step_rel_changes))])
    _write_rows(args.csv_out,
                ["lambda", "R1", "R2", "R0", "alpha", "objective", "iterations"],
                rows)
    summary = {"alpha_argmin": argmin.alpha, "weighted_rate": argmin.value}
    if args.csv_out:
        _emit_json(summary, None)
    else:
        _note(f"alpha argmin {argmin.alpha:g} with weighted rate {argmin.value:.9g}")
    return 2 if failed else 0


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    if isinstance(inst, PrivateInstance):
        spec = GridSpec(resolution=args.resolution or 400)
        res = grid_search_private_2x2(inst, spec)
    else:
        spec = GridSpec(resolution=args.resolution or 2000)
        res = grid_search_common_scalar(inst, spec)
    result = {
        "best_KU": _mat(res.best_KU),
        "best_objective": float(res.best_objective),
        "resolution_bound": float(res.resolution_bound),
        "resolution": spec.resolution,
    }
    if res.best_KV is not None:
        result["best_KV"] = _mat(res.best_KV)
    _emit_json(result, args.json_out)
    return 0


def _bench_cell(n: int, seed: int, name: str, args) -> list[str]:
    try:
        inst = random_instance(n, seed, "private")
        rep = solve_private(inst, _solve_options(args, _PRIVATE_ALGOS[name]))
        iters, conv = rep.iterations, rep.converged
        secs, obj = rep.elapsed_seconds, rep.objective
    except GbcError:
        iters, conv, secs, obj = 0, False, 0.0, float("nan")
    seconds = "" if args.no_timing else f"{secs:.6f}"
    return [str(n), str(seed), name, str(iters), str(bool(conv)), seconds,
            repr(float(obj))]


def cmd_bench(args) -> int:
    ns = _parse_ints(args.n_list, "n")
    if any(n < 1 for n in ns):
        raise InvalidInputError("every n must be at least 1")
    if "," in args.seeds:
        seeds = _parse_ints(args.seeds, "seed")
    else:
        count = int(args.seeds)
        if count < 1:
            raise InvalidInputError("seed count must be at least 1")
        seeds = list(range(count))
    names = [tok.strip() for tok in args.algorithms.split(",") if tok.strip()]
    for name in names:
        if name not in _PRIVATE_ALGOS:
            raise InvalidInputError(f"unknown benchmark algorithm {name!r}")
    if not names:
        raise InvalidInputError("algorithm list is empty")

    cells = [(n, seed, name) for n in ns for seed in seeds for name in names]
    workers = max(1, int(os.environ.get("GBC_THREADS")
                         or (os.cpu_count() or 1)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: _bench_cell(*c, args), cells))
    else:
        rows = [_bench_cell(*c, args) for c in cells]
    rows.sort(key=lambda r: (int(r[0]), int(r[1]), r[2]))
    _write_rows(args.csv_out,
                ["n", "seed", "algorithm", "iterations", "converged",
                 "seconds", "final_objective"],
                rows)
    return 0


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=SolveOptions().rel_tol,
                   help="relative stopping tolerance (default %(default)s)")
    p.add_argument("--max-iters", type=int, default=SolveOptions().max_iters,
                   help="iteration cap (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbc",
        description="Boundary points of two-receiver Gaussian vector "
                    "broadcast-channel capacity regions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one weighted-rate maximization")
    p.add_argument("instance", help="path to a JSON instance file")
    p.add_argument("--algorithm", default="gba-p",
                   choices=["gba-p", "gba-a", "egba-p"],
                   help="gba-p/gba-a for private instances, egba-p for common")
    _add_solver_flags(p)
    p.add_argument("--trace-out", help="write per-iteration CSV here "
                                       "(JSON summary sidecar at PATH.json)")
    p.add_argument("--json-out", help="write the result JSON here instead of stdout")
    p.add_argument("--no-timing", action="store_true",
                   help="omit timing fields for byte-identical output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("trace-region", help="sweep weights and emit rate points")
    p.add_argument("instance", help="path to a JSON instance file")
    p.add_argument("--lambdas", help="comma-separated lambda values (private)")
    p.add_argument("--alpha-grid", help="comma-separated alpha values (common)")
    p.add_argument("--algorithm", default="gba-p", choices=["gba-p", "gba-a"],
                   help="private-instance algorithm (default %(default)s)")
    _add_solver_flags(p)
    p.add_argument("--csv-out", help="write rate points here instead of stdout")
    p.set_defaults(func=cmd_trace_region)

    p = sub.add_parser("oracle", help="brute-force grid search (n=2 private, n=1 common)")
    p.add_argument("instance", help="path to a JSON instance file")
    p.add_argument("--resolution", type=int, default=None,
                   help="grid points per axis (default 400 private, 2000 common)")
    p.add_argument("--json-out", help="write the result JSON here instead of stdout")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="benchmark table over random instances")
    p.add_argument("--n-list", required=True,
                   help="comma-separated dimensions, e.g. 100,200,500")
    p.add_argument("--seeds", default="3",
                   help="seed count (single integer) or comma-separated seed list")
    p.add_argument("--algorithms", default="gba-p,gba-a",
                   help="comma-separated subset of gba-p,gba-a")
    _add_solver_flags(p)
    p.add_argument("--csv-out", help="write the table here instead of stdout")
    p.add_argument("--no-timing", action="store_true",
                   help="leave the seconds column empty for byte-identical output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GbcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
