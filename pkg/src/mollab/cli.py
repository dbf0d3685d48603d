"""Command-line client for the laboratory.

Each subcommand builds the same request model the HTTP service accepts
and either dispatches it in process (default) or POSTs it to a running
service instance (`--server URL`).  Reports are printed as JSON with 15
significant digits; tabular modes can also write CSV.

Exit codes: 0 success, 2 usage/config, 3 precondition, 4 conditioning,
5 accuracy, 6 budget.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path
from typing import Any

from .errors import ConfigError, LabError
from .runconfig import parse_config_file
from .service import handlers
from .service import schemas as sch

OUTPUT_DIR_ENV = "MOLLAB_OUTPUT_DIR"


def _format_floats(obj: Any) -> Any:
    """Round-trip floats through %.15g so reports carry 15 significant digits."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.15g}")
        return obj
    if isinstance(obj, dict):
        return {k: _format_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_format_floats(v) for v in obj]
    return obj


def _emit(payload: dict, args, csv_rows: list[dict] | None = None) -> None:
    text = json.dumps(_format_floats(payload), indent=2)
    print(text)
    out_path = args.output
    if out_path is None and os.environ.get(OUTPUT_DIR_ENV):
        out_path = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.mode_name}.json")
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(text + "\n")
    if csv_rows and (args.csv or out_path):
        csv_path = (
            Path(args.csv)
            if args.csv
            else Path(out_path).with_suffix(".csv")
        )
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(csv_rows[0]))
            writer.writeheader()
            for row in csv_rows:
                writer.writerow(_format_floats(row))


def _dispatch(args, path: str, request_model, handler):
    """Send the request to a server, or run the handler in process."""
    if args.server:
        import httpx

        response = httpx.post(
            args.server.rstrip("/") + path,
            json=request_model.model_dump(),
            timeout=3600.0,
        )
        if response.status_code != 200:
            body = response.json()
            raise ConfigError(f"server error {response.status_code}: {body}")
        return response.json()
    return handler(request_model).model_dump()


def _load_overrides(args) -> dict:
    if getattr(args, "config", None):
        return parse_config_file(args.config)
    return {}


# ------------------------------------------------------------------- commands


def cmd_reproduce(args) -> None:
    req = sch.ReproduceRequest(degrees=[int(d) for d in args.degrees.split(",")])
    payload = _dispatch(args, "/reproduce", req, handlers.handle_reproduce)
    _emit(payload, args)


def cmd_optimize(args) -> None:
    overrides = _load_overrides(args)
    req = sch.OptimizeRequest(
        d1=args.d1,
        d2=args.d2,
        d3=args.d3,
        theta1=overrides.get("theta1", args.theta1),
        theta2=overrides.get("theta2", args.theta2),
        theta3=overrides.get("theta3", args.theta3),
    )
    payload = _dispatch(args, "/optimize", req, handlers.handle_optimize)
    _emit(payload, args)


def cmd_scan(args) -> None:
    grid = [float(v) for v in args.grid.split(",")]
    req = sch.ScanRequest(
        theta2_grid=grid,
        degrees=[int(d) for d in args.degrees.split(",")],
        theta13=args.theta13,
    )
    payload = _dispatch(args, "/scan", req, handlers.handle_scan)
    _emit(payload, args, csv_rows=[
        {
            "theta2": row["theta2"],
            "value": row["value"],
            "condition_diagnostic": row["condition_diagnostic"],
        }
        for row in payload["rows"]
    ])


def cmd_kernels_eval(args) -> None:
    req = sch.KernelEvalRequest(
        kernel=args.kernel,
        x=args.x,
        pole_kill=args.pole_kill,
        t_cutoff=args.t_cutoff,
        step=args.step,
        sigma=args.sigma,
    )
    payload = _dispatch(args, "/kernels/eval", req, handlers.handle_kernel_eval)
    _emit(payload, args)


def cmd_characters_dump(args) -> None:
    if args.server:
        import httpx

        response = httpx.get(f"{args.server.rstrip('/')}/characters/{args.q}")
        payload = response.json()
    else:
        payload = handlers.handle_characters(args.q).model_dump()
    _emit(payload, args, csv_rows=[
        {k: v for k, v in row.items()} for row in payload["characters"]
    ])


def cmd_lfun_eval(args) -> None:
    req = sch.LfunEvalRequest(
        q=args.q,
        index=args.index,
        identity_ts=[float(t) for t in args.ts.split(",")],
    )
    payload = _dispatch(args, "/lfun/eval", req, handlers.handle_lfun_eval)
    _emit(payload, args)


def cmd_moments_sweep(args) -> None:
    overrides = _load_overrides(args)
    req = sch.SweepRequest(
        Q=args.Q,
        stride=args.stride,
        workers=args.workers,
        overrides=overrides,
    )
    payload = _dispatch(args, "/moments/sweep", req, handlers.handle_sweep)
    _emit(payload, args, csv_rows=payload["per_q"])


def cmd_kloosterman_bench(args) -> None:
    req = sch.KloostermanBenchRequest(
        scale=args.scale, count=args.count, seed=args.seed
    )
    payload = _dispatch(
        args, "/kloosterman/bench", req, handlers.handle_kloosterman_bench
    )
    _emit(payload, args, csv_rows=payload["rows"])


def cmd_verify(args) -> None:
    from .acceptance import CRITERIA, run_criterion

    wanted = (
        {int(n) for n in args.criteria.split(",")} if args.criteria else None
    )
    results = []
    failed = False
    for item in CRITERIA:
        if wanted is not None and item.number not in wanted:
            continue
        result = run_criterion(item)
        results.append(result)
        verdict = "PASS" if result["passed"] else "FAIL"
        print(
            f"ACCEPTANCE {item.number} ({item.name}): {verdict}  "
            f"[{result['seconds']:.2f}s / limit {item.limit_s:g}s]",
            file=sys.stderr,
        )
        failed = failed or not result["passed"]
    _emit({"results": _format_floats(results)}, args)
    if failed:
        raise LabError("one or more acceptance criteria failed")


def cmd_serve(args) -> None:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)


# --------------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key-value config file")
    p.add_argument("--output", help="write the JSON report here")
    p.add_argument("--csv", help="write the CSV table here (tabular modes)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--server", help="POST to a running service instead")
    p.add_argument("--json", action="store_true", help="accepted for symmetry")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mollab",
        description=(
            "Numerical laboratory for mollified moments of Dirichlet "
            "L-functions: proportion optimization, kernel quadrature, "
            "character arithmetic, moment sweeps, exponential sums."
        ),
        epilog=(
            "Acceptance criteria map to commands as follows: 1 and 3 -> "
            "`reproduce`; 2 -> `optimize` (single-piece and two-piece "
            "degrees); 4 -> `kernels eval`; 5-6 -> `lfun eval`; 7 -> "
            "`characters dump`; 8 and 10 -> `moments sweep`; 9 -> "
            "`kloosterman bench`. `verify [--criteria N,...]` runs any "
            "criterion end to end as a single command."
        ),
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("reproduce", help="reproduce the 0.50073004 proportion")
    p.add_argument("--degrees", default="5,5,2")
    _add_common(p)
    p.set_defaults(func=cmd_reproduce, mode_name="reproduce")

    p = sub.add_parser("optimize", help="maximize the proportion at given degrees")
    p.add_argument("--d1", type=int, default=5)
    p.add_argument("--d2", type=int, default=5)
    p.add_argument("--d3", type=int, default=2)
    p.add_argument("--theta1", type=float, default=0.5)
    p.add_argument("--theta2", type=float, default=0.163)
    p.add_argument("--theta3", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_optimize, mode_name="optimize")

    p = sub.add_parser("scan", help="optimized proportion over a theta2 grid")
    p.add_argument("--grid", required=True, help="comma-separated theta2 values")
    p.add_argument("--degrees", default="5,5,2")
    p.add_argument("--theta13", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_scan, mode_name="scan")

    p = sub.add_parser("kernels", help="kernel operations")
    ksub = p.add_subparsers(dest="kernels_cmd", required=True)
    pe = ksub.add_parser("eval", help="evaluate a kernel at a point")
    pe.add_argument("--kernel", choices=["V", "V1", "F"], required=True)
    pe.add_argument("--x", type=float, required=True)
    pe.add_argument("--pole-kill", dest="pole_kill", type=int, default=2)
    pe.add_argument("--t-cutoff", dest="t_cutoff", type=float, default=60.0)
    pe.add_argument("--step", type=float, default=1.0 / 64)
    pe.add_argument("--sigma", type=float, default=None)
    _add_common(pe)
    pe.set_defaults(func=cmd_kernels_eval, mode_name="kernels")

    p = sub.add_parser("characters", help="character tables")
    csub = p.add_subparsers(dest="characters_cmd", required=True)
    pd = csub.add_parser("dump", help="list characters mod q")
    pd.add_argument("--q", type=int, required=True)
    _add_common(pd)
    pd.set_defaults(func=cmd_characters_dump, mode_name="characters")

    p = sub.add_parser("lfun", help="central values")
    lsub = p.add_subparsers(dest="lfun_cmd", required=True)
    pl = lsub.add_parser("eval", help="central value of one character")
    pl.add_argument("--q", type=int, required=True)
    pl.add_argument("--index", type=int, required=True)
    pl.add_argument("--ts", default="1", help="kernel-swap T values")
    _add_common(pl)
    pl.set_defaults(func=cmd_lfun_eval, mode_name="lfun")

    p = sub.add_parser("moments", help="moment sweeps")
    msub = p.add_subparsers(dest="moments_cmd", required=True)
    pm = msub.add_parser("sweep", help="averaged mollified moments around Q")
    pm.add_argument("--Q", type=float, required=True)
    pm.add_argument("--stride", type=int, default=1)
    _add_common(pm)
    pm.set_defaults(func=cmd_moments_sweep, mode_name="sweep")

    p = sub.add_parser("kloosterman", help="exponential sums")
    klsub = p.add_subparsers(dest="kloosterman_cmd", required=True)
    pk = klsub.add_parser("bench", help="trilinear forms vs the dispersion bound")
    pk.add_argument("--scale", type=int, required=True)
    pk.add_argument("--count", type=int, default=5)
    _add_common(pk)
    pk.set_defaults(func=cmd_kloosterman_bench, mode_name="kloosterman")

    p = sub.add_parser("verify", help="run acceptance criteria")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default all)")
    _add_common(p)
    p.set_defaults(func=cmd_verify, mode_name="verify")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve, mode_name="serve")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except LabError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
