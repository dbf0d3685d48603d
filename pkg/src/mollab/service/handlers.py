"""Mode handlers shared by the HTTP endpoints and the CLI client.

Each handler accepts a validated request model, runs the corresponding
laboratory operation, and returns a response model carrying the fully
resolved configuration for reproducibility.
"""
from __future__ import annotations

from ..characters import enumerate_characters, root_number
from ..errors import PreconditionError
from ..functionals import assemble_quadratic_model, reference_spec
from ..kernels import KernelConfig, default_G, eval_F, eval_V, eval_V1
from ..kloosterman import ratio_report, weil_check
from ..lfunctions import AfeEvaluator, default_evaluator
from ..moments import compute_moments, default_psi
from ..optimizer import maximize_rayleigh, reproduce_benchmark, scan_theta2
from ..runconfig import (
    kernel_config_from,
    resolved_config,
    spec_from_config,
    validate_overrides,
)
from . import schemas as sch


def handle_reproduce(req: sch.ReproduceRequest) -> sch.ReproduceResponse:
    report = reproduce_benchmark(tuple(req.degrees))
    spec = reference_spec()
    return sch.ReproduceResponse(
        fixed_proportion=report["fixed_spec"]["proportion"],
        target=report["target"],
        meets_target=report["meets_target"],
        optimized_value=report["optimized"]["value"],
        optimized_degrees=report["optimized"]["degrees"],
        optimized_coefficients=report["optimized"]["coefficients"],
        condition_diagnostic=report["optimized"]["condition_diagnostic"],
        dominates_fixed=report["optimized"]["dominates_fixed"],
        config=resolved_config(spec, {}),
    )


def handle_optimize(req: sch.OptimizeRequest) -> sch.OptimizeResponse:
    model = assemble_quadratic_model(
        req.d1, req.d2, req.d3, thetas=(req.theta1, req.theta2, req.theta3)
    )
    result = maximize_rayleigh(model)
    return sch.OptimizeResponse(
        value=result.value,
        coefficients=result.coefficients.tolist(),
        condition_diagnostic=result.condition_diagnostic,
        config=resolved_config(result.spec, {}),
    )


def handle_scan(req: sch.ScanRequest) -> sch.ScanResponse:
    table = scan_theta2(req.theta2_grid, tuple(req.degrees), req.theta13)
    spec = reference_spec()
    return sch.ScanResponse(
        rows=[sch.ScanRow(**row) for row in table["rows"]],
        argmax_theta2=table["argmax_theta2"],
        config={
            **resolved_config(spec, {}),
            "degrees": table["degrees"],
            "theta13": table["theta13"],
        },
    )


def handle_kernel_eval(req: sch.KernelEvalRequest) -> sch.KernelEvalResponse:
    cfg = KernelConfig(
        g=default_G(req.pole_kill),
        t_cutoff=req.t_cutoff,
        step=req.step,
        pole_kill_count=req.pole_kill,
    )
    fn = {"V": eval_V, "V1": eval_V1, "F": eval_F}[req.kernel]
    value = fn(req.x, cfg, sigma=req.sigma)
    return sch.KernelEvalResponse(
        kernel=req.kernel,
        x=req.x,
        value=value,
        config={
            "kernel_pole_kill": req.pole_kill,
            "kernel_t_cutoff": req.t_cutoff,
            "kernel_step": req.step,
            "contour_sigma": req.sigma if req.sigma is not None else 1.0,
        },
    )


def handle_characters(q: int) -> sch.CharactersResponse:
    chars = enumerate_characters(q)
    infos = []
    n_star = 0
    n_plus = 0
    for i, chi in enumerate(chars):
        primitive = chi.is_primitive
        even = chi.is_even
        n_star += primitive
        n_plus += primitive and even
        info = sch.CharacterInfo(
            index=i,
            conductor=chi.conductor,
            parity="even" if even else "odd",
            order=chi.order,
            primitive=primitive,
        )
        if primitive:
            eps = root_number(chi)
            info.root_number_re = eps.real
            info.root_number_im = eps.imag
        infos.append(info)
    return sch.CharactersResponse(
        q=q, phi=len(chars), phi_star=n_star, phi_plus=n_plus, characters=infos
    )


def handle_lfun_eval(req: sch.LfunEvalRequest) -> sch.LfunEvalResponse:
    chars = enumerate_characters(req.q)
    if req.index >= len(chars):
        raise PreconditionError(
            f"index {req.index} out of range; phi({req.q}) = {len(chars)}"
        )
    chi = chars[req.index]
    ev = default_evaluator()
    lval = ev.central_value(chi)
    lsq = ev.central_value_sq(chi)
    eps = root_number(chi)
    residuals = {
        str(t): ev.vf_identity_residual(chi, t) for t in req.identity_ts
    }
    spec = reference_spec()
    return sch.LfunEvalResponse(
        q=req.q,
        index=req.index,
        L_re=lval.real,
        L_im=lval.imag,
        L_abs_sq=abs(lval) ** 2,
        L_sq_double_sum=lsq,
        epsilon_re=eps.real,
        epsilon_im=eps.imag,
        identity_residuals=residuals,
        config=resolved_config(spec, {}),
    )


def handle_sweep(req: sch.SweepRequest) -> sch.SweepResponse:
    cfg = validate_overrides(req.overrides)
    spec = spec_from_config(cfg)
    kernel_cfg = kernel_config_from(cfg)
    evaluator = AfeEvaluator(
        kernel_cfg,
        tail_tol=cfg.get("tail_tolerance", 1e-9),
        interp_tol=cfg.get("interp_tolerance", 1e-9),
    )
    stride = cfg.get("stride", req.stride)
    workers = cfg.get("workers", req.workers)
    report = compute_moments(
        req.Q,
        spec,
        psi=default_psi(),
        stride=stride,
        workers=workers,
        evaluator=evaluator,
        vanish_threshold=cfg.get("vanish_threshold", 1e-8),
    )
    full_cfg = resolved_config(
        spec, {**cfg, "Q": req.Q, "stride": stride, "workers": workers}
    )
    return sch.SweepResponse(
        report=report.to_dict(),
        per_q=[sch.PerModulusRow(**row) for row in report.csv_rows()],
        config=full_cfg,
    )


def handle_kloosterman_bench(
    req: sch.KloostermanBenchRequest,
) -> sch.KloostermanBenchResponse:
    rows = ratio_report(req.scale, req.count, req.seed)
    weil = weil_check(min(50, 4 * req.scale))
    return sch.KloostermanBenchResponse(
        rows=[sch.BenchRow(**row) for row in rows],
        weil=weil,
        config={"scale": req.scale, "count": req.count, "seed": req.seed},
    )
