"""FastAPI application wrapping the laboratory.

The service is a thin layer: every endpoint validates its request model,
calls the shared handler, and returns the response model.  Laboratory
errors map to structured HTTP errors carrying the CLI exit code of the
same failure category.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import (
    AccuracyError,
    BudgetError,
    ConditioningError,
    ConfigError,
    LabError,
    PreconditionError,
)
from . import handlers
from . import schemas as sch

_STATUS = {
    ConfigError: 400,
    PreconditionError: 422,
    BudgetError: 413,
    ConditioningError: 500,
    AccuracyError: 500,
}


def create_app() -> FastAPI:
    app = FastAPI(
        title="mollab",
        description=(
            "Numerical laboratory for mollified moments of Dirichlet "
            "L-functions at the central point"
        ),
    )

    @app.exception_handler(LabError)
    async def lab_error_handler(request: Request, exc: LabError):
        status = next(
            (code for cls, code in _STATUS.items() if isinstance(exc, cls)), 500
        )
        body = sch.ErrorBody(
            error=str(exc),
            category=type(exc).__name__,
            exit_code=exc.exit_code,
        )
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/reproduce", response_model=sch.ReproduceResponse)
    def reproduce(req: sch.ReproduceRequest) -> sch.ReproduceResponse:
        return handlers.handle_reproduce(req)

    @app.post("/optimize", response_model=sch.OptimizeResponse)
    def optimize(req: sch.OptimizeRequest) -> sch.OptimizeResponse:
        return handlers.handle_optimize(req)

    @app.post("/scan", response_model=sch.ScanResponse)
    def scan(req: sch.ScanRequest) -> sch.ScanResponse:
        return handlers.handle_scan(req)

    @app.post("/kernels/eval", response_model=sch.KernelEvalResponse)
    def kernels_eval(req: sch.KernelEvalRequest) -> sch.KernelEvalResponse:
        return handlers.handle_kernel_eval(req)

    @app.get("/characters/{q}", response_model=sch.CharactersResponse)
    def characters(q: int) -> sch.CharactersResponse:
        if q < 1:
            raise PreconditionError("modulus must be >= 1")
        return handlers.handle_characters(q)

    @app.post("/lfun/eval", response_model=sch.LfunEvalResponse)
    def lfun_eval(req: sch.LfunEvalRequest) -> sch.LfunEvalResponse:
        return handlers.handle_lfun_eval(req)

    @app.post("/moments/sweep", response_model=sch.SweepResponse)
    def moments_sweep(req: sch.SweepRequest) -> sch.SweepResponse:
        return handlers.handle_sweep(req)

    @app.post("/kloosterman/bench", response_model=sch.KloostermanBenchResponse)
    def kloosterman_bench(
        req: sch.KloostermanBenchRequest,
    ) -> sch.KloostermanBenchResponse:
        return handlers.handle_kloosterman_bench(req)

    return app


app = create_app()
