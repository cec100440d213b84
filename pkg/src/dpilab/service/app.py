"""HTTP face of the library: one endpoint per core operation.

Request bodies are the same validated specs the experiment configs use, so a
payload that passes here builds the same objects the CLI would.  Domain and
capability errors map to 422 with the original message; a numerical failure
(quadrature exhaustion, singular matrix) maps to 500.  POST /experiments
runs a whole suite in-process and returns the report document; it never
writes files on the server, so ``out`` and ``formats`` in the body are
ignored.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .. import __version__
from ..cmmse import (
    channel_divergence_gaussian,
    cmmse_combination_check,
    divergence_combination_check,
    epi_from_cmmse_demo,
    gaussian_cmmse_trajectory,
    high_snr_limit_check,
    scalar_channel_divergence_limit,
    simulate_cmmse_paths,
    MIN_STEPS,
)
from ..dpi import (
    alpha_coefficients,
    dpi_check_continuous,
    dpi_check_discrete,
    iid_sum_divergence_sequence,
    pairwise_proportional,
)
from ..epi import divergence_form_equivalence, epi_margin_gaussian, epi_margin_scalar, covariances_proportional
from ..errors import CapabilityError, ConfigError, DomainError, NumericalError
from ..schemas import (
    ContinuousModelSpec,
    DistributionSpec,
    ExperimentConfig,
    ModelSpec,
    SpectrumSpec,
)
from ..suites import run_experiment
from ..toeplitz import szego_convergence_table

app = FastAPI(title="dpilab", version=__version__)


@app.exception_handler(DomainError)
@app.exception_handler(ConfigError)
@app.exception_handler(CapabilityError)
async def _client_error(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse({"detail": str(exc)}, status_code=422)


@app.exception_handler(NumericalError)
async def _numerical_error(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse({"detail": str(exc)}, status_code=500)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AlphaRequest(_Strict):
    spectra: list[SpectrumSpec] = Field(min_length=2)


class DpiDiscreteRequest(_Strict):
    models: list[ModelSpec] = Field(min_length=2)
    tolerance: float = Field(default=1e-6, gt=0)
    seed: int = Field(default=0, ge=0)


class DpiContinuousRequest(_Strict):
    models: list[ContinuousModelSpec] = Field(min_length=2)
    normalization: Literal["per-sample", "per-time"] = "per-sample"
    tolerance: float = Field(default=1e-6, gt=0)


class IidSumRequest(_Strict):
    distribution: DistributionSpec
    n_max: int = Field(default=6, ge=1, le=8)


class SzegoRequest(_Strict):
    spectrum: SpectrumSpec
    sizes: list[int] = Field(default=[64, 128, 256, 512], min_length=1)


class EpiGaussianRequest(_Strict):
    cov_x: list[list[float]]
    cov_y: list[list[float]]


class EpiScalarRequest(_Strict):
    x: DistributionSpec
    y: DistributionSpec


class EpiDivergenceFormRequest(_Strict):
    cov_x: list[list[float]]
    cov_y: list[list[float]]
    d_x: float = Field(ge=0)
    d_y: float = Field(ge=0)
    d_sum: float = Field(ge=0)


class CmmseModesRequest(_Strict):
    lambda_u: list[float] = Field(min_length=1)
    lambda_v: list[float] = Field(min_length=1)
    mixing_angle: float = Field(ge=0, le=math.pi / 2)
    q: float = Field(default=1.0, ge=0)


class CmmseHighSnrRequest(_Strict):
    lambda_u: list[float] = Field(min_length=1)
    lambda_v: list[float] = Field(min_length=1)
    mixing_angle: float = Field(ge=0, le=math.pi / 2)
    q_ladder: list[float] = Field(min_length=2)


class CmmseScalarLimitRequest(_Strict):
    distribution: DistributionSpec
    q_ladder: list[float] = Field(min_length=1)
    n_cells: int = Field(default=2048, ge=64, le=1 << 14)


class CmmseTrajectoryRequest(_Strict):
    eigenvalue: float = Field(gt=0)
    q: float = Field(ge=0)
    horizon: float = Field(default=1.0, gt=0)
    steps: int = Field(default=4096, ge=MIN_STEPS)


class CmmseSimulateRequest(_Strict):
    eigenvalue: float = Field(gt=0)
    q: float = Field(ge=0)
    horizon: float = Field(default=1.0, gt=0)
    steps: int = Field(default=4096, ge=MIN_STEPS)
    n_paths: int = Field(default=10_000, ge=100, le=200_000)
    seed: int = Field(default=0, ge=0)


class EntropyMixRequest(_Strict):
    u: DistributionSpec
    v: DistributionSpec
    mixing_angle: float = Field(ge=0, le=math.pi / 2)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/alpha")
def alpha(req: AlphaRequest) -> dict:
    densities = [s.build() for s in req.spectra]
    alphas = alpha_coefficients(densities)
    return {
        "alphas": [float(a) for a in alphas],
        "alpha_sum": float(np.sum(alphas)),
        "proportional": pairwise_proportional(densities),
    }


@app.post("/dpi/discrete")
def dpi_discrete(req: DpiDiscreteRequest) -> dict:
    models = [m.build() for m in req.models]
    rng = np.random.default_rng(req.seed)
    return dpi_check_discrete(models, tolerance=req.tolerance, rng=rng).to_dict()


@app.post("/dpi/continuous")
def dpi_continuous(req: DpiContinuousRequest) -> dict:
    models = [m.build() for m in req.models]
    return dpi_check_continuous(models, req.normalization, tolerance=req.tolerance).to_dict()


@app.post("/iid-sum")
def iid_sum(req: IidSumRequest) -> dict:
    return {"rows": iid_sum_divergence_sequence(req.distribution.build(), req.n_max)}


@app.post("/szego")
def szego(req: SzegoRequest) -> dict:
    return {"rows": szego_convergence_table(req.spectrum.build(), req.sizes)}


@app.post("/epi/gaussian")
def epi_gaussian(req: EpiGaussianRequest) -> dict:
    margin = epi_margin_gaussian(req.cov_x, req.cov_y)
    return {"margin": margin, "proportional": covariances_proportional(req.cov_x, req.cov_y)}


@app.post("/epi/scalar")
def epi_scalar(req: EpiScalarRequest) -> dict:
    return {"margin": epi_margin_scalar(req.x.build(), req.y.build())}


@app.post("/epi/divergence-form")
def epi_divergence_form(req: EpiDivergenceFormRequest) -> dict:
    return divergence_form_equivalence(req.cov_x, req.cov_y, req.d_x, req.d_y, req.d_sum)


@app.post("/cmmse/divergence")
def cmmse_divergence(req: CmmseModesRequest) -> dict:
    # lambda_v is unused here; accept the shared shape for symmetry
    return {"divergence": channel_divergence_gaussian(req.lambda_u, req.q)}


@app.post("/cmmse/check")
def cmmse_check(req: CmmseModesRequest) -> dict:
    return {
        "cmmse": cmmse_combination_check(req.lambda_u, req.lambda_v, req.mixing_angle, req.q),
        "divergence": divergence_combination_check(req.lambda_u, req.lambda_v, req.mixing_angle, req.q),
    }


@app.post("/cmmse/high-snr")
def cmmse_high_snr(req: CmmseHighSnrRequest) -> dict:
    return high_snr_limit_check(req.lambda_u, req.lambda_v, req.mixing_angle, req.q_ladder)


@app.post("/cmmse/scalar-limit")
def cmmse_scalar_limit(req: CmmseScalarLimitRequest) -> dict:
    return scalar_channel_divergence_limit(req.distribution.build(), req.q_ladder, n_cells=req.n_cells)


@app.post("/cmmse/trajectory")
def cmmse_trajectory(req: CmmseTrajectoryRequest) -> dict:
    traj = gaussian_cmmse_trajectory(req.eigenvalue, req.q, req.horizon, req.steps)
    return {
        "times": traj.times.tolist(),
        "values": traj.values.tolist(),
        "integrated": traj.integrated,
        "closed_form_integrated": traj.closed_form_integrated(req.eigenvalue, req.q),
    }


@app.post("/cmmse/simulate")
def cmmse_simulate(req: CmmseSimulateRequest) -> dict:
    return simulate_cmmse_paths(
        req.eigenvalue, req.q, req.horizon, req.steps, req.n_paths, req.seed
    )


@app.post("/cmmse/entropy-mix")
def cmmse_entropy_mix(req: EntropyMixRequest) -> dict:
    return epi_from_cmmse_demo(req.u.build(), req.v.build(), req.mixing_angle)


@app.post("/experiments")
def experiments(config: ExperimentConfig) -> dict:
    return run_experiment(config)
