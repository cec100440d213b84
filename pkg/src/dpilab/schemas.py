"""Validated request and experiment-config models.

Every spec is a tagged pydantic model with a ``build()`` method returning
the corresponding core object.  Unknown fields are rejected everywhere, so a
config typo fails at validation time with the offending field named, before
any computation starts.  Case specs are discriminated on ``case`` and each
suite accepts only its own case kinds; the ``full`` suite takes no explicit
cases (it runs the built-in battery).
"""

from __future__ import annotations

import math
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import cmmse as cmmse_mod
from . import dpi as dpi_mod
from . import spectra as spectra_mod
from .scalar_models import Gaussian, GaussianMixture, Laplace, ScalarDistribution, Uniform

__all__ = [
    "SpectrumSpec",
    "DistributionSpec",
    "ModelSpec",
    "ContinuousModelSpec",
    "CaseSpec",
    "ExperimentConfig",
    "SUITES",
    "build_spectrum",
    "build_distribution",
    "build_model",
]

SUITES = ("alpha", "dpi-check", "dpi-continuous", "iid-sum", "szego", "epi", "cmmse", "full")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------- spectra


class WhiteSpec(_Strict):
    kind: Literal["white"]
    level: float = Field(gt=0)

    def build(self) -> spectra_mod.SpectralDensity:
        return spectra_mod.White(self.level)


class ArmaSpec(_Strict):
    kind: Literal["arma"]
    ar: list[float] = []
    ma: list[float] = []
    sigma2: float = Field(default=1.0, gt=0)

    def build(self) -> spectra_mod.SpectralDensity:
        return spectra_mod.RationalArma(ar=tuple(self.ar), ma=tuple(self.ma), sigma2=self.sigma2)


class PiecewiseSpec(_Strict):
    """Even piecewise-constant spectrum given on the positive half band."""

    kind: Literal["piecewise"]
    half_band_edges: list[float] = []
    levels: list[float] = Field(min_length=1)

    def build(self) -> spectra_mod.SpectralDensity:
        return spectra_mod.PiecewiseConstant.from_half_band(self.half_band_edges, self.levels)


SpectrumSpec = Annotated[Union[WhiteSpec, ArmaSpec, PiecewiseSpec], Field(discriminator="kind")]


def build_spectrum(spec) -> spectra_mod.SpectralDensity:
    return spec.build()


# ---------------------------------------------------------- distributions


class GaussianSpec(_Strict):
    kind: Literal["gaussian"]
    variance: float = Field(gt=0)

    def build(self) -> ScalarDistribution:
        return Gaussian(self.variance)


class UniformSpec(_Strict):
    kind: Literal["uniform"]
    half_width: float = Field(gt=0)

    def build(self) -> ScalarDistribution:
        return Uniform(self.half_width)


class LaplaceSpec(_Strict):
    kind: Literal["laplace"]
    scale: float = Field(gt=0)

    def build(self) -> ScalarDistribution:
        return Laplace(self.scale)


class MixtureSpec(_Strict):
    kind: Literal["mixture"]
    weights: list[float] = Field(min_length=1)
    means: list[float] = Field(min_length=1)
    variances: list[float] = Field(min_length=1)

    def build(self) -> ScalarDistribution:
        return GaussianMixture(self.weights, self.means, self.variances)


DistributionSpec = Annotated[
    Union[GaussianSpec, UniformSpec, LaplaceSpec, MixtureSpec], Field(discriminator="kind")
]


def build_distribution(spec) -> ScalarDistribution:
    return spec.build()


# ------------------------------------------------------------------ models


class GaussianModelSpec(_Strict):
    kind: Literal["gaussian"]
    spectrum: SpectrumSpec

    def build(self) -> dpi_mod.ProcessModel:
        return dpi_mod.ProcessModel.gaussian(self.spectrum.build())


class IidModelSpec(_Strict):
    kind: Literal["iid"]
    marginal: DistributionSpec

    def build(self) -> dpi_mod.ProcessModel:
        return dpi_mod.ProcessModel.iid(self.marginal.build())


class FilteredIidModelSpec(_Strict):
    kind: Literal["filtered_iid"]
    innovation: DistributionSpec
    ar: list[float] = []
    ma: list[float] = []

    def build(self) -> dpi_mod.ProcessModel:
        return dpi_mod.ProcessModel.filtered_iid(self.innovation.build(), ar=tuple(self.ar), ma=tuple(self.ma))


ModelSpec = Annotated[
    Union[GaussianModelSpec, IidModelSpec, FilteredIidModelSpec], Field(discriminator="kind")
]


def build_model(spec) -> dpi_mod.ProcessModel:
    return spec.build()


class ContinuousModelSpec(_Strict):
    """Band-limited Gaussian model: bandwidth plus the band shape on [-1/2, 1/2]."""

    bandwidth: float = Field(gt=0)
    shape: SpectrumSpec

    def build(self) -> dpi_mod.ContinuousProcessModel:
        density = spectra_mod.ContinuousSpectralDensity(self.bandwidth, self.shape.build())
        return dpi_mod.ContinuousProcessModel.gaussian(density)


# ------------------------------------------------------------------- cases


class AlphaCase(_Strict):
    case: Literal["alpha"]
    spectra: list[SpectrumSpec] = Field(min_length=2)


class DpiDiscreteCase(_Strict):
    case: Literal["dpi-discrete"]
    models: list[ModelSpec] = Field(min_length=2)
    tolerance: float = Field(default=dpi_mod.EQUALITY_TOL, gt=0)


class DpiContinuousCase(_Strict):
    case: Literal["dpi-continuous"]
    models: list[ContinuousModelSpec] = Field(min_length=2)
    normalization: Literal["per-sample", "per-time", "both"] = "both"
    tolerance: float = Field(default=dpi_mod.EQUALITY_TOL, gt=0)


class IidSumCase(_Strict):
    case: Literal["iid-sum"]
    distribution: DistributionSpec
    n_max: int = Field(default=6, ge=1, le=8)


class SzegoCase(_Strict):
    case: Literal["szego"]
    spectrum: SpectrumSpec
    sizes: list[int] = [64, 128, 256, 512]


class EpiGaussianCase(_Strict):
    """Randomized covariance-pair sweep plus proportional equality probes."""

    case: Literal["epi-gaussian"]
    dimension: int = Field(default=8, ge=1, le=64)
    pairs: int = Field(default=100, ge=1, le=1000)
    proportional_pairs: int = Field(default=20, ge=0, le=1000)


class EpiScalarCase(_Strict):
    case: Literal["epi-scalar"]
    x: DistributionSpec
    y: DistributionSpec


class CmmseCheckCase(_Strict):
    case: Literal["cmmse-check"]
    lambda_u: list[float] = Field(min_length=1)
    lambda_v: list[float] = Field(min_length=1)
    mixing_angle: float = Field(ge=0, le=math.pi / 2)
    q: float = Field(ge=0)


class CmmseHighSnrCase(_Strict):
    case: Literal["cmmse-high-snr"]
    lambda_u: list[float] = Field(min_length=1)
    lambda_v: list[float] = Field(min_length=1)
    mixing_angle: float = Field(ge=0, le=math.pi / 2)
    q_ladder: list[float] = Field(min_length=2)


class CmmseScalarLimitCase(_Strict):
    case: Literal["cmmse-scalar-limit"]
    distribution: DistributionSpec
    q_ladder: list[float] = Field(min_length=1)
    n_cells: int = Field(default=2048, ge=64, le=1 << 14)


class CmmseTrajectoryCase(_Strict):
    case: Literal["cmmse-trajectory"]
    eigenvalue: float = Field(gt=0)
    q: float = Field(ge=0)
    horizon: float = Field(default=1.0, gt=0)
    steps: int = Field(default=4096, ge=cmmse_mod.MIN_STEPS)


class CmmseSimulateCase(_Strict):
    case: Literal["cmmse-simulate"]
    eigenvalue: float = Field(gt=0)
    q: float = Field(ge=0)
    horizon: float = Field(default=1.0, gt=0)
    steps: int = Field(default=4096, ge=cmmse_mod.MIN_STEPS)
    n_paths: int = Field(default=10_000, ge=100, le=200_000)


CaseSpec = Annotated[
    Union[
        AlphaCase,
        DpiDiscreteCase,
        DpiContinuousCase,
        IidSumCase,
        SzegoCase,
        EpiGaussianCase,
        EpiScalarCase,
        CmmseCheckCase,
        CmmseHighSnrCase,
        CmmseScalarLimitCase,
        CmmseTrajectoryCase,
        CmmseSimulateCase,
    ],
    Field(discriminator="case"),
]

_SUITE_CASES = {
    "alpha": {"alpha"},
    "dpi-check": {"dpi-discrete"},
    "dpi-continuous": {"dpi-continuous"},
    "iid-sum": {"iid-sum"},
    "szego": {"szego"},
    "epi": {"epi-gaussian", "epi-scalar"},
    "cmmse": {
        "cmmse-check",
        "cmmse-high-snr",
        "cmmse-scalar-limit",
        "cmmse-trajectory",
        "cmmse-simulate",
    },
    "full": set(),
}


class ExperimentConfig(_Strict):
    """One experiment: a suite, its cases (or the defaults), seed and output."""

    suite: Literal["alpha", "dpi-check", "dpi-continuous", "iid-sum", "szego", "epi", "cmmse", "full"]
    seed: int = Field(default=0, ge=0)
    jobs: int = Field(default=1, ge=1, le=64)
    out: str | None = None
    formats: list[Literal["json", "csv"]] = ["json"]
    cases: list[CaseSpec] | None = None

    @model_validator(mode="after")
    def _cases_match_suite(self):
        if self.cases is None:
            return self
        allowed = _SUITE_CASES[self.suite]
        if not allowed:
            raise ValueError("the full suite runs the built-in battery and takes no cases")
        for i, case in enumerate(self.cases):
            if case.case not in allowed:
                raise ValueError(
                    f"cases[{i}]: case kind {case.case!r} does not belong to suite {self.suite!r}"
                )
        return self
