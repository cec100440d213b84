"""Suite runner: named batteries of checks with seeded, concurrent cases.

A suite is a list of cases; each case gets its own generator seeded as
``root_seed XOR case_index`` so results do not depend on execution order or
the ``jobs`` setting.  Reports are JSON documents (schema version 1) with one
entry per case plus a failure manifest; the CSV form is flat, one row per
case, except that cases carrying a convergence table emit one row per table
entry with the x-grid column included.

Every suite has a built-in default battery used when the config lists no
explicit cases; the ``full`` suite concatenates all of them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable

import numpy as np

from .cmmse import (
    channel_divergence_gaussian,
    cmmse_combination_check,
    divergence_combination_check,
    epi_from_cmmse_demo,
    gaussian_cmmse_trajectory,
    high_snr_limit_check,
    scalar_channel_divergence_limit,
    simulate_cmmse_paths,
)
from .dpi import (
    ContinuousProcessModel,
    ProcessModel,
    alpha_coefficients,
    dpi_check_continuous,
    dpi_check_discrete,
    iid_sum_divergence_sequence,
    pairwise_proportional,
)
from .epi import (
    covariances_proportional,
    divergence_form_equivalence,
    epi_margin_gaussian,
    epi_margin_scalar,
    random_covariance,
)
from .errors import DomainError
from .reports import SCHEMA_VERSION, write_csv, write_json
from .scalar_models import (
    Gaussian,
    GaussianMixture,
    Laplace,
    Uniform,
    convolve,
    divergence_from_matched_gaussian,
    scale,
)
from .schemas import ExperimentConfig
from .spectra import (
    ContinuousSpectralDensity,
    PiecewiseConstant,
    RationalArma,
    SpectralDensity,
    White,
)
from .toeplitz import log_det, szego_convergence_table, toeplitz_eigenvalues

__all__ = ["Case", "run_experiment", "emit_report", "default_cases"]


@dataclass(frozen=True)
class Case:
    name: str
    run: Callable[[np.random.Generator], dict]


def _ok(payload: dict, passed: bool, reason: str) -> dict:
    payload["passed"] = bool(passed)
    if not passed:
        payload["failure"] = reason
    return payload


# ------------------------------------------------------- random generators

_FGRID = np.linspace(-0.5, 0.5, 513)


def _log_uniform(rng, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(math.log(lo), math.log(hi))))


def _random_spectrum(rng: np.random.Generator) -> SpectralDensity:
    kind = int(rng.integers(0, 5))
    level = _log_uniform(rng, 0.2, 5.0)
    if kind == 0:
        return White(level)
    if kind == 1:
        return RationalArma(ar=(float(rng.uniform(-0.85, 0.85)),), sigma2=level)
    if kind == 2:
        return RationalArma(ma=(float(rng.uniform(-0.85, 0.85)),), sigma2=level)
    if kind == 3:
        return RationalArma(
            ar=(float(rng.uniform(-0.8, 0.8)),), ma=(float(rng.uniform(-0.8, 0.8)),), sigma2=level
        )
    cuts = np.sort(rng.uniform(0.08, 0.42, size=int(rng.integers(1, 3))))
    levels = [_log_uniform(rng, 0.2, 5.0) for _ in range(len(cuts) + 1)]
    return PiecewiseConstant.from_half_band([float(c) for c in cuts], levels)


def _ratio_modulation(x: SpectralDensity, y: SpectralDensity) -> float:
    r = x.evaluate(_FGRID) / y.evaluate(_FGRID)
    return float(np.max(r) / np.min(r))


def _clearly_nonproportional(densities: list[SpectralDensity]) -> bool:
    # 5% ratio modulation keeps the alpha-sum deficit far above the 1e-6 line
    for i in range(len(densities)):
        for j in range(i + 1, len(densities)):
            if _ratio_modulation(densities[i], densities[j]) < 1.05:
                return False
    return True


def _draw_nonproportional(rng: np.random.Generator, k: int) -> list[SpectralDensity]:
    for _ in range(128):
        draw = [_random_spectrum(rng) for _ in range(k)]
        if _clearly_nonproportional(draw):
            return draw
    raise RuntimeError("failed to draw a clearly non-proportional spectrum tuple")


def _random_distribution(rng: np.random.Generator):
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return Gaussian(_log_uniform(rng, 0.3, 3.0))
    if kind == 1:
        return Uniform(_log_uniform(rng, 0.5, 3.0))
    if kind == 2:
        return Laplace(_log_uniform(rng, 0.4, 2.0))
    w = float(rng.uniform(0.25, 0.75))
    return GaussianMixture(
        [w, 1.0 - w],
        [float(rng.uniform(-1.5, 0.0)), float(rng.uniform(0.0, 1.5))],
        [_log_uniform(rng, 0.3, 1.5), _log_uniform(rng, 0.3, 1.5)],
    )


# ------------------------------------------------------------- alpha suite


def _alpha_payload(
    densities: list[SpectralDensity],
    expect_proportional: bool | None = None,
    strict: bool = False,
) -> dict:
    """Alpha laws for one spectrum tuple.

    The universal laws (each alpha in (0,1], sum <= 1, proportional implies
    sum 1) are always asserted.  The converse discrimination, sum < 1 - 1e-6
    for non-proportional tuples, is asserted only in ``strict`` mode: the
    random batteries enforce a minimum ratio modulation that guarantees the
    gap, while explicit user tuples may be arbitrarily close to
    proportional without violating any law.
    """
    alphas = alpha_coefficients(densities)
    total = float(np.sum(alphas))
    proportional = (
        pairwise_proportional(densities) if expect_proportional is None else expect_proportional
    )
    in_range = bool(np.all(alphas > 0.0) and np.all(alphas <= 1.0 + 1e-12))
    bounded = total <= 1.0 + 1e-9
    if proportional:
        classed = abs(total - 1.0) <= 1e-6
    elif strict:
        classed = total < 1.0 - 1e-6
    else:
        classed = True
    payload = {
        "alphas": [float(a) for a in alphas],
        "alpha_sum": total,
        "proportional": bool(proportional),
    }
    return _ok(
        payload,
        in_range and bounded and classed,
        f"alpha law violated: sum={total!r}, proportional={proportional}",
    )


def _alpha_named_case(rng) -> dict:
    densities = [White(1.0), PiecewiseConstant.from_half_band([0.25], [1.0, 3.0])]
    payload = _alpha_payload(densities, expect_proportional=False, strict=True)
    expected = (0.353553, 0.612372)
    pinned = all(abs(a - e) <= 1e-6 for a, e in zip(payload["alphas"], expected))
    if not pinned:
        return _ok(payload, False, f"expected alphas near {expected}, got {payload['alphas']}")
    return payload


def _alpha_sweep(rng, draws: int, mode: str) -> dict:
    worst_sum = 0.0
    for _ in range(draws):
        if mode == "proportional":
            base = _random_spectrum(rng)
            densities = [base, base.scaled(_log_uniform(rng, 0.2, 5.0))]
            sub = _alpha_payload(densities, expect_proportional=True, strict=True)
        else:
            densities = _draw_nonproportional(rng, 3 if mode == "triple" else 2)
            sub = _alpha_payload(densities, expect_proportional=False, strict=True)
        worst_sum = max(worst_sum, sub["alpha_sum"]) if mode != "proportional" else sub["alpha_sum"]
        if not sub["passed"]:
            return _ok({"draws": draws, "mode": mode, "alpha_sum": sub["alpha_sum"]}, False, sub["failure"])
    return {"draws": draws, "mode": mode, "alpha_sum": worst_sum, "passed": True}


def _alpha_defaults() -> list[Case]:
    return [
        Case("white-vs-piecewise", _alpha_named_case),
        Case("random-pairs", lambda rng: _alpha_sweep(rng, 100, "pair")),
        Case("proportional-pairs", lambda rng: _alpha_sweep(rng, 50, "proportional")),
        Case("random-triples", lambda rng: _alpha_sweep(rng, 50, "triple")),
    ]


# --------------------------------------------------------------- dpi suite


def _dpi_payload(models, tolerance: float, rng, pinned_margin: float | None = None, pin_tol: float = 0.0) -> dict:
    report = dpi_check_discrete(models, tolerance=tolerance, rng=rng)
    payload = report.to_dict()
    if report.margin < -tolerance:
        return _ok(payload, False, f"margin {report.margin!r} below -{tolerance}")
    if report.equality and abs(report.margin) > tolerance:
        return _ok(payload, False, f"equality case with margin {report.margin!r}")
    if pinned_margin is not None and abs(report.margin - pinned_margin) > pin_tol:
        return _ok(payload, False, f"margin {report.margin!r} not within {pin_tol} of {pinned_margin}")
    payload["passed"] = True
    return payload


def _dpi_random_gaussian_sweep(rng, draws: int = 20) -> dict:
    worst = math.inf
    for _ in range(draws):
        pair = [_random_spectrum(rng), _random_spectrum(rng)]
        report = dpi_check_discrete([ProcessModel.gaussian(d) for d in pair], rng=rng)
        worst = min(worst, report.margin)
        if report.margin < -1e-6:
            return _ok({"draws": draws, "min_margin": report.margin}, False, "negative margin on a gaussian pair")
        if report.equality and abs(report.margin) > 1e-6:
            return _ok({"draws": draws, "min_margin": worst}, False, "proportional pair with nonzero margin")
    return {"draws": draws, "min_margin": worst, "passed": True}


def _dpi_defaults() -> list[Case]:
    pc13 = PiecewiseConstant.from_half_band([0.25], [1.0, 3.0])
    root3 = math.sqrt(3.0)
    return [
        Case(
            "gaussian-proportional",
            lambda rng: _dpi_payload(
                [ProcessModel.gaussian(White(1.0)), ProcessModel.gaussian(White(2.5))], 1e-6, rng
            ),
        ),
        Case(
            "gaussian-nonproportional",
            lambda rng: _dpi_payload(
                [ProcessModel.gaussian(White(1.0)), ProcessModel.gaussian(pc13)],
                1e-6,
                rng,
                pinned_margin=0.034074,
                pin_tol=1e-6,
            ),
        ),
        Case(
            "iid-uniform-pair",
            lambda rng: _dpi_payload(
                [ProcessModel.iid(Uniform(root3)), ProcessModel.iid(Uniform(root3))],
                1e-6,
                rng,
                pinned_margin=0.252340,
                pin_tol=1e-4,
            ),
        ),
        Case(
            "iid-plus-proportional-gaussian",
            lambda rng: _dpi_payload(
                [ProcessModel.iid(Uniform(root3)), ProcessModel.gaussian(White(2.0))], 1e-6, rng
            ),
        ),
        Case(
            "filtered-shared-filter",
            lambda rng: _dpi_payload(
                [
                    ProcessModel.filtered_iid(Laplace(1.0), ar=(0.3,)),
                    ProcessModel.filtered_iid(Uniform(root3), ar=(0.3,)),
                ],
                1e-6,
                rng,
            ),
        ),
        Case("random-gaussian-pairs", _dpi_random_gaussian_sweep),
    ]


# -------------------------------------------------- continuous (bridge) suite


def _continuous_pair(bandwidth: float, proportional: bool) -> list[ContinuousProcessModel]:
    flat = PiecewiseConstant([-0.5, 0.5], [1.0])
    if proportional:
        shapes = [flat, flat.scaled(3.0)]
    else:
        shapes = [flat, PiecewiseConstant.from_half_band([0.25], [1.0, 3.0])]
    return [
        ContinuousProcessModel.gaussian(ContinuousSpectralDensity(bandwidth, s)) for s in shapes
    ]


def _bridge_at_half(rng) -> dict:
    models = _continuous_pair(0.5, proportional=False)
    per_sample = dpi_check_continuous(models, "per-sample")
    per_time = dpi_check_continuous(models, "per-time")
    discrete = dpi_check_discrete([ProcessModel.gaussian(m.spectrum.sampled()) for m in models])
    deviation = max(
        abs(per_sample.lhs - discrete.lhs),
        abs(per_sample.margin - discrete.margin),
        max(abs(a - b) for a, b in zip(per_sample.alphas, discrete.alphas)),
        abs(per_sample.lhs - per_time.lhs),
        abs(per_sample.margin - per_time.margin),
    )
    payload = {
        "bandwidth": 0.5,
        "margin": per_sample.margin,
        "bridge_deviation": deviation,
        "normalization": "both",
    }
    return _ok(payload, deviation <= 1e-12, f"bridge deviation {deviation!r} above 1e-12")


def _proportional_band(rng) -> dict:
    models = _continuous_pair(0.5, proportional=True)
    per_sample = dpi_check_continuous(models, "per-sample")
    per_time = dpi_check_continuous(models, "per-time")
    worst = max(abs(per_sample.margin), abs(per_time.margin))
    payload = {
        "bandwidth": 0.5,
        "margin": per_sample.margin,
        "per_time_margin": per_time.margin,
        "equality": per_sample.equality and per_time.equality,
    }
    return _ok(payload, payload["equality"] and worst <= 1e-6, "proportional band pair not at equality")


def _power_relation(bandwidth: float):
    def run(rng) -> dict:
        models = _continuous_pair(bandwidth, proportional=False)
        per_sample = dpi_check_continuous(models, "per-sample")
        per_time = dpi_check_continuous(models, "per-time")
        p = 2.0 * bandwidth
        deviation = max(
            abs(per_sample.lhs**p - per_time.lhs),
            max(abs(a**p - b) for a, b in zip(per_sample.rhs_terms, per_time.rhs_terms)),
            max(abs(a**p - b) for a, b in zip(per_sample.alphas, per_time.alphas)),
        )
        payload = {
            "bandwidth": bandwidth,
            "margin": per_sample.margin,
            "per_time_margin": per_time.margin,
            "power_deviation": deviation,
            "per_time_negative": per_time.margin < -1e-6,
        }
        ok = deviation <= 1e-9 and per_sample.margin >= -1e-6
        if p >= 1.0:
            ok = ok and per_time.margin >= -1e-6
        return _ok(payload, ok, f"power-2B relation deviation {deviation!r}")

    return run


def _continuous_defaults() -> list[Case]:
    return [
        Case("bridge-at-half", _bridge_at_half),
        Case("proportional-band", _proportional_band),
        Case("power-relation-wideband", _power_relation(2.0)),
        Case("narrowband-flagged", _power_relation(0.3)),
    ]


# ----------------------------------------------------------- iid-sum suite


def _iid_ladder(dist, n_max: int, pinned: dict | None = None) -> Callable:
    def run(rng) -> dict:
        rows = iid_sum_divergence_sequence(dist, n_max)
        d1 = rows[0]["divergence"]
        payload = {"n_max": n_max, "d1": d1, "table": rows}
        ok = all(r["divergence"] <= d1 + 1e-9 for r in rows)
        if pinned is not None:
            for n, (target, tol) in pinned.items():
                got = rows[n - 1]["divergence"]
                if abs(got - target) > tol:
                    return _ok(payload, False, f"D_{n}={got!r} not within {tol} of {target}")
        return _ok(payload, ok, "normalized-sum divergence rose above D_1")

    return run


def _scale_invariance(rng) -> dict:
    u = Uniform(math.sqrt(3.0))
    base = divergence_from_matched_gaussian(u)
    rescaled = divergence_from_matched_gaussian(scale(u, 3.0))
    payload = {"base": base, "rescaled": rescaled, "deviation": abs(base - rescaled)}
    return _ok(payload, abs(base - rescaled) <= 1e-8, "divergence not scale-invariant")


def _iid_defaults() -> list[Case]:
    return [
        Case(
            "uniform-ladder",
            _iid_ladder(Uniform(math.sqrt(3.0)), 6, pinned={2: (0.023059, 1e-5)}),
        ),
        Case("laplace-ladder", _iid_ladder(Laplace(1.0), 6)),
        Case(
            "mixture-ladder",
            _iid_ladder(GaussianMixture([0.6, 0.4], [-1.0, 1.5], [0.5, 1.0]), 4),
        ),
        Case("scale-invariance", _scale_invariance),
    ]


# ------------------------------------------------------------- szego suite


def _szego_case(density: SpectralDensity, sizes, final_gap: float | None = None, strict: bool = False):
    def run(rng) -> dict:
        rows = szego_convergence_table(density, sizes)
        gaps = [r["gap"] for r in rows]
        payload = {"limit": rows[0]["limit"], "table": rows}
        ok = all(math.isfinite(g) for g in gaps)
        if strict:
            ok = ok and all(b < a for a, b in zip(gaps, gaps[1:]))
        else:
            ok = ok and (len(gaps) < 2 or gaps[-1] <= gaps[0] + 1e-12)
        if final_gap is not None:
            ok = ok and gaps[-1] <= final_gap
        return _ok(payload, ok, f"gap sequence {gaps} failed its decrease/threshold check")

    return run


def _logdet_identity(rng) -> dict:
    density = RationalArma(ar=(0.5,), sigma2=1.0)
    n = 256
    direct = log_det(density, n)
    eig = float(np.sum(np.log(toeplitz_eigenvalues(density, n))))
    deviation = abs(direct - eig) / max(1.0, abs(direct))
    payload = {"n": n, "log_det": direct, "eigenvalue_sum": eig, "relative_deviation": deviation}
    return _ok(payload, deviation <= 1e-8, f"log-determinant routes disagree: {deviation!r}")


def _szego_defaults() -> list[Case]:
    sizes = (64, 128, 256, 512)
    return [
        Case("ar-0.9", _szego_case(RationalArma(ar=(0.9,), sigma2=1.0), sizes, final_gap=0.05, strict=True)),
        Case("white-exact", _szego_case(White(2.0), sizes, final_gap=1e-12)),
        Case(
            "piecewise-band",
            _szego_case(PiecewiseConstant.from_half_band([0.25], [1.0, 3.0]), sizes),
        ),
        Case("logdet-identity", _logdet_identity),
    ]


# --------------------------------------------------------------- epi suite


def _epi_gaussian_sweep(dimension: int, pairs: int, proportional_pairs: int):
    def run(rng) -> dict:
        min_margin = math.inf
        for _ in range(pairs):
            a = random_covariance(rng, dimension)
            b = random_covariance(rng, dimension)
            margin = epi_margin_gaussian(a, b)
            min_margin = min(min_margin, margin)
            if margin < -1e-9:
                return _ok({"pairs": pairs, "min_margin": margin}, False, "negative gaussian margin")
            if covariances_proportional(a, b):
                return _ok({"pairs": pairs}, False, "random draw unexpectedly proportional")
        worst_eq = 0.0
        for _ in range(proportional_pairs):
            a = random_covariance(rng, dimension)
            c = _log_uniform(rng, 0.2, 5.0)
            margin = epi_margin_gaussian(a, c * a)
            worst_eq = max(worst_eq, abs(margin))
            if abs(margin) > 1e-9 or not covariances_proportional(a, c * a):
                return _ok(
                    {"pairs": pairs, "equality_margin": margin}, False, "proportional pair missed equality"
                )
        return {
            "pairs": pairs,
            "proportional_pairs": proportional_pairs,
            "min_margin": min_margin,
            "max_equality_margin": worst_eq,
            "dimension": dimension,
            "passed": True,
        }

    return run


def _epi_scalar_case(x, y, pinned: tuple[float, float] | None = None):
    def run(rng) -> dict:
        margin = epi_margin_scalar(x, y)
        payload = {"margin": margin}
        if pinned is not None and abs(margin - pinned[0]) > pinned[1]:
            return _ok(payload, False, f"margin {margin!r} not within {pinned[1]} of {pinned[0]}")
        return _ok(payload, margin >= -1e-4, f"scalar margin {margin!r} below -1e-4")

    return run


def _epi_scalar_pool(rng) -> dict:
    pool = [
        Gaussian(1.0),
        Uniform(math.sqrt(3.0)),
        Laplace(1.0),
        GaussianMixture([0.6, 0.4], [-1.0, 1.5], [0.5, 1.0]),
    ]
    min_margin = math.inf
    count = 0
    for i in range(len(pool)):
        for j in range(i, len(pool)):
            margin = epi_margin_scalar(pool[i], pool[j])
            min_margin = min(min_margin, margin)
            count += 1
            if margin < -1e-4:
                return _ok({"pairs": count, "min_margin": margin}, False, "scalar margin below -1e-4")
    return {"pairs": count, "min_margin": min_margin, "passed": True}


def _epi_divergence_form(rng) -> dict:
    u = Uniform(math.sqrt(3.0))
    d1 = divergence_from_matched_gaussian(u)
    d_sum = divergence_from_matched_gaussian(convolve(u, u))
    report = divergence_form_equivalence([[1.0]], [[1.0]], d1, d1, d_sum)
    entropy_margin = epi_margin_scalar(u, u)
    deviation = abs(report["entropy_margin"] - entropy_margin)
    payload = {
        "margin": report["margin"],
        "entropy_margin": report["entropy_margin"],
        "bridge_deviation": deviation,
    }
    ok = report["margin"] >= -1e-9 and deviation <= 1e-6 * max(1.0, abs(entropy_margin))
    return _ok(payload, ok, "divergence-form margin inconsistent with the entropy form")


def _epi_defaults() -> list[Case]:
    root3 = math.sqrt(3.0)
    return [
        Case("gaussian-sweep", _epi_gaussian_sweep(8, 100, 20)),
        Case(
            "scalar-uniform-pair",
            _epi_scalar_case(Uniform(root3), Uniform(root3), pinned=(8.61, 0.01)),
        ),
        Case("scalar-pool", _epi_scalar_pool),
        Case("divergence-form", _epi_divergence_form),
    ]


# ------------------------------------------------------------- cmmse suite


def _cmmse_worked(rng) -> dict:
    c = cmmse_combination_check([1.0], [4.0], math.pi / 4, 1.0)
    d = divergence_combination_check([1.0], [4.0], math.pi / 4, 1.0)
    pins = (
        abs(c["lhs"] - 1.2528) <= 1e-4,
        abs(c["rhs"] - 1.1513) <= 1e-4,
        abs(d["lhs"] - 0.6236) <= 1e-4,
        abs(d["rhs"] - 0.6744) <= 1e-4,
    )
    payload = {
        "cmmse_lhs": c["lhs"],
        "cmmse_rhs": c["rhs"],
        "divergence_lhs": d["lhs"],
        "divergence_rhs": d["rhs"],
    }
    return _ok(payload, all(pins) and c["passed"] and d["passed"], "worked tuple values off their pins")


def _cmmse_random_tuples(rng, draws: int = 100) -> dict:
    worst = math.inf
    for _ in range(draws):
        k = int(rng.integers(1, 4))
        lu = [_log_uniform(rng, 0.1, 10.0) for _ in range(k)]
        lv = [_log_uniform(rng, 0.1, 10.0) for _ in range(k)]
        angle = float(rng.uniform(0.0, math.pi / 2))
        q = _log_uniform(rng, 0.01, 100.0)
        c = cmmse_combination_check(lu, lv, angle, q)
        d = divergence_combination_check(lu, lv, angle, q)
        worst = min(worst, c["margin"], d["margin"])
        if not (c["passed"] and d["passed"]):
            return _ok({"draws": draws, "min_margin": worst}, False, "combination inequality violated")
    return {"draws": draws, "min_margin": worst, "passed": True}


def _cmmse_monotonicity(rng) -> dict:
    qs = np.linspace(0.1, 10.0, 25)
    lams = np.linspace(0.2, 5.0, 20)
    in_q = [channel_divergence_gaussian([1.0, 2.0], q) for q in qs]
    in_lam = [channel_divergence_gaussian([lam], 1.0) for lam in lams]
    ok = all(b >= a - 1e-12 for a, b in zip(in_q, in_q[1:])) and all(
        b >= a - 1e-12 for a, b in zip(in_lam, in_lam[1:])
    )
    return _ok({"q_points": len(qs), "lambda_points": len(lams)}, ok, "divergence not monotone in q or lambda")


def _cmmse_high_snr(rng) -> dict:
    report = high_snr_limit_check([1.0], [4.0], math.pi / 4, [1.0, 10.0, 100.0, 1000.0, 10000.0])
    gaps = [r["gap"] for r in report["rows"]]
    ratios = [gaps[i + 1] / gaps[i] for i in range(len(gaps) - 1) if gaps[i] > 1e-15]
    payload = {
        "limit": report["limit"],
        "final_gap": gaps[-1],
        "tail_ratio": ratios[-1] if ratios else 0.0,
        "table": report["rows"],
    }
    ok = (
        all(b < a for a, b in zip(gaps, gaps[1:]))
        and gaps[-1] <= 1e-2
        and all(0.05 <= r <= 0.2 for r in ratios[-2:])
    )
    return _ok(payload, ok, f"high-snr gaps {gaps} failed decay checks")


def _cmmse_scalar_limit(rng) -> dict:
    report = scalar_channel_divergence_limit(Uniform(math.sqrt(3.0)), [1.0, 10.0, 100.0, 1000.0, 10000.0])
    values = [r["divergence"] for r in report["rows"]]
    payload = {"limit": report["limit"], "final": values[-1], "table": report["rows"]}
    ok = (
        not report["truncated"]
        and all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
        and abs(values[-1] - 0.176486) <= 0.05
    )
    return _ok(payload, ok, f"scalar channel ladder {values} failed its convergence checks")


def _cmmse_trajectory(rng) -> dict:
    traj = gaussian_cmmse_trajectory(1.0, 1.0)
    closed = traj.closed_form_integrated(1.0, 1.0)
    node_dev = float(np.max(np.abs(traj.values - 1.0 / (1.0 + traj.times))))
    bridge = abs(0.5 * (1.0 - traj.integrated) - channel_divergence_gaussian([1.0], 1.0))
    zero_q = gaussian_cmmse_trajectory(2.0, 0.0)
    payload = {
        "integrated": traj.integrated,
        "closed_form": closed,
        "node_deviation": node_dev,
        "bridge_gap": bridge,
        "zero_q_integrated": zero_q.integrated,
    }
    ok = (
        abs(traj.integrated - closed) <= 1e-3
        and node_dev <= 1e-9
        and bridge <= 1e-3
        and abs(zero_q.integrated - 2.0) <= 1e-12
    )
    return _ok(payload, ok, "trajectory disagrees with its closed forms")


def _cmmse_entropy_mixing(rng) -> dict:
    u = Uniform(math.sqrt(3.0))
    worked = epi_from_cmmse_demo(u, u, math.pi / 4)
    gauss = epi_from_cmmse_demo(Gaussian(1.0), Gaussian(1.0), math.pi / 3)
    edge = epi_from_cmmse_demo(u, Laplace(1.0), 0.0)
    random_ok = True
    min_margin = math.inf
    for _ in range(8):
        demo = epi_from_cmmse_demo(
            _random_distribution(rng), _random_distribution(rng), float(rng.uniform(0.0, math.pi / 2))
        )
        min_margin = min(min_margin, demo["margin"])
        random_ok = random_ok and demo["passed"]
    payload = {
        "worked_lhs": worked["lhs"],
        "worked_rhs": worked["rhs"],
        "gaussian_margin": gauss["margin"],
        "edge_margin": edge["margin"],
        "random_min_margin": min_margin,
    }
    ok = (
        abs(worked["lhs"] - 1.395880) <= 1e-3
        and worked["passed"]
        and abs(gauss["margin"]) <= 1e-4
        and abs(edge["margin"]) <= 1e-12
        and random_ok
    )
    return _ok(payload, ok, "entropy mixing demo failed a pin or a margin")


def _cmmse_paths(rng) -> dict:
    seed = int(rng.integers(0, 2**31))
    report = simulate_cmmse_paths(1.0, 1.0, seed=seed)
    payload = {
        "seed": seed,
        "max_abs_z": max(abs(r["z"]) for r in report["rows"]),
        "table": report["rows"],
    }
    return _ok(payload, report["passed"], "empirical causal error outside 3 standard errors")


def _cmmse_defaults() -> list[Case]:
    return [
        Case("worked-tuple", _cmmse_worked),
        Case("random-tuples", _cmmse_random_tuples),
        Case("monotone-in-q-and-lambda", _cmmse_monotonicity),
        Case("high-snr", _cmmse_high_snr),
        Case("scalar-limit", _cmmse_scalar_limit),
        Case("trajectory", _cmmse_trajectory),
        Case("entropy-mixing", _cmmse_entropy_mixing),
        Case("paths", _cmmse_paths),
    ]


_DEFAULTS = {
    "alpha": _alpha_defaults,
    "dpi-check": _dpi_defaults,
    "dpi-continuous": _continuous_defaults,
    "iid-sum": _iid_defaults,
    "szego": _szego_defaults,
    "epi": _epi_defaults,
    "cmmse": _cmmse_defaults,
}


def default_cases(suite: str) -> list[Case]:
    """The built-in battery for a suite; ``full`` concatenates all of them."""
    if suite == "full":
        cases = []
        for name in ("alpha", "dpi-check", "dpi-continuous", "iid-sum", "szego", "epi", "cmmse"):
            cases.extend(Case(f"{name}:{c.name}", c.run) for c in _DEFAULTS[name]())
        return cases
    if suite not in _DEFAULTS:
        raise DomainError(f"unknown suite {suite!r}")
    return _DEFAULTS[suite]()


# ------------------------------------------------- explicit case dispatch


def _case_from_spec(spec, index: int) -> Case:
    name = f"{spec.case}-{index:03d}"
    if spec.case == "alpha":
        densities = [s.build() for s in spec.spectra]
        return Case(name, lambda rng: _alpha_payload(densities))
    if spec.case == "dpi-discrete":
        models = [m.build() for m in spec.models]
        return Case(name, lambda rng: _dpi_payload(models, spec.tolerance, rng))
    if spec.case == "dpi-continuous":
        models = [m.build() for m in spec.models]

        def run_continuous(rng) -> dict:
            wanted = ("per-sample", "per-time") if spec.normalization == "both" else (spec.normalization,)
            reports = {w: dpi_check_continuous(models, w, tolerance=spec.tolerance) for w in wanted}
            base = reports[wanted[0]]
            payload = {
                "normalization": spec.normalization,
                "margin": base.margin,
                "equality": base.equality,
            }
            ok = True
            if "per-sample" in reports:
                ok = ok and reports["per-sample"].margin >= -spec.tolerance
            if "per-time" in reports:
                payload["per_time_margin"] = reports["per-time"].margin
                bandwidth = models[0].bandwidth
                if 2.0 * bandwidth >= 1.0:
                    ok = ok and reports["per-time"].margin >= -spec.tolerance
            return _ok(payload, ok, "margin below tolerance")

        return Case(name, run_continuous)
    if spec.case == "iid-sum":
        return Case(name, _iid_ladder(spec.distribution.build(), spec.n_max))
    if spec.case == "szego":
        return Case(name, _szego_case(spec.spectrum.build(), spec.sizes))
    if spec.case == "epi-gaussian":
        return Case(name, _epi_gaussian_sweep(spec.dimension, spec.pairs, spec.proportional_pairs))
    if spec.case == "epi-scalar":
        return Case(name, _epi_scalar_case(spec.x.build(), spec.y.build()))
    if spec.case == "cmmse-check":

        def run_check(rng) -> dict:
            c = cmmse_combination_check(spec.lambda_u, spec.lambda_v, spec.mixing_angle, spec.q)
            d = divergence_combination_check(spec.lambda_u, spec.lambda_v, spec.mixing_angle, spec.q)
            payload = {
                "cmmse_margin": c["margin"],
                "divergence_margin": d["margin"],
                "q": spec.q,
                "mixing_angle": spec.mixing_angle,
            }
            return _ok(payload, c["passed"] and d["passed"], "combination inequality violated")

        return Case(name, run_check)
    if spec.case == "cmmse-high-snr":

        def run_snr(rng) -> dict:
            report = high_snr_limit_check(spec.lambda_u, spec.lambda_v, spec.mixing_angle, spec.q_ladder)
            gaps = [r["gap"] for r in report["rows"]]
            payload = {"limit": report["limit"], "final_gap": gaps[-1], "table": report["rows"]}
            return _ok(
                payload,
                all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:])),
                "high-snr gap not decreasing",
            )

        return Case(name, run_snr)
    if spec.case == "cmmse-scalar-limit":
        dist = spec.distribution.build()

        def run_limit(rng) -> dict:
            report = scalar_channel_divergence_limit(dist, spec.q_ladder, n_cells=spec.n_cells)
            values = [r["divergence"] for r in report["rows"] if r.get("divergence") is not None]
            payload = {
                "limit": report["limit"],
                "truncated": report["truncated"],
                "table": report["rows"],
            }
            ok = not report["truncated"] and all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
            return _ok(payload, ok, "scalar ladder truncated or not monotone")

        return Case(name, run_limit)
    if spec.case == "cmmse-trajectory":

        def run_traj(rng) -> dict:
            traj = gaussian_cmmse_trajectory(spec.eigenvalue, spec.q, spec.horizon, spec.steps)
            closed = traj.closed_form_integrated(spec.eigenvalue, spec.q)
            tol = max(1e-9, 5.0 * spec.eigenvalue * spec.horizon / spec.steps)
            payload = {"integrated": traj.integrated, "closed_form": closed}
            return _ok(payload, abs(traj.integrated - closed) <= tol, "trajectory integral off closed form")

        return Case(name, run_traj)
    if spec.case == "cmmse-simulate":

        def run_sim(rng) -> dict:
            seed = int(rng.integers(0, 2**31))
            report = simulate_cmmse_paths(
                spec.eigenvalue, spec.q, spec.horizon, spec.steps, spec.n_paths, seed
            )
            payload = {"seed": seed, "table": report["rows"]}
            return _ok(payload, report["passed"], "empirical causal error outside 3 standard errors")

        return Case(name, run_sim)
    raise DomainError(f"unknown case kind {spec.case!r}")


def build_cases(config: ExperimentConfig) -> list[Case]:
    if config.cases is None:
        return default_cases(config.suite)
    return [_case_from_spec(spec, i) for i, spec in enumerate(config.cases)]


# ----------------------------------------------------------------- runner


def run_experiment(config: ExperimentConfig) -> dict:
    """Run a suite and return its JSON-ready report.

    Cases execute concurrently up to ``config.jobs``; results are assembled
    in case order and each case's generator depends only on the root seed
    and its index, so the report is deterministic for a fixed config and
    seed (the timestamp field aside).
    """
    cases = build_cases(config)

    def exec_one(item) -> dict:
        index, case = item
        rng = np.random.default_rng(config.seed ^ index)
        payload = case.run(rng)
        return {"name": case.name, **payload}

    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        results = list(pool.map(exec_one, enumerate(cases)))
    failures = [
        {"case": r["name"], "reason": r.get("failure", "check failed")}
        for r in results
        if not r["passed"]
    ]
    return {
        "schema": SCHEMA_VERSION,
        "suite": config.suite,
        "seed": config.seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "passed": not failures,
        "cases": results,
        "failures": failures,
    }


def _flatten(report: dict) -> tuple[list[dict], list[str]]:
    columns = ["suite", "case", "passed"]
    rows = []
    for case in report["cases"]:
        base = {"suite": report["suite"], "case": case["name"], "passed": case["passed"]}
        for key, value in case.items():
            if key in ("name", "passed", "table"):
                continue
            if isinstance(value, bool) or isinstance(value, (int, float, str)):
                base[key] = value
            elif (
                isinstance(value, (list, tuple))
                and 0 < len(value) <= 8
                and all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in value)
            ):
                for i, e in enumerate(value):
                    base[f"{key}_{i}"] = e
            elif isinstance(value, (list, tuple)) and all(isinstance(e, str) for e in value):
                if value:
                    base[key] = " | ".join(value)
        table = case.get("table")
        if table:
            rows.extend({**base, **entry} for entry in table)
        else:
            rows.append(base)
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return rows, columns


def emit_report(report: dict, out_dir: str, formats) -> list[str]:
    """Write the report files atomically; returns the paths written.

    Always writes a ``failures.json`` manifest when any case failed,
    regardless of the requested formats.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "json" in formats:
        path = os.path.join(out_dir, "report.json")
        write_json(report, path)
        written.append(path)
    if "csv" in formats:
        rows, columns = _flatten(report)
        path = os.path.join(out_dir, "report.csv")
        write_csv(rows, columns, path)
        written.append(path)
    if report["failures"]:
        path = os.path.join(out_dir, "failures.json")
        write_json(
            {"schema": SCHEMA_VERSION, "suite": report["suite"], "failures": report["failures"]},
            path,
        )
        written.append(path)
    return written
