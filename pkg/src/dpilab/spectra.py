"""Power spectral densities of stationary processes.

Discrete-time densities live on the normalized frequency band ``f`` in
``[-1/2, 1/2]`` (cycles per sample) and must be even and strictly positive.
Four representations are supported: ``White``, ``RationalArma``,
``PiecewiseConstant`` and ``Tabulated``.  ``ContinuousSpectralDensity`` models
a band-limited continuous-time density on ``[-B, B]`` Hz and maps onto a
discrete density via Nyquist-rate sampling.

All autocovariances are cosine transforms of the density, so they are real
and symmetric; all log integrals are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.signal

from .errors import DomainError, NumericalError
from .quadrature import integrate

__all__ = [
    "SpectralDensity",
    "White",
    "RationalArma",
    "PiecewiseConstant",
    "Tabulated",
    "ContinuousSpectralDensity",
    "add",
    "sample_bandlimited",
    "POSITIVITY_FLOOR",
]

# Densities touching zero have divergent log integrals; reject, never clamp.
POSITIVITY_FLOOR = 1e-12

_DOMAIN_TOL = 1e-12
_EDGE_MERGE_TOL = 1e-12


def _as_band_frequencies(f) -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.size and np.max(np.abs(arr)) > 0.5 + _DOMAIN_TOL:
        raise DomainError("frequency outside the band [-1/2, 1/2]")
    return np.clip(arr, -0.5, 0.5)


class SpectralDensity:
    """Even, strictly positive spectral density on [-1/2, 1/2]."""

    def evaluate(self, f):
        """Density value at normalized frequency ``f`` (scalar or array)."""
        raise NotImplementedError

    def breakpoints(self) -> tuple[float, ...]:
        """Interior frequencies where the density kinks or jumps."""
        return ()

    def log_spectral_integral(self) -> float:
        """Integral of ln(density) over the band, in nats."""
        return integrate(
            lambda f: np.log(self.evaluate(f)),
            -0.5,
            0.5,
            breakpoints=self.breakpoints(),
        )

    def autocovariance(self, n: int) -> np.ndarray:
        """First ``n`` autocovariances r_0 .. r_{n-1} (cosine transform)."""
        raise NotImplementedError

    def power(self) -> float:
        """Total power r_0."""
        return float(self.autocovariance(1)[0])

    def scaled(self, c: float) -> "SpectralDensity":
        """Density multiplied by a positive constant."""
        raise NotImplementedError

    def __add__(self, other):
        if isinstance(other, SpectralDensity):
            return add(self, other)
        return NotImplemented


def _check_level(value: float, what: str) -> None:
    if not np.isfinite(value) or value < POSITIVITY_FLOOR:
        raise DomainError(f"{what} must be finite and >= {POSITIVITY_FLOOR:g}; got {value!r}")


@dataclass(frozen=True)
class White(SpectralDensity):
    """Flat density: the spectrum of an uncorrelated sequence with variance ``level``."""

    level: float

    def __post_init__(self):
        _check_level(self.level, "white level")

    def evaluate(self, f):
        f = _as_band_frequencies(f)
        return np.full_like(f, self.level) if f.ndim else float(self.level)

    def log_spectral_integral(self) -> float:
        return math.log(self.level)

    def autocovariance(self, n: int) -> np.ndarray:
        r = np.zeros(n)
        r[0] = self.level
        return r

    def scaled(self, c: float) -> "White":
        return White(self.level * c)


@dataclass(frozen=True)
class RationalArma(SpectralDensity):
    """Rational density sigma2 * |B(e^{-i2pi f})|^2 / |A(e^{-i2pi f})|^2.

    ``A(x) = 1 - sum(ar[k] * x^(k+1))`` and ``B(x) = 1 + sum(ma[j] * x^(j+1))``,
    the transfer polynomials of the recursion
    ``X_t = sum ar_k X_{t-k} + e_t + sum ma_j e_{t-j}`` driven by white noise
    with variance ``sigma2``.  A must have all roots strictly outside the unit
    circle; B must not vanish on it.
    """

    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(a) for a in self.ar))
        object.__setattr__(self, "ma", tuple(float(b) for b in self.ma))
        _check_level(self.sigma2, "innovation variance sigma2")
        if self.ar:
            roots = np.polynomial.Polynomial((1.0, *(-a for a in self.ar))).roots()
            if np.min(np.abs(roots)) <= 1.0:
                raise DomainError("autoregressive polynomial has a root on or inside the unit circle")
        if self.ma:
            roots = np.polynomial.Polynomial((1.0, *self.ma)).roots()
            if np.min(np.abs(np.abs(roots) - 1.0)) <= 1e-9:
                raise DomainError("moving-average polynomial vanishes on the unit circle")
        grid = np.linspace(-0.5, 0.5, 8193)
        if np.min(self.evaluate(grid)) < POSITIVITY_FLOOR:
            raise DomainError(f"spectral density falls below the positivity floor {POSITIVITY_FLOOR:g}")

    def evaluate(self, f):
        f = _as_band_frequencies(f)
        z = np.exp(-2j * np.pi * f)
        num = np.polynomial.polynomial.polyval(z, np.asarray((1.0, *self.ma)))
        den = np.polynomial.polynomial.polyval(z, np.asarray((1.0, *(-a for a in self.ar))))
        out = self.sigma2 * np.abs(num) ** 2 / np.abs(den) ** 2
        return out if f.ndim else float(out)

    def _impulse_response(self, n_min: int) -> np.ndarray:
        b = np.asarray((1.0, *self.ma))
        a = np.asarray((1.0, *(-c for c in self.ar)))
        if not self.ar:
            return b
        roots = np.polynomial.Polynomial(a).roots()
        rho = float(np.max(1.0 / np.abs(roots)))
        horizon = int(math.log(1e-18) / math.log(rho)) + 1 if rho > 0 else 1
        length = max(n_min + len(b), horizon)
        if length > 1 << 22:
            raise NumericalError("autoregressive pole too close to the unit circle for a truncated impulse response")
        impulse = np.zeros(length)
        impulse[0] = 1.0
        return scipy.signal.lfilter(b, a, impulse)

    def autocovariance(self, n: int) -> np.ndarray:
        psi = self._impulse_response(n)
        acf = scipy.signal.fftconvolve(psi, psi[::-1])[len(psi) - 1 :]
        out = np.zeros(n)
        m = min(n, len(acf))
        out[:m] = self.sigma2 * acf[:m]
        return out

    def scaled(self, c: float) -> "RationalArma":
        return RationalArma(self.ar, self.ma, self.sigma2 * c)


@dataclass(frozen=True)
class PiecewiseConstant(SpectralDensity):
    """Piecewise-constant density on cells spanning the full band.

    ``edges`` are ascending cell boundaries with ``edges[0] = -1/2`` and
    ``edges[-1] = 1/2``; ``levels[i]`` is the value on ``[edges[i], edges[i+1])``.
    The cell layout must be even: mirrored cells carry equal levels.
    """

    edges: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        levels = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "levels", levels)
        if len(edges) < 2 or len(levels) != len(edges) - 1:
            raise DomainError("piecewise density needs len(edges) == len(levels) + 1 >= 2")
        arr = np.asarray(edges)
        if abs(arr[0] + 0.5) > _DOMAIN_TOL or abs(arr[-1] - 0.5) > _DOMAIN_TOL:
            raise DomainError("piecewise edges must span exactly [-1/2, 1/2]")
        if np.any(np.diff(arr) <= 0):
            raise DomainError("piecewise edges must be strictly ascending")
        for v in levels:
            _check_level(v, "piecewise level")
        mids = 0.5 * (arr[:-1] + arr[1:])
        mirrored = self._lookup(-mids)
        if np.max(np.abs(mirrored - np.asarray(levels))) > 1e-12 * max(levels):
            raise DomainError("piecewise density must be even: mirrored cells need equal levels")

    @classmethod
    def from_half_band(cls, inner_edges: Sequence[float], levels: Sequence[float]) -> "PiecewiseConstant":
        """Build an even density from its restriction to [0, 1/2].

        ``inner_edges`` are the ascending interior boundaries in (0, 1/2) and
        ``levels[i]`` is the value of the density for ``|f|`` in the i-th cell.
        """
        inner = [float(e) for e in inner_edges]
        lv = [float(v) for v in levels]
        if len(lv) != len(inner) + 1:
            raise DomainError("half-band spec needs len(levels) == len(inner_edges) + 1")
        if any(not 0.0 < e < 0.5 for e in inner) or sorted(inner) != inner:
            raise DomainError("half-band inner edges must be ascending inside (0, 1/2)")
        full_edges = [-0.5] + [-e for e in reversed(inner)] + inner + [0.5]
        full_levels = list(reversed(lv[1:])) + lv
        return cls(tuple(full_edges), tuple(full_levels))

    def _lookup(self, f: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(self.edges, f, side="right") - 1, 0, len(self.levels) - 1)
        return np.asarray(self.levels)[idx]

    def evaluate(self, f):
        f = _as_band_frequencies(f)
        out = self._lookup(np.atleast_1d(f))
        return out.reshape(f.shape) if f.ndim else float(out[0])

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(self.edges[1:-1])

    def log_spectral_integral(self) -> float:
        widths = np.diff(self.edges)
        return float(np.sum(widths * np.log(self.levels)))

    def autocovariance(self, n: int) -> np.ndarray:
        edges = np.asarray(self.edges)
        levels = np.asarray(self.levels)
        out = np.zeros(n)
        out[0] = np.sum(np.diff(edges) * levels)
        if n > 1:
            k = np.arange(1, n)[:, None]
            omega = 2.0 * np.pi * k
            sines = np.sin(omega * edges[None, :])
            out[1:] = (levels[None, :] * (sines[:, 1:] - sines[:, :-1]) / omega).sum(axis=1)
        return out

    def scaled(self, c: float) -> "PiecewiseConstant":
        return PiecewiseConstant(self.edges, tuple(v * c for v in self.levels))


@dataclass(frozen=True)
class Tabulated(SpectralDensity):
    """Density sampled on the uniform periodic grid f_j = -1/2 + j/M.

    ``values`` has power-of-two length M >= 1024 and must be even under the
    periodic mirror j -> (M - j) mod M.  Evaluation interpolates linearly and
    wraps at the band edge, so evaluate(1/2) == evaluate(-1/2) == values[0].
    """

    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        m = len(values)
        if m < 1024 or m & (m - 1):
            raise DomainError("tabulated grid length must be a power of two >= 1024")
        arr = np.asarray(values)
        if np.min(arr) < POSITIVITY_FLOOR or not np.all(np.isfinite(arr)):
            raise DomainError(f"spectral density falls below the positivity floor {POSITIVITY_FLOOR:g}")
        mirrored = arr[(-np.arange(m)) % m]
        if np.max(np.abs(arr - mirrored)) > 1e-12 * np.max(arr):
            raise DomainError("tabulated density must be even under the periodic mirror")

    @classmethod
    def from_function(cls, fn, n: int = 1024) -> "Tabulated":
        """Sample a callable on the default grid, symmetrizing roundoff."""
        f = -0.5 + np.arange(n) / n
        raw = np.asarray(fn(f), dtype=float)
        sym = 0.5 * (raw + raw[(-np.arange(n)) % n])
        return cls(tuple(sym))

    def evaluate(self, f):
        f = _as_band_frequencies(f)
        arr = np.asarray(self.values)
        m = len(arr)
        u = (np.atleast_1d(f) + 0.5) * m
        j = np.floor(u).astype(int)
        t = u - j
        out = arr[j % m] * (1.0 - t) + arr[(j + 1) % m] * t
        return out.reshape(f.shape) if f.ndim else float(out[0])

    def breakpoints(self) -> tuple[float, ...]:
        m = len(self.values)
        if m > 4096:
            return ()
        return tuple(-0.5 + np.arange(1, m) / m)

    def autocovariance(self, n: int) -> np.ndarray:
        m = len(self.values)
        xs = -0.5 + np.arange(m + 1) / m
        vs = np.asarray(self.values + (self.values[0],))
        slopes = (vs[1:] - vs[:-1]) * m
        out = np.zeros(n)
        out[0] = np.sum(0.5 * (vs[:-1] + vs[1:])) / m
        chunk = max(1, (1 << 21) // (m + 1))
        for start in range(1, n, chunk):
            k = np.arange(start, min(start + chunk, n))[:, None]
            omega = 2.0 * np.pi * k
            sin_x = np.sin(omega * xs[None, :])
            cos_x = np.cos(omega * xs[None, :])
            terms = (vs[1:] * sin_x[:, 1:] - vs[:-1] * sin_x[:, :-1]) / omega
            terms += slopes[None, :] * (cos_x[:, 1:] - cos_x[:, :-1]) / omega**2
            out[start : start + len(k)] = terms.sum(axis=1)
        return out

    def scaled(self, c: float) -> "Tabulated":
        return Tabulated(tuple(v * c for v in self.values))


def _merged_edges(a: Sequence[float], b: Sequence[float]) -> tuple[float, ...]:
    merged = np.sort(np.concatenate([np.asarray(a), np.asarray(b)]))
    keep = [merged[0]]
    for e in merged[1:]:
        if e - keep[-1] > _EDGE_MERGE_TOL:
            keep.append(e)
    keep[0], keep[-1] = -0.5, 0.5
    return tuple(keep)


def add(x: SpectralDensity, y: SpectralDensity) -> SpectralDensity:
    """Spectral density of the sum of two independent processes.

    Closed under White and PiecewiseConstant; every other combination is
    promoted to a Tabulated density sampled on the default grid (exact at the
    grid nodes, linear in between).
    """
    if isinstance(x, White) and isinstance(y, White):
        return White(x.level + y.level)
    if isinstance(x, White) and isinstance(y, PiecewiseConstant):
        return PiecewiseConstant(y.edges, tuple(v + x.level for v in y.levels))
    if isinstance(x, PiecewiseConstant) and isinstance(y, White):
        return add(y, x)
    if isinstance(x, PiecewiseConstant) and isinstance(y, PiecewiseConstant):
        edges = _merged_edges(x.edges, y.edges)
        mids = 0.5 * (np.asarray(edges[:-1]) + np.asarray(edges[1:]))
        return PiecewiseConstant(edges, tuple(x.evaluate(mids) + y.evaluate(mids)))
    n = 1024
    for s in (x, y):
        if isinstance(s, Tabulated):
            n = max(n, len(s.values))
    return Tabulated.from_function(lambda f: x.evaluate(f) + y.evaluate(f), n=n)


@dataclass(frozen=True)
class ContinuousSpectralDensity:
    """Band-limited continuous-time density F on [-B, B] Hz.

    ``shape`` carries the profile on the normalized band: F(nu) =
    shape(nu / (2B)).  Sampling at the Nyquist rate 2B turns F into the
    discrete density Phi(f) = 2B * F(2B f), which preserves total power.
    """

    bandwidth: float
    shape: SpectralDensity

    def __post_init__(self):
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise DomainError("bandwidth must be a positive real")

    def evaluate_hz(self, nu):
        nu_arr = np.asarray(nu, dtype=float)
        if nu_arr.size and np.max(np.abs(nu_arr)) > self.bandwidth * (1 + 1e-12):
            raise DomainError("frequency outside the band [-B, B]")
        return self.shape.evaluate(nu_arr / (2.0 * self.bandwidth))

    def power(self) -> float:
        return 2.0 * self.bandwidth * self.shape.power()

    def log_integral_hz(self) -> float:
        """Integral of ln F over [-B, B], unnormalized, in nats."""
        return 2.0 * self.bandwidth * self.shape.log_spectral_integral()

    def sampled(self) -> SpectralDensity:
        return self.shape.scaled(2.0 * self.bandwidth)


def sample_bandlimited(density: ContinuousSpectralDensity) -> SpectralDensity:
    """Discrete density of the Nyquist-rate samples: Phi(f) = 2B * F(2B f)."""
    return density.sampled()
