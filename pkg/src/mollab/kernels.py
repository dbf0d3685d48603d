"""Smoothed cutoff kernels V, V1, F by vertical-line contour quadrature.

All three kernels are inverse Mellin transforms along a vertical line
Re(s) = sigma:

    V(x)  = (1/2 pi i) int  Gamma^2(s/2+1/4)/Gamma^2(1/4) G(s)/s (pi x)^{-s} ds
    F(x)  = (1/2 pi i) int  Gamma(s/2+1/4) Gamma(-s/2+1/4)/Gamma^2(1/4) G(s)/s x^{-s} ds
    V1(x) = (1/2 pi i) int  Gamma(s/2+1/4)/Gamma(1/4) G1(s)/s pi^{-s/2} x^{-s} ds

G is an even polynomial with G(0) = 1 vanishing to second order at
s = +-(1/2 + 2k) for k = 0..K, which removes the gamma poles crossed by
every contour shift used here; G1 is identically 1.

The integrand decays like exp(-pi |t| / 4) or faster, so a trapezoid rule
with a modest step is accurate to far below the working tolerances; the
quadrature truncation is checked at evaluation time.  For x < 1 the
contour is shifted left of the simple pole at s = 0 (residue G(0) = 1)
and the kernel computed as 1 plus a small integral, which keeps the
evaluation well conditioned as x -> 0.

Direct evaluation is the ground truth; a cubic-spline table on a
geometric grid (KernelTable) serves the moment sweep, which evaluates V1
millions of times.  Table accuracy against direct evaluation is verified
at build time.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import loggamma as _scipy_loggamma

from .errors import AccuracyError, PreconditionError
from .poly import Polynomial

KernelKind = Literal["V", "V1", "F"]

LOG_GAMMA_QUARTER = float(_scipy_loggamma(0.25).real)
LOG_PI = float(np.log(np.pi))

# kernels treated as zero beyond the table; also the tail budget scale
DEFAULT_TAIL_TOL = 1e-9


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma; rejects the poles at 0, -1, -2, ..."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PreconditionError(f"log_gamma pole at z = {z}")
    return complex(_scipy_loggamma(z))


def default_G(pole_kill_count: int) -> Polynomial:
    """prod_{k=0}^{K} (1 - (s/(1/2+2k))^2)^2: even, G(0)=1, double zeros."""
    if pole_kill_count < 0:
        raise PreconditionError("pole_kill_count must be >= 0")
    g = Polynomial([1.0])
    for k in range(pole_kill_count + 1):
        root = 0.5 + 2 * k
        factor = Polynomial([1.0, 0.0, -1.0 / root**2])
        g = g * factor * factor
    return g


def _check_even_unit(p: Polynomial, name: str) -> None:
    if abs(p(0.0) - 1.0) > 1e-12:
        raise PreconditionError(f"{name}(0) must equal 1")
    if any(c != 0.0 for c in p.coeffs[1::2]):
        raise PreconditionError(f"{name} must be an even polynomial")


@dataclass(frozen=True)
class KernelConfig:
    """Contour and pole-killing parameters shared by all kernels."""

    g: Polynomial = field(default_factory=lambda: default_G(2))
    contour_sigma: float = 1.0
    t_cutoff: float = 60.0
    step: float = 1.0 / 64
    pole_kill_count: int = 2
    g1: Polynomial = field(default_factory=lambda: Polynomial([1.0]))

    def __post_init__(self):
        if self.contour_sigma <= 0:
            raise PreconditionError("contour_sigma must be positive")
        if self.t_cutoff <= 0 or self.step <= 0:
            raise PreconditionError("t_cutoff and step must be positive")
        _check_even_unit(self.g, "G")
        _check_even_unit(self.g1, "G1")
        gd = self.g.derivative()
        for k in range(self.pole_kill_count + 1):
            root = 0.5 + 2 * k
            # residuals are judged relative to the evaluation scale, since
            # Horner evaluation at a root cancels down from that scale
            scale = sum(abs(c) * root**j for j, c in enumerate(self.g.coeffs))
            scale_d = sum(abs(c) * root**j for j, c in enumerate(gd.coeffs)) or 1.0
            if abs(self.g(root)) > 1e-9 * scale or abs(gd(root)) > 1e-9 * scale_d:
                raise PreconditionError(
                    f"G must vanish to second order at +-{root}"
                )

    def key(self) -> tuple:
        return (
            self.g.coeffs,
            self.contour_sigma,
            self.t_cutoff,
            self.step,
            self.pole_kill_count,
            self.g1.coeffs,
        )


def _polyval(coeffs: tuple[float, ...], s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    for c in reversed(coeffs):
        out = out * s + c
    return out


def _check_line_clear(kind: KernelKind, sigma: float) -> None:
    # the line Re(s) = sigma must not pass through a gamma pole, killed or
    # not: G's zero cancels the pole analytically but not in floating point
    k = round((abs(sigma) - 0.5) / 2)
    if k >= 0 and abs(abs(sigma) - (0.5 + 2 * k)) < 1e-9:
        if sigma < 0 or kind == "F":
            raise PreconditionError(
                f"contour Re(s) = {sigma} passes through a gamma pole"
            )


def _line_weights(kind: KernelKind, sigma: float, cfg: KernelConfig):
    """Integrand weight w(t) on the half line t >= 0, times trapezoid weights.

    The integrand at -t is the conjugate of the one at +t, so
    (1/2 pi i) int ds = (x^{-sigma}/pi) Re sum_j quad_j w(t_j) e^{-i t_j log x}.
    Nodes where |w| has fallen below 1e-20 of its peak are dropped.
    """
    _check_line_clear(kind, sigma)
    t = np.arange(0.0, cfg.t_cutoff + cfg.step / 2, cfg.step)
    s = sigma + 1j * t
    if kind == "V":
        pref = np.exp(
            2 * _scipy_loggamma(s / 2 + 0.25) - 2 * LOG_GAMMA_QUARTER - s * LOG_PI
        )
        w = pref * _polyval(cfg.g.coeffs, s) / s
    elif kind == "F":
        pref = np.exp(
            _scipy_loggamma(s / 2 + 0.25)
            + _scipy_loggamma(-s / 2 + 0.25)
            - 2 * LOG_GAMMA_QUARTER
        )
        w = pref * _polyval(cfg.g.coeffs, s) / s
    elif kind == "V1":
        pref = np.exp(
            _scipy_loggamma(s / 2 + 0.25) - LOG_GAMMA_QUARTER - s / 2 * LOG_PI
        )
        w = pref * _polyval(cfg.g1.coeffs, s) / s
    else:
        raise PreconditionError(f"unknown kernel kind {kind!r}")

    quad = np.full(t.size, cfg.step)
    quad[0] = cfg.step / 2
    quad[-1] = cfg.step / 2
    wq = w * quad

    absw = np.abs(w)
    peak = absw.max()
    # quadrature sanity: the integrand must be dead at the truncation point
    if absw[-1] > 1e-13 * max(peak, 1.0):
        raise AccuracyError(
            f"integrand not negligible at t_cutoff={cfg.t_cutoff} "
            f"(|w| = {absw[-1]:.3e}); raise t_cutoff"
        )
    keep = int(np.nonzero(absw > 1e-20 * peak)[0].max()) + 1
    return t[:keep], wq[:keep]


def _first_live_pole(kind: KernelKind, cfg: KernelConfig) -> float:
    """Smallest positive real pole of the integrand not killed by G."""
    if kind == "F":
        # Gamma(-s/2+1/4) poles at 1/2 + 2k; G kills k <= pole_kill_count
        return 0.5 + 2 * (cfg.pole_kill_count + 1)
    return np.inf  # V and V1 have right-half-plane analyticity


class _LineCache:
    """Per-(kind, sigma) weight arrays for one KernelConfig."""

    def __init__(self, kind: KernelKind, cfg: KernelConfig):
        self.kind = kind
        self.cfg = cfg
        self._lines: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def line(self, sigma: float):
        if sigma not in self._lines:
            self._lines[sigma] = _line_weights(self.kind, sigma, self.cfg)
        return self._lines[sigma]

    def integrate(self, xs: np.ndarray, sigma: float) -> np.ndarray:
        """(1/2 pi i) int_{(sigma)} w(s) x^{-s} ds for an array of x > 0."""
        t, wq = self.line(sigma)
        lx = np.log(xs)
        out = np.empty(xs.size)
        block = max(1, 2_000_000 // t.size)
        for i in range(0, xs.size, block):
            phase = np.exp(np.outer(-1j * lx[i : i + block], t))
            out[i : i + block] = (phase @ wq).real
        return out * xs ** (-sigma) / np.pi


def _small_x_threshold(kind: KernelKind) -> float:
    # below this, evaluate as 1 + shifted integral (residue at s = 0)
    return 1.0 if kind == "V" else 0.5 if kind == "V1" else 0.05


def _eval_kernel_many(
    kind: KernelKind, xs: np.ndarray, cfg: KernelConfig, sigma: float | None = None
) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0):
        raise PreconditionError("kernel argument must be positive")
    if kind == "F" and cfg.pole_kill_count < 2:
        raise PreconditionError("F needs pole_kill_count >= 2")
    cache = _LineCache(kind, cfg)
    out = np.empty(xs.size)
    small = xs < _small_x_threshold(kind)
    if sigma is not None:
        # explicit contour request: no residue route (used for shift tests)
        return cache.integrate(xs, sigma)
    if np.any(small):
        out[small] = 1.0 + cache.integrate(xs[small], -0.25)
    if np.any(~small):
        out[~small] = cache.integrate(xs[~small], cfg.contour_sigma)
    return out


def eval_V(x: float, cfg: KernelConfig | None = None, sigma: float | None = None) -> float:
    """Second-moment kernel V at x > 0."""
    cfg = cfg or KernelConfig()
    return float(_eval_kernel_many("V", np.array([x]), cfg, sigma)[0])


def eval_F(x: float, cfg: KernelConfig | None = None, sigma: float | None = None) -> float:
    """Dual-sum kernel F at x > 0; requires pole_kill_count >= 2."""
    cfg = cfg or KernelConfig()
    return float(_eval_kernel_many("F", np.array([x]), cfg, sigma)[0])


def eval_V1(x: float, cfg: KernelConfig | None = None, sigma: float | None = None) -> float:
    """First-moment kernel V1 at x > 0 (G1 = 1)."""
    cfg = cfg or KernelConfig()
    return float(_eval_kernel_many("V1", np.array([x]), cfg, sigma)[0])


def decay_envelope(kind: KernelKind, cfg: KernelConfig, sigma: float) -> float:
    """A_sigma with |kernel(x)| <= A_sigma x^{-sigma}, from the (sigma)-line."""
    if sigma >= _first_live_pole(kind, cfg):
        raise PreconditionError(f"sigma={sigma} is at or beyond a live pole")
    t, wq = _line_weights(kind, sigma, cfg)
    return float(np.sum(np.abs(wq))) / np.pi


def _envelope_sigmas(kind: KernelKind, cfg: KernelConfig) -> list[float]:
    live = _first_live_pole(kind, cfg)
    return [s for s in (2.0, 4.0, 6.0, 8.0, 10.0, 12.0) if s < live]


class KernelTable:
    """Memoized kernel on a geometric grid with cubic-spline interpolation.

    Direct quadrature remains the ground truth; the spline error against it
    is measured on off-grid points at build time and the grid refined until
    the requested budget is met.  Beyond the grid the kernel is below
    `tail_tol * 1e-4` and is returned as zero; below the grid the value is
    1 + O(x^{1/4}) and is computed directly (rare at sweep scale).
    """

    def __init__(
        self,
        kind: KernelKind,
        cfg: KernelConfig | None = None,
        interp_tol: float = 1e-9,
        tail_tol: float = DEFAULT_TAIL_TOL,
    ):
        self.kind: KernelKind = kind
        self.cfg = cfg or KernelConfig()
        self.interp_tol = interp_tol
        self.tail_tol = tail_tol
        self.envelopes = {
            s: decay_envelope(kind, self.cfg, s)
            for s in _envelope_sigmas(kind, self.cfg)
        }
        # cut the table where every x beyond is provably negligible
        tiny = tail_tol * 1e-4
        self.x_max = min(
            (a / tiny) ** (1.0 / s) for s, a in self.envelopes.items()
        )
        self.x_min = 1e-7
        points_per_decade = 2000
        decades = np.log10(self.x_max / self.x_min)
        rng = np.random.default_rng(0)
        probe = np.exp(
            rng.uniform(np.log(self.x_min * 10), np.log(self.x_max / 2), 200)
        )
        probe_vals = self.direct(probe)
        for _ in range(4):
            n = int(decades * points_per_decade)
            grid = np.geomspace(self.x_min, self.x_max, n)
            self._log_grid = np.log(grid)
            self._spline = CubicSpline(self._log_grid, self.direct(grid))
            err = float(np.max(np.abs(self._spline(np.log(probe)) - probe_vals)))
            if err <= interp_tol:
                break
            points_per_decade *= 2
        else:
            raise AccuracyError(
                f"kernel table for {kind} did not reach interp_tol={interp_tol}"
            )
        self.interp_error = err

    def direct(self, xs) -> np.ndarray:
        """Ground-truth quadrature evaluation (vectorized)."""
        return _eval_kernel_many(self.kind, np.asarray(xs, dtype=float), self.cfg)

    def __call__(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        out = np.zeros(xs.size)
        inside = (xs >= self.x_min) & (xs <= self.x_max)
        if np.any(inside):
            out[inside] = self._spline(np.log(xs[inside]))
        below = xs < self.x_min
        if np.any(below):
            out[below] = self.direct(xs[below])
        return out[0] if scalar else out

    def sum_cutoff(self, scale: float, tol: float | None = None) -> int:
        """Smallest n0 with sum_{n > n0} n^{-1/2} |K(n scale)| < tol."""
        tol = tol if tol is not None else self.tail_tol
        best = np.inf
        for sig, a in self.envelopes.items():
            # tail <= A scale^{-sig} n0^{1/2-sig} / (sig - 1/2)
            n0 = (a * scale ** (-sig) / ((sig - 0.5) * tol)) ** (1.0 / (sig - 0.5))
            best = min(best, n0)
        return max(1, int(np.ceil(best)))

    def divisor_sum_cutoff(self, scale: float, tol: float | None = None) -> int:
        """Smallest N0 with sum_{N > N0} d(N) N^{-1/2} |K(N scale)| < tol.

        Uses d(N) <= 2 sqrt(N), so the tail is bounded by
        2 A scale^{-sig} N0^{1-sig} / (sig - 1).
        """
        tol = tol if tol is not None else self.tail_tol
        best = np.inf
        for sig, a in self.envelopes.items():
            if sig <= 1:
                continue
            n0 = (2 * a * scale ** (-sig) / ((sig - 1.0) * tol)) ** (1.0 / (sig - 1.0))
            best = min(best, n0)
        return max(1, int(np.ceil(best)))


_TABLE_CACHE: dict[tuple, KernelTable] = {}
_TABLE_LOCK = threading.Lock()


def kernel_table(
    kind: KernelKind,
    cfg: KernelConfig | None = None,
    interp_tol: float = 1e-9,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> KernelTable:
    """Process-wide cache of kernel tables; safe for concurrent readers."""
    cfg = cfg or KernelConfig()
    key = (kind, cfg.key(), interp_tol, tail_tol)
    with _TABLE_LOCK:
        if key not in _TABLE_CACHE:
            _TABLE_CACHE[key] = KernelTable(kind, cfg, interp_tol, tail_tol)
        return _TABLE_CACHE[key]
