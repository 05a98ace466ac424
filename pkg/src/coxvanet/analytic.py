"""Success probability, area spectral efficiency and optimum ALOHA probability.

All lengths inside the Laplace-transform integrals are measured in units of
``ell = (s * p_t) ** (1 / alpha)``, the distance at which an interferer's mean
received power equals ``1 / s``. In those units the along-line integral
depends only on alpha, and the interference from the other lines reads

    L_I1(s) = exp(-2 mu_l ell J),   J = int_0^inf 1 - exp(-k G(v)) dv,

with ``k = 2 p lambda_v ell`` and ``G(v) = int_0^inf du / (1 + (u^2 + v^2)^(alpha/2))``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .params import NetworkParams
from .quadrature import QuadratureSpec, integrate_interval, integrate_semi_infinite

__all__ = [
    "PcModel",
    "AseResult",
    "OptimalP",
    "NonUnimodalObjective",
    "csc_integral",
    "laplace_i0",
    "laplace_i1",
    "laplace_total",
    "success_probability",
    "pc_limit_1d",
    "pc_limit_2d",
    "ase",
    "ase_per_line",
    "optimal_p",
]

DEFAULT_SPEC = QuadratureSpec()

GRID_POINTS = 32
P_TOL = 1e-4
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class PcModel(enum.Enum):
    COX = "cox"
    LIMIT_1D = "1d"
    LIMIT_2D = "2d"


class NonUnimodalObjective(ArithmeticError):
    """The ASE-versus-p grid shows more than one interior local maximum."""

    def __init__(self, maxima):
        self.maxima = tuple(maxima)
        super().__init__(f"ASE(p) has {len(self.maxima)} interior local maxima near p = {self.maxima}")


@dataclasses.dataclass(frozen=True)
class AseResult:
    ase: float  # bits/s/Hz/km^2
    pc: float
    lambda_active: float  # km^-2
    beta: float

    def recompute(self) -> float:
        return self.lambda_active * self.pc * math.log2(1.0 + self.beta)


class OptimalP(NamedTuple):
    p_star: float
    ase_star: float
    iterations: int  # golden-section steps; 0 for the closed forms


def csc_integral(a: float, alpha: float) -> float:
    """Closed form of ``int_0^inf dx / (1 + x**alpha / a)``, ``a**(1/alpha) (pi/alpha) csc(pi/alpha)``."""
    return a ** (1.0 / alpha) * (math.pi / alpha) / math.sin(math.pi / alpha)


def _typical_line_exponent(s, params):
    return 2.0 * params.p * params.lambda_v * csc_integral(s * params.p_t, params.alpha)


def laplace_i0(s: float, params: NetworkParams) -> float:
    """Laplace transform of the interference from the receiver's own line."""
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    return math.exp(-_typical_line_exponent(s, params))


# --- inner integrals, all in units of ell -------------------------------------------


@lru_cache(maxsize=1 << 16)
def _line_profile(v, alpha, spec):
    """G(v): along-line integral for a line at distance v (< 1) from the receiver."""

    def f(u):
        return 1.0 / (1.0 + (u * u + v * v) ** (alpha / 2.0))

    return integrate_semi_infinite(f, spec)[0]


@lru_cache(maxsize=1 << 16)
def _far_profile(eps, alpha, spec):
    """H(eps) = G(v) v^(alpha-1) with eps = v^-alpha, and D(eps) = (H(0) - H(eps)) / eps."""

    def h(w):
        q = (1.0 + w * w) ** (alpha / 2.0)
        return 1.0 / (eps + q)

    def dh(w):
        q = (1.0 + w * w) ** (alpha / 2.0)
        return 1.0 / ((eps + q) * q)

    return integrate_semi_infinite(h, spec)[0], integrate_semi_infinite(dh, spec)[0]


def _far_coefficient(alpha):
    # int_0^inf (1 + w^2)^(-alpha/2) dw: G(v) ~ this * v^(1 - alpha) as v -> inf.
    return math.sqrt(math.pi) * math.exp(math.lgamma((alpha - 1.0) / 2.0) - math.lgamma(alpha / 2.0)) / 2.0


def _profile(v, alpha, spec):
    if v < 1.0:
        return _line_profile(v, alpha, spec)
    return v ** (1.0 - alpha) * _far_profile(v**-alpha, alpha, spec)[0]


def _one_minus_exp_minus_id(y):
    """1 - exp(-y) - y without cancellation for small y."""
    if abs(y) > 0.1:
        return -math.expm1(-y) - y
    term, total = -y * y / 2.0, 0.0
    n = 2
    while abs(term) > 1e-18 * y * y:
        total += term
        n += 1
        term *= -y / n
    return total


def _other_lines_integral(k, alpha, spec):
    """J(k) = int_0^inf 1 - exp(-k G(v)) dv.

    The integrand decays like v^(1-alpha), too slowly for alpha < 3 to be
    integrated directly on the compactified axis. Beyond v0 its leading term
    k C v^(1-alpha) is subtracted and integrated in closed form; the remainder
    decays like v^(2-2alpha).
    """
    inner = spec.tightened(10.0)
    c = _far_coefficient(alpha)
    v0 = max(1.0, (k * c) ** (1.0 / (alpha - 1.0)))

    def near(v):
        return np.array([-math.expm1(-k * _profile(x, alpha, inner)) for x in np.ravel(v)]).reshape(np.shape(v))

    def far_remainder(v):
        out = np.empty(np.size(v))
        for i, x in enumerate(np.ravel(v)):
            eps = x**-alpha
            h, dh = _far_profile(eps, alpha, inner)
            lead = k * x ** (1.0 - alpha)
            out[i] = _one_minus_exp_minus_id(lead * h) - lead * eps * dh
        return out.reshape(np.shape(v))

    head, _ = integrate_interval(near, 0.0, v0, spec)
    tail, _ = integrate_semi_infinite(far_remainder, spec, lower=v0, scale=v0)
    return head + tail + k * c * v0 ** (2.0 - alpha) / (alpha - 2.0)


def laplace_i1(s: float, params: NetworkParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Laplace transform of the interference from all lines other than the receiver's."""
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    k_raw = 2.0 * params.p * params.lambda_v
    if s == 0 or params.mu_l == 0 or k_raw == 0:
        return 1.0
    ell = (s * params.p_t) ** (1.0 / params.alpha)
    j = _other_lines_integral(k_raw * ell, params.alpha, spec)
    return math.exp(-2.0 * params.mu_l * ell * j)


def laplace_total(s: float, params: NetworkParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return laplace_i0(s, params) * laplace_i1(s, params, spec)


def _laplace_argument(params):
    return params.beta * params.d**params.alpha / params.p_t


def pc_limit_1d(params: NetworkParams) -> float:
    """Success probability of the 1D PPP the Cox model tends to as mu_l -> 0."""
    a = params.alpha
    exponent = 2.0 * params.p * params.lambda_v * params.beta ** (1.0 / a) * params.d * (math.pi / a) / math.sin(math.pi / a)
    return math.exp(-params.noise_exponent - exponent)


def pc_limit_2d(params: NetworkParams) -> float:
    """Success probability of the 2D PPP with density ``params.lambda_active``."""
    a = params.alpha
    exponent = (
        math.pi**2 * params.p * params.lambda_l * params.lambda_v * params.beta ** (2.0 / a) * params.d**2
        * (2.0 * math.pi / a) / math.sin(2.0 * math.pi / a)
    )
    return math.exp(-params.noise_exponent - exponent)


def success_probability(params: NetworkParams, model: PcModel = PcModel.COX, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    model = PcModel(model)
    if model is PcModel.LIMIT_1D:
        return pc_limit_1d(params)
    if model is PcModel.LIMIT_2D:
        return pc_limit_2d(params)
    s = _laplace_argument(params)
    return math.exp(-params.noise_exponent) * laplace_i0(s, params) * laplace_i1(s, params, spec)


def ase(params: NetworkParams, model: PcModel = PcModel.COX, spec: QuadratureSpec = DEFAULT_SPEC) -> AseResult:
    pc = success_probability(params, model, spec)
    lam = params.lambda_active
    return AseResult(ase=lam * pc * math.log2(1.0 + params.beta), pc=pc, lambda_active=lam, beta=params.beta)


def ase_per_line(params: NetworkParams, model: PcModel = PcModel.LIMIT_1D, spec: QuadratureSpec = DEFAULT_SPEC) -> AseResult:
    """ASE per km of road, counting only the ``p * lambda_v`` active nodes per km.

    This is the natural normalization for the 1D PPP, which has no notion of
    area; ``lambda_active`` of the result is then in km^-1.
    """
    pc = success_probability(params, model, spec)
    lam = params.p * params.lambda_v
    return AseResult(ase=lam * pc * math.log2(1.0 + params.beta), pc=pc, lambda_active=lam, beta=params.beta)


def _capped(value):
    return 1.0 if value >= 1.0 or math.isinf(value) else value


def _closed_form_optimum(params, model):
    a = params.alpha
    if model is PcModel.LIMIT_1D:
        denom = 2.0 * params.lambda_v * params.d * params.beta ** (1.0 / a) * math.pi / math.sin(math.pi / a)
    else:
        denom = (
            math.pi**2 * params.lambda_l * params.lambda_v * params.d**2 * params.beta ** (2.0 / a)
            * 2.0 * math.pi / math.sin(2.0 * math.pi / a)
        )
    return 1.0 if denom == 0 else _capped(a / denom)


def _golden_section(f, lo, hi, tol):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    iterations = 0
    while hi - lo > tol:
        iterations += 1
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (c, fc, iterations) if fc >= fd else (d, fd, iterations)


def optimal_p(params: NetworkParams, model: PcModel = PcModel.COX, spec: QuadratureSpec = DEFAULT_SPEC) -> OptimalP:
    """ALOHA probability maximizing the ASE; ``params.p`` is ignored.

    The limit models use their closed forms capped at 1. The Cox model is
    searched numerically: a 32-point grid on (0, 1] brackets the maximum, then
    golden-section search narrows it to 1e-4 in p.
    """
    model = PcModel(model)
    if model is not PcModel.COX:
        p_star = _closed_form_optimum(params, model)
        return OptimalP(p_star, ase(params.replace(p=p_star), model, spec).ase, 0)

    # ASE = mu_l * lambda_v * log2(1 + beta) * p * pc(p); the constant factor is
    # dropped so the search still has a well-defined maximizer when it is zero.
    def throughput(p):
        return p * success_probability(params.replace(p=p), model, spec)

    grid = np.arange(1, GRID_POINTS + 1) / GRID_POINTS
    values = np.array([throughput(p) for p in grid])
    interior = [
        i for i in range(1, GRID_POINTS - 1)
        if values[i] > values[i - 1] and values[i] > values[i + 1]
    ]
    if len(interior) >= 2:
        raise NonUnimodalObjective(grid[interior])
    best = int(np.argmax(values))
    lo = grid[best - 1] if best > 0 else 0.0
    hi = grid[best + 1] if best < GRID_POINTS - 1 else 1.0
    p_star, value, iterations = _golden_section(throughput, lo, hi, P_TOL)
    if best == GRID_POINTS - 1 and values[-1] >= value:
        p_star = 1.0
    p_star = float(p_star)
    return OptimalP(p_star, ase(params.replace(p=p_star), model, spec).ase, iterations)
