"""Monte-Carlo simulation of the Cox bipolar network seen from a typical receiver.

The receiver sits at the origin on the line L0 (the x axis); its transmitter is
at (d, 0) and always active. Other lines form a Poisson line process, and every
line, L0 included, carries a 1D PPP of active interferers with intensity
p * lambda_v. Everything is sampled inside a disc of radius ``window_radius``.

Random streams
--------------
Trial ``i`` of a run with seed ``seed`` uses ``SeedSequence(seed, spawn_key=(i,))``
and nothing else, so estimates are bit-identical regardless of trial order or
number of worker processes. Within a trial, the geometry is generated in
concentric rings with edges 0, 2, 4, 8, ... km (a single ring for windows up
to 2 km), each ring from its own child stream, and the fading gains come from a
separate child stream in generation order. A realization in a window of radius
2**j km, j >= 1, is therefore a prefix of the realization of every larger
window with the same seed, which makes truncation checks paired comparisons
rather than independent ones.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from statistics import NormalDist

import numpy as np

from .params import NetworkParams

__all__ = [
    "Line",
    "CoxRealization",
    "TrialOutcome",
    "EstimateRecord",
    "RING_BASE_KM",
    "CONFIDENCE",
    "default_window",
    "wilson_interval",
    "sample_plp",
    "sample_realization",
    "run_trial",
    "trial_streams",
    "simulate_sinr",
    "estimate_pc",
    "estimate_pc_thresholds",
]

RING_BASE_KM = 2.0
CONFIDENCE = 0.99
_GEOMETRY, _FADING = 0, 1


@dataclasses.dataclass(frozen=True)
class Line:
    """A line in (rho, theta) form: ``x cos(theta) + y sin(theta) = rho``."""

    rho: float
    theta: float

    def point(self, offset):
        """Cartesian position of the point ``offset`` km along the line from its foot."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (self.rho * c - offset * s, self.rho * s + offset * c)


@dataclasses.dataclass(frozen=True, eq=False)
class CoxRealization:
    """One snapshot of the active transmitters around the typical receiver.

    Interferers are stored flat in generation order. ``interferer_line`` indexes
    ``line_rho``/``line_theta``, with -1 marking the typical line L0. Offsets
    are signed distances along the line from the foot of the perpendicular
    (from the origin, for L0). The desired transmitter is not an interferer.
    """

    window_radius: float
    desired_tx_offset: float
    line_rho: np.ndarray
    line_theta: np.ndarray
    interferer_line: np.ndarray
    interferer_offset: np.ndarray
    interferer_rho: np.ndarray  # perpendicular distance of the owning line, 0 on L0

    @property
    def lines(self) -> list[Line]:
        return [Line(float(r), float(t)) for r, t in zip(self.line_rho, self.line_theta)]

    @property
    def other_lines(self) -> list[tuple[Line, np.ndarray]]:
        return [(line, self.interferer_offset[self.interferer_line == j]) for j, line in enumerate(self.lines)]

    @property
    def typical_line_interferers(self) -> np.ndarray:
        return self.interferer_offset[self.interferer_line < 0]

    @property
    def interferer_distance_sq(self) -> np.ndarray:
        rho = self.interferer_rho
        return rho * rho + self.interferer_offset**2

    def interferer_positions(self) -> np.ndarray:
        """(n, 2) Cartesian coordinates of all interferers, in generation order."""
        # L0 is the x axis, i.e. rho = 0 with theta = 3 pi / 2.
        owner = self.interferer_line
        theta = np.where(owner < 0, 1.5 * math.pi, self.line_theta[owner] if self.line_theta.size else 0.0)
        rho = self.interferer_rho
        x = self.interferer_offset
        return np.column_stack([rho * np.cos(theta) - x * np.sin(theta), rho * np.sin(theta) + x * np.cos(theta)])


@dataclasses.dataclass(frozen=True)
class TrialOutcome:
    desired_power: float
    interference: float
    sinr: float
    success: bool


@dataclasses.dataclass(frozen=True)
class EstimateRecord:
    pc_hat: float
    ci_low: float
    ci_high: float
    n_trials: int
    successes: int
    seed: int
    window_radius: float
    params: NetworkParams

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


def default_window(params: NetworkParams) -> float:
    return max(RING_BASE_KM, 200.0 * params.d)


def wilson_interval(successes: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("n must be positive")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = successes / n
    z2n = z * z / n
    center = (phat + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) / (1.0 + z2n)
    low = 0.0 if successes == 0 else min(phat, max(0.0, center - half))
    high = 1.0 if successes == n else max(phat, min(1.0, center + half))
    return low, high


def _sample_lines(lambda_l, inner, outer, rng):
    # The representation-space PPP restricted to rho in (inner, outer].
    n = rng.poisson(lambda_l * 2.0 * math.pi * (outer - inner))
    rho = rng.uniform(inner, outer, n)
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    return rho, theta


def sample_plp(lambda_l: float, window_radius: float, rng: np.random.Generator, inner_radius: float = 0.0) -> list[Line]:
    """Lines of a PLP with representation-space density ``lambda_l`` hitting the window.

    The count is Poisson with mean ``2 pi lambda_l (R - inner_radius)``;
    rho is uniform on the radial range and theta uniform on [0, 2 pi).
    """
    if not window_radius > 0:
        raise ValueError(f"window_radius must be > 0, got {window_radius}")
    if not 0 <= inner_radius <= window_radius:
        raise ValueError("inner_radius must lie in [0, window_radius]")
    rho, theta = _sample_lines(lambda_l, inner_radius, window_radius, rng)
    return [Line(float(r), float(t)) for r, t in zip(rho, theta)]


def _ring_edges(window_radius):
    if window_radius <= RING_BASE_KM:
        return [0.0, float(window_radius)]
    edges = [0.0, RING_BASE_KM]
    while edges[-1] < window_radius:
        edges.append(2.0 * edges[-1])
    return edges


def _as_seed_sequence(stream):
    if isinstance(stream, np.random.SeedSequence):
        return stream
    return np.random.SeedSequence(stream)


def _child_rng(ss, *key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + key)))


def trial_streams(seed: int, trial_index: int) -> tuple[np.random.SeedSequence, np.random.Generator]:
    """Geometry stream and fading generator of one trial."""
    ss = np.random.SeedSequence(seed, spawn_key=(trial_index,))
    return ss, _child_rng(ss, _FADING)


def sample_realization(params: NetworkParams, window_radius: float, stream) -> CoxRealization:
    """Sample the interferers seen by the typical receiver inside the window.

    ``stream`` is a ``numpy.random.SeedSequence`` (or an int seed for one).
    """
    if not window_radius >= 10.0 * params.d:
        raise ValueError(f"window_radius={window_radius} must be at least 10 d = {10.0 * params.d}")
    ss = _as_seed_sequence(stream)
    intensity = params.p * params.lambda_v
    line_rho = np.zeros(0)
    line_theta = np.zeros(0)
    owners, rhos, offsets = [], [], []
    edges = _ring_edges(window_radius)
    for j, (inner, outer) in enumerate(zip(edges[:-1], edges[1:])):
        rng = _child_rng(ss, _GEOMETRY, j)
        rho, theta = _sample_lines(params.lambda_l, inner, outer, rng)
        line_rho = np.concatenate([line_rho, rho])
        line_theta = np.concatenate([line_theta, theta])
        # Every line so far, then L0, gets the part of its chord in this ring.
        seg_rho = np.append(line_rho, 0.0)
        seg_owner = np.append(np.arange(line_rho.size), -1)
        rho2 = seg_rho * seg_rho
        lo = np.sqrt(np.maximum(inner * inner - rho2, 0.0))
        length = np.sqrt(np.maximum(outer * outer - rho2, 0.0)) - lo
        counts = rng.poisson(intensity * 2.0 * length)
        u = rng.uniform(-1.0, 1.0, int(counts.sum()))
        x = u * np.repeat(length, counts)
        if inner > 0:
            x += np.copysign(np.repeat(lo, counts), u)
        owners.append(np.repeat(seg_owner, counts))
        rhos.append(np.repeat(seg_rho, counts))
        offsets.append(x)
    owner = np.concatenate(owners)
    rho_of = np.concatenate(rhos)
    offset = np.concatenate(offsets)

    keep_line = np.ones(line_rho.size, dtype=bool)
    if edges[-1] > window_radius:
        # The last ring overshoots the window; trim while keeping generation order.
        keep_line = line_rho <= window_radius
        inside = rho_of * rho_of + offset * offset <= window_radius * window_radius
        owner, rho_of, offset = owner[inside], rho_of[inside], offset[inside]
        remap = np.append(np.cumsum(keep_line) - 1, -1)
        owner = remap[owner]
    return CoxRealization(
        window_radius=float(window_radius),
        desired_tx_offset=params.d,
        line_rho=line_rho[keep_line],
        line_theta=line_theta[keep_line],
        interferer_line=owner,
        interferer_offset=offset,
        interferer_rho=rho_of,
    )


def _path_gain(r2, alpha):
    if alpha == 4.0:
        inv = 1.0 / r2
        return inv * inv
    return r2 ** (-alpha / 2.0)


def run_trial(realization: CoxRealization, params: NetworkParams, rng: np.random.Generator) -> TrialOutcome:
    """Draw unit-mean exponential fading and evaluate the SINR of the typical link.

    The first gain belongs to the desired link, the rest to the interferers in
    generation order.
    """
    r2 = realization.interferer_distance_sq
    gains = rng.exponential(size=r2.size + 1)
    desired = params.p_t * gains[0] * realization.desired_tx_offset ** -params.alpha
    interference = params.p_t * float(np.dot(gains[1:], _path_gain(r2, params.alpha)))
    denom = interference + params.sigma2
    sinr = desired / denom if denom > 0 else math.inf
    return TrialOutcome(desired, interference, sinr, sinr > params.beta)


def _sinr_chunk(params, window_radius, seed, start, stop):
    out = np.empty(stop - start)
    for i in range(start, stop):
        ss, fading = trial_streams(seed, i)
        out[i - start] = run_trial(sample_realization(params, window_radius, ss), params, fading).sinr
    return out


def _check_seed(seed):
    if not (isinstance(seed, (int, np.integer)) and 0 <= seed < 2**64):
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def simulate_sinr(params: NetworkParams, window_radius: float, n_trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """SINR of trials 0..n_trials-1; the result does not depend on ``workers``."""
    seed = _check_seed(seed)
    if workers <= 1 or n_trials < 2 * workers:
        return _sinr_chunk(params, window_radius, seed, 0, n_trials)
    bounds = np.linspace(0, n_trials, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_sinr_chunk, *zip(*[(params, window_radius, seed, a, b) for a, b in zip(bounds[:-1], bounds[1:])]))
        return np.concatenate(list(parts))


def _record(sinr, params, window_radius, seed):
    n = sinr.size
    successes = int(np.count_nonzero(sinr > params.beta))
    low, high = wilson_interval(successes, n)
    return EstimateRecord(successes / n, low, high, n, successes, seed, float(window_radius), params)


def estimate_pc(params: NetworkParams, window_radius: float | None = None, n_trials: int = 100_000, seed: int = 0,
                workers: int = 1) -> EstimateRecord:
    """Empirical success probability with a 99% Wilson interval."""
    return estimate_pc_thresholds(params, [params.beta], window_radius, n_trials, seed, workers)[0]


def estimate_pc_thresholds(params: NetworkParams, betas, window_radius: float | None = None, n_trials: int = 100_000,
                           seed: int = 0, workers: int = 1) -> list[EstimateRecord]:
    """:func:`estimate_pc` for several thresholds from one set of trials.

    The sampled SINRs do not depend on beta, so each record is identical to a
    separate :func:`estimate_pc` call with that beta and the same seed.
    """
    if n_trials < 100:
        raise ValueError(f"n_trials must be >= 100, got {n_trials}")
    if window_radius is None:
        window_radius = default_window(params)
    sinr = simulate_sinr(params, window_radius, n_trials, seed, workers)
    return [_record(sinr, params.replace(beta=b), window_radius, seed) for b in betas]
