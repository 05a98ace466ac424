"""Adaptive Gauss-Kronrod quadrature for finite and semi-infinite intervals.

The rule is the 7-point Gauss / 15-point Kronrod pair (the Kronrod estimate is
exact for polynomials of degree 22). Each panel's error estimate is the raw
difference |K15 - G7|, which is pessimistic for smooth integrands but never
optimistic. Refinement is globally adaptive and batched: every panel whose
error exceeds its width-proportional share of the tolerance is bisected, and
all new panels are evaluated in one vectorized call.

Integrands must accept a numpy array and return an array of the same shape.
"""

from __future__ import annotations

import dataclasses

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureNonConvergence",
    "integrate_interval",
    "integrate_semi_infinite",
]

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights at the Kronrod nodes with odd index (1, 3, 5, 7).
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node set on [-1, 1] and the matching weight vectors.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[[1, 3, 5]] = _WG[:3]
_G_WEIGHTS[7] = _WG[3]
_G_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

_INITIAL_PANELS = 4


@dataclasses.dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 60

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be an integer >= 1, got {self.max_subdivisions}")

    def tightened(self, factor: float = 10.0) -> QuadratureSpec:
        """Spec for an inner integral whose error feeds an outer one."""
        return dataclasses.replace(self, rel_tol=self.rel_tol / factor)


class QuadratureNonConvergence(ArithmeticError):
    """Tolerance not met within the subdivision limit; carries the best estimate."""

    def __init__(self, value, err_estimate, spec):
        self.value = value
        self.err_estimate = err_estimate
        self.spec = spec
        super().__init__(
            f"quadrature did not converge within {spec.max_subdivisions} subdivisions: "
            f"value={value!r}, error estimate={err_estimate!r}"
        )


def _gk15(g, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * _NODES
    fx = np.asarray(g(x), dtype=float).reshape(x.shape)
    kronrod = half * (fx @ _K_WEIGHTS)
    gauss = half * (fx @ _G_WEIGHTS)
    return kronrod, np.abs(kronrod - gauss)


def _adaptive(g, a, b, spec):
    edges = np.linspace(a, b, _INITIAL_PANELS + 1)
    lo, hi = edges[:-1], edges[1:]
    depth = np.zeros(lo.size, dtype=int)
    val, err = _gk15(g, lo, hi)
    width = b - a
    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err))
        tol = max(spec.rel_tol * abs(total), spec.abs_tol)
        if total_err <= tol:
            return total, total_err
        split = err > tol * (hi - lo) / width
        if not split.any():
            split = err == err.max()
        if np.any(depth[split] >= spec.max_subdivisions):
            raise QuadratureNonConvergence(total, total_err, spec)
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_depth = np.tile(depth[split] + 1, 2)
        new_val, new_err = _gk15(g, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])


def integrate_interval(f, a: float, b: float, spec: QuadratureSpec = QuadratureSpec()):
    """Integrate ``f`` over the finite interval [a, b].

    Returns ``(value, err_estimate)``; raises :class:`QuadratureNonConvergence`.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        value, err = integrate_interval(f, b, a, spec)
        return -value, err
    with np.errstate(over="ignore", under="ignore"):
        return _adaptive(f, float(a), float(b), spec)


def integrate_semi_infinite(f, spec: QuadratureSpec = QuadratureSpec(), lower: float = 0.0, scale: float = 1.0):
    """Integrate ``f`` over [lower, inf).

    The domain is compactified with ``x = lower + scale * t / (1 - t)``,
    ``t`` in [0, 1). ``scale`` should be the length over which ``f`` varies;
    the default suits integrands already expressed in natural units.

    Returns ``(value, err_estimate)``; raises :class:`QuadratureNonConvergence`.
    """
    if not scale > 0:
        raise ValueError(f"scale must be > 0, got {scale}")

    def g(t):
        gap = 1.0 - t
        # Nodes that round to t == 1 sit at x = inf where the integrand has decayed.
        live = gap > 0
        safe_gap = np.where(live, gap, 1.0)
        x = lower + scale * t / safe_gap
        return np.where(live, f(x) * scale / safe_gap**2, 0.0)

    with np.errstate(over="ignore", under="ignore"):
        return _adaptive(g, 0.0, 1.0, spec)
