"""Characters, Haar densities and the character-expansion coefficients of
the distance-to-identity function on SU(2) and SO(3).

The distance to the identity is a class function, so it expands as
d(., e) = sum_l alpha_l * chi_l.  The coefficients are computed three
independent ways:

* ``alpha_closed``      -- closed forms obtained by integrating the
                           character against the angle density,
* ``alpha_quadrature``  -- adaptive Simpson on the same integral,
* ``alpha_monte_carlo`` -- the double Haar integral
                           d_l * E[ d(gh^{-1}, e) chi_l(g) chi_l(h) ].

The sign of the nontrivial coefficients decides whether the Brownian
kernel built from d is positive definite: on SU(2) all of them are <= 0,
on SO(3) the even-l ones are strictly positive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import simpson_adaptive
from .rng import RngStream

# below this, sin(t) is treated as singular and the character limit is used
_SIN_TOL = 1e-8


class GroupTag(enum.Enum):
    SU2 = "su2"
    SO3 = "so3"


def dim_irrep(group: GroupTag, l: int) -> int:
    """Dimension of the l-th irreducible representation."""
    if l < 0:
        raise ValueError("l must be >= 0")
    return l + 1 if group is GroupTag.SU2 else 2 * l + 1


def chi(group: GroupTag, l: int, t):
    """Character of the l-th irreducible representation at angle t.

    SO(3): evaluated as the cosine sum 1 + 2 sum_{m<=l} cos(mt), which has
    no singularity.  SU(2): sin((l+1)t)/sin(t) with the limit branches
    l+1 at t=0 and (-1)^l (l+1) at t=pi.

    Accepts scalars or arrays; returns the same shape.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    t_arr = np.asarray(t, dtype=float)
    if group is GroupTag.SO3:
        out = np.ones_like(t_arr)
        if l >= 1:
            # cosine sum via the Chebyshev recurrence, no large temporaries
            c1 = np.cos(t_arr)
            prev = np.ones_like(t_arr)
            cur = c1.copy()
            out = out + 2.0 * cur
            for _ in range(2, l + 1):
                prev, cur = cur, 2.0 * c1 * cur - prev
                out = out + 2.0 * cur
    else:
        s = np.sin(t_arr)
        singular = np.abs(s) < _SIN_TOL
        safe = np.where(singular, 1.0, s)
        ratio = np.sin((l + 1) * t_arr) / safe
        limit = np.where(np.cos(t_arr) > 0.0, float(l + 1), (-1.0) ** l * (l + 1))
        out = np.where(singular, limit, ratio)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def angle_density(group: GroupTag, t):
    """Haar density of the distance-to-identity angle on [0, pi].

    SO(3): (1 - cos t)/pi.  SU(2): (2/pi) sin^2(t).  Zero outside [0, pi].
    """
    t_arr = np.asarray(t, dtype=float)
    inside = (t_arr >= 0.0) & (t_arr <= math.pi)
    if group is GroupTag.SO3:
        vals = (1.0 - np.cos(t_arr)) / math.pi
    else:
        vals = (2.0 / math.pi) * np.sin(t_arr) ** 2
    out = np.where(inside, vals, 0.0)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def trace_density_so3(y):
    """Haar density of the trace of an SO(3) rotation on [-1, 3].

    (1/2pi) (3-y)^{1/2} (y+1)^{-1/2}; the y = -1 endpoint is an
    integrable singularity and evaluates to inf.
    """
    y_arr = np.asarray(y, dtype=float)
    inside = (y_arr >= -1.0) & (y_arr <= 3.0)
    num = np.sqrt(np.clip(3.0 - y_arr, 0.0, None))
    den = np.sqrt(np.clip(y_arr + 1.0, 0.0, None))
    with np.errstate(divide="ignore"):
        vals = num / den / (2.0 * math.pi)
    out = np.where(inside, vals, 0.0)
    return float(out) if np.isscalar(y) or y_arr.ndim == 0 else out


def angle_cdf(group: GroupTag, t):
    """Distribution function of the angle law, for goodness-of-fit tests."""
    t_arr = np.clip(np.asarray(t, dtype=float), 0.0, math.pi)
    if group is GroupTag.SO3:
        out = (t_arr - np.sin(t_arr)) / math.pi
    else:
        out = (t_arr - np.sin(t_arr) * np.cos(t_arr)) / math.pi
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def trace_cdf_so3(y):
    """Distribution function of the SO(3) trace law on [-1, 3]."""
    y_arr = np.clip(np.asarray(y, dtype=float), -1.0, 3.0)
    w = np.arccos(np.clip((y_arr - 1.0) / 2.0, -1.0, 1.0))
    out = 1.0 - (w - np.sin(w)) / math.pi
    return float(out) if np.isscalar(y) or y_arr.ndim == 0 else out


@dataclass(frozen=True)
class AngleLaw:
    """Angle density of a group together with its distribution function."""

    group: GroupTag
    density: Callable = field(repr=False)
    cdf: Callable = field(repr=False)


def angle_law(group: GroupTag) -> AngleLaw:
    return AngleLaw(
        group,
        density=lambda t, g=group: angle_density(g, t),
        cdf=lambda t, g=group: angle_cdf(g, t),
    )


# ---------------------------------------------------------------------------
# Expansion coefficients
# ---------------------------------------------------------------------------

def alpha_closed(group: GroupTag, l: int) -> float:
    """Closed-form expansion coefficient of d(., e) on chi_l.

    SO(3), l >= 1:
        (2/pi) (1 + sum_{m<=l} ((-1)^m - 1)/m^2
                  + sum_{2<=m<=l} (m^2+1)/(m^2-1)^2 ((-1)^m + 1))
    and pi/2 + 2/pi for l = 0.  SU(2): pi/2 for l = 0,
    -(8/pi)(l+1)/(l^2 (l+2)^2) for odd l, 0 for even l >= 2.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    if group is GroupTag.SO3:
        if l == 0:
            return math.pi / 2.0 + 2.0 / math.pi
        total = 1.0
        for m in range(1, l + 1):
            total += ((-1) ** m - 1) / m ** 2
        for m in range(2, l + 1):
            total += (m * m + 1) / (m * m - 1) ** 2 * ((-1) ** m + 1)
        return 2.0 / math.pi * total
    if l == 0:
        return math.pi / 2.0
    if l % 2 == 0:
        return 0.0
    return -8.0 / math.pi * (l + 1) / (l * l * (l + 2) ** 2)


def alpha_quadrature(group: GroupTag, l: int, tol: float = 1e-10) -> float:
    """Expansion coefficient by adaptive Simpson on
    int_0^pi t chi_l(t) (angle density)(t) dt."""
    if l < 0:
        raise ValueError("l must be >= 0")

    def integrand(t: float) -> float:
        return t * chi(group, l, t) * angle_density(group, t)

    # panel width under a character half-period, so the oscillation
    # cannot alias with the bisection grid
    return simpson_adaptive(integrand, 0.0, math.pi, tol=tol, panels=l + 3)


def alpha_monte_carlo(
    group: GroupTag,
    l: int,
    n_samples: int,
    rng: RngStream,
    chunk: int = 1 << 17,
) -> tuple[float, float]:
    """Monte Carlo coefficient from the double Haar integral.

    Draws pairs (g, h) from Haar measure and averages
    d(gh^{-1}, e) chi_l(g) chi_l(h); the mean times d_l estimates the
    coefficient.  Returns (estimate, standard error of the scaled mean).
    Requires n_samples >= 1000.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    if l < 0:
        raise ValueError("l must be >= 0")
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        u = _unit_rows(rng, m)
        v = _unit_rows(rng, m)
        dot = np.einsum("ij,ij->i", u, v)
        if group is GroupTag.SU2:
            tg = np.arccos(np.clip(u[:, 0], -1.0, 1.0))
            th = np.arccos(np.clip(v[:, 0], -1.0, 1.0))
            tgh = np.arccos(np.clip(dot, -1.0, 1.0))
        else:
            # rotations sampled through the covering map: the rotation
            # angle of Ad(q) is arccos(2 q_1^2 - 1), and of Ad(u)Ad(v)^T
            # is arccos(2 <u,v>^2 - 1)
            tg = np.arccos(np.clip(2.0 * u[:, 0] ** 2 - 1.0, -1.0, 1.0))
            th = np.arccos(np.clip(2.0 * v[:, 0] ** 2 - 1.0, -1.0, 1.0))
            tgh = np.arccos(np.clip(2.0 * dot ** 2 - 1.0, -1.0, 1.0))
        x = tgh * chi(group, l, tg) * chi(group, l, th)
        total += float(x.sum())
        total_sq += float((x * x).sum())
        done += m
    d_l = dim_irrep(group, l)
    mean = total / n_samples
    var = max(0.0, (total_sq - n_samples * mean * mean) / (n_samples - 1))
    stderr = math.sqrt(var / n_samples)
    return d_l * mean, d_l * stderr


def _unit_rows(rng: RngStream, m: int) -> np.ndarray:
    v = rng.generator.standard_normal((m, 4))
    norm = np.linalg.norm(v, axis=1)
    while (bad := norm < 1e-150).any():
        v[bad] = rng.generator.standard_normal((int(bad.sum()), 4))
        norm = np.linalg.norm(v, axis=1)
    return v / norm[:, None]


def combine_mc_estimates(parts: list[tuple[float, float, int]]) -> tuple[float, float]:
    """Pool (estimate, stderr, n) triples from independent streams."""
    n_total = sum(n for _, _, n in parts)
    est = sum(e * n for e, _, n in parts) / n_total
    var = sum((n / n_total) ** 2 * s ** 2 for _, s, n in parts)
    return est, math.sqrt(var)


def partial_sum(group: GroupTag, lmax: int, t):
    """Partial character expansion sum_{l<=lmax} alpha_l chi_l(t)."""
    if lmax < 0:
        raise ValueError("lmax must be >= 0")
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    for l in range(lmax + 1):
        a = alpha_closed(group, l)
        if a != 0.0:
            out = out + a * chi(group, l, t_arr)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# Coefficient tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientEntry:
    l: int
    alpha: float
    method: str  # closed | quadrature | monte-carlo
    stderr: Optional[float] = None


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients for one group, tagged by how each value was obtained."""

    group: GroupTag
    entries: tuple[CoefficientEntry, ...]

    @classmethod
    def compute(
        cls,
        group: GroupTag,
        lmax: int,
        mc_samples: int = 0,
        rng: RngStream | None = None,
        tol: float = 1e-10,
    ) -> "CoefficientTable":
        """Closed-form and quadrature columns for l <= lmax, plus Monte
        Carlo when ``mc_samples`` > 0 (an rng is then required)."""
        entries: list[CoefficientEntry] = []
        for l in range(lmax + 1):
            entries.append(CoefficientEntry(l, alpha_closed(group, l), "closed"))
            entries.append(CoefficientEntry(l, alpha_quadrature(group, l, tol=tol), "quadrature"))
            if mc_samples > 0:
                if rng is None:
                    raise ValueError("Monte Carlo entries need an RngStream")
                est, se = alpha_monte_carlo(group, l, mc_samples, rng)
                entries.append(CoefficientEntry(l, est, "monte-carlo", stderr=se))
        return cls(group, tuple(entries))

    def by_method(self, l: int, method: str) -> CoefficientEntry:
        for e in self.entries:
            if e.l == l and e.method == method:
                return e
        raise KeyError(f"no entry for l={l}, method={method}")

    def consistent(self, tol: float = 1e-8, k_sigma: float = 3.0) -> bool:
        """Cross-method agreement: closed vs quadrature within ``tol``,
        Monte Carlo within ``k_sigma`` standard errors of closed."""
        ls = sorted({e.l for e in self.entries})
        for l in ls:
            closed = self.by_method(l, "closed").alpha
            if abs(closed - self.by_method(l, "quadrature").alpha) > tol:
                return False
            try:
                mc = self.by_method(l, "monte-carlo")
            except KeyError:
                continue
            if abs(mc.alpha - closed) > k_sigma * (mc.stderr or 0.0):
                return False
        return True
