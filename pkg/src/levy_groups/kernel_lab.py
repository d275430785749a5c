"""Brownian kernels, definiteness audits and counterexample certificates.

The Brownian kernel of a metric d with base point x0 is

    K(x, y) = (d(x, x0) + d(y, x0) - d(x, y)) / 2.

K is positive definite exactly when d is a restricted negative definite
kernel (quadratic form <= 0 over weights summing to zero).  On finite
point sets both sides reduce to eigenvalue tests: the smallest eigenvalue
of K, and the largest eigenvalue of the distance matrix compressed onto
the sum-zero subspace.  A witness certificate is a point set and sum-zero
weight vector whose quadratic form is strictly positive, certifying that
the distance is not restricted negative definite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import canonical
from .group_core import (
    SOnElement,
    SU2Element,
    default_identity,
    default_metric,
    dist_son,
    embed_so3,
    haar_son_batch,
    haar_su2_batch,
    pairwise_distance_matrix,
    rotation_angle_so3,
)
from .harmonic import GroupTag, chi
from .rng import RngStream

RELATIVE_EIG_TOL = 1e-8
DEFAULT_MARGIN = 1e-6
CERTIFICATE_SCHEMA_VERSION = "1"


class WitnessNotFoundError(RuntimeError):
    """No positive quadratic form found; the metric may be positive
    definite on this group, or the point count too small."""


def brownian_kernel(metric: Callable, x, y, x0) -> float:
    """K(x, y) = (d(x,x0) + d(y,x0) - d(x,y)) / 2."""
    return 0.5 * (metric(x, x0) + metric(y, x0) - metric(x, y))


def sum_zero_basis(m: int) -> np.ndarray:
    """Orthonormal (m, m-1) basis of the sum-zero subspace (Helmert)."""
    b = np.zeros((m, m - 1))
    for k in range(1, m):
        c = 1.0 / np.sqrt(k * (k + 1.0))
        b[:k, k - 1] = c
        b[k, k - 1] = -k * c
    return b


@dataclass(frozen=True)
class GramAudit:
    """Eigenvalue evidence for one point configuration.

    ``max_centered_eig`` is the largest eigenvalue of the distance matrix
    restricted to the sum-zero subspace; positive means the distance is
    not restricted negative definite there.  ``min_K_eig`` is the smallest
    eigenvalue of the Brownian-kernel matrix for base point x0.
    """

    points: tuple
    x0: object
    D: np.ndarray
    K: np.ndarray
    max_centered_eig: float
    min_K_eig: float
    centered_eig_scale: float
    K_eig_scale: float

    def is_positive_semidefinite(self, tol_rel: float = RELATIVE_EIG_TOL) -> bool:
        return self.min_K_eig >= -tol_rel * max(self.K_eig_scale, 1.0)

    def is_restricted_negative(self, tol_rel: float = RELATIVE_EIG_TOL) -> bool:
        return self.max_centered_eig <= tol_rel * max(self.centered_eig_scale, 1.0)


def gram_audit(points: Sequence, metric: Callable | None = None, x0=None) -> GramAudit:
    """Distance and kernel matrices with their decisive eigenvalues.

    x0 defaults to the group identity.  Raises on non-finite distances.
    """
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    d = pairwise_distance_matrix(points, metric)
    met = metric if metric is not None else default_metric(points)
    if x0 is None:
        x0 = default_identity(points)
    d0 = np.array([met(p, x0) for p in points], dtype=float)
    if not (np.isfinite(d).all() and np.isfinite(d0).all()):
        raise ValueError("non-finite distance encountered")
    k = 0.5 * (d0[:, None] + d0[None, :] - d)
    k = 0.5 * (k + k.T)
    b = sum_zero_basis(len(points))
    c = b.T @ d @ b
    c = 0.5 * (c + c.T)
    c_eigs = np.linalg.eigvalsh(c)
    k_eigs = np.linalg.eigvalsh(k)
    return GramAudit(
        points=tuple(points),
        x0=x0,
        D=d,
        K=k,
        max_centered_eig=float(c_eigs[-1]),
        min_K_eig=float(k_eigs[0]),
        centered_eig_scale=float(np.abs(c_eigs).max()),
        K_eig_scale=float(np.abs(k_eigs).max()),
    )


def lemma_equivalence_check(
    points: Sequence,
    metric: Callable | None = None,
    x0=None,
    tol_rel: float = RELATIVE_EIG_TOL,
) -> bool:
    """True when the kernel-PSD test and the restricted-negativity test
    agree on this configuration (they must, by the kernel identity)."""
    audit = gram_audit(points, metric, x0)
    return audit.is_positive_semidefinite(tol_rel) == audit.is_restricted_negative(tol_rel)


# ---------------------------------------------------------------------------
# Witness certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessCertificate:
    """Self-verifying evidence that a distance is not restricted negative
    definite: sum-zero weights with a strictly positive quadratic form."""

    group: str  # "so3" or "son"
    n: int
    points: tuple
    weights: np.ndarray
    value: float
    seed: int
    stream: int
    method: str = "eigenvector"
    scale: float = 1.0
    tool_version: str = "0.1.0"

    def quadratic_form(self, scale: float | None = None) -> float:
        """Recompute sum_ij w_i w_j d(g_i, g_j) from the stored data."""
        s = self.scale if scale is None else scale
        d = pairwise_distance_matrix(self.points, scale=s)
        return float(self.weights @ d @ self.weights)

    def verify(self, tol: float = 1e-10, weight_tol: float = 1e-12) -> bool:
        if abs(float(np.sum(self.weights))) > weight_tol:
            return False
        return abs(self.quadratic_form() - self.value) <= tol

    def to_json(self) -> str:
        doc = {
            "schema_version": CERTIFICATE_SCHEMA_VERSION,
            "kind": "witness",
            "group": self.group,
            "n": self.n,
            "m": len(self.points),
            "points": [
                list(map(float, p.entries.ravel() if isinstance(p, SOnElement) else p.vector))
                for p in self.points
            ],
            "weights": [float(w) for w in self.weights],
            "value": float(self.value),
            "seed": {"seed": self.seed, "stream": self.stream},
            "method": self.method,
            "scale": float(self.scale),
            "tool_version": self.tool_version,
        }
        return canonical.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "WitnessCertificate":
        doc = json.loads(text)
        n = int(doc["n"])
        points = tuple(
            SOnElement(np.asarray(row, dtype=float).reshape(n, n)) for row in doc["points"]
        )
        return cls(
            group=doc["group"],
            n=n,
            points=points,
            weights=np.asarray(doc["weights"], dtype=float),
            value=float(doc["value"]),
            seed=int(doc["seed"]["seed"]),
            stream=int(doc["seed"]["stream"]),
            method=doc.get("method", "eigenvector"),
            scale=float(doc.get("scale", 1.0)),
            tool_version=doc.get("tool_version", "unknown"),
        )


def _centered_unit(w: np.ndarray) -> np.ndarray:
    w = w - w.mean()
    norm = np.linalg.norm(w)
    if norm == 0.0:
        return w
    return w / norm


def find_witness(
    group: str,
    m: int,
    trials: int,
    rng: RngStream,
    n: int | None = None,
    margin: float = DEFAULT_MARGIN,
) -> WitnessCertificate:
    """Randomized search for a positive quadratic form over sum-zero weights.

    Per trial: m Haar points, top eigenpair of the distance matrix on the
    sum-zero subspace; accepted when the eigenvalue clears ``margin``.
    If the eigenvector route fails, weights built from the centered
    second character are tried on the same points.  For SO(n), n > 3, the
    points are Haar draws of the embedded SO(3) subgroup, which is where
    the defect provably lives; the certificate is stated in SO(n).

    First trial to succeed wins; raises WitnessNotFoundError otherwise.
    Passing "su2" runs the same search (and is expected to fail: the
    SU(2) distance is restricted negative definite).
    """
    if m < 4:
        raise ValueError("m must be >= 4")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    group = group.lower()
    if group == "so3":
        n = 3
    elif group == "son":
        if n is None or n <= 3:
            raise ValueError("group 'son' requires n > 3")
    elif group != "su2":
        raise ValueError(f"unknown group {group!r}")

    basis = sum_zero_basis(m)
    for trial in range(trials):
        if group == "su2":
            quats = haar_su2_batch(rng, m)
            points = tuple(SU2Element.from_vector(q) for q in quats)
            angles = np.arccos(np.clip(quats[:, 0], -1.0, 1.0))
            tag = GroupTag.SU2
        else:
            mats = haar_son_batch(3, m, rng)
            points = tuple(SOnElement(mat) for mat in mats)
            angles = np.array([rotation_angle_so3(p) for p in points])
            tag = GroupTag.SO3
        d = pairwise_distance_matrix(points)
        c = basis.T @ d @ basis
        eigvals, eigvecs = np.linalg.eigh(0.5 * (c + c.T))
        weights = _centered_unit(basis @ eigvecs[:, -1])
        value = float(weights @ d @ weights)
        method = "eigenvector"
        if not (eigvals[-1] > margin and value > margin):
            weights = _centered_unit(chi(tag, 2, angles))
            value = float(weights @ d @ weights)
            method = "character"
            if not value > margin:
                continue
        if group == "son":
            cert = WitnessCertificate(
                group="so3", n=3, points=points, weights=weights, value=value,
                seed=rng.seed, stream=rng.stream_id, method=method,
            )
            return transfer_witness(cert, n)
        return WitnessCertificate(
            group=group, n=3 if group == "so3" else 2, points=points,
            weights=weights, value=value, seed=rng.seed, stream=rng.stream_id,
            method=method,
        )
    raise WitnessNotFoundError(
        f"no witness in {trials} trial(s) with m={m}: the metric may be "
        "positive definite on this group, or m too small"
    )


def transfer_witness(cert: WitnessCertificate, n: int, scale: float = 1.0) -> WitnessCertificate:
    """Carry an SO(3) certificate into SO(n), n > 3.

    Points are embedded block-diagonally, weights kept; the quadratic
    form is recomputed with the SO(n) principal-angle metric (times
    ``scale``), which restricts exactly to the SO(3) distance.
    """
    if cert.group != "so3" or cert.n != 3:
        raise ValueError("transfer requires an SO(3) certificate")
    if n <= 3:
        raise ValueError("target size must exceed 3")
    points = tuple(embed_so3(p, n) for p in cert.points)
    d = pairwise_distance_matrix(points, metric=lambda g, h: dist_son(g, h, scale=scale))
    value = float(cert.weights @ d @ cert.weights)
    return replace(cert, group="son", n=n, points=points, value=value,
                   method="transfer", scale=scale)
