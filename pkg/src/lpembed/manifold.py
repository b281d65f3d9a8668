"""Intrinsic-dimension estimation and kernel-density ridge extraction.

Three classical estimators of the dimension of the set a point cloud
concentrates on:

* ``local_pca``  -- per-point PCA over a k-neighborhood, counting
  eigenvalues above a fraction of the leading one;
* ``mle_knn``    -- the nearest-neighbor maximum-likelihood estimator
  built from log distance ratios;
* ``simplex_skewness`` -- mean absolute sine of the angle between
  neighbor pairs, inverted through its closed-form expectation under an
  isotropic direction law.

Plus subspace-constrained mean shift (SCMS): mean-shift steps projected
onto the span of the Hessian eigenvectors with smallest eigenvalues,
which converges to density ridges of the requested dimension, and the
set-to-set Hausdorff distance used to score recovered structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff
from scipy.special import gammaln
from sklearn.neighbors import NearestNeighbors

from .errors import ParameterError

METHODS = ("local_pca", "mle_knn", "simplex_skewness")


def default_neighborhood(n):
    """Shipped default neighborhood size: max(10, sqrt(n)/2)."""
    return max(10, int(round(math.sqrt(n) / 2.0)))


@dataclass(frozen=True)
class DimensionEstimate:
    method: str
    value: float
    per_point: np.ndarray
    params: dict
    excluded: int


def _knn(points, k):
    nn = NearestNeighbors(n_neighbors=k + 1).fit(points)
    dist, idx = nn.kneighbors(points)
    return dist[:, 1:], idx[:, 1:]  # drop self


def _local_pca_counts(points, idx, threshold):
    n = points.shape[0]
    out = np.full(n, np.nan)
    for i in range(n):
        nb = points[np.concatenate([[i], idx[i]])]
        nb = nb - nb.mean(axis=0)
        # eigenvalues of the scatter matrix; scale cancels in the ratio
        eig = np.linalg.eigvalsh(nb.T @ nb)
        top = eig[-1]
        if top <= 0:
            continue  # neighborhood collapsed onto a single point
        out[i] = float(np.sum(eig >= threshold * top))
    return out


def _mle_knn_values(dist):
    n, k = dist.shape[0], dist.shape[1]
    out = np.full(n, np.nan)
    with np.errstate(divide="ignore"):
        logs = np.log(dist[:, -1][:, None]) - np.log(dist[:, :-1])
    valid = np.all(np.isfinite(logs), axis=1) & (dist[:, -1] > 0)
    sums = logs.sum(axis=1)
    ok = valid & (sums > 0)
    out[ok] = (k - 1) / sums[ok]
    return out


def _expected_abs_sine(dim):
    """E|sin(angle)| between two isotropic directions in the given dimension."""
    return math.exp(
        2.0 * gammaln(dim / 2.0) - gammaln((dim + 1) / 2.0) - gammaln((dim - 1) / 2.0)
    )


def _invert_abs_sine(target, d_max):
    if target <= 0.0:
        return 1.0
    if target >= _expected_abs_sine(d_max):
        return float(d_max)
    return float(brentq(lambda d: _expected_abs_sine(d) - target, 1.0 + 1e-9, d_max))


def _simplex_skewness_values(points, idx, max_pairs, rng):
    n, D = points.shape
    out = np.full(n, np.nan)
    k = idx.shape[1]
    pair_i, pair_j = np.triu_indices(k, 1)
    if pair_i.size > max_pairs:
        sel = rng.choice(pair_i.size, size=max_pairs, replace=False)
        pair_i, pair_j = pair_i[sel], pair_j[sel]
    for i in range(n):
        nb = points[idx[i]]
        nb = nb - nb.mean(axis=0)
        norms = np.linalg.norm(nb, axis=1)
        u, v = nb[pair_i], nb[pair_j]
        nu, nv = norms[pair_i], norms[pair_j]
        good = (nu > 0) & (nv > 0)
        if not np.any(good):
            continue
        cos = np.sum(u[good] * v[good], axis=1) / (nu[good] * nv[good])
        sin = np.sqrt(np.clip(1.0 - np.clip(cos, -1.0, 1.0) ** 2, 0.0, 1.0))
        out[i] = _invert_abs_sine(float(sin.mean()), D)
    return out


def intrinsic_dim(points, method, k=None, threshold=0.05, max_pairs=800, seed=0):
    """Cloud-level intrinsic dimension estimate.

    Parameters
    ----------
    points : (n, D) array
    method : one of :data:`METHODS`
    k : int, optional
        Neighborhood size; defaults to :func:`default_neighborhood`.
    threshold : float
        Eigenvalue fraction for ``local_pca``.
    max_pairs : int
        Per-point pair budget for ``simplex_skewness``.

    Points whose neighborhood collapses (duplicates) are excluded from
    the average and counted in ``excluded``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}")
    if k is None:
        k = default_neighborhood(n)
    k = int(k)
    k_min = 3 if method == "mle_knn" else 2
    if not k_min <= k < n:
        raise ParameterError(f"need {k_min} <= k < n, got k={k}, n={n}")

    dist, idx = _knn(points, k)
    if method == "local_pca":
        per_point = _local_pca_counts(points, idx, threshold)
    elif method == "mle_knn":
        per_point = _mle_knn_values(dist)
    else:
        per_point = _simplex_skewness_values(
            points, idx, max_pairs, np.random.default_rng(seed)
        )
    excluded = int(np.sum(~np.isfinite(per_point)))
    if excluded == n:
        raise ParameterError("every neighborhood collapsed; cannot estimate")
    value = float(np.nanmean(per_point))
    return DimensionEstimate(
        method=method,
        value=value,
        per_point=per_point,
        params={"k": k, "threshold": threshold, "max_pairs": max_pairs},
        excluded=excluded,
    )


def intrinsic_dim_all(points, **kwargs):
    """All three estimators, in reporting order."""
    return [intrinsic_dim(points, method, **kwargs) for method in METHODS]


# ---------------------------------------------------------------------------
# kernel density machinery


def normal_reference_bandwidth(points):
    """Normal-reference (Silverman) bandwidth, isotropic, scale 1.0."""
    points = np.atleast_2d(points)
    n, D = points.shape
    sigma = math.sqrt(np.trace(np.cov(points.T).reshape(D, D)) / D)
    return sigma * (4.0 / ((D + 2) * n)) ** (1.0 / (D + 4))


_KDE_BLOCK_ENTRIES = 5_000_000


def _query_blocks(m, n):
    step = max(1, _KDE_BLOCK_ENTRIES // max(n, 1))
    for q0 in range(0, m, step):
        yield q0, min(q0 + step, m)


def kde_value(data, X, bandwidth):
    """Gaussian KDE values at query points."""
    data = np.atleast_2d(data)
    X = np.atleast_2d(X)
    n, D = data.shape
    norm = n * (2 * math.pi) ** (D / 2) * bandwidth**D
    out = np.empty(X.shape[0])
    for q0, q1 in _query_blocks(X.shape[0], n):
        sq = ((X[q0:q1, None, :] - data[None, :, :]) ** 2).sum(axis=-1)
        out[q0:q1] = np.exp(-sq / (2 * bandwidth**2)).sum(axis=1) / norm
    return out


def kde_gradient(data, X, bandwidth):
    """Gaussian KDE gradient at query points, shape (m, D)."""
    data = np.atleast_2d(data)
    X = np.atleast_2d(X)
    n, D = data.shape
    norm = n * (2 * math.pi) ** (D / 2) * bandwidth ** (D + 2)
    out = np.empty((X.shape[0], D))
    for q0, q1 in _query_blocks(X.shape[0], n):
        diff = data[None, :, :] - X[q0:q1, None, :]
        w = np.exp(-(diff**2).sum(axis=-1) / (2 * bandwidth**2))
        out[q0:q1] = np.einsum("mn,mnd->md", w, diff) / norm
    return out


def kde_hessian(data, X, bandwidth):
    """Gaussian KDE Hessian at query points, shape (m, D, D)."""
    data = np.atleast_2d(data)
    X = np.atleast_2d(X)
    n, D = data.shape
    norm = n * (2 * math.pi) ** (D / 2) * bandwidth ** (D + 2)
    out = np.empty((X.shape[0], D, D))
    for q0, q1 in _query_blocks(X.shape[0], n):
        diff = data[None, :, :] - X[q0:q1, None, :]
        w = np.exp(-(diff**2).sum(axis=-1) / (2 * bandwidth**2))
        outer = np.einsum("mn,mnd,mne->mde", w, diff, diff) / bandwidth**2
        trace_part = w.sum(axis=1)[:, None, None] * np.eye(D)[None, :, :]
        out[q0:q1] = (outer - trace_part) / norm
    return out


@dataclass(frozen=True)
class RidgeSet:
    """Converged SCMS iterates with their diagnostics."""

    points: np.ndarray
    converged: np.ndarray
    bandwidth: float
    ridge_dim: int
    residuals: np.ndarray
    iterations: np.ndarray
    history: dict | None = None


_SCMS_CHUNK = 128


def scms_ridge(
    points,
    bandwidth="auto",
    ridge_dim=1,
    starts=None,
    max_iter=500,
    tol=1e-6,
    seed=0,
    record_history=False,
):
    """Subspace-constrained mean shift toward a density ridge.

    At each iterate the mean-shift vector is projected onto the span of
    the ``D - ridge_dim`` smallest-eigenvalue eigenvectors of the KDE
    Hessian; iteration stops when the projected gradient norm falls below
    ``tol`` times the local KDE scale (density / bandwidth).
    ``ridge_dim=0`` reduces to plain mean shift (mode seeking).

    ``starts`` may be an array of start points, ``"all"``, or None for a
    10% random subsample of the cloud.  Non-converged starts are flagged
    and retained.  ``record_history`` keeps per-iteration positions and
    residuals (single-block processing; intended for diagnostics at small
    sizes).
    """
    data = np.atleast_2d(np.asarray(points, dtype=float))
    n, D = data.shape
    if not 0 <= ridge_dim < D:
        raise ParameterError(f"ridge_dim must lie in [0, {D})")
    if bandwidth == "auto":
        bandwidth = normal_reference_bandwidth(data)
    bandwidth = float(bandwidth)
    if bandwidth <= 0:
        raise ParameterError("bandwidth must be positive")

    if starts is None:
        rng = np.random.default_rng(seed)
        take = max(1, n // 10)
        starts = data[rng.choice(n, size=take, replace=False)]
    elif isinstance(starts, str) and starts == "all":
        starts = data
    starts = np.atleast_2d(np.asarray(starts, dtype=float)).copy()
    S = starts.shape[0]

    converged = np.zeros(S, dtype=bool)
    residuals = np.full(S, np.inf)
    iterations = np.zeros(S, dtype=np.int64)
    history = {"positions": [], "residuals": []} if record_history else None
    chunk = S if record_history else _SCMS_CHUNK

    for c0 in range(0, S, chunk):
        c1 = min(c0 + chunk, S)
        x = starts[c0:c1]
        active = np.ones(c1 - c0, dtype=bool)
        for it in range(max_iter):
            if record_history:
                history["positions"].append(x.copy())
            if not np.any(active):
                break
            xa = x[active]
            diff = data[None, :, :] - xa[:, None, :]
            w = np.exp(-(diff**2).sum(axis=-1) / (2 * bandwidth**2))
            wsum = w.sum(axis=1)
            alive = wsum > 0
            g_raw = np.einsum("sn,snd->sd", w, diff)
            shift = g_raw / np.maximum(wsum, 1e-300)[:, None]
            if ridge_dim > 0:
                hess = np.einsum("sn,snd,sne->sde", w, diff, diff) / bandwidth**2
                hess -= wsum[:, None, None] * np.eye(D)[None, :, :]
                _vals, vecs = np.linalg.eigh(hess)
                V = vecs[:, :, : D - ridge_dim]  # ascending: smallest first
                shift = np.einsum("sde,se->sd", V, np.einsum("sde,sd->se", V, shift))
                proj_g = np.einsum("sde,se->sd", V, np.einsum("sde,sd->se", V, g_raw))
            else:
                proj_g = g_raw
            crit = np.linalg.norm(proj_g, axis=1) / (bandwidth * np.maximum(wsum, 1e-300))
            crit[~alive] = np.inf
            done = (crit <= tol) & alive
            act_idx = np.nonzero(active)[0]
            residuals[c0 + act_idx] = crit
            iterations[c0 + act_idx[~done]] += 1
            converged[c0 + act_idx[done]] = True
            if record_history:
                full_res = np.full(c1 - c0, np.nan)
                full_res[act_idx] = crit
                history["residuals"].append(full_res)
            active[act_idx[done]] = False
            active[act_idx[~alive]] = False  # stalled in a zero-density region
            move = ~done & alive
            if np.any(move):
                xa[move] += shift[move]
                x[act_idx] = xa
        starts[c0:c1] = x

    return RidgeSet(
        points=starts,
        converged=converged,
        bandwidth=bandwidth,
        ridge_dim=int(ridge_dim),
        residuals=residuals,
        iterations=iterations,
        history=history,
    )


def hausdorff_distance(A, B):
    """Symmetric Hausdorff distance between two point sets."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ParameterError("Hausdorff distance needs nonempty sets")
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])


def mean_nn_distance(cloud, reference):
    """Mean distance from cloud points to their nearest reference point."""
    tree = cKDTree(np.atleast_2d(reference))
    d, _ = tree.query(np.atleast_2d(cloud))
    return float(np.mean(d))
