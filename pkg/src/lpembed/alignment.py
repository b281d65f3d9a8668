"""Alignment of spectral embeddings over the indefinite orthogonal group.

An embedding is only identified up to a transform Q satisfying
``Q J Q^T = J`` with ``J = diag(+1 x p, -1 x q)``; this module fits such a
Q to minimize the Frobenius misfit against target coordinates, computes
positional error statistics, builds the normalized targets the Laplacian
embedding estimates, and fits empirical error-decay rates.

Both the embedding and the targets must be supplied in signature order
(positive-sign columns first); :meth:`EmbeddingMatrix.pq_order` produces
the permutation for raw embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.linalg import expm
from scipy.stats import linregress

from .errors import NormalizationError, ParameterError, SignatureMismatchError

_MAX_ITER = 500
_GTOL = 1e-12


@dataclass(frozen=True)
class AlignmentResult:
    """Fitted transform and error statistics.

    ``max_error``/``mean_error`` are computed from the Q-aligned rows
    alone.  ``diag_scale`` is an additionally fitted per-column scaling --
    diagnostic only, never folded into the errors; ``scale_ok`` flags
    whether it stayed within 10% of the identity.
    """

    Q: np.ndarray
    max_error: float
    mean_error: float
    constraint_residual: float
    iterations: int
    converged: bool
    objective_history: np.ndarray
    diag_scale: np.ndarray
    scale_ok: bool


def signature_matrix(p, q):
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)]))


def _procrustes_rotation(source, target):
    """Closed-form orthogonal Procrustes: argmin ||source R^T - target||_F."""
    if source.shape[1] == 0:
        return np.zeros((0, 0))
    U, _s, Vt = np.linalg.svd(target.T @ source)
    return U @ Vt


def _lie_basis(p, q):
    """Basis index layout for the tangent space at the identity.

    Elements have the block form [[A, B], [B^T, D]] with A (p x p) and
    D (q x q) antisymmetric and B free, matching S J + J S^T = 0.
    """
    D = p + q
    idx = []
    for i in range(p):
        for j in range(i + 1, p):
            idx.append(("a", i, j))
    for i in range(q):
        for j in range(i + 1, q):
            idx.append(("d", p + i, p + j))
    for i in range(p):
        for j in range(q):
            idx.append(("b", i, p + j))
    return D, idx


def _lie_element(theta, D, idx):
    S = np.zeros((D, D))
    for t, (kind, i, j) in zip(theta, idx):
        if kind == "b":
            S[i, j] = t
            S[j, i] = t
        else:
            S[i, j] = t
            S[j, i] = -t
    return S


def align_indefinite(x_hat, x_target, signature=None):
    """Fit Q with Q J Q^T = J minimizing ||X_hat Q^T - X_target||_F.

    Initialization solves orthogonal Procrustes separately on the
    positive-sign and negative-sign column blocks (optimal when the two
    blocks do not interact); a quasi-Newton refinement over the group's
    tangent-space parameterization then recovers any hyperbolic mixing.

    Parameters
    ----------
    x_hat : ndarray or EmbeddingMatrix
        Source coordinates.  An EmbeddingMatrix is permuted into
        signature order automatically, along with the matching columns of
        ``x_target``.
    x_target : ndarray
        Target coordinates, same shape.
    signature : (p, q), optional
        Required for raw arrays; validated against the embedding's
        eigenvalue signs otherwise.
    """
    perm = None
    if hasattr(x_hat, "eig_signs"):
        emb_sig = x_hat.signature()
        if signature is None:
            signature = emb_sig
        elif tuple(signature) != emb_sig:
            raise SignatureMismatchError(
                f"requested signature {tuple(signature)} but embedding has {emb_sig}"
            )
        perm = x_hat.pq_order()
        x_hat = x_hat.coords[:, perm]
        x_target = np.asarray(x_target, dtype=float)[:, perm]
    else:
        if signature is None:
            raise ParameterError("raw coordinate arrays need an explicit signature")
        x_hat = np.asarray(x_hat, dtype=float)
        x_target = np.asarray(x_target, dtype=float)
    p, q = int(signature[0]), int(signature[1])
    D = p + q
    if x_hat.shape != x_target.shape or x_hat.shape[1] != D:
        raise SignatureMismatchError(
            f"shape mismatch: {x_hat.shape} vs {x_target.shape} for signature ({p}, {q})"
        )

    Rp = _procrustes_rotation(x_hat[:, :p], x_target[:, :p])
    Rq = _procrustes_rotation(x_hat[:, p:], x_target[:, p:])
    Q0 = np.zeros((D, D))
    Q0[:p, :p] = Rp
    Q0[p:, p:] = Rq

    def misfit(Q):
        return float(np.linalg.norm(x_hat @ Q.T - x_target) ** 2)

    history = [misfit(Q0)]
    iterations = 0
    converged = True
    Q = Q0
    if p > 0 and q > 0:
        _, idx = _lie_basis(p, q)

        def objective(theta):
            return misfit(Q0 @ expm(_lie_element(theta, D, idx)))

        res = optimize.minimize(
            objective,
            np.zeros(len(idx)),
            method="BFGS",
            callback=lambda th: history.append(objective(th)),
            options={"maxiter": _MAX_ITER, "gtol": _GTOL},
        )
        Q = Q0 @ expm(_lie_element(res.x, D, idx))
        iterations = int(res.nit)
        # BFGS reports failure on line-search stalls at machine precision;
        # only genuine iteration exhaustion counts as non-convergence here
        converged = bool(res.success) or iterations < _MAX_ITER

    J = signature_matrix(p, q)
    residual = float(np.max(np.abs(Q @ J @ Q.T - J)))
    aligned = x_hat @ Q.T
    row_err = np.linalg.norm(aligned - x_target, axis=1)
    denom = np.sum(aligned * aligned, axis=0)
    scale = np.where(
        denom > 0, np.sum(aligned * x_target, axis=0) / np.maximum(denom, 1e-300), 1.0
    )
    result = AlignmentResult(
        Q=Q,
        max_error=float(row_err.max(initial=0.0)),
        mean_error=float(row_err.mean()) if row_err.size else 0.0,
        constraint_residual=residual,
        iterations=iterations,
        converged=converged,
        objective_history=np.asarray(history),
        diag_scale=scale,
        scale_ok=bool(np.all(np.abs(scale - 1.0) <= 0.1)),
    )
    return result


def lse_targets(X, signature):
    """Row-normalized targets estimated by the Laplacian embedding.

    Each row is divided by the square root of its sign-weighted inner
    product with the row sum; rows where that bracket is non-positive
    make the normalization undefined and are reported in the error.
    """
    X = np.asarray(X, dtype=float)
    p, q = int(signature[0]), int(signature[1])
    if X.shape[1] != p + q:
        raise SignatureMismatchError(f"{X.shape[1]} columns vs signature ({p}, {q})")
    signs = np.concatenate([np.ones(p), -np.ones(q)])
    total = X.sum(axis=0)
    brackets = X @ (signs * total)
    bad = np.nonzero(brackets <= 0)[0]
    if bad.size:
        raise NormalizationError(
            f"non-positive normalizing bracket for rows {bad[:10].tolist()}",
            rows=bad.tolist(),
        )
    return X / np.sqrt(brackets)[:, None]


@dataclass(frozen=True)
class RateFit:
    slope: float
    half_width: float
    intercept: float
    n_points: int


def rate_fit(errors):
    """Least-squares slope of log(error) against log(n).

    ``errors`` is an iterable of (n, max_error) pairs covering at least
    three distinct sizes; the half-width is twice the regression standard
    error of the slope.
    """
    pairs = [(int(n), float(e)) for n, e in errors]
    if len({n for n, _ in pairs}) < 3:
        raise ParameterError("rate fit needs at least 3 distinct n values")
    if any(e <= 0 for _, e in pairs):
        raise ParameterError("rate fit is in log domain; errors must be positive")
    log_n = np.log([n for n, _ in pairs])
    log_e = np.log([e for _, e in pairs])
    fit = linregress(log_n, log_e)
    stderr = 0.0 if np.isnan(fit.stderr) else float(fit.stderr)
    return RateFit(
        slope=float(fit.slope),
        half_width=2.0 * stderr,
        intercept=float(fit.intercept),
        n_points=len(pairs),
    )
