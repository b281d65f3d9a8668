"""Adjacency and Laplacian spectral embeddings plus scree-based rank selection.

The embedding keeps the ``d_hat`` eigenpairs of largest magnitude (not
largest value -- the distinction matters for disassortative structure),
scales eigenvectors by the square root of the absolute eigenvalues, and
records the eigenvalue signs so the sign-weighted Gram matrix can
reconstruct the input.
"""

from __future__ import annotations

import json
import pathlib
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from ._linalg import fix_eigvec_signs, magnitude_order
from .errors import (
    IsolatedNodesError,
    NumericError,
    ParameterError,
    RankDeficiencyError,
)
from .graphsim import Graph

#: dense eigensolver below this node count, iterative above
_DENSE_LIMIT = 2000
_ARPACK_TOL = 1e-10
_V0_SEED = 12345


@dataclass(frozen=True)
class EmbeddingMatrix:
    """n x d_hat spectral coordinates with eigenvalue bookkeeping."""

    coords: np.ndarray
    eigenvalues: np.ndarray
    eig_signs: np.ndarray
    source: str
    residuals: np.ndarray

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def d_hat(self):
        return self.coords.shape[1]

    def signature(self):
        p = int(np.sum(self.eig_signs > 0))
        return p, self.d_hat - p

    def pq_order(self):
        """Column permutation putting positive-sign columns first."""
        pos = np.nonzero(self.eig_signs > 0)[0]
        neg = np.nonzero(self.eig_signs < 0)[0]
        return np.concatenate([pos, neg])


def _spectral_pairs(mat, d_hat, n):
    """Top-|.| eigenpairs of a symmetric matrix, dense or ARPACK."""
    use_dense = n <= _DENSE_LIMIT or d_hat > n - 2
    if use_dense:
        dense = mat.toarray() if sparse.issparse(mat) else np.asarray(mat)
        vals, vecs = np.linalg.eigh(dense)
        order = magnitude_order(vals)[:d_hat]
        return vals[order], vecs[:, order]
    v0 = np.random.default_rng(_V0_SEED).standard_normal(n)  # fixed start vector
    try:
        vals, vecs = eigsh(mat, k=d_hat, which="LM", tol=_ARPACK_TOL, v0=v0)
    except ArpackNoConvergence as exc:
        got = 0 if exc.eigenvalues is None else len(exc.eigenvalues)
        raise NumericError(
            f"eigensolver converged {got}/{d_hat} pairs; "
            "try a smaller d_hat or a denser graph"
        ) from exc
    except ArpackError as exc:  # pragma: no cover - rare
        raise NumericError(f"eigensolver failure: {exc}") from exc
    order = magnitude_order(vals)
    return vals[order], vecs[:, order]


def _embed(mat, d_hat, n, source):
    vals, vecs = _spectral_pairs(mat, d_hat, n)
    vecs = fix_eigvec_signs(vecs.copy())
    coords = vecs * np.sqrt(np.abs(vals))[None, :]
    norm = np.abs(vals).max() if len(vals) else 0.0
    resid = np.array(
        [np.linalg.norm(mat @ vecs[:, j] - vals[j] * vecs[:, j]) for j in range(len(vals))]
    )
    return EmbeddingMatrix(
        coords=coords,
        eigenvalues=vals,
        eig_signs=np.where(vals < 0, -1.0, 1.0),
        source=source,
        residuals=resid / max(norm, 1e-300),
    )


def ase(graph, d_hat):
    """Adjacency spectral embedding with ``d_hat`` retained dimensions."""
    n = graph.n
    d_hat = int(d_hat)
    if not 1 <= d_hat <= n:
        raise ParameterError(f"d_hat must lie in [1, {n}]")
    if graph.n_edges == 0:
        raise RankDeficiencyError(
            "adjacency matrix is zero: no largest-magnitude nonzero eigenpair"
        )
    return _embed(graph.adjacency(), d_hat, n, "adjacency")


def lse(graph, d_hat):
    """Laplacian spectral embedding on D^{-1/2} A D^{-1/2}.

    Isolated nodes make the normalization undefined; they are reported in
    the error so the caller can decide to drop them (see
    :func:`drop_isolated`).
    """
    n = graph.n
    d_hat = int(d_hat)
    if not 1 <= d_hat <= n:
        raise ParameterError(f"d_hat must lie in [1, {n}]")
    deg = graph.degrees()
    isolated = np.nonzero(deg == 0)[0]
    if isolated.size:
        raise IsolatedNodesError(isolated.tolist())
    inv_sqrt = sparse.diags(1.0 / np.sqrt(deg))
    lap = inv_sqrt @ graph.adjacency() @ inv_sqrt
    return _embed(lap.tocsr(), d_hat, n, "laplacian")


def drop_isolated(graph):
    """Remove degree-zero nodes, reindexing the rest; returns kept indices."""
    deg = graph.degrees()
    kept = np.nonzero(deg > 0)[0]
    remap = -np.ones(graph.n, dtype=np.int64)
    remap[kept] = np.arange(kept.size)
    edges = remap[graph.edges]
    pruned = Graph(
        n=int(kept.size),
        edges=edges,
        rho=graph.rho,
        provenance={**graph.provenance, "dropped_isolated": int(graph.n - kept.size)},
    )
    return pruned, kept


# ---------------------------------------------------------------------------
# rank selection


@dataclass(frozen=True)
class RankSelection:
    d_hat: int
    low_confidence: bool
    profile: np.ndarray


def profile_likelihood_rank(eigenvalues):
    """Scree elbow via the two-group Gaussian profile likelihood.

    The magnitudes are split into a head and a tail at every index; each
    split is scored by the Gaussian log likelihood with group means and a
    pooled variance.  Ties (including the zero-variance case) resolve to
    the smaller rank.  Fewer than three values cannot support the split
    model, so the full length is returned with ``low_confidence`` set.
    """
    x = np.abs(np.asarray(eigenvalues, dtype=float))
    N = x.size
    if N == 0:
        raise ParameterError("empty eigenvalue list")
    if N < 3:
        return RankSelection(d_hat=N, low_confidence=True, profile=np.zeros(0))
    loglik = np.empty(N - 1)
    for q in range(1, N):
        g1, g2 = x[:q], x[q:]
        ss = np.sum((g1 - g1.mean()) ** 2) + np.sum((g2 - g2.mean()) ** 2)
        var = ss / (N - 2)
        if var <= 0:
            loglik[q - 1] = np.inf
            continue
        loglik[q - 1] = -0.5 * N * (np.log(2 * np.pi * var)) - 0.5 * ss / var
    best = int(np.argmax(loglik)) + 1
    return RankSelection(d_hat=best, low_confidence=False, profile=loglik)


# ---------------------------------------------------------------------------
# serialization


def save_embedding(emb, outdir, extra_meta=None):
    """Write coords CSV plus a metadata JSON next to it."""
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "embedding.csv", emb.coords, fmt="%.17g", delimiter=",")
    meta = {
        "eigenvalues": emb.eigenvalues.tolist(),
        "eig_signs": emb.eig_signs.tolist(),
        "source": emb.source,
        "d_hat": emb.d_hat,
        "n": emb.n,
    }
    if extra_meta:
        meta.update(extra_meta)
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    return out
