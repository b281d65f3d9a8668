"""Latent position sampling and Bernoulli graph generation.

Each unordered pair {i, j} of nodes is connected independently with
probability ``rho * f(Z_i, Z_j)``.  Pair uniforms come from a counter-based
generator (Philox) keyed by the seed and consumed in a fixed row-major
order over i < j, so graphs are reproducible bit for bit and two kernels
can be driven by the same uniforms to produce maximally coupled graphs.
"""

from __future__ import annotations

import math
import pathlib
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .errors import DomainError, ParameterError, UnsupportedFamilyError
from .kernels import Box, KernelSpec, eval_matrix, truncate_power_series

DISTRIBUTION_KINDS = (
    "uniform_box",
    "truncated_gamma",
    "circle_angle_uniform",
    "piecewise_density",
)

_ROW_BLOCK = 512


@dataclass(frozen=True)
class LatentDistribution:
    """Sampling law for latent positions; all shipped kinds are continuous."""

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ParameterError(f"unknown latent distribution {self.kind!r}")
        object.__setattr__(self, "params", dict(self.params))

    @property
    def dim(self):
        if self.kind == "uniform_box":
            return len(self.params["lo"])
        return 1


def uniform_box(box):
    return LatentDistribution("uniform_box", {"lo": tuple(box.lo), "hi": tuple(box.hi)})


def truncated_gamma(shape, rate, bound=3.0):
    """Gamma(shape, rate) conditioned on values <= bound (draw-and-reject)."""
    if min(shape, rate, bound) <= 0:
        raise ParameterError("truncated_gamma needs positive shape, rate, bound")
    return LatentDistribution(
        "truncated_gamma", {"shape": float(shape), "rate": float(rate), "bound": float(bound)}
    )


def circle_uniform():
    return LatentDistribution("circle_angle_uniform", {})


def piecewise_density(edges, weights):
    """Piecewise-constant density on consecutive intervals (1-d)."""
    edges = tuple(float(e) for e in edges)
    weights = tuple(float(w) for w in weights)
    if len(edges) != len(weights) + 1 or any(np.diff(edges) <= 0):
        raise ParameterError("need increasing edges with one weight per cell")
    if min(weights) < 0 or sum(weights) <= 0:
        raise ParameterError("weights must be nonnegative with positive total")
    return LatentDistribution("piecewise_density", {"edges": edges, "weights": weights})


def latent_pdf(dist, X):
    """Density of the latent law at the given points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    kind, p = dist.kind, dist.params
    if kind == "uniform_box":
        lo = np.asarray(p["lo"])
        hi = np.asarray(p["hi"])
        inside = np.all((X >= lo) & (X <= hi), axis=1)
        return inside / np.prod(hi - lo)
    if kind == "truncated_gamma":
        from scipy.stats import gamma

        g = gamma(a=p["shape"], scale=1.0 / p["rate"])
        x = X[:, 0]
        dens = g.pdf(x) / g.cdf(p["bound"])
        dens[(x < 0) | (x > p["bound"])] = 0.0
        return dens
    if kind == "circle_angle_uniform":
        x = X[:, 0]
        return ((x >= 0) & (x < 2 * math.pi)) / (2 * math.pi)
    if kind == "piecewise_density":
        edges = np.asarray(p["edges"])
        weights = np.asarray(p["weights"])
        mass = np.sum(weights * np.diff(edges))
        x = X[:, 0]
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(weights) - 1)
        dens = weights[idx] / mass
        dens[(x < edges[0]) | (x > edges[-1])] = 0.0
        return dens
    raise ParameterError(kind)


@dataclass(frozen=True)
class LatentSample:
    """n x d latent positions with their provenance."""

    points: np.ndarray
    distribution: LatentDistribution
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, dtype=float)))

    @property
    def n(self):
        return self.points.shape[0]


def sample_latents(dist, n, seed):
    """Draw n i.i.d. latent positions; deterministic given the seed."""
    n = int(n)
    if n < 0:
        raise ParameterError("n must be >= 0")
    rng = np.random.default_rng(seed)
    kind, p = dist.kind, dist.params
    if n == 0:
        pts = np.zeros((0, dist.dim))
    elif kind == "uniform_box":
        pts = rng.uniform(np.asarray(p["lo"]), np.asarray(p["hi"]), size=(n, dist.dim))
    elif kind == "truncated_gamma":
        out = []
        got = 0
        while got < n:
            draw = rng.gamma(p["shape"], 1.0 / p["rate"], size=max(n - got, 64))
            keep = draw[draw <= p["bound"]]
            out.append(keep)
            got += keep.size
        pts = np.concatenate(out)[:n, None]
    elif kind == "circle_angle_uniform":
        pts = rng.uniform(0.0, 2 * math.pi, size=(n, 1))
    elif kind == "piecewise_density":
        edges = np.asarray(p["edges"])
        weights = np.asarray(p["weights"]) * np.diff(edges)
        cdf = np.concatenate([[0.0], np.cumsum(weights)])
        cdf /= cdf[-1]
        u = rng.uniform(size=n)
        cell = np.searchsorted(cdf, u, side="right") - 1
        cell = np.clip(cell, 0, len(edges) - 2)
        frac = (u - cdf[cell]) / np.maximum(cdf[cell + 1] - cdf[cell], 1e-300)
        pts = (edges[cell] + frac * np.diff(edges)[cell])[:, None]
    else:  # pragma: no cover
        raise ParameterError(kind)
    return LatentSample(points=pts, distribution=dist, seed=int(seed))


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as a sorted edge list (i < j)."""

    n: int
    edges: np.ndarray
    rho: float
    provenance: dict

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", edges)

    @property
    def n_edges(self):
        return self.edges.shape[0]

    @property
    def edge_density(self):
        pairs = self.n * (self.n - 1) // 2
        return self.n_edges / pairs if pairs else 0.0

    def adjacency(self):
        """Symmetric CSR adjacency matrix."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.n_edges)
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.n)


def _pair_uniform_stream(seed):
    """Counter-based uniform stream; draw order is row-major over i < j."""
    return np.random.Generator(np.random.Philox(seed))


def _iter_pair_blocks(n, block=_ROW_BLOCK):
    for i0 in range(0, n, block):
        yield i0, min(i0 + block, n)


def _check_latents(spec, latents):
    if latents.points.shape[1] != spec.latent_dim:
        raise ParameterError("latent dimension does not match the kernel")
    if latents.n and not np.all(spec.domain.contains(latents.points)):
        raise DomainError("latent points fall outside the kernel domain")


def sample_graph(spec, latents, rho, seed):
    """Bernoulli graph with edge probabilities rho * f(Z_i, Z_j)."""
    if not 0 < rho <= 1:
        raise ParameterError("rho must lie in (0, 1]")
    _check_latents(spec, latents)
    Z = latents.points
    n = latents.n
    rng = _pair_uniform_stream(seed)
    chunks = []
    for i0, i1 in _iter_pair_blocks(n):
        probs = eval_matrix(spec, Z[i0:i1], Z)
        mask = np.arange(n)[None, :] > np.arange(i0, i1)[:, None]
        u = rng.random(int(mask.sum()))
        keep = u < rho * probs[mask]
        ii, jj = np.nonzero(mask)
        chunks.append(np.column_stack([ii[keep] + i0, jj[keep]]))
    edges = np.vstack(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return Graph(
        n=n,
        edges=edges,
        rho=float(rho),
        provenance={
            "seed": int(seed),
            "kernel": spec.family,
            "latent_seed": latents.seed,
        },
    )


def couple_graphs(spec, k, latents_base, r_n, seed):
    """Maximally coupled graphs from a kernel and its series truncation.

    Latents are the base draws scaled by ``r_n``; one uniform per pair is
    thresholded against both the full kernel and its degree-k truncation,
    so each pair disagrees with probability |f - f_k| exactly.  The
    truncated kernel is validated on the scaled domain, where the latents
    actually live.

    Returns
    -------
    (Graph, Graph, int)
        Graph under f, graph under f_k, and the number of differing pairs.
    """
    if not 0 < r_n <= 1:
        raise ParameterError("r_n must lie in (0, 1]")
    scaled_box = Box(
        tuple(v * r_n for v in spec.domain.lo),
        tuple(v * r_n for v in spec.domain.hi),
    )
    if not (
        np.all(scaled_box.lo_arr >= spec.domain.lo_arr - 1e-12)
        and np.all(scaled_box.hi_arr <= spec.domain.hi_arr + 1e-12)
    ):
        raise DomainError("scaled latents would leave the kernel domain")
    scaled_spec = replace(spec, domain=scaled_box)
    truncated = truncate_power_series(scaled_spec, k)

    scaled = LatentSample(
        points=latents_base.points * r_n,
        distribution=latents_base.distribution,
        seed=latents_base.seed,
    )
    _check_latents(scaled_spec, scaled)
    Z = scaled.points
    n = scaled.n
    rng = _pair_uniform_stream(seed)
    full_chunks, trunc_chunks = [], []
    disagreements = 0
    for i0, i1 in _iter_pair_blocks(n):
        probs_f = eval_matrix(scaled_spec, Z[i0:i1], Z)
        probs_k = eval_matrix(truncated, Z[i0:i1], Z)
        mask = np.arange(n)[None, :] > np.arange(i0, i1)[:, None]
        u = rng.random(int(mask.sum()))
        a = u < probs_f[mask]
        b = u < probs_k[mask]
        disagreements += int(np.sum(a != b))
        ii, jj = np.nonzero(mask)
        full_chunks.append(np.column_stack([ii[a] + i0, jj[a]]))
        trunc_chunks.append(np.column_stack([ii[b] + i0, jj[b]]))

    def _graph(chunks, which):
        edges = np.vstack(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
        return Graph(
            n=n,
            edges=edges,
            rho=1.0,
            provenance={
                "seed": int(seed),
                "kernel": spec.family,
                "latent_seed": latents_base.seed,
                "coupled": which,
                "truncation": int(k),
                "r_n": float(r_n),
            },
        )

    return _graph(full_chunks, "full"), _graph(trunc_chunks, "truncated"), disagreements


# ---------------------------------------------------------------------------
# plain-text interchange formats


def save_graph(graph, path):
    """Write 'n m' then one 'i j' line per edge (0-based, i < j)."""
    path = pathlib.Path(path)
    with path.open("w") as fh:
        fh.write(f"{graph.n} {graph.n_edges}\n")
        for i, j in graph.edges:
            fh.write(f"{i} {j}\n")
    return path


def load_graph(path):
    path = pathlib.Path(path)
    with path.open() as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParameterError(f"bad graph header in {path}")
        n, m = int(header[0]), int(header[1])
        edges = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.zeros((0, 2), np.int64)
    if edges.shape != (m, 2):
        raise ParameterError(f"expected {m} edges in {path}, found {edges.shape[0]}")
    if m and (np.any(edges[:, 0] >= edges[:, 1]) or edges.max() >= n or edges.min() < 0):
        raise ParameterError(f"malformed edge list in {path}")
    return Graph(n=n, edges=edges, rho=1.0, provenance={"source": str(path)})


def save_latents(latents, path):
    np.savetxt(path, latents.points, fmt="%.17g", delimiter=",")
    return pathlib.Path(path)


def load_latents(path, dist=None, seed=-1):
    pts = np.loadtxt(path, delimiter=",", ndmin=2)
    if dist is None:
        dist = uniform_box(Box(tuple(pts.min(axis=0)), tuple(pts.max(axis=0) + 1e-9)))
    return LatentSample(points=pts, distribution=dist, seed=seed)
