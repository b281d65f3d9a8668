"""Quadrature (Nystrom) discretization of kernel integral operators.

The integral operator ``A g(x) = integral f(x, y) g(y) dy`` over the
kernel's domain box is discretized on a quadrature grid: the symmetric
matrix ``M = W^{1/2} K W^{1/2}`` (K the kernel matrix at the nodes, W the
diagonal weight matrix) is eigendecomposed and eigenvectors are rescaled
to eigenfunction values at the nodes.  Off-grid eigenfunction values come
from the standard extension formula, which also yields the coordinate map
sending a latent point x to the vector ``(|lambda_j|^{1/2} u_j(x))_j``.

Weighting is Lebesgue by default (weights sum to the box volume); a
latent-density mode reweights the nodes by a probability density (weights
sum to one), which discretizes a different operator and is labeled as
such in the grid metadata.
"""

from __future__ import annotations

import json
import math
import pathlib
import warnings
from dataclasses import dataclass

import numpy as np

from ._linalg import fix_eigvec_signs, magnitude_order
from .errors import (
    DomainError,
    NumericError,
    ParameterError,
    SignatureMismatchError,
)
from .kernels import Box, KernelSpec, eval_matrix, spec_from_json, spec_to_json

#: eigenvalues below this fraction of the leading magnitude are treated as zero
EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and positive weights for one of the supported schemes."""

    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    weighting: str = "lebesgue"

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape[0] != weights.shape[0]:
            raise ParameterError("node/weight length mismatch")
        if np.any(weights <= 0):
            raise ParameterError("quadrature weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return self.nodes.shape[0]

    @property
    def dim(self):
        return self.nodes.shape[1]


def _tensorize(axes_nodes, axes_weights):
    mesh = np.meshgrid(*axes_nodes, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*axes_weights, indexing="ij")
    weights = np.ones(nodes.shape[0])
    for w in wmesh:
        weights = weights * w.ravel()
    return nodes, weights


def gauss_legendre_grid(box, per_axis):
    """Tensor-product Gauss-Legendre rule on the box (d <= 3)."""
    per_axis = _per_axis_counts(box, per_axis)
    axes_n, axes_w = [], []
    for (l, h), m in zip(zip(box.lo, box.hi), per_axis):
        x, w = np.polynomial.legendre.leggauss(m)
        half = (h - l) / 2.0
        axes_n.append(half * x + (h + l) / 2.0)
        axes_w.append(half * w)
    nodes, weights = _tensorize(axes_n, axes_w)
    return QuadratureGrid(nodes, weights, "gauss_legendre_tensor")


def midpoint_grid(box, per_axis):
    """Uniform midpoint rule; exact for kernels constant on aligned cells."""
    per_axis = _per_axis_counts(box, per_axis)
    axes_n, axes_w = [], []
    for (l, h), m in zip(zip(box.lo, box.hi), per_axis):
        step = (h - l) / m
        axes_n.append(l + step * (np.arange(m) + 0.5))
        axes_w.append(np.full(m, step))
    nodes, weights = _tensorize(axes_n, axes_w)
    return QuadratureGrid(nodes, weights, "uniform_midpoint")


def monte_carlo_grid(box, m, seed=0):
    """Equal-weight uniform nodes; the fallback when tensor rules blow up."""
    rng = np.random.default_rng(seed)
    nodes = rng.uniform(box.lo_arr, box.hi_arr, size=(int(m), box.dim))
    weights = np.full(int(m), box.volume / int(m))
    return QuadratureGrid(nodes, weights, "monte_carlo")


def _per_axis_counts(box, per_axis):
    if np.isscalar(per_axis):
        counts = (int(per_axis),) * box.dim
    else:
        counts = tuple(int(v) for v in per_axis)
    if len(counts) != box.dim or any(c < 2 for c in counts):
        raise ParameterError("need at least 2 nodes per axis")
    return counts


def make_grid(box, per_axis, scheme="gauss_legendre_tensor", seed=0):
    """Build a grid, falling back to Monte Carlo above three dimensions."""
    if box.dim > 3 and scheme != "monte_carlo":
        m = int(np.prod(_per_axis_counts(box, per_axis)))
        warnings.warn(
            f"tensor quadrature in d={box.dim} is impractical; "
            f"falling back to {m} Monte Carlo nodes",
            stacklevel=2,
        )
        return monte_carlo_grid(box, m, seed=seed)
    if scheme == "gauss_legendre_tensor":
        return gauss_legendre_grid(box, per_axis)
    if scheme == "uniform_midpoint":
        return midpoint_grid(box, per_axis)
    if scheme == "monte_carlo":
        return monte_carlo_grid(box, int(np.prod(_per_axis_counts(box, per_axis))), seed=seed)
    raise ParameterError(f"unknown quadrature scheme {scheme!r}")


def density_weighted(grid, pdf):
    """Reweight a grid by a probability density (weights renormalized to 1)."""
    dens = np.asarray(pdf(grid.nodes), dtype=float).reshape(-1)
    w = grid.weights * dens
    total = w.sum()
    if total <= 0:
        raise ParameterError("density vanishes on the whole grid")
    return QuadratureGrid(grid.nodes, w / total, grid.scheme, weighting="latent_density")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSpectrum:
    """Truncated eigensystem of the discretized operator.

    ``eigenvalues`` are sorted by descending magnitude (positive first on
    magnitude ties) and ``eigvec_at_nodes[:, j]`` holds eigenfunction values
    u_j at the grid nodes, orthonormal under the quadrature weights.
    """

    eigenvalues: np.ndarray
    eigvec_at_nodes: np.ndarray
    grid: QuadratureGrid
    signature: tuple
    tail_mass: float
    rank_estimate: int
    effectively_infinite: bool
    spec: KernelSpec

    @property
    def truncation(self):
        return len(self.eigenvalues)


def nystrom_spectrum(spec, grid, J="auto", tail_tol=1e-8):
    """Discretize the kernel's integral operator and eigendecompose it.

    Parameters
    ----------
    spec : KernelSpec
    grid : QuadratureGrid
        Must cover ``spec.domain``.
    J : int or "auto"
        Number of retained eigenpairs.  "auto" keeps the smallest J whose
        discarded absolute eigenvalue mass falls below ``tail_tol``.
    tail_tol : float
        Absolute tail mass target for automatic truncation.
    """
    if not np.all(spec.domain.contains(grid.nodes)):
        raise DomainError("grid nodes fall outside the kernel domain")
    m = grid.size
    if J != "auto":
        J = int(J)
        if not 0 <= J <= m:
            raise ParameterError(f"J={J} out of range for m={m} nodes")

    K = eval_matrix(spec, grid.nodes, grid.nodes)
    K = 0.5 * (K + K.T)
    s = np.sqrt(grid.weights)
    M = s[:, None] * K * s[None, :]
    M = 0.5 * (M + M.T)
    try:
        vals, vecs = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericError(f"eigendecomposition failed: {exc}") from exc

    order = magnitude_order(vals)
    vals = vals[order]
    vecs = vecs[:, order]

    abs_vals = np.abs(vals)
    top = abs_vals[0] if m else 0.0
    if top <= 0.0:
        return OperatorSpectrum(
            eigenvalues=np.zeros(0),
            eigvec_at_nodes=np.zeros((m, 0)),
            grid=grid,
            signature=(0, 0),
            tail_mass=0.0,
            rank_estimate=0,
            effectively_infinite=False,
            spec=spec,
        )

    above_floor = int(np.sum(abs_vals > EIG_FLOOR * top))
    total_mass = float(abs_vals.sum())
    cum = np.cumsum(abs_vals)
    if J == "auto":
        tails = total_mass - cum[:above_floor]
        hit = np.nonzero(tails < tail_tol)[0]
        J = int(hit[0]) + 1 if hit.size else above_floor
    else:
        J = min(J, above_floor)

    tail_mass = float(total_mass - (cum[J - 1] if J else 0.0))
    kept_vals = vals[:J]
    kept_vecs = fix_eigvec_signs(vecs[:, :J].copy())
    eigfuncs = kept_vecs / s[:, None]
    p = int(np.sum(kept_vals > 0))
    q = int(np.sum(kept_vals < 0))
    return OperatorSpectrum(
        eigenvalues=kept_vals,
        eigvec_at_nodes=eigfuncs,
        grid=grid,
        signature=(p, q),
        tail_mass=tail_mass,
        rank_estimate=above_floor,
        effectively_infinite=above_floor >= 0.9 * m,
        spec=spec,
    )


def nystrom_extend(spectrum, X):
    """Eigenfunction values at off-grid points, shape (n, J).

    Uses ``u_j(x) = (1/lambda_j) * sum_i w_i f(x, x_i) u_j(x_i)``; retained
    eigenvalues sit above the noise floor by construction, but any that do
    not are zeroed out rather than divided by.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    lam = spectrum.eigenvalues
    if lam.size == 0:
        return np.zeros((X.shape[0], 0))
    cross = eval_matrix(spectrum.spec, X, spectrum.grid.nodes)
    weighted = spectrum.grid.weights[:, None] * spectrum.eigvec_at_nodes
    out = cross @ weighted
    top = np.abs(lam).max()
    safe = np.abs(lam) > EIG_FLOOR * top
    out[:, safe] = out[:, safe] / lam[safe]
    out[:, ~safe] = 0.0
    return out


@dataclass(frozen=True)
class SpectralCoordinates:
    """Coordinates (|lambda_j|^{1/2} u_j(x)) of one latent point.

    Coordinates follow the spectrum's magnitude order, so the per-coordinate
    eigenvalue signs travel alongside them.
    """

    coords: np.ndarray
    signature: tuple
    signs: np.ndarray
    source_point: np.ndarray


def latent_coordinates_many(spectrum, X):
    """Coordinate-map values for many latent points, shape (n, J)."""
    U = nystrom_extend(spectrum, X)
    return U * np.sqrt(np.abs(spectrum.eigenvalues))[None, :]


def latent_coordinates(spectrum, x):
    """Map one latent point into spectral coordinate space.

    An empty spectrum (zero operator) produces the empty coordinate
    vector rather than an error.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not spectrum.spec.domain.contains(x[None, :])[0]:
        raise DomainError(f"point {x.tolist()} outside domain")
    coords = latent_coordinates_many(spectrum, x[None, :])[0]
    return SpectralCoordinates(
        coords=coords,
        signature=spectrum.signature,
        signs=signature_signs(spectrum.eigenvalues),
        source_point=x,
    )


def indefinite_inner(a, b):
    """Sign-weighted inner product of two coordinate vectors.

    Reproduces the kernel: ``indefinite_inner(map(x), map(y))`` matches
    f(x, y) up to the truncation tail.
    """
    if (
        a.signature != b.signature
        or len(a.coords) != len(b.coords)
        or not np.array_equal(a.signs, b.signs)
    ):
        raise SignatureMismatchError(
            f"incompatible signatures {a.signature} vs {b.signature}"
        )
    return float(np.sum(a.signs * a.coords * b.coords))


def signature_signs(eigenvalues):
    """+1/-1 vector aligned with an eigenvalue array (zeros count positive)."""
    return np.where(np.asarray(eigenvalues) < 0, -1.0, 1.0)


def indefinite_gram(A, B, signs):
    """Matrix of sign-weighted inner products between coordinate rows."""
    signs = np.asarray(signs, dtype=float)
    return np.asarray(A) @ (signs[None, :] * np.asarray(B)).T


@dataclass(frozen=True)
class TraceDiagnostics:
    sum_abs_eigs: float
    diagonal_integral: float
    is_positive_definite: bool
    tail_mass: float


def trace_diagnostics(spectrum):
    """Compare total absolute eigenvalue mass with the diagonal integral.

    For positive-definite kernels the two quantities agree; a gap between
    them flags either indefiniteness or slow eigenvalue decay (reported,
    never raised).
    """
    spec = spectrum.spec
    nodes = spectrum.grid.nodes
    diag_vals = eval_matrix(spec, nodes, nodes).diagonal()
    diagonal_integral = float(np.sum(spectrum.grid.weights * diag_vals))
    sum_abs = float(np.abs(spectrum.eigenvalues).sum() + spectrum.tail_mass)
    return TraceDiagnostics(
        sum_abs_eigs=sum_abs,
        diagonal_integral=diagonal_integral,
        is_positive_definite=spectrum.signature[1] == 0,
        tail_mass=spectrum.tail_mass,
    )


def signature_of(spectrum, tol=0.0):
    """Counts of retained eigenvalues above +tol and below -tol."""
    lam = spectrum.eigenvalues
    return int(np.sum(lam > tol)), int(np.sum(lam < -tol))


# ---------------------------------------------------------------------------
# serialization: a diffable CSV + JSON bundle


def save_spectrum(spectrum, outdir):
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "eigenvalues.csv", spectrum.eigenvalues, fmt="%.17g")
    np.savetxt(out / "eigvecs.csv", spectrum.eigvec_at_nodes, fmt="%.17g", delimiter=",")
    grid_table = np.column_stack([spectrum.grid.nodes, spectrum.grid.weights])
    np.savetxt(out / "grid.csv", grid_table, fmt="%.17g", delimiter=",")
    meta = {
        "signature": list(spectrum.signature),
        "tail_mass": spectrum.tail_mass,
        "rank_estimate": spectrum.rank_estimate,
        "effectively_infinite": spectrum.effectively_infinite,
        "scheme": spectrum.grid.scheme,
        "weighting": spectrum.grid.weighting,
        "kernel": spec_to_json(spectrum.spec),
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    return out


def load_spectrum(indir):
    indir = pathlib.Path(indir)
    meta = json.loads((indir / "meta.json").read_text())
    eigenvalues = np.atleast_1d(np.loadtxt(indir / "eigenvalues.csv"))
    if eigenvalues.size == 0:
        eigenvalues = np.zeros(0)
    eigvecs = np.loadtxt(indir / "eigvecs.csv", delimiter=",")
    grid_table = np.atleast_2d(np.loadtxt(indir / "grid.csv", delimiter=","))
    nodes, weights = grid_table[:, :-1], grid_table[:, -1]
    eigvecs = eigvecs.reshape(nodes.shape[0], eigenvalues.size)
    grid = QuadratureGrid(nodes, weights, meta["scheme"], meta["weighting"])
    return OperatorSpectrum(
        eigenvalues=eigenvalues,
        eigvec_at_nodes=eigvecs,
        grid=grid,
        signature=tuple(meta["signature"]),
        tail_mass=float(meta["tail_mass"]),
        rank_estimate=int(meta["rank_estimate"]),
        effectively_infinite=bool(meta["effectively_infinite"]),
        spec=spec_from_json(meta["kernel"]),
    )
