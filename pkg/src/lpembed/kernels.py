"""Kernel zoo for latent position models.

A kernel is a symmetric map f : Z x Z -> [0, 1] on an axis-aligned box
Z in R^d.  Kernels are described by a closed set of parametric families
(:data:`FAMILIES`) rather than arbitrary callables, so that specs can be
validated, serialized, and reproduced exactly.

Module surface:

* :class:`KernelSpec` -- family + parameters + domain, validated at
  construction (polynomial specs get a dense grid range scan).
* :func:`eval_kernel` / :func:`eval_pairs` / :func:`eval_matrix` --
  evaluation; the pairwise path is exactly symmetric in its arguments,
  bit for bit.
* :func:`check_curvature` -- numerical estimate of the diagonal
  curvature exponent of the kernel's positive/negative parts.
* :func:`polynomial_rank_bound` -- monomial count bounding the rank of
  the associated integral operator.
* :func:`truncate_power_series` -- degree truncation for polynomial
  kernels and for families with a registered power series.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .errors import (
    DomainError,
    ParameterError,
    RangeError,
    UnsupportedFamilyError,
)

FAMILIES = (
    "rbf",
    "sociability",
    "logistic_distance",
    "logistic_bilinear",
    "probit_bilinear",
    "polynomial",
    "blockwise_graphon",
    "geodesic_rbf",
)

#: families with a registered power series usable by truncate_power_series
SERIES_FAMILIES = ("polynomial", "sociability")

_RANGE_TOL = 1e-12
#: per-axis grid resolution of the construction-time range scan, by latent dim
_SCAN_RESOLUTION = {1: 256, 2: 64}
_SCAN_RESOLUTION_HIGH_D = 16


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in R^d, stored as tuples so specs stay hashable."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or len(lo) == 0:
            raise ParameterError("box lo/hi must have equal, positive length")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ParameterError(f"degenerate box: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def lo_arr(self):
        return np.asarray(self.lo)

    @property
    def hi_arr(self):
        return np.asarray(self.hi)

    @property
    def volume(self):
        return float(np.prod(self.hi_arr - self.lo_arr))

    @property
    def diameter(self):
        return float(np.linalg.norm(self.hi_arr - self.lo_arr))

    def contains(self, points, atol=1e-9):
        pts = np.atleast_2d(points)
        return np.all(
            (pts >= self.lo_arr - atol) & (pts <= self.hi_arr + atol), axis=1
        )

    def grid(self, per_axis):
        """Regular grid of points covering the box, shape (per_axis**d, d)."""
        axes = [
            np.linspace(l, h, per_axis) for l, h in zip(self.lo, self.hi)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def _as_multi_index(key, d):
    if np.isscalar(key):
        key = (key,)
    idx = tuple(int(v) for v in key)
    if len(idx) != d or any(v < 0 for v in idx):
        raise ParameterError(f"bad multi-index {key!r} for latent_dim={d}")
    return idx


def _canonical_coeffs(raw, d):
    """Normalize a polynomial coefficient table and enforce symmetry."""
    table = {}
    for (a, b), c in raw.items():
        a = _as_multi_index(a, d)
        b = _as_multi_index(b, d)
        c = float(c)
        if c == 0.0:
            continue
        prior = table.get((a, b))
        if prior is not None and prior != c:
            raise ParameterError(f"conflicting coefficients for {(a, b)}")
        table[(a, b)] = c
    for (a, b), c in table.items():
        if table.get((b, a), None) != c:
            raise ParameterError(
                f"coefficient table not symmetric at ({a}, {b})"
            )
    return dict(sorted(table.items()))


@dataclass(frozen=True)
class KernelSpec:
    """A validated kernel: family name, parameters, latent dimension, domain.

    Parameters by family:

    * ``rbf``: ``sigma`` -- Gaussian radial basis width.
    * ``sociability``: no parameters; ``1 - exp(-2xy)`` on a box in R_+.
    * ``logistic_distance``: ``alpha`` offset, ``norm`` (p-norm order).
    * ``logistic_bilinear``: ``alpha``; first coordinate enters additively,
      the remaining ones bilinearly.
    * ``probit_bilinear``: ``alpha``, ``lam`` -- diagonal of the bilinear
      form (entries may be negative).
    * ``polynomial``: ``coeffs`` -- symmetric multi-index table
      {(alpha, beta): c} for sum c * x^alpha * y^beta.  Range-validated on a
      dense grid at construction.
    * ``blockwise_graphon``: ``block_matrix`` (symmetric, entries in [0,1]),
      ``boundaries`` -- interior cut points of the domain interval.  Marked
      ``oracle_only``: its latent support makes the usual smoothness
      diagnostics meaningless, but its eigensystem is known in closed form.
    * ``geodesic_rbf``: ``sigma``, ``radius``; latent variable is an angle
      in [0, 2*pi) and distances are arc lengths.
    """

    family: str
    params: dict
    latent_dim: int
    domain: Box
    oracle_only: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamilyError(f"unknown kernel family {self.family!r}")
        if self.latent_dim < 1:
            raise ParameterError("latent_dim must be >= 1")
        if self.domain.dim != self.latent_dim:
            raise ParameterError("domain dimension does not match latent_dim")
        object.__setattr__(self, "params", dict(self.params))
        getattr(self, f"_validate_{self.family}")()

    # -- per-family validation -------------------------------------------

    def _validate_rbf(self):
        if float(self.params.get("sigma", 0.0)) <= 0:
            raise ParameterError("rbf requires sigma > 0")

    def _validate_sociability(self):
        if self.latent_dim != 1:
            raise ParameterError("sociability kernel is one-dimensional")
        if self.domain.lo[0] < 0:
            raise RangeError(
                "sociability kernel needs a nonnegative domain",
                point=(self.domain.lo[0],),
            )

    def _validate_logistic_distance(self):
        self.params.setdefault("alpha", 0.0)
        norm = self.params.setdefault("norm", 2.0)
        if norm != np.inf and float(norm) < 1:
            raise ParameterError("norm order must be >= 1 or inf")

    def _validate_logistic_bilinear(self):
        if self.latent_dim < 2:
            raise ParameterError("logistic_bilinear needs latent_dim >= 2")
        self.params.setdefault("alpha", 0.0)

    def _validate_probit_bilinear(self):
        self.params.setdefault("alpha", 0.0)
        lam = np.asarray(self.params.get("lam", np.ones(self.latent_dim)), dtype=float)
        if lam.shape != (self.latent_dim,):
            raise ParameterError("lam must have one entry per latent dimension")
        self.params["lam"] = tuple(lam.tolist())

    def _validate_polynomial(self):
        coeffs = _canonical_coeffs(dict(self.params.get("coeffs", {})), self.latent_dim)
        self.params["coeffs"] = coeffs
        self._scan_range()

    def _validate_blockwise_graphon(self):
        if self.latent_dim != 1:
            raise ParameterError("blockwise_graphon is one-dimensional")
        B = np.asarray(self.params["block_matrix"], dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ParameterError("block_matrix must be square")
        if not np.array_equal(B, B.T):
            raise ParameterError("block_matrix must be symmetric")
        if B.min() < 0 or B.max() > 1:
            raise RangeError("block_matrix entries must lie in [0, 1]")
        bounds = np.asarray(
            self.params.get("boundaries", self._equal_boundaries(B.shape[0])),
            dtype=float,
        )
        if bounds.shape != (B.shape[0] - 1,) or np.any(np.diff(bounds) <= 0):
            raise ParameterError("boundaries must be increasing interior cut points")
        lo, hi = self.domain.lo[0], self.domain.hi[0]
        if bounds.size and (bounds[0] <= lo or bounds[-1] >= hi):
            raise ParameterError("boundaries must lie strictly inside the domain")
        self.params["block_matrix"] = tuple(map(tuple, B.tolist()))
        self.params["boundaries"] = tuple(bounds.tolist())
        object.__setattr__(self, "oracle_only", True)

    def _equal_boundaries(self, k):
        lo, hi = self.domain.lo[0], self.domain.hi[0]
        return [lo + (hi - lo) * j / k for j in range(1, k)]

    def _validate_geodesic_rbf(self):
        if self.latent_dim != 1:
            raise ParameterError("geodesic_rbf is parameterized by a single angle")
        if float(self.params.get("sigma", 0.0)) <= 0:
            raise ParameterError("geodesic_rbf requires sigma > 0")
        self.params.setdefault("radius", 1.0)
        if float(self.params["radius"]) <= 0:
            raise ParameterError("geodesic_rbf requires radius > 0")
        if self.domain.lo[0] < 0 or self.domain.hi[0] > 2 * math.pi + 1e-12:
            raise ParameterError("geodesic_rbf domain must sit inside [0, 2*pi]")

    def _scan_range(self):
        res = _SCAN_RESOLUTION.get(self.latent_dim, _SCAN_RESOLUTION_HIGH_D)
        pts = self.domain.grid(res)
        # blockwise evaluation keeps the scan under ~2e7 entries
        block = max(1, int(2e7) // max(len(pts), 1))
        for start in range(0, len(pts), block):
            chunk = pts[start : start + block]
            vals = eval_matrix(self, chunk, pts)
            i, j = np.unravel_index(np.argmin(vals), vals.shape)
            if vals[i, j] < -_RANGE_TOL:
                raise RangeError(
                    f"kernel drops below 0 (value {vals[i, j]:.3e})",
                    point=(tuple(chunk[i]), tuple(pts[j])),
                    value=float(vals[i, j]),
                )
            i, j = np.unravel_index(np.argmax(vals), vals.shape)
            if vals[i, j] > 1 + _RANGE_TOL:
                raise RangeError(
                    f"kernel exceeds 1 (value {vals[i, j]:.3e})",
                    point=(tuple(chunk[i]), tuple(pts[j])),
                    value=float(vals[i, j]),
                )


# ---------------------------------------------------------------------------
# evaluation


def _monomial(X, alpha):
    out = np.ones(X.shape[:-1])
    for i, a in enumerate(alpha):
        if a:
            out = out * X[..., i] ** a
    return out


def _eval_broadcast(spec, X, Y):
    """Evaluate on broadcastable arrays with trailing axis of size d.

    Every formula below is written so that swapping X and Y produces the
    same floating-point result bit for bit (products are commutative and
    symmetric sums are grouped before asymmetric ones).
    """
    fam = spec.family
    p = spec.params
    if fam == "rbf":
        sq = np.sum((X - Y) ** 2, axis=-1)
        return np.exp(-sq / (2.0 * float(p["sigma"]) ** 2))
    if fam == "sociability":
        return 1.0 - np.exp(-2.0 * X[..., 0] * Y[..., 0])
    if fam == "logistic_distance":
        ordn = p["norm"]
        diff = np.abs(X - Y)
        if ordn == np.inf or ordn == "inf":
            dist = diff.max(axis=-1)
        elif float(ordn) == 2.0:
            dist = np.sqrt(np.sum(diff**2, axis=-1))
        else:
            q = float(ordn)
            dist = np.sum(diff**q, axis=-1) ** (1.0 / q)
        return special.expit(float(p["alpha"]) - dist)
    if fam == "logistic_bilinear":
        t = X[..., 0] + Y[..., 0]
        dot = np.sum(X[..., 1:] * Y[..., 1:], axis=-1)
        return special.expit(float(p["alpha"]) + t + dot)
    if fam == "probit_bilinear":
        lam = np.asarray(p["lam"])
        t = np.sum(X * lam * Y, axis=-1)
        return special.ndtr(float(p["alpha"]) + t)
    if fam == "polynomial":
        coeffs = p["coeffs"]
        out = np.zeros(np.broadcast_shapes(X.shape[:-1], Y.shape[:-1]))
        for (a, b), c in coeffs.items():
            if a > b:
                continue  # handled together with its mirror term
            if a == b:
                out = out + c * (_monomial(X, a) * _monomial(Y, a))
            else:
                out = out + c * (
                    _monomial(X, a) * _monomial(Y, b)
                    + _monomial(X, b) * _monomial(Y, a)
                )
        return out
    if fam == "blockwise_graphon":
        B = np.asarray(p["block_matrix"])
        bounds = np.asarray(p["boundaries"])
        bi = np.searchsorted(bounds, X[..., 0], side="right")
        bj = np.searchsorted(bounds, Y[..., 0], side="right")
        return B[bi, bj]
    if fam == "geodesic_rbf":
        radius = float(p["radius"])
        delta = np.abs(X[..., 0] - Y[..., 0])
        arc = radius * np.minimum(delta, 2.0 * math.pi - delta)
        return np.exp(-(arc**2) / (2.0 * float(p["sigma"]) ** 2))
    raise UnsupportedFamilyError(fam)


def eval_pairs(spec, X, Y):
    """Kernel values for row-aligned point arrays, shape (n, d) -> (n,)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return _eval_broadcast(spec, X, Y)


def eval_matrix(spec, X, Y):
    """Cross kernel matrix, shapes (n, d) x (m, d) -> (n, m)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return _eval_broadcast(spec, X[:, None, :], Y[None, :, :])


def eval_kernel(spec, x, y):
    """Evaluate f(x, y) for two points inside the domain.

    Raises
    ------
    DomainError
        If either point lies outside ``spec.domain``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    for pt in (x, y):
        if not spec.domain.contains(pt[None, :])[0]:
            raise DomainError(f"point {pt.tolist()} outside domain")
    return float(eval_pairs(spec, x[None, :], y[None, :])[0])


# ---------------------------------------------------------------------------
# curvature diagnostics


@dataclass(frozen=True)
class CurvatureReport:
    """Fitted diagonal-curvature law max(D2f+, D2f-) ~ c * dist^(2*alpha)."""

    alpha_hat: float
    c_hat: float
    max_violation_ratio: float
    pairs_tested: int
    degenerate: bool = False


def _sample_close_pairs(box, n_pairs, seed, frac=0.1, max_tries=200):
    rng = np.random.default_rng(seed)
    lo, hi = box.lo_arr, box.hi_arr
    scale = frac * box.diameter
    xs, ys = [], []
    need = n_pairs
    for _ in range(max_tries):
        if need <= 0:
            break
        x = rng.uniform(lo, hi, size=(need, box.dim))
        direction = rng.standard_normal((need, box.dim))
        direction /= np.maximum(np.linalg.norm(direction, axis=1, keepdims=True), 1e-300)
        radius = rng.uniform(0.0, scale, size=(need, 1))
        y = x + radius * direction
        ok = box.contains(y)
        xs.append(x[ok])
        ys.append(y[ok])
        need = n_pairs - sum(len(a) for a in xs)
    X = np.vstack(xs)[:n_pairs]
    Y = np.vstack(ys)[:n_pairs]
    return X, Y


def check_curvature(spec, spectrum, n_pairs=2000, seed=0):
    """Estimate the diagonal curvature exponent of the kernel's parts.

    The positive and negative parts have no closed form for indefinite
    kernels, so both are reconstructed from the truncated eigensystem in
    ``spectrum`` and the squared increment
    ``D2(x, y) = g(x,x) + g(y,y) - 2 g(x,y)`` is measured over sampled
    pairs with small separation.  A log-log fit of ``max(D2+, D2-)``
    against the pair distance gives the exponent estimate (clamped into
    (0, 1]) and constant; the report also carries the worst ratio of
    observed increment to the fitted law.
    """
    from .operators import nystrom_extend  # local import avoids a cycle

    X, Y = _sample_close_pairs(spec.domain, n_pairs, seed)
    dist = np.linalg.norm(X - Y, axis=1)
    keep = dist > 0
    X, Y, dist = X[keep], Y[keep], dist[keep]
    if len(spectrum.eigenvalues) == 0:
        return CurvatureReport(1.0, 0.0, 0.0, len(X), degenerate=True)

    lam = spectrum.eigenvalues
    lam_pos = np.where(lam > 0, lam, 0.0)
    lam_neg = np.where(lam < 0, -lam, 0.0)
    UX = nystrom_extend(spectrum, X)
    UY = nystrom_extend(spectrum, Y)

    def _d2(weights):
        gxx = np.sum(weights * UX * UX, axis=1)
        gyy = np.sum(weights * UY * UY, axis=1)
        gxy = np.sum(weights * UX * UY, axis=1)
        return gxx + gyy - 2.0 * gxy

    d2 = np.maximum(_d2(lam_pos), _d2(lam_neg))
    d2 = np.clip(d2, 0.0, None)
    mask = d2 > 1e-14
    if not np.any(mask):
        return CurvatureReport(1.0, 0.0, 0.0, len(X), degenerate=True)

    logd = np.log(dist[mask])
    logv = np.log(d2[mask])
    slope, _ = np.polyfit(logd, logv, 1)
    alpha = min(max(slope / 2.0, 1e-6), 1.0)
    # refit the constant at the clamped exponent
    log_c = float(np.mean(logv - 2.0 * alpha * logd))
    c_hat = math.exp(log_c)
    ratio = float(np.max(d2[mask] / (c_hat * dist[mask] ** (2.0 * alpha))))
    return CurvatureReport(float(alpha), c_hat, ratio, int(mask.sum()))


# ---------------------------------------------------------------------------
# polynomial helpers and power series truncation


def polynomial_rank_bound(spec):
    """Count distinct left monomials in a polynomial kernel.

    The integral operator of a polynomial kernel maps into the span of
    the monomials appearing on one side of the coefficient table, so the
    count bounds its rank.
    """
    if spec.family != "polynomial":
        raise UnsupportedFamilyError(
            f"rank bound needs a polynomial kernel, got {spec.family!r}"
        )
    alphas = {a for (a, _b) in spec.params["coeffs"]}
    return len(alphas)


def sociability_series(k):
    """Coefficient table of the degree-truncated sociability kernel.

    ``1 - exp(-2xy)`` expands as sum_{m>=1} (-1)^(m+1) 2^m (xy)^m / m!;
    terms of total degree >= k are dropped.
    """
    coeffs = {}
    m = 1
    while 2 * m < k:
        coeffs[((m,), (m,))] = (-1) ** (m + 1) * 2.0**m / math.factorial(m)
        m += 1
    return coeffs


def truncate_power_series(spec, k):
    """Drop all terms of total degree >= k from the kernel's power series.

    Supported inputs are polynomial kernels (truncated term by term; a
    cutoff beyond the degree returns the spec unchanged) and the
    sociability kernel via its registered series.  The result is a
    polynomial spec on the same domain, so construction re-runs the
    range scan and raises :class:`RangeError` (with the violating point)
    if the truncation escapes [0, 1].
    """
    if k < 2:
        raise ParameterError("truncation cutoff k must be >= 2")
    if spec.family == "polynomial":
        coeffs = {
            (a, b): c
            for (a, b), c in spec.params["coeffs"].items()
            if sum(a) + sum(b) < k
        }
        if len(coeffs) == len(spec.params["coeffs"]):
            return spec
        return replace(spec, params={"coeffs": coeffs})
    if spec.family == "sociability":
        return KernelSpec(
            family="polynomial",
            params={"coeffs": sociability_series(k)},
            latent_dim=1,
            domain=spec.domain,
        )
    raise UnsupportedFamilyError(
        f"no registered power series for family {spec.family!r}"
    )


# ---------------------------------------------------------------------------
# JSON round trip


def spec_to_json(spec):
    """Serialize a spec to the documented JSON layout."""
    params = dict(spec.params)
    if spec.family == "polynomial":
        params["coeffs"] = [
            [list(a), list(b), c] for (a, b), c in spec.params["coeffs"].items()
        ]
    if spec.family == "blockwise_graphon":
        params["block_matrix"] = [list(r) for r in params["block_matrix"]]
        params["boundaries"] = list(params["boundaries"])
    if "lam" in params:
        params["lam"] = list(params["lam"])
    return {
        "family": spec.family,
        "params": params,
        "domain": {"lo": list(spec.domain.lo), "hi": list(spec.domain.hi)},
        "latent_dim": spec.latent_dim,
    }


def spec_from_json(doc):
    """Inverse of :func:`spec_to_json`; accepts a dict or a JSON string."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    params = dict(doc.get("params", {}))
    if doc["family"] == "polynomial":
        params["coeffs"] = {
            (tuple(a), tuple(b)): c for a, b, c in params.get("coeffs", [])
        }
    return KernelSpec(
        family=doc["family"],
        params=params,
        latent_dim=int(doc["latent_dim"]),
        domain=Box(tuple(doc["domain"]["lo"]), tuple(doc["domain"]["hi"])),
    )
