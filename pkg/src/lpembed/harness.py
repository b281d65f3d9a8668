"""Reproducible experiment drivers.

Each driver is a pure function of an :class:`ExperimentConfig`: artifacts
and metric tables are byte-for-byte reproducible from (config, seeds).
Wall-clock time is returned in memory but deliberately kept out of the
serialized metadata so saved reports stay diffable.

Experiments
-----------
``fig1a_sociability`` / ``fig1b_branching_graphon`` / ``fig1c_circle_rbf``
    Simulate, embed, tabulate the operator's coordinate curve on a latent
    grid, align the cloud to it, optionally extract a density ridge, and
    (for the circle) estimate intrinsic dimensions of both clouds.
``regression``
    Node-response regression on high-dimensional embedding features:
    least squares, lasso, and k-NN against an oracle on the true latents.
``rate_study``
    Max positional error of aligned embeddings across graph sizes, with
    a log-log rate fit, for both adjacency and Laplacian embeddings.
``coupling_study``
    Disagreement frequency between a kernel and its series truncation
    under shared pair uniforms, against the union-bound certificate
    n^2 * E|f - f_k|.
"""

from __future__ import annotations

import json
import math
import pathlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import alignment as al
from . import embedding as emb_mod
from . import graphsim as gs
from . import manifold as mf
from . import operators as op
from ._svg import write_scatter_svg
from .errors import ParameterError
from .kernels import Box, KernelSpec, spec_from_json
from .operators import gauss_legendre_grid, latent_coordinates_many, nystrom_spectrum

EXPERIMENTS = (
    "fig1a_sociability",
    "fig1b_branching_graphon",
    "fig1c_circle_rbf",
    "regression",
    "rate_study",
    "coupling_study",
)

_EXP_CODE = {name: i + 1 for i, name in enumerate(EXPERIMENTS)}

#: published out-of-sample MSE figures for the regression setting, kept as
#: context only -- the learner set here (k-NN instead of neural net / forest)
#: differs, so these are never targets.
REGRESSION_CONTEXT_MSE = {
    "neural_net": 1.25,
    "random_forest": 1.11,
    "lasso": 1.58,
    "least_squares": 1.63,
    "ideal": 1.0,
}


# ---------------------------------------------------------------------------
# presets


def _branching_coeffs(c0=0.08, amp=0.8):
    """Rank-3 polynomial graphon: two smooth bumps plus a floor.

    The bumps x^2 (1-x)^5 and x^5 (1-x)^2 (peak-normalized) trace a loop
    in coordinate space that pinches near the origin, giving the
    filament-with-branch look.  A surrogate choice: no canonical formula
    exists for this scene, and it is documented as such.
    """
    peak = (2 / 7) ** 2 * (5 / 7) ** 5
    scale = 1.0 / peak
    # x^2 (1-x)^5 and x^5 (1-x)^2 expanded in the monomial basis
    b1 = {2 + i: scale * math.comb(5, i) * (-1) ** i for i in range(6)}
    b2 = {5 + i: scale * math.comb(2, i) * (-1) ** i for i in range(3)}
    coeffs = {((0,), (0,)): c0}
    for bump in (b1, b2):
        for i, ci in bump.items():
            for j, cj in bump.items():
                key = ((i,), (j,))
                coeffs[key] = coeffs.get(key, 0.0) + amp * ci * cj
    return coeffs


def kernel_preset(name):
    """Shipped kernel presets used by the experiment drivers and tests."""
    if name == "sociability":
        return KernelSpec("sociability", {}, 1, Box((0.0,), (3.0,)))
    if name == "sociability_wide":
        # regression benchmark domain: nearly untruncated Gamma latents, so
        # high-sociability nodes compress near the coordinate curve's tip and
        # linear methods pick up approximation bias
        return KernelSpec("sociability", {}, 1, Box((0.0,), (8.0,)))
    if name == "rbf_unit":
        return KernelSpec("rbf", {"sigma": 0.5}, 1, Box((0.0,), (1.0,)))
    if name == "branching_graphon":
        return KernelSpec(
            "polynomial", {"coeffs": _branching_coeffs()}, 1, Box((0.0,), (1.0,))
        )
    if name == "circle_rbf":
        # width/neighborhood pinned by a pilot sweep: dimension estimates on
        # both clouds sit well inside [1, 1.5] at n=5000, d_hat=10, k=200
        return KernelSpec(
            "geodesic_rbf",
            {"sigma": 0.2, "radius": 1.0},
            1,
            Box((0.0,), (2 * math.pi,)),
        )
    if name == "rank1_xy":
        return KernelSpec(
            "polynomial", {"coeffs": {((1,), (1,)): 1.0}}, 1, Box((0.1,), (0.9,))
        )
    if name == "two_block":
        return KernelSpec(
            "blockwise_graphon",
            {"block_matrix": ((0.2, 0.8), (0.8, 0.2)), "boundaries": (0.5,)},
            1,
            Box((0.0,), (1.0,)),
        )
    raise ParameterError(f"unknown kernel preset {name!r}")


def latent_preset(name):
    if name == "sociability":
        return gs.truncated_gamma(1.0, 1.0, 3.0)
    if name == "sociability_wide":
        return gs.truncated_gamma(1.0, 1.0, 8.0)
    if name in ("branching_graphon", "two_block", "rbf_unit"):
        box = kernel_preset(name).domain
        return gs.uniform_box(box)
    if name == "circle_rbf":
        return gs.circle_uniform()
    if name == "rank1_xy":
        return gs.uniform_box(Box((0.1,), (0.9,)))
    raise ParameterError(f"unknown latent preset {name!r}")


_FIG1_PRESETS = {
    "fig1a_sociability": ("sociability", 3),
    "fig1b_branching_graphon": ("branching_graphon", 3),
    "fig1c_circle_rbf": ("circle_rbf", 10),
}


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a driver needs; unset fields take experiment defaults."""

    experiment: str
    n: int | None = None
    d_hat: int | str | None = None
    seeds: tuple = (0,)
    rho: float = 1.0
    out: str | None = None
    ridge: bool = True
    quad_m: int = 256
    tail_tol: float = 1e-6
    curve_grid: int = 512
    n_grid: tuple = (500, 1000, 2000, 4000)
    rn_grid: tuple = (0.2, 0.1, 0.05)
    k_list: tuple = (3, 5)
    trials: int = 200
    dim_k: int | None = None
    kernel_json: dict | None = None
    svg: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ParameterError(f"unknown experiment {self.experiment!r}")
        if len(self.seeds) == 0:
            raise ParameterError("need at least one seed")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        n = self.n
        if n is None and self.experiment != "rate_study":
            n = 5000 if self.experiment != "coupling_study" else 200
            object.__setattr__(self, "n", n)
        if self.experiment.startswith("fig1") or self.experiment == "regression":
            if self.n < 100:
                raise ParameterError("embedding experiments need n >= 100")
        if self.d_hat is None:
            if self.experiment in _FIG1_PRESETS:
                object.__setattr__(self, "d_hat", _FIG1_PRESETS[self.experiment][1])
            elif self.experiment == "regression":
                object.__setattr__(self, "d_hat", 100)
            elif self.experiment == "rate_study":
                object.__setattr__(self, "d_hat", 1)
        if self.dim_k is None and self.experiment == "fig1c_circle_rbf":
            object.__setattr__(self, "dim_k", 200)


def config_from_json(doc, **overrides):
    """Build a config from a JSON document (path, string, or dict)."""
    if isinstance(doc, (str, pathlib.Path)):
        text = pathlib.Path(doc).read_text() if pathlib.Path(doc).exists() else str(doc)
        doc = json.loads(text)
    merged = {**doc, **{k: v for k, v in overrides.items() if v is not None}}
    for key in ("seeds", "n_grid", "rn_grid", "k_list"):
        if key in merged and merged[key] is not None:
            merged[key] = tuple(merged[key])
    return ExperimentConfig(**merged)


@dataclass
class BenchReport:
    experiment: str
    metrics: list
    meta: dict
    seeds: tuple
    wall_clock: float

    def save(self, outdir):
        out = pathlib.Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        _write_rows(out / "metrics.csv", self.metrics)
        meta = {
            "experiment": self.experiment,
            "seeds": list(self.seeds),
            **self.meta,
        }
        (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
        return out


def _fmt_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _write_rows(path, rows):
    cols = sorted({k for r in rows for k in r})
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_fmt_cell(r.get(c)) for c in cols))
    pathlib.Path(path).write_text("\n".join(lines) + "\n")
    return path


def _child_seeds(*parts, count):
    """Deterministic per-purpose sub-seeds from structured parts."""
    ss = np.random.SeedSequence([int(p) for p in parts])
    return [int(v) for v in ss.generate_state(count)]


def _run_cells(cells, fn, threads):
    """Map fn over cells, optionally in a process pool; order-preserving."""
    if threads <= 1:
        return [fn(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, cells))


def _truncate_embedding(embedding, d):
    return emb_mod.EmbeddingMatrix(
        coords=embedding.coords[:, :d],
        eigenvalues=embedding.eigenvalues[:d],
        eig_signs=embedding.eig_signs[:d],
        source=embedding.source,
        residuals=embedding.residuals[:d],
    )


# ---------------------------------------------------------------------------
# fig1 drivers


def _fig1_cell(args):
    config, seed = args
    kname, _ = _FIG1_PRESETS[config.experiment]
    spec = (
        spec_from_json(config.kernel_json) if config.kernel_json else kernel_preset(kname)
    )
    dist = latent_preset(kname)
    d_hat = int(config.d_hat)

    grid = gauss_legendre_grid(spec.domain, config.quad_m)
    spectrum = nystrom_spectrum(spec, grid, tail_tol=config.tail_tol)
    J = spectrum.truncation
    d_cols = min(d_hat, J)
    zgrid = np.linspace(
        spec.domain.lo[0], spec.domain.hi[0], config.curve_grid
    )[:, None]
    curve = latent_coordinates_many(spectrum, zgrid)[:, :d_cols]

    lat_seed, graph_seed, misc_seed = _child_seeds(
        _EXP_CODE[config.experiment], seed, count=3
    )
    latents = gs.sample_latents(dist, config.n, lat_seed)
    graph = gs.sample_graph(spec, latents, config.rho, graph_seed)

    d_scree = min(max(d_hat, 30), graph.n - 3)
    wide = emb_mod.ase(graph, d_scree)
    embedding = _truncate_embedding(wide, d_hat)
    zg = emb_mod.profile_likelihood_rank(wide.eigenvalues)

    targets = latent_coordinates_many(spectrum, latents.points)[:, :d_cols]
    op_signs = np.where(spectrum.eigenvalues[:d_cols] < 0, -1.0, 1.0)
    signs_match = bool(np.array_equal(op_signs, embedding.eig_signs[:d_cols]))
    res = al.align_indefinite(embedding, targets)
    perm = embedding.pq_order()
    aligned = embedding.coords[:, perm] @ res.Q.T
    curve_pq = curve[:, perm]

    row = {
        "experiment": config.experiment,
        "seed": seed,
        "n": config.n,
        "d_hat": d_hat,
        "zg_d_hat": zg.d_hat,
        "edge_density": graph.edge_density,
        "signature_p": embedding.signature()[0],
        "signature_q": embedding.signature()[1],
        "operator_signs_match": signs_match,
        "align_max_error": res.max_error,
        "align_converged": res.converged,
        "mean_dist_embed_to_curve": mf.mean_nn_distance(aligned, curve_pq),
    }

    outdir = None
    if config.out:
        outdir = pathlib.Path(config.out) / f"seed_{seed}"
        outdir.mkdir(parents=True, exist_ok=True)
        np.savetxt(outdir / "embedding.csv", embedding.coords, fmt="%.17g", delimiter=",")
        np.savetxt(outdir / "aligned.csv", aligned, fmt="%.17g", delimiter=",")
        np.savetxt(outdir / "true_curve.csv", curve, fmt="%.17g", delimiter=",")
        gs.save_latents(latents, outdir / "latents.csv")
        if config.svg:
            write_scatter_svg(outdir / "embedding.svg", embedding.coords)

    if config.ridge:
        ridge = mf.scms_ridge(aligned, ridge_dim=1, seed=misc_seed)
        pts = ridge.points[ridge.converged] if ridge.converged.any() else ridge.points
        row["ridge_converged_frac"] = float(ridge.converged.mean())
        row["mean_dist_ridge_to_curve"] = mf.mean_nn_distance(pts, curve_pq)
        if outdir is not None:
            np.savetxt(outdir / "ridge.csv", ridge.points, fmt="%.17g", delimiter=",")

    if config.experiment == "fig1c_circle_rbf":
        for label, cloud in (("phi", targets), ("ase", embedding.coords)):
            for est in mf.intrinsic_dim_all(cloud, k=config.dim_k):
                row[f"dim_{label}_{est.method}"] = est.value

    if outdir is not None:
        meta = {
            "seed": seed,
            "lat_seed": lat_seed,
            "graph_seed": graph_seed,
            "kernel": spec.family,
            "signature": list(spectrum.signature),
            "zg_d_hat": zg.d_hat,
        }
        (outdir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    return row


def run_fig1(config):
    """Simulate, embed, tabulate the true curve, and score one fig1 scene."""
    if config.experiment not in _FIG1_PRESETS:
        raise ParameterError(f"{config.experiment!r} is not a fig1 experiment")
    start = time.perf_counter()
    rows = _run_cells([(config, s) for s in config.seeds], _fig1_cell, config.threads)
    report = BenchReport(
        experiment=config.experiment,
        metrics=rows,
        meta={"config": _config_echo(config)},
        seeds=config.seeds,
        wall_clock=time.perf_counter() - start,
    )
    if config.out:
        report.save(config.out)
    return report


# ---------------------------------------------------------------------------
# regression benchmark


def _regression_cell(args):
    config, seed = args
    spec = kernel_preset("sociability_wide")
    dist = latent_preset("sociability_wide")
    lat_seed, graph_seed, y_seed = _child_seeds(
        _EXP_CODE["regression"], seed, count=3
    )
    latents = gs.sample_latents(dist, config.n, lat_seed)
    graph = gs.sample_graph(spec, latents, config.rho, graph_seed)
    embedding = emb_mod.ase(graph, int(config.d_hat))

    rng = np.random.default_rng(y_seed)
    z = latents.points[:, 0]
    y = 5.0 + 2.0 * z + rng.standard_normal(config.n)
    perm = rng.permutation(config.n)
    n_train = int(round(0.6 * config.n))
    tr, te = perm[:n_train], perm[n_train:]
    X = embedding.coords

    rows = []

    def _mse(pred):
        return float(np.mean((pred - y[te]) ** 2))

    # ordinary least squares on embedding features
    A = np.column_stack([np.ones(len(tr)), X[tr]])
    coef, _res, rank, _sv = np.linalg.lstsq(A, y[tr], rcond=None)
    flagged = rank < A.shape[1]
    pred = np.column_stack([np.ones(len(te)), X[te]]) @ coef
    rows.append(
        {"seed": seed, "method": "least_squares", "mse": _mse(pred), "flagged": flagged}
    )

    from sklearn.linear_model import LassoCV
    from sklearn.model_selection import GridSearchCV
    from sklearn.neighbors import KNeighborsRegressor
    from sklearn.pipeline import make_pipeline
    from sklearn.preprocessing import StandardScaler

    lasso = make_pipeline(
        StandardScaler(), LassoCV(cv=5, max_iter=20000, random_state=0)
    )
    lasso.fit(X[tr], y[tr])
    rows.append(
        {"seed": seed, "method": "lasso", "mse": _mse(lasso.predict(X[te])), "flagged": False}
    )

    # the manifold-exploiting entry: Euclidean distances over all retained
    # coordinates are dominated by the ~90 pure-noise directions, so the
    # k-NN pipeline first keeps the leading block selected on the scree of
    # the embedding's own eigenvalues, then cross-validates k on it
    d_sel = emb_mod.profile_likelihood_rank(embedding.eigenvalues).d_hat
    X_sel = X[:, :d_sel]
    knn = GridSearchCV(
        KNeighborsRegressor(), {"n_neighbors": [5, 10, 20, 40]}, cv=5,
        scoring="neg_mean_squared_error",
    )
    knn.fit(X_sel[tr], y[tr])
    rows.append(
        {
            "seed": seed,
            "method": "knn",
            "mse": _mse(knn.predict(X_sel[te])),
            "flagged": False,
            "knn_k": int(knn.best_params_["n_neighbors"]),
            "knn_rank": d_sel,
        }
    )

    Az = np.column_stack([np.ones(len(tr)), z[tr]])
    coef_z, *_ = np.linalg.lstsq(Az, y[tr], rcond=None)
    pred_z = np.column_stack([np.ones(len(te)), z[te]]) @ coef_z
    rows.append({"seed": seed, "method": "oracle_on_z", "mse": _mse(pred_z), "flagged": False})
    return rows


def run_regression(config):
    """Out-of-sample MSE of embedding-feature regressors vs the latent oracle."""
    start = time.perf_counter()
    nested = _run_cells(
        [(config, s) for s in config.seeds], _regression_cell, config.threads
    )
    rows = [r for cell in nested for r in cell]
    by_seed = {}
    for r in rows:
        by_seed.setdefault(r["seed"], {})[r["method"]] = r["mse"]
    wins = sum(1 for d in by_seed.values() if d["knn"] < d["least_squares"])
    report = BenchReport(
        experiment="regression",
        metrics=rows,
        meta={
            "config": _config_echo(config),
            "knn_beats_least_squares": wins,
            "n_seeds": len(config.seeds),
            "published_context_mse": REGRESSION_CONTEXT_MSE,
        },
        seeds=config.seeds,
        wall_clock=time.perf_counter() - start,
    )
    if config.out:
        report.save(config.out)
    return report


# ---------------------------------------------------------------------------
# rate study


def _rate_cell(args):
    config, n, seed, spectrum = args
    spec = spectrum.spec
    dist = latent_preset("rank1_xy")
    lat_seed, graph_seed = _child_seeds(_EXP_CODE["rate_study"], n, seed, count=2)
    latents = gs.sample_latents(dist, n, lat_seed)
    graph = gs.sample_graph(spec, latents, config.rho, graph_seed)
    targets = latent_coordinates_many(spectrum, latents.points)

    rows = []
    embedding = emb_mod.ase(graph, 1)
    res = al.align_indefinite(embedding, targets)
    rows.append(
        {
            "n": n,
            "seed": seed,
            "source": "ase",
            "max_error": res.max_error,
            "mean_error": res.mean_error,
        }
    )
    lap = emb_mod.lse(graph, 1)
    lap_targets = al.lse_targets(targets, (1, 0))
    res_l = al.align_indefinite(lap, lap_targets)
    rows.append(
        {
            "n": n,
            "seed": seed,
            "source": "lse",
            "max_error": res_l.max_error,
            "mean_error": res_l.mean_error,
        }
    )
    return rows


def run_rate_study(config):
    """Aligned positional error across graph sizes plus log-log rate fits."""
    start = time.perf_counter()
    spec = kernel_preset("rank1_xy")
    spectrum = nystrom_spectrum(spec, gauss_legendre_grid(spec.domain, 64))
    cells = [(config, n, s, spectrum) for n in config.n_grid for s in config.seeds]
    nested = _run_cells(cells, _rate_cell, config.threads)
    rows = [r for cell in nested for r in cell]

    meta = {"config": _config_echo(config)}
    for source in ("ase", "lse"):
        sub = [(r["n"], r["max_error"]) for r in rows if r["source"] == source]
        fit = al.rate_fit(sub)
        meta[f"slope_{source}"] = fit.slope
        meta[f"slope_{source}_half_width"] = fit.half_width
    n_lo, n_hi = min(config.n_grid), max(config.n_grid)
    per_seed = {
        s: {
            r["n"]: r["max_error"]
            for r in rows
            if r["seed"] == s and r["source"] == "ase"
        }
        for s in config.seeds
    }
    meta["monotone_matched_seeds"] = all(
        per_seed[s][n_hi] < per_seed[s][n_lo] for s in config.seeds
    )
    report = BenchReport(
        experiment="rate_study",
        metrics=rows,
        meta=meta,
        seeds=config.seeds,
        wall_clock=time.perf_counter() - start,
    )
    if config.out:
        report.save(config.out)
        _write_rows(
            pathlib.Path(config.out) / "errors.csv",
            [
                {k: r[k] for k in ("n", "seed", "source", "max_error")}
                for r in rows
            ],
        )
    return report


# ---------------------------------------------------------------------------
# coupling study


def _coupling_bound(spec, dist, k, r_n, n, nodes=200):
    """Union-bound certificate n^2 E|f - f_k| by weighted quadrature."""
    grid = gauss_legendre_grid(spec.domain, nodes)
    dens = gs.latent_pdf(dist, grid.nodes)
    w = grid.weights * dens
    w = w / w.sum()
    scaled_box = Box(
        tuple(v * r_n for v in spec.domain.lo), tuple(v * r_n for v in spec.domain.hi)
    )
    scaled_spec = replace(spec, domain=scaled_box)
    truncated = gs.truncate_power_series(scaled_spec, k)
    from .kernels import eval_matrix

    nodes_scaled = grid.nodes * r_n
    gap = np.abs(
        eval_matrix(scaled_spec, nodes_scaled, nodes_scaled)
        - eval_matrix(truncated, nodes_scaled, nodes_scaled)
    )
    expected = float(w @ gap @ w)
    return n**2 * expected


def _coupling_cell(args):
    config, k, ri, r_n = args
    spec = kernel_preset("sociability")
    dist = latent_preset("sociability")
    n = int(config.n)
    bound = _coupling_bound(spec, dist, k, r_n, n)
    disagree_any = 0
    counts = []
    for t in range(config.trials):
        lat_seed, pair_seed = _child_seeds(
            _EXP_CODE["coupling_study"], config.seeds[0], k, ri, t, count=2
        )
        latents = gs.sample_latents(dist, n, lat_seed)
        _g1, _g2, disagreements = gs.couple_graphs(spec, k, latents, r_n, pair_seed)
        counts.append(disagreements)
        disagree_any += bool(disagreements)
    freq = disagree_any / config.trials
    informative = bound <= 1.0
    return {
        "k": k,
        "r_n": r_n,
        "n": n,
        "trials": config.trials,
        "bound": bound,
        "empirical_freq": freq,
        "median_disagreements": float(np.median(counts)),
        "informative": informative,
        "within_bound": bool(freq <= bound) if informative else None,
    }


def run_coupling_study(config):
    """Empirical coupling disagreement frequency against its certificate."""
    start = time.perf_counter()
    cells = [
        (config, k, ri, r_n)
        for k in config.k_list
        for ri, r_n in enumerate(config.rn_grid)
    ]
    rows = _run_cells(cells, _coupling_cell, config.threads)
    informative = [r for r in rows if r["informative"]]
    report = BenchReport(
        experiment="coupling_study",
        metrics=rows,
        meta={
            "config": _config_echo(config),
            "informative_cells": len(informative),
            "all_within_bound": all(r["within_bound"] for r in informative),
        },
        seeds=config.seeds,
        wall_clock=time.perf_counter() - start,
    )
    if config.out:
        report.save(config.out)
    return report


# ---------------------------------------------------------------------------


def _config_echo(config):
    echo = asdict(config)
    echo["seeds"] = list(config.seeds)
    for key in ("n_grid", "rn_grid", "k_list"):
        echo[key] = list(echo[key])
    # where results land and how many workers ran does not affect them;
    # keeping these out makes saved reports byte-comparable across runs
    echo.pop("out", None)
    echo.pop("threads", None)
    return echo


def run_experiment(config):
    """Dispatch a config to its driver."""
    if config.experiment in _FIG1_PRESETS:
        return run_fig1(config)
    if config.experiment == "regression":
        return run_regression(config)
    if config.experiment == "rate_study":
        return run_rate_study(config)
    if config.experiment == "coupling_study":
        return run_coupling_study(config)
    raise ParameterError(config.experiment)
