"""Command-line interface.

Subcommands: simulate, spectrum, embed, align, dimest, ridge, bench.
Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

import numpy as np

from . import alignment as al
from . import embedding as emb_mod
from . import graphsim as gs
from . import harness
from . import manifold as mf
from . import operators as op
from ._svg import write_scatter_svg
from .errors import LpembedError, NumericError
from .kernels import spec_from_json

_CONFIG_ERRORS = (LpembedError, json.JSONDecodeError, FileNotFoundError, KeyError)


def _load_kernel(args):
    if getattr(args, "preset", None):
        return harness.kernel_preset(args.preset)
    if getattr(args, "kernel", None):
        return spec_from_json(json.loads(pathlib.Path(args.kernel).read_text()))
    raise LpembedError("provide --preset or --kernel")


def _load_latent_dist(args, spec):
    if getattr(args, "latent", None):
        doc = json.loads(pathlib.Path(args.latent).read_text())
        return gs.LatentDistribution(doc["kind"], doc.get("params", {}))
    if getattr(args, "preset", None):
        return harness.latent_preset(args.preset)
    return gs.uniform_box(spec.domain)


def _outdir(args):
    out = pathlib.Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args):
    spec = _load_kernel(args)
    dist = _load_latent_dist(args, spec)
    latents = gs.sample_latents(dist, args.n, args.seed)
    graph = gs.sample_graph(spec, latents, args.rho, args.seed + 1)
    out = _outdir(args)
    gs.save_graph(graph, out / "graph.txt")
    gs.save_latents(latents, out / "latents.csv")
    meta = {
        "n": graph.n,
        "edges": graph.n_edges,
        "rho": args.rho,
        "seed": args.seed,
        "kernel": spec.family,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    print(f"wrote graph with {graph.n} nodes, {graph.n_edges} edges to {out}")


def _cmd_spectrum(args):
    spec = _load_kernel(args)
    grid = op.make_grid(spec.domain, args.m, scheme=args.scheme)
    if args.weighting == "latent_density":
        dist = _load_latent_dist(args, spec)
        grid = op.density_weighted(grid, lambda X: gs.latent_pdf(dist, X))
    spectrum = op.nystrom_spectrum(spec, grid, tail_tol=args.tail_tol)
    out = _outdir(args)
    op.save_spectrum(spectrum, out)
    diag = op.trace_diagnostics(spectrum)
    print(
        f"retained {spectrum.truncation} eigenpairs, signature {spectrum.signature}, "
        f"tail mass {spectrum.tail_mass:.3e}, trace sum {diag.sum_abs_eigs:.6f}"
    )


def _cmd_embed(args):
    graph = gs.load_graph(args.input)
    if args.drop_isolated:
        graph, _kept = emb_mod.drop_isolated(graph)
    embed_fn = emb_mod.lse if args.laplacian else emb_mod.ase
    if args.dhat == "auto":
        probe = min(30, graph.n - 3)
        wide = embed_fn(graph, probe)
        selection = emb_mod.profile_likelihood_rank(wide.eigenvalues)
        d_hat = selection.d_hat
        embedding = emb_mod.EmbeddingMatrix(
            coords=wide.coords[:, :d_hat],
            eigenvalues=wide.eigenvalues[:d_hat],
            eig_signs=wide.eig_signs[:d_hat],
            source=wide.source,
            residuals=wide.residuals[:d_hat],
        )
        print(f"profile-likelihood rank selection: d_hat={d_hat}")
    else:
        embedding = embed_fn(graph, int(args.dhat))
    out = _outdir(args)
    emb_mod.save_embedding(embedding, out, extra_meta={"input": str(args.input)})
    if args.svg:
        write_scatter_svg(out / "embedding.svg", embedding.coords)
    print(f"embedded {embedding.n} nodes into {embedding.d_hat} dimensions -> {out}")


def _cmd_align(args):
    if args.errors:
        rows = np.loadtxt(args.errors, delimiter=",", skiprows=1, usecols=None, ndmin=2)
        header = pathlib.Path(args.errors).read_text().splitlines()[0].split(",")
        n_col, err_col = header.index("n"), header.index("max_error")
        fit = al.rate_fit([(r[n_col], r[err_col]) for r in rows])
        print(
            f"rate fit over {fit.n_points} points: slope {fit.slope:.4f} "
            f"+/- {fit.half_width:.4f}"
        )
        return
    x_hat = np.loadtxt(args.embedding, delimiter=",", ndmin=2)
    target = np.loadtxt(args.targets, delimiter=",", ndmin=2)
    p, q = (int(v) for v in args.signature.split(","))
    res = al.align_indefinite(x_hat, target, (p, q))
    out = _outdir(args)
    doc = {
        "Q": res.Q.tolist(),
        "max_error": res.max_error,
        "mean_error": res.mean_error,
        "constraint_residual": res.constraint_residual,
        "iterations": res.iterations,
        "converged": res.converged,
        "diag_scale": res.diag_scale.tolist(),
        "scale_ok": res.scale_ok,
    }
    (out / "alignment.json").write_text(json.dumps(doc, indent=2, sort_keys=True))
    print(
        f"max error {res.max_error:.6g}, mean {res.mean_error:.6g}, "
        f"constraint residual {res.constraint_residual:.2e}"
    )


def _cmd_dimest(args):
    cloud = np.loadtxt(args.input, delimiter=",", ndmin=2)
    methods = mf.METHODS if args.method == "all" else (args.method,)
    values = {}
    for method in methods:
        est = mf.intrinsic_dim(cloud, method, k=args.k)
        values[method] = est.value
    # reporting order: local PCA / MLE / simplex skewness
    print(" ".join(f"{m}={values[m]:.3f}" for m in mf.METHODS if m in values))
    if args.out:
        out = _outdir(args)
        (out / "dimension.json").write_text(json.dumps(values, indent=2, sort_keys=True))


def _cmd_ridge(args):
    cloud = np.loadtxt(args.input, delimiter=",", ndmin=2)
    bandwidth = "auto" if args.bandwidth == "auto" else float(args.bandwidth)
    ridge = mf.scms_ridge(
        cloud, bandwidth=bandwidth, ridge_dim=args.ridge_dim, seed=args.seed
    )
    out = _outdir(args)
    np.savetxt(out / "ridge.csv", ridge.points, fmt="%.17g", delimiter=",")
    summary = {
        "bandwidth": ridge.bandwidth,
        "ridge_dim": ridge.ridge_dim,
        "n_starts": int(len(ridge.points)),
        "converged": int(ridge.converged.sum()),
    }
    (out / "ridge.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    print(
        f"{summary['converged']}/{summary['n_starts']} starts converged "
        f"at bandwidth {ridge.bandwidth:.4g} -> {out}"
    )


def _cmd_bench(args):
    overrides = {
        "experiment": args.experiment,
        "seeds": tuple(range(args.seed, args.seed + args.n_seeds)),
        "out": args.out,
        "threads": args.threads,
    }
    if args.n is not None:
        overrides["n"] = args.n
    if args.dhat is not None:
        overrides["d_hat"] = args.dhat if args.dhat == "auto" else int(args.dhat)
    if args.config:
        config = harness.config_from_json(args.config, **overrides)
    else:
        config = harness.ExperimentConfig(**overrides)
    report = harness.run_experiment(config)
    print(
        f"{report.experiment}: {len(report.metrics)} metric rows "
        f"in {report.wall_clock:.1f}s"
        + (f" -> {config.out}" if config.out else "")
    )
    for key, val in sorted(report.meta.items()):
        if key != "config":
            print(f"  {key}: {val}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lpembed",
        description="simulate latent position graphs, embed them, and "
        "analyze the low-dimensional structure of the embeddings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("simulate", help="sample latents and a Bernoulli graph")
    p.add_argument("--preset", default=None, help="kernel/latent preset name")
    p.add_argument("--kernel", default=None, help="kernel spec JSON file")
    p.add_argument("--latent", default=None, help="latent distribution JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, default=1.0, help="sparsity factor")
    _common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("spectrum", help="quadrature eigensystem of a kernel operator")
    p.add_argument("--preset", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--latent", default=None)
    p.add_argument("--m", type=int, default=256, help="nodes per axis")
    p.add_argument(
        "--scheme",
        default="gauss_legendre_tensor",
        choices=["gauss_legendre_tensor", "uniform_midpoint", "monte_carlo"],
    )
    p.add_argument("--weighting", default="lebesgue", choices=["lebesgue", "latent_density"])
    p.add_argument("--tail-tol", type=float, default=1e-6)
    _common(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("embed", help="spectral embedding of a graph file")
    p.add_argument("--input", required=True, help="graph file ('n m' header)")
    p.add_argument("--dhat", default="auto", help="dimension count or 'auto'")
    p.add_argument("--laplacian", action="store_true")
    p.add_argument("--drop-isolated", action="store_true")
    p.add_argument("--svg", action="store_true", help="also write a 2-d scatter SVG")
    _common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("align", help="fit an indefinite-orthogonal alignment")
    p.add_argument("--embedding", help="source coordinates CSV")
    p.add_argument("--targets", help="target coordinates CSV")
    p.add_argument("--signature", default="1,0", help="p,q")
    p.add_argument("--errors", default=None, help="errors.csv for a rate fit instead")
    _common(p)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("dimest", help="intrinsic dimension of a point cloud")
    p.add_argument("--input", required=True, help="cloud CSV")
    p.add_argument("--method", default="all", choices=["all", *mf.METHODS])
    p.add_argument("--k", type=int, default=None, help="neighborhood size")
    _common(p)
    p.set_defaults(func=_cmd_dimest)

    p = sub.add_parser("ridge", help="SCMS density ridge of a point cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--ridge-dim", type=int, default=1)
    _common(p)
    p.set_defaults(func=_cmd_ridge)

    p = sub.add_parser("bench", help="run a packaged experiment")
    p.add_argument("experiment", choices=list(harness.EXPERIMENTS))
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dhat", default=None)
    p.add_argument("--n-seeds", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    _common(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
