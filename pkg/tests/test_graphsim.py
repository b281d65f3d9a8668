import math

import numpy as np
import pytest

from lpembed import (
    Box,
    DomainError,
    KernelSpec,
    LatentSample,
    ParameterError,
    couple_graphs,
    load_graph,
    load_latents,
    piecewise_density,
    sample_graph,
    sample_latents,
    save_graph,
    save_latents,
    truncated_gamma,
    uniform_box,
)
from lpembed.graphsim import latent_pdf


def product_spec():
    return KernelSpec("polynomial", {"coeffs": {((1,), (1,)): 1.0}}, 1, Box((0.0,), (1.0,)))


def constant_spec(value, hi=1.0):
    return KernelSpec(
        "polynomial", {"coeffs": {((0,), (0,)): value}}, 1, Box((0.0,), (hi,))
    )


def sociability_spec():
    return KernelSpec("sociability", {}, 1, Box((0.0,), (3.0,)))


def test_sample_latents_deterministic():
    dist = truncated_gamma(1.0, 1.0, 3.0)
    a = sample_latents(dist, 1000, 42)
    b = sample_latents(dist, 1000, 42)
    c = sample_latents(dist, 1000, 43)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_sample_latents_empty():
    sample = sample_latents(uniform_box(Box((0.0,), (1.0,))), 0, 0)
    assert sample.points.shape == (0, 1)


def test_truncated_gamma_mean():
    # E[X | X <= 3] for Exp(1) is 1 - 3 e^{-3} / (1 - e^{-3})
    expected = 1 - 3 * math.exp(-3) / (1 - math.exp(-3))
    sample = sample_latents(truncated_gamma(1.0, 1.0, 3.0), 100_000, 7)
    pts = sample.points[:, 0]
    assert pts.min() >= 0 and pts.max() <= 3
    se = pts.std() / math.sqrt(len(pts))
    assert abs(pts.mean() - expected) <= 3 * se


def test_piecewise_density_sampling_and_pdf():
    dist = piecewise_density([0.0, 0.5, 1.0], [3.0, 1.0])
    sample = sample_latents(dist, 50_000, 3)
    frac_left = float((sample.points[:, 0] < 0.5).mean())
    assert frac_left == pytest.approx(0.75, abs=0.01)
    dens = latent_pdf(dist, np.array([[0.25], [0.75]]))
    assert dens[0] == pytest.approx(1.5)
    assert dens[1] == pytest.approx(0.5)


def test_complete_graph_when_f_is_one():
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 40, 0)
    g = sample_graph(constant_spec(1.0), lat, 1.0, 1)
    assert g.n_edges == 40 * 39 // 2


def test_empty_graph_when_f_is_zero():
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 40, 0)
    g = sample_graph(constant_spec(0.0), lat, 1.0, 1)
    assert g.n_edges == 0


def test_graph_determinism_and_structure():
    spec = sociability_spec()
    lat = sample_latents(truncated_gamma(1.0, 1.0, 3.0), 300, 5)
    g1 = sample_graph(spec, lat, 0.7, 9)
    g2 = sample_graph(spec, lat, 0.7, 9)
    g3 = sample_graph(spec, lat, 0.7, 10)
    assert np.array_equal(g1.edges, g2.edges)
    assert not np.array_equal(g1.edges, g3.edges)
    assert np.all(g1.edges[:, 0] < g1.edges[:, 1])
    assert len(np.unique(g1.edges[:, 0] * 300 + g1.edges[:, 1])) == g1.n_edges


def test_rho_validation():
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 10, 0)
    for rho in (0.0, -0.5, 1.5):
        with pytest.raises(ParameterError):
            sample_graph(product_spec(), lat, rho, 0)


def test_latents_outside_domain_rejected():
    lat = sample_latents(uniform_box(Box((0.0,), (2.0,))), 10, 0)
    with pytest.raises(DomainError):
        sample_graph(product_spec(), lat, 1.0, 0)


def test_edge_marginals_small_graph():
    # fixed latents, many replications: empirical edge frequency within
    # four standard errors of rho * f(z_i, z_j)
    spec = product_spec()
    pts = np.array([[0.3], [0.6], [0.9]])
    lat = LatentSample(points=pts, distribution=uniform_box(Box((0.0,), (1.0,))), seed=-1)
    rho = 0.7
    reps = 20_000
    counts = np.zeros((3, 3))
    for seed in range(reps):
        g = sample_graph(spec, lat, rho, seed)
        for i, j in g.edges:
            counts[i, j] += 1
    for i in range(3):
        for j in range(i + 1, 3):
            p = rho * float(pts[i, 0] * pts[j, 0])
            se = math.sqrt(p * (1 - p) / reps)
            assert abs(counts[i, j] / reps - p) <= 4 * se


def test_edge_density_matches_monte_carlo():
    spec = KernelSpec("rbf", {"sigma": 0.5}, 1, Box((0.0,), (1.0,)))
    dist = uniform_box(Box((0.0,), (1.0,)))
    # independent integrator: plain Monte Carlo over latent pairs
    rng = np.random.default_rng(99)
    xs, ys = rng.uniform(0, 1, (2, 1_000_000))
    vals = np.exp(-((xs - ys) ** 2) / (2 * 0.5**2))
    mc_mean = vals.mean()
    mc_se = vals.std() / 1000.0
    lat = sample_latents(dist, 2000, 21)
    g = sample_graph(spec, lat, 1.0, 22)
    # graph density fluctuates mostly through the shared latent draws
    z = lat.points[:, 0]
    row_means = np.exp(-((z[:, None] - z[None, :]) ** 2) / 0.5).mean(axis=1)
    graph_se = 2 * row_means.std() / math.sqrt(len(z))
    tol = 3 * (mc_se + graph_se)
    assert abs(g.edge_density - mc_mean) <= tol


def test_coupling_zero_disagreements_beyond_degree():
    spec = product_spec()
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 100, 4)
    g_full, g_trunc, disagreements = couple_graphs(spec, 10, lat, 0.5, 8)
    assert disagreements == 0
    assert np.array_equal(g_full.edges, g_trunc.edges)


def test_coupling_marginals_match_each_kernel():
    # each coupled graph, viewed alone, follows its own kernel
    spec = sociability_spec()
    pts = np.array([[1.0], [2.0], [3.0]])
    lat = LatentSample(points=pts, distribution=truncated_gamma(1, 1, 3), seed=-1)
    r_n = 0.15
    reps = 20_000
    full_counts = np.zeros((3, 3))
    trunc_counts = np.zeros((3, 3))
    for seed in range(reps):
        g_full, g_trunc, _d = couple_graphs(spec, 3, lat, r_n, seed)
        for i, j in g_full.edges:
            full_counts[i, j] += 1
        for i, j in g_trunc.edges:
            trunc_counts[i, j] += 1
    z = pts[:, 0] * r_n
    for i in range(3):
        for j in range(i + 1, 3):
            p_full = 1 - math.exp(-2 * z[i] * z[j])
            p_trunc = 2 * z[i] * z[j]
            for p, counts in ((p_full, full_counts), (p_trunc, trunc_counts)):
                se = math.sqrt(p * (1 - p) / reps)
                assert abs(counts[i, j] / reps - p) <= 4 * se


def test_coupling_disagreements_shrink_with_scale():
    spec = sociability_spec()
    medians = []
    for r_n in (0.2, 0.1, 0.05):
        counts = []
        for trial in range(100):
            lat = sample_latents(truncated_gamma(1, 1, 3), 150, 1000 + trial)
            _gf, _gt, d = couple_graphs(spec, 3, lat, r_n, 2000 + trial)
            counts.append(d)
        medians.append(np.median(counts))
    assert medians[0] >= medians[1] >= medians[2]


def test_coupling_frequency_below_union_bound():
    # certificate computed by an independent Monte Carlo integrator
    spec = sociability_spec()
    n, k, r_n = 200, 3, 0.05
    rng = np.random.default_rng(123)
    w1 = rng.exponential(size=2_000_000)
    w2 = rng.exponential(size=2_000_000)
    keep = (w1 <= 3.0) & (w2 <= 3.0)
    z1, z2 = w1[keep][:1_000_000] * r_n, w2[keep][:1_000_000] * r_n
    gap = np.abs((1 - np.exp(-2 * z1 * z2)) - 2 * z1 * z2)
    bound = n * n * gap.mean()
    assert bound <= 1.0  # informative cell
    hits = 0
    trials = 500
    for t in range(trials):
        lat = sample_latents(truncated_gamma(1, 1, 3), n, 5000 + t)
        _gf, _gt, d = couple_graphs(spec, k, lat, r_n, 6000 + t)
        hits += bool(d)
    assert hits / trials <= bound


def test_couple_graphs_scale_validation():
    spec = product_spec()
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 10, 0)
    with pytest.raises(ParameterError):
        couple_graphs(spec, 4, lat, 0.0, 0)
    shifted = KernelSpec(
        "polynomial", {"coeffs": {((1,), (1,)): 1.0}}, 1, Box((0.1,), (0.9,))
    )
    lat2 = sample_latents(uniform_box(Box((0.1,), (0.9,))), 10, 0)
    with pytest.raises(DomainError):
        couple_graphs(shifted, 4, lat2, 0.5, 0)  # scaled box leaves the domain


def test_graph_file_round_trip(tmp_path):
    spec = product_spec()
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 50, 3)
    g = sample_graph(spec, lat, 1.0, 4)
    path = save_graph(g, tmp_path / "graph.txt")
    back = load_graph(path)
    assert back.n == g.n
    assert np.array_equal(back.edges, g.edges)
    first = path.read_text().splitlines()[0]
    assert first == f"{g.n} {g.n_edges}"


def test_empty_graph_file_round_trip(tmp_path):
    lat = sample_latents(uniform_box(Box((0.0,), (1.0,))), 5, 0)
    g = sample_graph(constant_spec(0.0), lat, 1.0, 0)
    back = load_graph(save_graph(g, tmp_path / "empty.txt"))
    assert back.n == 5
    assert back.n_edges == 0


def test_latents_csv_round_trip(tmp_path):
    lat = sample_latents(truncated_gamma(1, 1, 3), 64, 11)
    path = save_latents(lat, tmp_path / "latents.csv")
    back = load_latents(path, dist=lat.distribution, seed=lat.seed)
    assert np.allclose(back.points, lat.points, atol=1e-15)


def test_adjacency_symmetric():
    spec = sociability_spec()
    lat = sample_latents(truncated_gamma(1, 1, 3), 80, 2)
    g = sample_graph(spec, lat, 1.0, 3)
    A = g.adjacency().toarray()
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)
    assert A.sum() == 2 * g.n_edges
