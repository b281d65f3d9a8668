import math

import numpy as np
import pytest

from lpembed import (
    Box,
    DomainError,
    KernelSpec,
    ParameterError,
    RangeError,
    UnsupportedFamilyError,
    check_curvature,
    eval_kernel,
    eval_matrix,
    eval_pairs,
    gauss_legendre_grid,
    nystrom_spectrum,
    polynomial_rank_bound,
    spec_from_json,
    spec_to_json,
    truncate_power_series,
)
from lpembed.kernels import sociability_series


def all_family_specs():
    return {
        "rbf": KernelSpec("rbf", {"sigma": 0.5}, 1, Box((0.0,), (1.0,))),
        "sociability": KernelSpec("sociability", {}, 1, Box((0.0,), (3.0,))),
        "logistic_distance": KernelSpec(
            "logistic_distance", {"alpha": 1.0, "norm": 2.0}, 2, Box((0.0, 0.0), (1.0, 1.0))
        ),
        "logistic_bilinear": KernelSpec(
            "logistic_bilinear", {"alpha": -1.0}, 3, Box((-1.0,) * 3, (1.0,) * 3)
        ),
        "probit_bilinear": KernelSpec(
            "probit_bilinear", {"alpha": 0.2, "lam": (1.0, -0.5)}, 2,
            Box((-1.0, -1.0), (1.0, 1.0)),
        ),
        "polynomial": KernelSpec(
            "polynomial",
            {
                "coeffs": {
                    ((1,), (1,)): 0.5,
                    ((0,), (0,)): 0.25,
                    ((0,), (2,)): 0.1,
                    ((2,), (0,)): 0.1,
                }
            },
            1,
            Box((0.0,), (1.0,)),
        ),
        "blockwise_graphon": KernelSpec(
            "blockwise_graphon",
            {"block_matrix": ((0.2, 0.8), (0.8, 0.2)), "boundaries": (0.5,)},
            1,
            Box((0.0,), (1.0,)),
        ),
        "geodesic_rbf": KernelSpec(
            "geodesic_rbf", {"sigma": 0.3, "radius": 1.0}, 1, Box((0.0,), (2 * math.pi,))
        ),
    }


def test_sociability_zero_row():
    spec = all_family_specs()["sociability"]
    for y in (0.0, 0.7, 2.5):
        assert eval_kernel(spec, [0.0], [y]) == 0.0


def test_rbf_diagonal_is_one():
    spec = all_family_specs()["rbf"]
    for x in (0.0, 0.3, 1.0):
        assert eval_kernel(spec, [x], [x]) == 1.0


def test_sociability_closed_form():
    spec = all_family_specs()["sociability"]
    assert eval_kernel(spec, [1.0], [1.0]) == pytest.approx(1 - math.exp(-2), abs=1e-12)


@pytest.mark.parametrize("name", sorted(all_family_specs()))
def test_symmetry_is_exact(name):
    spec = all_family_specs()[name]
    rng = np.random.default_rng(17)
    lo, hi = spec.domain.lo_arr, spec.domain.hi_arr
    X = rng.uniform(lo, hi, size=(10_000, spec.latent_dim))
    Y = rng.uniform(lo, hi, size=(10_000, spec.latent_dim))
    fwd = eval_pairs(spec, X, Y)
    rev = eval_pairs(spec, Y, X)
    assert np.array_equal(fwd, rev)


@pytest.mark.parametrize("name", sorted(all_family_specs()))
def test_range_on_grid(name):
    spec = all_family_specs()[name]
    per_axis = max(2, int(round(1000 ** (1 / spec.latent_dim))))
    pts = spec.domain.grid(per_axis)
    vals = eval_matrix(spec, pts, pts)
    assert vals.min() >= -1e-12
    assert vals.max() <= 1 + 1e-12


def test_eval_kernel_domain_error():
    spec = all_family_specs()["rbf"]
    with pytest.raises(DomainError):
        eval_kernel(spec, [1.5], [0.5])
    with pytest.raises(DomainError):
        eval_kernel(spec, [0.5], [-0.1])


def test_polynomial_out_of_range_rejected_at_construction():
    with pytest.raises(RangeError) as err:
        KernelSpec("polynomial", {"coeffs": {((1,), (1,)): 4.0}}, 1, Box((0.0,), (1.0,)))
    assert err.value.point is not None
    assert err.value.value > 1


def test_polynomial_negative_range_rejected():
    with pytest.raises(RangeError):
        KernelSpec("polynomial", {"coeffs": {((1,), (1,)): -0.5}}, 1, Box((0.0,), (1.0,)))


def test_polynomial_table_must_be_symmetric():
    with pytest.raises(ParameterError):
        KernelSpec(
            "polynomial",
            {"coeffs": {((1,), (0,)): 0.5, ((0,), (1,)): 0.3}},
            1,
            Box((0.0,), (1.0,)),
        )


def test_rank_bound_single_monomial():
    spec = KernelSpec("polynomial", {"coeffs": {((1,), (1,)): 1.0}}, 1, Box((0.1,), (0.9,)))
    assert polynomial_rank_bound(spec) == 1


def test_rank_bound_squared_kernel_matches_numerical_rank():
    # (0.4 + 0.4 x y)^2 = 0.16 + 0.32 x y + 0.16 x^2 y^2: monomials {1, x, x^2}
    coeffs = {
        ((0,), (0,)): 0.16,
        ((1,), (1,)): 0.32,
        ((2,), (2,)): 0.16,
    }
    a = 0.4
    g = np.linspace(0, 1, 9)
    X, Y = np.meshgrid(g, g)
    direct = (a + a * X * Y) ** 2
    expanded = 0.16 + 0.32 * X * Y + 0.16 * (X * Y) ** 2
    assert np.allclose(direct, expanded, atol=1e-14)
    spec = KernelSpec("polynomial", {"coeffs": coeffs}, 1, Box((0.0,), (1.0,)))
    bound = polynomial_rank_bound(spec)
    assert bound == 3
    spectrum = nystrom_spectrum(spec, gauss_legendre_grid(spec.domain, 64))
    numerical_rank = int(np.sum(np.abs(spectrum.eigenvalues) > 1e-8))
    assert numerical_rank == 3


def test_rank_bound_all_monomials_below_degree():
    coeffs = {}
    for a in range(3):
        for b in range(3):
            if a + b < 3:
                coeffs[((a,), (b,))] = 0.05
    spec = KernelSpec("polynomial", {"coeffs": coeffs}, 1, Box((0.0,), (1.0,)))
    assert polynomial_rank_bound(spec) == 3
    spectrum = nystrom_spectrum(spec, gauss_legendre_grid(spec.domain, 64))
    assert int(np.sum(np.abs(spectrum.eigenvalues) > 1e-10)) <= 3


def test_rank_bound_requires_polynomial():
    with pytest.raises(UnsupportedFamilyError):
        polynomial_rank_bound(all_family_specs()["rbf"])


def test_sociability_series_matches_sympy():
    import sympy

    x, y = sympy.symbols("x y")
    expansion = sympy.series(1 - sympy.exp(-2 * x * y), x, 0, 6).removeO().expand()
    ours = sociability_series(9)
    for (a, b), c in ours.items():
        coeff = float(expansion.coeff(x, a[0]).coeff(y, b[0]))
        assert coeff == pytest.approx(c, rel=1e-12)


def test_truncate_sociability_k3():
    spec = KernelSpec("sociability", {}, 1, Box((0.0,), (0.7,)))
    truncated = truncate_power_series(spec, 3)
    assert truncated.family == "polynomial"
    assert truncated.params["coeffs"] == {((1,), (1,)): 2.0}
    # remainder of the alternating series: |f - f_3| <= 2 (x y)^2 on [0,1]^2
    g = np.linspace(0, 1, 101)
    X, Y = np.meshgrid(g, g)
    full = 1 - np.exp(-2 * X * Y)
    f3 = 2 * X * Y
    assert np.all(np.abs(full - f3) <= 2 * (X * Y) ** 2 + 1e-12)


def test_truncate_beyond_degree_is_identity():
    spec = KernelSpec("polynomial", {"coeffs": {((1,), (1,)): 1.0}}, 1, Box((0.1,), (0.9,)))
    assert truncate_power_series(spec, 10) is spec


def test_truncate_k2_gives_zero_kernel():
    spec = KernelSpec("sociability", {}, 1, Box((0.0,), (0.7,)))
    truncated = truncate_power_series(spec, 2)
    assert truncated.params["coeffs"] == {}
    assert eval_kernel(truncated, [0.5], [0.5]) == 0.0


def test_truncate_range_violation_reports_point():
    spec = KernelSpec("sociability", {}, 1, Box((0.0,), (3.0,)))
    with pytest.raises(RangeError) as err:
        truncate_power_series(spec, 3)  # 2xy reaches 18 on [0,3]^2
    assert err.value.point is not None


def test_truncate_k_validation():
    spec = all_family_specs()["sociability"]
    with pytest.raises(ParameterError):
        truncate_power_series(spec, 1)
    with pytest.raises(UnsupportedFamilyError):
        truncate_power_series(all_family_specs()["rbf"], 3)


@pytest.fixture(scope="module")
def rbf_spectrum():
    spec = all_family_specs()["rbf"]
    return spec, nystrom_spectrum(spec, gauss_legendre_grid(spec.domain, 128))


def test_curvature_rbf_exponent(rbf_spectrum):
    spec, spectrum = rbf_spectrum
    report = check_curvature(spec, spectrum, n_pairs=2000, seed=3)
    assert not report.degenerate
    assert report.alpha_hat == pytest.approx(1.0, abs=0.1)
    assert report.max_violation_ratio >= 0


def test_curvature_constant_kernel_degenerates():
    spec = KernelSpec("polynomial", {"coeffs": {((0,), (0,)): 0.5}}, 1, Box((0.0,), (1.0,)))
    spectrum = nystrom_spectrum(spec, gauss_legendre_grid(spec.domain, 64))
    report = check_curvature(spec, spectrum, n_pairs=500, seed=0)
    assert report.degenerate
    assert report.alpha_hat == 1.0
    assert report.c_hat == 0.0


def test_curvature_product_kernel_exact():
    # squared increment of x*y is exactly (x - y)^2: exponent 1, constant 1
    spec = KernelSpec("polynomial", {"coeffs": {((1,), (1,)): 1.0}}, 1, Box((0.0,), (1.0,)))
    spectrum = nystrom_spectrum(spec, gauss_legendre_grid(spec.domain, 64))
    report = check_curvature(spec, spectrum, n_pairs=1000, seed=1)
    assert report.alpha_hat == pytest.approx(1.0, abs=1e-6)
    assert report.c_hat == pytest.approx(1.0, rel=1e-6)


def test_rbf_explicit_curvature_bound():
    sigma = 0.5
    spec = all_family_specs()["rbf"]
    rng = np.random.default_rng(9)
    x = rng.uniform(0, 1, (5000, 1))
    y = np.clip(x + rng.uniform(-0.1, 0.1, (5000, 1)), 0, 1)
    d2 = 2.0 - 2.0 * eval_pairs(spec, x, y)
    dist2 = ((x - y) ** 2).sum(axis=1)
    assert np.all(d2 <= dist2 / sigma**2 + 1e-12)


@pytest.mark.parametrize("name", sorted(all_family_specs()))
def test_json_round_trip(name):
    spec = all_family_specs()[name]
    doc = spec_to_json(spec)
    back = spec_from_json(doc)
    assert back.family == spec.family
    assert back.domain == spec.domain
    rng = np.random.default_rng(5)
    X = rng.uniform(spec.domain.lo_arr, spec.domain.hi_arr, size=(50, spec.latent_dim))
    Y = rng.uniform(spec.domain.lo_arr, spec.domain.hi_arr, size=(50, spec.latent_dim))
    assert np.array_equal(eval_pairs(spec, X, Y), eval_pairs(back, X, Y))


def test_blockwise_is_oracle_only():
    spec = all_family_specs()["blockwise_graphon"]
    assert spec.oracle_only
