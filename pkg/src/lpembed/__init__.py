"""Latent position random graphs: simulation, spectral embedding, and
manifold diagnostics.

The package covers the full loop: define a kernel on a latent domain,
discretize its integral operator to get the spectral coordinate map,
simulate Bernoulli graphs from sampled latent positions, embed them
spectrally, align the embedding back to the operator coordinates over the
indefinite orthogonal group, and quantify the low-dimensional structure
of the resulting clouds (intrinsic dimension, density ridges).
"""

from .alignment import (
    AlignmentResult,
    RateFit,
    align_indefinite,
    lse_targets,
    rate_fit,
    signature_matrix,
)
from .embedding import (
    EmbeddingMatrix,
    RankSelection,
    ase,
    drop_isolated,
    lse,
    profile_likelihood_rank,
    save_embedding,
)
from .errors import (
    DomainError,
    IsolatedNodesError,
    LpembedError,
    NormalizationError,
    NumericError,
    ParameterError,
    RangeError,
    RankDeficiencyError,
    SignatureMismatchError,
    UnsupportedFamilyError,
)
from .graphsim import (
    Graph,
    LatentDistribution,
    LatentSample,
    circle_uniform,
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
from .harness import (
    BenchReport,
    ExperimentConfig,
    config_from_json,
    kernel_preset,
    latent_preset,
    run_coupling_study,
    run_experiment,
    run_fig1,
    run_rate_study,
    run_regression,
)
from .kernels import (
    Box,
    CurvatureReport,
    KernelSpec,
    check_curvature,
    eval_kernel,
    eval_matrix,
    eval_pairs,
    polynomial_rank_bound,
    spec_from_json,
    spec_to_json,
    truncate_power_series,
)
from .manifold import (
    DimensionEstimate,
    RidgeSet,
    hausdorff_distance,
    intrinsic_dim,
    intrinsic_dim_all,
    mean_nn_distance,
    scms_ridge,
)
from .operators import (
    OperatorSpectrum,
    QuadratureGrid,
    SpectralCoordinates,
    TraceDiagnostics,
    density_weighted,
    gauss_legendre_grid,
    indefinite_gram,
    indefinite_inner,
    latent_coordinates,
    latent_coordinates_many,
    load_spectrum,
    make_grid,
    midpoint_grid,
    monte_carlo_grid,
    nystrom_extend,
    nystrom_spectrum,
    save_spectrum,
    signature_of,
    trace_diagnostics,
)

__version__ = "0.1.0"
