"""Two-manifold spectral embeddings with instrumental variables.

Two noisy views of a shared latent manifold each give a centered Gram
matrix; the SVD of their product cancels view-specific noise and yields
aligned embeddings of both views. The same construction, with pasts as
instruments for futures, identifies a state space for time series.
"""

from .errors import DegenerateInputError, NonFiniteInputError, ParameterError
from .evaluation import (
    AlignmentReport,
    alignment_report,
    neighborhood_preservation,
    principal_angles,
    procrustes_align,
    procrustes_error,
)
from .eigenmaps import check_connected, graph_laplacian, knn_graph, le_embedding, le_gram
from .gram import CenteredGram, GramMatrix, center, linear_gram, median_bandwidth, rbf_gram
from .spectral import (
    RankWarning,
    instrumental_eigenmaps,
    kernel_pca,
    kernel_svd,
    pca,
    two_subspace_pca,
)
from .sysid import (
    KernelSpec,
    PredictionReport,
    StateSpaceModel,
    evaluate_prediction,
    filter_predict,
    fit_dynamics,
    hankel_windows,
    learn_state_space,
)

__version__ = "0.1.0"
