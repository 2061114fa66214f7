"""Weak-measurement correlations of bipartite states and of the time
evolutions they correspond to."""

from .channels import (
    IncompatibleBoundaryError,
    KrausChannel,
    apply,
    identity_channel,
    is_trace_preserving,
    is_unitary,
    make_channel,
    normalization_scalar,
    unitary_channel,
)
from .correlators import (
    order_dependence_search,
    spatial_corr,
    spatial_single,
    temporal_corr,
    temporal_corr_post,
    temporal_single,
    tripartite_temporal,
)
from .isomorphism import (
    CorrespondenceBundle,
    channel_to_state,
    pure_to_kraus,
    spatial_to_temporal,
    state_to_channel,
    swap_party_channel,
)
from .matcore import DomainError, ShapeError, anticommutator, herm_eig, kron, partial_trace
from .pointer import PointerConfig, finite_eps_corr, mc_sample_corr
from .states import (
    BipartiteState,
    DensityMatrix,
    Observable,
    PureBipartite,
    conj_obs,
    conj_state,
    entanglement_entropy,
    haar_random_pure,
    make_density,
    make_observable,
    max_entangled,
    singlet,
    werner,
)

__version__ = "0.1.0"
