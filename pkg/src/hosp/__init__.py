"""Signal processing on simplicial complexes and hypergraphs."""

from .complex import SimplicialComplex, boundary_matrix, build_complex, delaunay_complex, validate
from .flows import (
    LabeledFlow,
    denoise_flow,
    denoise_node,
    divergence,
    embed_trajectory,
    interpolate_flow,
    interpolate_node,
    iterative_smooth,
    trajectory_flow,
)
from .hglearn import RegularizerSpec, SolverResult, denoise, interpolate_hg, lovasz_tv, tensor_tv
from .hodge import HodgeDecomposition, harmonic_basis, hodge_decompose, hodge_laplacian, spectral_components
from .hypergraph import ExpansionGraph, Hypergraph, expand, expansion_laplacian
from .plot import emit_plot, render_svg
from .rng import CounterRNG
from .snn import LayerStack, check_orientation_equivariance, gcn_forward, snn_forward
from .spectral import SpectralBasis, apply_filter, gft, igft, laplacian_eigenmap, sym_eig
from .tensor import (
    SymTensor,
    adjacency_tensor,
    adjacency_tensor_general,
    hg_shift,
    hgft,
    ihgft,
    laplacian_tensor,
    sym_cp_decompose,
)

__all__ = [name for name in dir() if not name.startswith("_")]
