from ._core import (
    CylinderModel,
    GraphError,
    GuidedPotential,
    PeriodicGraphSpec,
    build_cylinder,
    check_all,
    connectivity,
    delta_profile,
    eigh,
    full_fiber,
    gap_states,
    graph_stats,
    guided_bands,
    h0_spectrum,
    load_spec,
    load_spec_file,
    mu_spectrum,
    potential,
    truncated_fiber,
    __version__,
)

__all__ = [
    "CylinderModel",
    "GraphError",
    "GuidedPotential",
    "PeriodicGraphSpec",
    "build_cylinder",
    "check_all",
    "connectivity",
    "delta_profile",
    "eigh",
    "full_fiber",
    "gap_states",
    "graph_stats",
    "guided_bands",
    "h0_spectrum",
    "load_spec",
    "load_spec_file",
    "mu_spectrum",
    "potential",
    "truncated_fiber",
    "__version__",
]
