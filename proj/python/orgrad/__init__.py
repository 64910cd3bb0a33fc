from ._core import (
    TangentVector,
    TuckerTensor,
    dloss,
    gen_truth,
    hosvd,
    loss,
    matricize,
    mode_product,
    project_tangent,
    retract,
    run_online,
    spectral_report,
)

__all__ = [
    "TangentVector",
    "TuckerTensor",
    "dloss",
    "gen_truth",
    "hosvd",
    "loss",
    "matricize",
    "mode_product",
    "project_tangent",
    "retract",
    "run_online",
    "spectral_report",
]
