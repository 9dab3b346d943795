from tlreflect._core import (
    ModelSpec,
    TLData,
    TlrError,
    __version__,
    algebraic_residual,
    build_R,
    build_tl_data,
    fourier_matrix,
    is_generalized_hadamard,
    moduli_dim,
    reflection_residual,
    run_job,
    solve_qprime,
    tl_residuals,
    ybe_residual,
)

__all__ = [
    "ModelSpec",
    "TLData",
    "TlrError",
    "__version__",
    "algebraic_residual",
    "build_R",
    "build_tl_data",
    "fourier_matrix",
    "is_generalized_hadamard",
    "moduli_dim",
    "reflection_residual",
    "run_job",
    "solve_qprime",
    "tl_residuals",
    "ybe_residual",
]
