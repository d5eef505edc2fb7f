"""Sub-quantum Fisher information: a fidelity-free lower bound on the QFI."""

from .core import (
    DensityMatrix,
    HermitianGenerator,
    PhaseEncoding,
    SubQFIError,
    encode,
    make_rng,
    random_density,
    random_hermitian,
    validate_density,
    validate_generator,
)
from .fidelity import super_fidelity, uhlmann_fidelity
from .fisher import bound_report, purity_loss, qfi, skew_information, subqfi
from .optimal import max_subqfi_closed, optimal_basis, optimal_state
from .optimize import MaximizeConfig, maximize
from .sampling import estimate_subqfi

__all__ = [
    "DensityMatrix",
    "HermitianGenerator",
    "PhaseEncoding",
    "SubQFIError",
    "encode",
    "make_rng",
    "random_density",
    "random_hermitian",
    "validate_density",
    "validate_generator",
    "super_fidelity",
    "uhlmann_fidelity",
    "bound_report",
    "purity_loss",
    "qfi",
    "skew_information",
    "subqfi",
    "max_subqfi_closed",
    "optimal_basis",
    "optimal_state",
    "MaximizeConfig",
    "maximize",
    "estimate_subqfi",
]
