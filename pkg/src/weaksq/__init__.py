"""Dyadic model operators, A_p weights and weak-type square-function experiments."""
from .dyadic import (DilatedInterval, DomainError, DyadicInterval, Grid, GridFunction,
                     SparseFamily, check_strengthened, dominating_family, random_sparse_family,
                     read_family, split_sparse, verify_sparse, write_family)
from .experiments import (ExperimentRecord, SweepConfig, TestingSequence, build_testing_sequence,
                          example_dual_testing, example_power_weight, sweep, verify)
from .norms import fit_exponent, lorentz_p1_norm, sigma_testing_ratio, strong_norm, weak_norm
from .operators import (dual_testing_operator, haar_square_function, intrinsic_square_discrete,
                        maximal_function, sparse_square_operator)
from .weights import (PowerWeight, StepWeight, a1_characteristic, ainfty_decay_check,
                      ap_characteristic, power_weight)

__version__ = "0.1.0"
