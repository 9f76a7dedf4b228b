"""Numerics for self-testing of nonlocal games."""
from ._kernels import BACKEND
from .algebras import (DeterminingPair, Representation, clifford_rep, commutant_dim, eval_poly,
                       gns_from_irrep, synchronous_pair, xor_pair)
from .config import DEFAULT, Config
from .errors import (DegeneracyError, DegenerateGapError, InvalidInputError, NumericalError,
                     PreconditionError, SelfTestingError, ValidationError)
from .games import (Correlation, NonlocalGame, SyncGame, XorGame, game_polynomial, product_game,
                    see_saw_optimize, winning_probability, xor_biases)
from .gowers_hatami import (EpsilonRep, RDecomposition, UcpMap, check_ucp, cl2_theta, cl2_theta_averaged,
                            gh_bound_check, rdecomp_size, stinespring)
from .linalg import hermitian_eig, partial_trace, rho_norm, schmidt
from .polynomials import StarPolynomial, TensorPolynomial
from .selftest import (LocalDilation, dilation_bound, pair_robustness_residuals, robustness_sweep,
                       spectral_gap, top_eigenspace_check, verify_local_dilation)
from .strategies import QuantumModel, balanced_form, correlation, evaluate_state, flags

__version__ = "0.1.0"
