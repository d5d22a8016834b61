"""Exact rational l1 vectors, test functionals and sequence generators."""

from .functionals import (
    BlockSigns,
    EventuallyPeriodicSigns,
    Summing,
    TestFunctional,
    apply,
    functional_from_json,
    sign_functional,
)
from .sequences import (
    Affine,
    ScalarPieces,
    SeqGen,
    alternating,
    canonical_basis,
    cesaro_means,
    constant_vector,
    decaying_unit,
    eventual_set,
    harmonic,
    identity,
    indicator,
    perturbed_basis,
    remark_sequence,
    scalar_constant,
    scalar_pieces,
    seq_from_json,
    squares_indicator,
    user_defined,
)
from .vector import ZERO, L1Vec, as_fraction, coord, head_mass, linear_combination, norm1, tail_mass
