"""Bochner integral of simple functions, integrability witnesses and the limit."""

from .functions import VectorFn, added, constant, from_table, nonneg_of, norm_of, scaled
from .integral import IntegrabilityError, bint_sf, bint_sf_oracle, ext_gap, linearity_gap, triangle_gap
from .teschl import TeschlEngine, teschl_step
from .theorems import (
    BIntParams, DCTParams, DCTReport, DominationError, bint_vs_lintp, dominated_convergence_run,
    pointwise_limit, zero_ae_check,
)
from .witness import (
    BifWitness, BIntResult, NotConvergent, PreconditionError, StrongMeasWitness, WitnessError,
    bif_from_separable, bif_minus, bif_neg, bif_norm, bif_plus, bif_real, bif_scal, bint,
    bint_detail, bint_ext_check, compose_limits, strong_meas_witness,
)
