"""Spectral gaps of finite Markov chains via singular values of the generator.

The gap of a chain is the second-smallest singular value of I - P in the
stationary-weighted inner product, and tau = 1/gap is the time scale on
which empirical averages of test functions converge. The package
computes these exactly for dense chains and in closed form for circulant
and torus families, evaluates the worst-case deviation of length-n
running averages, and audits the standard comparison inequalities
(reversibilizations, mixing time, Cheeger constant, canonical paths,
pseudo-spectral gap).

All values are immutable and all operations are pure functions, so
everything here is safe to share across threads and to parallelize over
experiment grids.
"""

from .audit import BoundAudit, BoundCheck
from .battery import BatteryChain, random_dense_chain, reference_battery
from .chains import (
    Distribution,
    FiniteChain,
    StructureFlags,
    adjoint,
    build_chain,
    lazy,
    matrix_power,
    mu_inner,
    mu_norm,
    period,
    reversibilize,
    structure_flags,
)
from .bounds import (
    CheegerResult,
    MixingResult,
    PathBoundResult,
    PathEnsemble,
    cheeger_exact,
    cheeger_search,
    inequality_audit,
    mixing_time,
    path_bound,
)
from .empirical import (
    DeltaCurve,
    DeltaPoint,
    delta_bounds_audit,
    delta_curve,
    delta_exact,
    delta_monte_carlo,
)
from .experiments import (
    EnsembleRow,
    ExperimentRow,
    ScalingFit,
    emit_report,
    fit_scaling,
    random_steps_ensemble,
    scan,
)
from .families import (
    ChainSpec,
    TorusProbs,
    card_chain,
    cdg_chain,
    circulant_chain,
    circulant_tau,
    parse_prob,
    torus_chain,
    torus_gap_closed_form,
    up_right_probs,
)
from .spectral import (
    PseudoGapBound,
    SingularSpectrum,
    normal_gap,
    pseudo_spectral_gap,
    self_adjoint_gap,
    spectral_gap,
    weighted_singular_spectrum,
)
from . import errors, tolerances

__all__ = [name for name in dir() if not name.startswith("_")]
