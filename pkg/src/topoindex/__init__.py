"""Real-space topological invariants for finite tight-binding models.

Builds disordered Chern-insulator Hamiltonians on square lattices and
computes the Bott index (dense route) and the spectral-localizer index
(sparse route), maps Clifford-pseudospectrum gap fields, and orchestrates
disorder-averaged, timing, and integer-error studies.
"""

from .errors import (
    BranchProximityError,
    EmptyLatticeError,
    GapSolverError,
    IndeterminateCountError,
    SignatureError,
    TopoindexError,
)
from .model import (
    DisorderField,
    Lattice,
    ModelSpec,
    PeriodicObservables,
    build_hamiltonian,
    build_lattice,
    periodic_observables,
    position_operators,
    read_triplets,
    sample_disorder,
    write_triplets,
)
from .spectral import (
    EigenDecomposition,
    FermiData,
    compress,
    diagonalize,
    fermi_basis,
    projector,
)
from .bott import (
    BottResult,
    TrigPolynomialTriple,
    bott_index_large,
    bott_index_small,
    default_triple,
    log_eig_trace,
    trig_method_index,
    validate_triple,
)
from .inertia import SignatureResult, signature
from .localizer import (
    LocalizerProbe,
    LocalizerReport,
    PerturbationReport,
    assemble_localizer,
    localizer_gap,
    localizer_index,
    perturbation_bound_check,
)
from .pseudospectrum import (
    GapField,
    GridSpec,
    IndexedRegions,
    gap_slice,
    gap_volume,
    index_regions,
)
from .experiments import (
    SweepPlan,
    SweepTable,
    TimingTable,
    integer_error_study,
    kappa_study,
    run_sweep,
    timing_study,
)

__version__ = "0.1.0"
