"""Certified sampling, Bessel and Riesz exponential sets on grid spectra.

Build periodic integer sets for spectra on the circle with certified
near-optimal density and frame bounds, using deterministic barrier-potential
row selection on Fourier submatrices, plus an exact verification layer
(bound identities, duality checks, quadrature and Monte-Carlo oracles).
"""

from .construct import (
    ConstructionReport,
    ExhaustionStage,
    SamplingSet,
    build_bessel,
    build_riesz,
    build_sampling,
    canonical_example,
    exhaust_general,
    fourier_system,
)
from .errors import (
    CertificateFailed,
    EmptyComplement,
    ExpframesError,
    InvalidD,
    KTooLarge,
    NoCellFits,
    NoFeasibleCandidate,
    NotHermitian,
    NotParseval,
    PeriodMismatch,
    ShiftInsideSpectrum,
    SpectrumFormatError,
    TooManySubsets,
)
from .linalg import HermitianSpectrum, dft_submatrix, gram, hermitian_eig, resolvent_quadratics
from .selection import (
    SelectionResult,
    VectorSystem,
    brute_force_best,
    bss_select,
    bss_unweighted,
    condition_ratio_bound,
    lower_certificate_constant,
    riesz_floor_constant,
    rit_select,
    upper_select,
)
from .spectrum import (
    GridSpectrum,
    IntervalSet,
    complement,
    measure,
    parse_spectrum,
    quantize_inner,
    quantize_outer,
)
from .verify import (
    BoundReport,
    DualityReport,
    TestSignal,
    densities,
    duality_check,
    gram_quadrature_oracle,
    montecarlo_timedomain,
    riesz_bounds,
    sampling_bounds,
)

__version__ = "0.1.0"
