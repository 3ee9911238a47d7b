"""Subadditive thermodynamic formalism on the full shift, applied to
self-affine iterated function systems: cylinder functions, topological
pressure, equilibrium-measure approximants, and the affinity dimension."""

__version__ = "0.1.0"

from .affine import (
    AffineIFS,
    BoxDimensionResult,
    PointCloud,
    ValidationReport,
    attractor_points,
    box_dimension,
    render_pgm,
    sample_translations,
    validate_ifs,
)
from .cache import PartitionSumCache
from .cylinder import (
    AxiomReport,
    CylinderFunction,
    NaturalCylinderFunction,
    ProductCylinderFunction,
    verify_axioms,
)
from .equilibrium import (
    CylinderMeasure,
    EquilibriumDiagnostics,
    LocalDimensionSamples,
    bernoulli_lower_estimate,
    diagnostics,
    energy_depth,
    entropy_depth,
    entropy_table,
    invariance_defect,
    jensen_residual,
    local_dimension_samples,
    mu_cesaro,
    nu_weights,
)
from .errors import (
    BudgetExceededError,
    DegenerateCloudError,
    IFSFormatError,
    IFSValidationError,
    NumericallySingularError,
)
from .ifsfile import parse_ifs_file, parse_ifs_text, serialize_ifs, write_ifs_file
from .linalg import log_svf_alpha_t, singular_values, svf_alpha_t, word_matrix
from .pressure import (
    DimensionReport,
    PressureReport,
    affinity_dimension,
    log_partition_sum,
    pressure_curve,
    pressure_level,
    pressure_root,
    pressure_sequence,
)
from .symbolic import (
    DEFAULT_WORD_BUDGET,
    Alphabet,
    Word,
    concat,
    pack_word,
    shift_word,
    unpack_word,
    word_metric,
    words_of_length,
)
