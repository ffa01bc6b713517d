"""gamdiag: scalable residual and smooth-effect diagnostics for
distributional regression models.

The engine turns (response, covariates, per-row fitted parameters) into
render-ready diagnostic structures: binned QQ curves with reference bands and
simulation envelopes, conditional-density misfit fields, binned summary
checks with simulated reference intervals, hexagon maps, glyph grids and
smooth-effect uncertainty fields.  A CLI (``gamdiag``) and an HTTP service
expose every operation as JSON.
"""

from .dataset import DiagnosticDataset, from_arrays, load_csv, read_binary, write_binary, write_csv
from .density import (
    ConditionalDensity,
    DensityField,
    Grid1D,
    Grid2D,
    binned_kde_1d,
    binned_kde_2d,
    conditional_density,
    dens_check,
    linear_bin_1d,
    linear_bin_2d,
    select_bandwidth,
)
from .distributions import FAMILY_NAMES, get_family
from .effects import (
    EffectSurface,
    load_surface_csv,
    opacity_field,
    perturb_field,
    t_transform,
    write_surface_csv,
)
from .errors import (
    ConfigError,
    DegenerateCurveError,
    DomainError,
    EmptyDatasetError,
    GamdiagError,
    ParseError,
    SchemaError,
    UnsupportedResidualError,
)
from .grid_checks import (
    GlyphGrid,
    HexLattice,
    HexSummaryGrid,
    SummarySeries,
    grid_check_1d,
    grid_check_2d,
    hex_assign,
    kde_glyphs,
    worm_glyphs,
)
from .qq import (
    BinnedQQ,
    QQCurve,
    arc_length,
    bin_qq,
    compute_qq,
    ks_band,
    normal_band,
    reference_band,
    sim_envelope,
    zoom,
)
from .residuals import (
    RESIDUAL_TYPES,
    ResidualVector,
    SimulatedResiduals,
    simulate_residuals,
    transform,
)
from .scenarios import SCENARIO_IDS, Scenario, generate
from .server import SessionState, create_app

__version__ = "0.1.0"
