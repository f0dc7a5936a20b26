"""mixlab: a numerical laboratory for two-phase composite materials.

Exact hierarchical-laminate homogenization, periodic cell solvers for
pixel/voxel media, analytic constraints on effective conductivity functions,
two-well quasiconvexification bounds, and extremal planar elastic formulas.
"""

__version__ = "0.1.0"

from .blocktensor import (
    AugmentedTensor,
    BlockTensor,
    decouple,
    eval_well,
    inner,
    reassemble,
    rotate_perp,
)
from .cellsolve import (
    cofactor_diagnostics,
    effective_matrix_cell,
    effective_tensor_cell,
    hall_coefficient,
    sigma_star_fn,
    solve_cell,
)
from .checks import (
    CheckReport,
    ConductivitySample,
    coated_sphere_oracle,
    herglotz_check,
    keller_dykhne_check,
    normalization_check,
    phase_interchange_check,
    second_derivative_check,
)
from .elastic import (
    IsoElastic,
    PlanarOrthotropic,
    auxetic_limit,
    elementary_bounds,
    polycrystal_extremes,
    sliced_material,
)
from .geometry import CellGeometry, load_geometry, parse_geometry_spec, save_geometry
from .laminates import (
    Branch,
    Leaf,
    augmented_effective,
    effective_tensor,
    laminate_pair,
    leaf_fields,
    rasterize,
    sigma_star_laminate,
    volume_fraction,
    vstar_cstar_from_Lstar,
)
from .twowell import (
    Translation,
    TwoWellSpec,
    eval_W,
    gap_scan,
    kohn_reduction,
    lamination_upper_bound,
    translation_lower_bound,
    wtransform_reduction,
)
