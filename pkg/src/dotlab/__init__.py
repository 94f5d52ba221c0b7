"""dotlab: distinct dot products of planar point configurations.

Construct the classic point families (geometric lines, equally spaced
circles, circle+line unions, polar lattices), count their distinct pairwise
dot products exactly or under grid quantization, analyze their structure
around the origin (supporting lines/circles, wedges, well-spaced and dense
rays, bucket projections), and sweep family sizes to estimate scaling
exponents.
"""

from .counting import (
    DotProductSet,
    FertilityReport,
    brute_force_oracle,
    distinct_dot_products,
    per_point_fertility,
    projection_values,
)
from .errors import DomainError, DotlabError, UsageError
from .generators import (
    GeneratorSpec,
    Xoshiro256StarStar,
    gen_arithmetic_line,
    gen_circle_plus_line,
    gen_equally_spaced_circle,
    gen_geometric_line,
    gen_polar_lattice,
    gen_random_disk,
    gen_sector_circle_plus_line,
)
from .geometry import (
    ComplexDot,
    Configuration,
    Mode,
    Point,
    Scalar,
    as_scalar,
    complex_dot,
    dot,
    rotate,
    scale,
)
from .harness import (
    ExperimentSpec,
    ScalingReport,
    SuiteReport,
    fit_slope,
    run_scaling,
    verify_suite,
)
from .pointfile import load_points, read_points, save_points, write_points
from .structure import (
    BucketReport,
    CircleGroup,
    DensityReport,
    Direction,
    LineGroup,
    RayPoints,
    bucket_projection_report,
    density_report,
    extract_max_well_spaced,
    is_well_spaced,
    is_well_spaced_pair,
    iterate_dense_lines,
    max_wedge,
    popular_circle,
    popular_line,
    popular_ray,
    supporting_circles,
    supporting_lines,
)

__version__ = "0.1.0"
