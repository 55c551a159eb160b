from .cshape import CShapeGeometry, gen_cshape, CSHAPE_LEVELS
from .metrics import (
    GapMetrics,
    critical_load_ref,
    config_force_reference,
    dimensionless_force,
    gap_error,
    self_contact_gap,
)
