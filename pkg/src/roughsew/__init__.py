"""Sewing maps on dyadic grids and geometric rough path lifts over the shuffle algebra."""
from .grid import (
    DyadicGrid,
    Grid1Fn,
    Grid2Fn,
    Grid3View,
    delta1,
    delta2,
    norm_c1_holder,
    norm_c2,
    norm_c3,
)
from .paths import (
    Coboundary,
    Custom,
    LogGerm,
    MidpointDisplacement,
    Mixture,
    PowerGerm,
    PowerPath,
    SmoothPoly,
    Weierstrass,
    YoungProduct,
    generate_germ,
    generate_path,
)
from .roughpath import (
    AlphaReciprocalInteger,
    HolderFamily,
    RoughPathGrid,
    act,
    chen_defect,
    d_family,
    d_rp,
    extend,
    extend_above_n,
    holder_report,
    project,
)
from .sewing import (
    ControlFn,
    LevelMismatch,
    NonConvergent,
    NotConverging,
    SewingError,
    constant_c,
    integrate,
    lambda_unordered,
    log_weighted_norm,
    sew,
    sew_high,
    sew_low,
    vbar,
)
from .shuffle import ShuffleAlgebra, TruncationExceeded, WordPolynomial

__version__ = "0.1.0"
