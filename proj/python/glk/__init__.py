"""Lane-keeping trajectory prediction baselines (C++ core)."""

from ._glk import (
    IDMParams,
    LaneCenterline,
    LaneProjection,
    ParticleSet,
    ade_fde,
    associate_lanes,
    curvature_cv_predict,
    cv_matrix,
    cv_predict,
    evaluate,
    glk_predict,
    idm_accel,
    ls_jacobian,
    ls_predict,
    pf_init,
    pf_update,
)

__all__ = [
    "IDMParams",
    "LaneCenterline",
    "LaneProjection",
    "ParticleSet",
    "ade_fde",
    "associate_lanes",
    "curvature_cv_predict",
    "cv_matrix",
    "cv_predict",
    "evaluate",
    "glk_predict",
    "idm_accel",
    "ls_jacobian",
    "ls_predict",
    "pf_init",
    "pf_update",
]
