"""Quantitative Steinitz selection in Euclidean space and on the sphere."""
from .engine import HellySelection, RBound, SteinitzCertificate, qht_select, select, select_exact, select_greedy
from .errors import (
    EquatorSingularity,
    PremiseViolated,
    QSteinitzError,
    ScaleLimit,
    SchemaError,
    VerificationFailed,
)
from .euclid import (
    EuclideanPointSet,
    Halfspace,
    OriginBall,
    caratheodory_select,
    containment_radius,
    polar_max_norm,
    polar_points,
)
from .oracles import RandomSource, exhaustive_best_subset, mc_cap_contained, mc_containment_radius
from .pipeline import LemmaScalars, SphericalCertificate, certified_cap_radius, gamma_consistency_probe, select_spherical
from .sphere import (
    Cap,
    ConeRep,
    SphericalPointSet,
    cap_to_ball_radius,
    central_project,
    in_spherical_hull,
    largest_cap_about_axis,
    lift_north,
    spolar_empty,
)
from .workbench import CertificateFile, InstanceFile, gen_euclid, gen_sphere, verify

__version__ = "0.1.0"
