"""Geometric stratification of singular P3P camera-pose configurations.

The perspective-three-point distance system has Bezout number 8, four
solutions up to a global sign.  For camera centers on the danger cylinder
(the vertical cylinder through the circumcircle of the control triangle)
two of them collide; on three special generatrices, fixed by the Morley
trisector triangle, three collide; on the circumcircle itself the system
degenerates into a continuum.  The complementary solutions of cylinder
configurations trace a deltoidal surface tangent to the cylinder along
those generatrices.

The package solves the distance system exactly enough to see all of this
numerically: `solve` clusters the quartic roots and flags multiplicity,
`multiplicity`/`dual_space_report` measure local multiplicity through
Macaulay dual spaces, `classify` names the stratum of a camera center,
and the `deltoid` module sweeps the cylinder, implicitizes the surface of
complementary solutions in both center and distance coordinates, and
checks tangency and cusp structure against transcribed reference
components.  `run_verify` bundles the acceptance checks; the `p3pstrata`
command line exposes everything as subcommands.
"""
from .deltoid import (ComplementaryRecord, ComponentMatch, DeltoidReport,
                      SweepConfig, SweepResult, build_deltoid_report,
                      component_membership, cusp_check, fit_deltoid_e,
                      fit_deltoid_xyz, generatrix_probes, negative_controls,
                      plane_fit_residual, sweep_cylinder, sweep_figure8,
                      tangency_check, trace_cusp_curves)
from .dualspace import (BreadthViolation, DualSpaceReport, IllConditionedDual,
                        ZeroComponent, cluster_multiplicity_oracle,
                        corank_and_nullvec, criterion_c1, criterion_ck,
                        dual_space_report, jacobian_at, macaulay_dual_dim,
                        macaulay_dual_dims, multiplicity)
from .fixtures import FixtureComponent, FixtureTriangle, fixture_by_name, load_fixtures
from .p3p import (CameraCenter, ContinuumDetected, CoplanarDegeneracy,
                  DegenerateTriangle, InconsistentDistances, NumericalFailure,
                  P3PInstance, Pose, RootCountWarning, SolutionTriple,
                  Triangle, VertexCoincidence, complementary_solutions,
                  detect_continuum, distances, distances_sq_exact,
                  instance_from_center, locate_center, make_triangle,
                  recover_pose, solve, system_polys,
                  triangle_from_squared_sides)
from .polynomials import (AmbiguousFitError, ImplicitSurfaceModel, SparsePoly,
                          fit_implicit, format_poly, monomial_basis,
                          parse_poly, taylor_coefficients)
from .strata import (CubicRootFailure, MorleyData, Stratum, StratumLabel,
                     classify, danger_cylinder_value_e,
                     danger_cylinder_value_xyz, generatrix_sine_cubic,
                     i1_generators, morley_angles, morley_triangle)
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .verify import RunReport, SceneFormatError, SUITES, ingest_scene, run_verify

__version__ = "0.1.0"

__all__ = [
    "AmbiguousFitError", "BreadthViolation", "CameraCenter",
    "ComplementaryRecord", "ComponentMatch", "ContinuumDetected",
    "CoplanarDegeneracy", "CubicRootFailure", "DEFAULT_TOLERANCES",
    "DegenerateTriangle", "DeltoidReport", "DualSpaceReport",
    "FixtureComponent", "FixtureTriangle", "IllConditionedDual",
    "ImplicitSurfaceModel", "InconsistentDistances", "MorleyData",
    "NumericalFailure", "P3PInstance", "Pose", "RootCountWarning",
    "RunReport", "SUITES", "SceneFormatError", "SolutionTriple",
    "SparsePoly", "Stratum", "StratumLabel", "SweepConfig", "SweepResult",
    "Tolerances", "Triangle", "VertexCoincidence", "ZeroComponent",
    "build_deltoid_report", "classify", "cluster_multiplicity_oracle",
    "complementary_solutions", "component_membership", "corank_and_nullvec",
    "criterion_c1", "criterion_ck", "cusp_check", "danger_cylinder_value_e",
    "danger_cylinder_value_xyz", "detect_continuum", "distances",
    "distances_sq_exact", "dual_space_report", "fit_deltoid_e",
    "fit_deltoid_xyz", "fit_implicit", "fixture_by_name", "format_poly",
    "generatrix_probes", "generatrix_sine_cubic", "i1_generators",
    "ingest_scene", "instance_from_center", "jacobian_at", "load_fixtures",
    "locate_center", "macaulay_dual_dim", "macaulay_dual_dims",
    "make_triangle", "monomial_basis", "morley_angles", "morley_triangle",
    "multiplicity", "negative_controls", "parse_poly", "plane_fit_residual",
    "recover_pose", "run_verify", "solve", "sweep_cylinder", "sweep_figure8",
    "system_polys", "tangency_check", "taylor_coefficients",
    "trace_cusp_curves", "triangle_from_squared_sides",
]
