"""Two-sided bounds for the sup-norm error constant of linear interpolation
on triangles, via a nonconforming quadratic finite element relaxation."""

__version__ = "0.1.0"

from .bernstein import assemble_B, convex_hull_sup_bound, p2_to_bernstein
from .bounds import (BoundReport, c1_kobayashi, c1_liu_kikuchi,
                     cl_upper_for_triangle, cl_upper_from_lambda,
                     compute_bound_report, c_fm_uniform,
                     degenerate_lower_bound, lambda_lower_cor31,
                     lambda_lower_thm31, raw_cl_general,
                     raw_cl_right_isosceles, raw_pointwise_bound, solve_shape)
from .certify import (BernsteinPoly, fit_polynomial, minimizer_nodal_values,
                      rayleigh_lower_bound)
from .errors import (DegenerateShapeError, InsufficientDataError,
                     InterpConstError, InvalidParameterError, NotSPDError,
                     VacuousBoundError)
from .geometry import (Triangle, barycentric, from_barycentric,
                       integrate_bary_monomial, make_triangle,
                       subtriangle_height)
from .mesh import Mesh, corner_vertex_indices, uniform_mesh
from .morley import (FMDofMap, assemble_A, fm_dof_map, fm_interpolate,
                     fm_interpolate_elementwise, lagrange_interpolate,
                     local_basis, local_h2_stiffness)
from .optimize import RelaxedSolution, solve_relaxed, solve_relaxed_cholesky

__all__ = [
    "BoundReport", "BernsteinPoly", "DegenerateShapeError", "FMDofMap",
    "InsufficientDataError", "InterpConstError", "InvalidParameterError",
    "Mesh", "NotSPDError", "RelaxedSolution", "Triangle", "VacuousBoundError",
    "assemble_A", "assemble_B", "barycentric", "c1_kobayashi",
    "c1_liu_kikuchi", "c_fm_uniform", "cl_upper_for_triangle",
    "cl_upper_from_lambda", "compute_bound_report", "convex_hull_sup_bound",
    "corner_vertex_indices", "degenerate_lower_bound", "fit_polynomial",
    "fm_dof_map", "fm_interpolate", "fm_interpolate_elementwise",
    "from_barycentric", "integrate_bary_monomial", "lagrange_interpolate",
    "lambda_lower_cor31", "lambda_lower_thm31", "local_basis",
    "local_h2_stiffness", "make_triangle", "minimizer_nodal_values",
    "p2_to_bernstein", "raw_cl_general", "raw_cl_right_isosceles",
    "raw_pointwise_bound", "rayleigh_lower_bound", "solve_relaxed",
    "solve_relaxed_cholesky", "solve_shape", "subtriangle_height",
    "uniform_mesh",
]
