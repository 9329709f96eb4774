"""Analytic bounds and the full two-sided bound pipeline.

Everything here works at unit scale and multiplies by ``h`` at the end:
the target constant satisfies ``C(alpha, theta, h) = h * C(alpha, theta, 1)``
and the associated minimum energy scales as ``lambda(h) = lambda(1) / h**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import certify, morley
from .bernstein import assemble_B
from .errors import DegenerateShapeError, VacuousBoundError
from .geometry import Triangle, make_triangle, subtriangle_height
from .mesh import uniform_mesh
from .optimize import factorize, relaxed_from_diag

#: Gradient-seminorm constant prefactor of the parametrized family bound.
C1_PREFACTOR = 0.493

#: Gradient-seminorm constant of the unit right isosceles triangle.
C1_RIGHT_ISOSCELES = 0.49293

#: Rounded analytic sup-norm constant of the right isosceles triangle,
#: used as the reference constant in per-cell interpolation estimates.
RAW_CL_REFERENCE = 1.3712

#: Sharpest certified sup-norm constant for the right isosceles triangle,
#: available once the relaxation pipeline has been run at a fine mesh.
IMPROVED_CL_REFERENCE = 0.41595


def shape_factor(alpha: float, theta: float) -> float:
    """Seminorm distortion factor ``1 + a^2 + sqrt(1 + 2 a^2 cos(2t) + a^4)``."""
    rad = 1.0 + 2.0 * alpha * alpha * math.cos(2.0 * theta) + alpha ** 4
    return 1.0 + alpha * alpha + math.sqrt(max(rad, 0.0))


def c1_liu_kikuchi(alpha: float, theta: float) -> float:
    """Gradient-seminorm constant bound for the ``(alpha, theta)`` family at unit scale."""
    rad = 1.0 + 2.0 * alpha * alpha * math.cos(2.0 * theta) + alpha ** 4
    if rad < 0.0:
        rad = 0.0
    root = math.sqrt(rad)
    denom_sq = 2.0 * (1.0 + alpha * alpha - root)
    if denom_sq <= 1e-15:
        raise DegenerateShapeError(
            f"degenerate shape (alpha={alpha:g}, theta={theta:g}): "
            "denominator of the gradient-constant bound vanishes")
    return C1_PREFACTOR * (1.0 + alpha * alpha + root) / math.sqrt(denom_sq)


def c1_kobayashi(tri: Triangle) -> float:
    """Gradient-seminorm constant bound from edge lengths and area."""
    A2, B2, C2 = (tri.edge_lengths ** 2).tolist()
    S = tri.area
    rad = (A2 * B2 * C2 / (16.0 * S * S)
           - (A2 + B2 + C2) / 30.0
           - (S * S / 5.0) * (1.0 / A2 + 1.0 / B2 + 1.0 / C2))
    if rad < 0.0:
        raise DegenerateShapeError(
            f"negative radicand {rad:g} in edge-length constant formula")
    return math.sqrt(rad)


def raw_pointwise_bound(tri: Triangle, x0, c1: float) -> float:
    """Pointwise bound coefficient at ``x0``: the error there is at most
    this value times the function's full second-derivative seminorm.

    Uses the sub-triangle over the base ``p1 x0``; ``x0`` on the segment
    ``p1 p3`` gives a zero height and is rejected.
    """
    height = subtriangle_height(tri, x0)
    if height <= 1e-14 * tri.h_max:
        raise DegenerateShapeError("x0 lies on the segment p1 p3; zero sub-triangle height")
    base = float(np.linalg.norm(np.asarray(x0, dtype=float) - tri.vertices[0]))
    h = tri.h_medium
    return math.sqrt(2.0 * base / height) * math.sqrt(c1 * h * tri.h_max + (c1 * h) ** 2)


def raw_cl_right_isosceles() -> float:
    """Analytic sup-norm constant bound for the unit right isosceles triangle.

    Evaluates ``sqrt(2) * (C1*sqrt(2) + C1^2)^(1/2)`` with the reference
    gradient constant; the value is 1.37121..., conventionally rounded to
    ``RAW_CL_REFERENCE``.
    """
    c1 = C1_RIGHT_ISOSCELES
    return math.sqrt(2.0) * math.sqrt(c1 * math.sqrt(2.0) + c1 * c1)


def raw_cl_general(alpha: float, theta: float, cl_ref: float) -> float:
    """Carry a right-isosceles constant bound to the ``(alpha, theta)`` shape.

    ``cl_ref`` is any valid unit-scale bound for the right isosceles
    triangle (``RAW_CL_REFERENCE`` or ``IMPROVED_CL_REFERENCE``).
    """
    s = alpha * math.sin(theta)
    if s <= 0.0:
        raise DegenerateShapeError(f"alpha*sin(theta) = {s:g} not positive")
    return cl_ref * shape_factor(alpha, theta) / (2.0 * math.sqrt(s))


def c_fm_uniform(alpha: float, theta: float, n_subdiv: int) -> float:
    """Per-cell interpolation constant bound on the uniform ``N``-mesh.

    Every cell is similar to the parent with ratio ``1/N``, so the parent's
    analytic constant bound scaled by ``1/N`` covers all cells.
    """
    return raw_cl_general(alpha, theta, RAW_CL_REFERENCE) / n_subdiv


def lambda_lower_thm31(lambda_h: float, c_fm: float) -> float:
    """Lower bound ``lambda_h / (1 + c_fm^2 * lambda_h)`` for the continuous minimum."""
    return lambda_h / (1.0 + c_fm * c_fm * lambda_h)


def lambda_lower_cor31(lambda_h: float, n_subdiv: int) -> float:
    """Lower bound ``lambda_h * (1 - 1/N^2)`` on a uniform self-similar mesh.

    ``N = 1`` yields the vacuous bound 0.
    """
    return lambda_h * (1.0 - 1.0 / float(n_subdiv) ** 2)


def cl_upper_from_lambda(lambda_lb: float, h: float = 1.0) -> float:
    """Convert a positive lower bound of the minimum energy into ``h / sqrt(lambda)``."""
    if lambda_lb <= 0.0:
        raise VacuousBoundError(f"lambda lower bound {lambda_lb:g} is not positive")
    return h / math.sqrt(lambda_lb)


def degenerate_lower_bound(alpha: float, theta: float) -> float:
    """Explicit constant lower bound from quadratic trial functions.

    ``(1 + a^2 - 2 a cos t) / (8 sqrt(a sin t))``, the quotient of the
    sup-norm error of ``x^2 + y^2`` over its seminorm; for ``theta = pi/2``
    this reduces to ``(a^2 + 1) / (8 sqrt(a))``.  Diverges as the triangle
    flattens (``theta -> pi`` or ``alpha -> 0``).
    """
    s = alpha * math.sin(theta)
    if s <= 0.0:
        raise DegenerateShapeError(f"alpha*sin(theta) = {s:g} not positive")
    q1 = (1.0 + alpha * alpha - 2.0 * alpha * math.cos(theta)) / (8.0 * math.sqrt(s))
    if abs(theta - 0.5 * math.pi) < 1e-12:
        q2 = (alpha * alpha + 1.0) / (8.0 * math.sqrt(alpha))
        return max(q1, q2)
    return q1


@dataclass(frozen=True)
class BoundReport:
    """Two-sided bound result for one triangle and mesh resolution."""

    alpha: float
    theta: float
    h: float
    n_subdiv: int
    lambda_hB: float
    lambda_lb_thm31: float
    lambda_lb_cor31: float
    cl_upper: float
    cl_lower: float | None
    c_fm_used: float
    fit_degree: int | None
    argmax_row: int
    near_max_rows: tuple[int, ...]
    max_nodal_value: float | None
    warnings: tuple[str, ...] = ()
    arithmetic: str = "double precision, no directed rounding"

    def to_dict(self) -> dict:
        d = {
            "alpha": self.alpha,
            "theta": self.theta,
            "h": self.h,
            "N": self.n_subdiv,
            "lambda_hB": self.lambda_hB,
            "lambda_lb_thm31": self.lambda_lb_thm31,
            "lambda_lb_cor31": self.lambda_lb_cor31,
            "cl_upper": self.cl_upper,
            "cl_lower": self.cl_lower,
            "c_fm_used": self.c_fm_used,
            "fit_degree": self.fit_degree,
            "argmax_row": self.argmax_row,
            "near_max_rows": list(self.near_max_rows),
            "max_nodal_value": self.max_nodal_value,
            "warnings": list(self.warnings),
            "arithmetic": self.arithmetic,
        }
        return d


def solve_shape(tri: Triangle, n_subdiv: int, solver: str = "auto",
                orientation: str = "lattice",
                cross_check: bool = True):
    """Assemble and solve the relaxed problem for ``tri`` at resolution ``N``.

    Returns ``(mesh, dofs, solution, warnings)``.  With ``cross_check`` the
    geometric-orientation transform is also swept (reusing the same
    factorization, and only over the rows where the two transforms differ)
    and the lattice minimum is required not to exceed the geometric one,
    i.e. the lattice rows must stay on the conservative side.
    """
    msh = uniform_mesh(tri, n_subdiv)
    dofs = morley.fm_dof_map(msh)
    bases = morley.all_local_bases(msh)
    A = morley.assemble_A(msh, dofs, bases)
    B = assemble_B(msh, dofs, bases, orientation=orientation)
    factor = factorize(A, solver)
    diag_D = factor.diag_inverse_form(B)
    sol = relaxed_from_diag(diag_D, factor, B)
    warnings = list(tri.warnings)
    if cross_check and orientation == "lattice" and not msh.element_up.all():
        down_rows = np.repeat(~msh.element_up, 6)
        B_geo = assemble_B(msh, dofs, bases, orientation="geometric")
        d_extra = factor.diag_inverse_form(B_geo.tocsr()[down_rows])
        dmax_geo = max(float(diag_D[~down_rows].max()), float(d_extra.max()))
        lam_geo = 1.0 / dmax_geo
        if sol.lambda_hB > lam_geo * (1.0 + 1e-12):
            warnings.append(
                "lattice relaxation exceeded the geometric one "
                f"({sol.lambda_hB:.6g} > {lam_geo:.6g}); using the geometric value")
            d_geo = diag_D.copy()
            d_geo[down_rows] = d_extra
            sol = relaxed_from_diag(d_geo, factor, B_geo)
    return msh, dofs, sol, warnings


def compute_bound_report(alpha: float, theta: float, h: float = 1.0,
                         n_subdiv: int = 32, fit_degree: int | None = None,
                         sample_density: int = 200, solver: str = "auto",
                         cross_check: bool = True) -> BoundReport:
    """Run the full pipeline for ``(alpha, theta, h)`` at resolution ``N``.

    All computations run at unit scale; the final constant bounds are
    multiplied by ``h``.  ``fit_degree`` enables the polynomial certificate
    for the lower constant bound (requires ``N >= fit_degree``).
    """
    tri = make_triangle(alpha, theta, 1.0)
    msh, dofs, sol, warnings = solve_shape(tri, n_subdiv, solver=solver,
                                           cross_check=cross_check)
    lam = sol.lambda_hB
    c_fm = c_fm_uniform(alpha, theta, n_subdiv)
    lb_thm = lambda_lower_thm31(lam, c_fm)
    lb_cor = lambda_lower_cor31(lam, n_subdiv)
    lam_lb = max(lb_thm, lb_cor)
    cl_ub = cl_upper_from_lambda(lam_lb, h)

    cl_lb = None
    max_nodal = None
    if fit_degree is not None:
        nodal = certify.minimizer_nodal_values(msh, dofs, sol.minimizer)
        max_nodal = float(abs(nodal).max())
        poly = certify.fit_polynomial(nodal, msh, fit_degree)
        quot_fit = certify.rayleigh_lower_bound(poly, tri, grid=sample_density)
        best = certify.optimal_certificate(tri, fit_degree, grid=sample_density)
        quot_opt = certify.rayleigh_lower_bound(best, tri, grid=sample_density)
        cl_lb = h * max(quot_fit, quot_opt)
        if cl_lb > cl_ub:
            warnings.append(
                f"certificate quotient {cl_lb:.6g} exceeded the upper bound "
                f"{cl_ub:.6g}; clipping")
            cl_lb = cl_ub

    return BoundReport(
        alpha=alpha, theta=theta, h=h, n_subdiv=n_subdiv,
        lambda_hB=lam, lambda_lb_thm31=lb_thm, lambda_lb_cor31=lb_cor,
        cl_upper=cl_ub, cl_lower=cl_lb, c_fm_used=c_fm,
        fit_degree=fit_degree, argmax_row=sol.argmax_row,
        near_max_rows=tuple(int(i) for i in sol.near_max_rows),
        max_nodal_value=max_nodal, warnings=tuple(warnings),
    )


def cl_upper_for_triangle(tri: Triangle, n_subdiv: int, solver: str = "auto",
                          cross_check: bool = True) -> float:
    """Upper constant bound for an arbitrary triangle via the uniform-mesh route.

    Only the self-similarity lower bound ``lambda * (1 - 1/N^2)`` is used
    (no shape parametrization needed); the triangle's own scale is part of
    the result.  Requires ``N >= 2``.
    """
    _, _, sol, _ = solve_shape(tri, n_subdiv, solver=solver, cross_check=cross_check)
    lam_lb = lambda_lower_cor31(sol.lambda_hB, n_subdiv)
    return cl_upper_from_lambda(lam_lb, 1.0)
