import math

import numpy as np
import pytest
import scipy.sparse as sp

from interpconst.bernstein import assemble_B, eval_bern2
from interpconst.certify import barycentric_lattice
from interpconst.errors import NotSPDError
from interpconst.geometry import make_triangle
from interpconst.mesh import uniform_mesh
from interpconst.morley import all_local_bases, assemble_A, fm_dof_map, fm_interpolate
from interpconst.optimize import solve_relaxed, solve_relaxed_cholesky

from oracles import brute_force_relaxed, random_triangle


def build_system(tri, N, orientation="lattice"):
    mesh = uniform_mesh(tri, N)
    dofs = fm_dof_map(mesh)
    bases = all_local_bases(mesh)
    A = assemble_A(mesh, dofs, bases)
    B = assemble_B(mesh, dofs, bases, orientation=orientation)
    return mesh, dofs, A, B


class TestBruteForceAgreement:
    def test_single_cell_right_isosceles(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        _, _, A, B = build_system(tri, 1)
        sol = solve_relaxed(A, B)
        oracle = brute_force_relaxed(A.toarray(), B.toarray())
        assert sol.lambda_hB == pytest.approx(oracle, rel=1e-10)

    def test_twenty_random_triangles(self, rng):
        for _ in range(20):
            tri = random_triangle(rng)
            _, _, A, B = build_system(tri, 1)
            sol = solve_relaxed(A, B)
            oracle = brute_force_relaxed(A.toarray(), B.toarray())
            assert sol.lambda_hB == pytest.approx(oracle, rel=1e-10)


class TestRouteAgreement:
    @pytest.mark.parametrize("N", [1, 2, 4, 8])
    def test_right_isosceles(self, N):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        _, _, A, B = build_system(tri, N)
        s_lu = solve_relaxed(A, B)
        s_ch = solve_relaxed_cholesky(A, B)
        assert s_lu.lambda_hB == pytest.approx(s_ch.lambda_hB, rel=1e-10)
        assert s_lu.argmax_row == s_ch.argmax_row

    def test_random_shape(self, rng):
        tri = random_triangle(rng)
        _, _, A, B = build_system(tri, 5)
        s_lu = solve_relaxed(A, B)
        s_ch = solve_relaxed_cholesky(A, B)
        assert s_lu.lambda_hB == pytest.approx(s_ch.lambda_hB, rel=1e-10)
        assert np.allclose(s_lu.diag_D, s_ch.diag_D, rtol=1e-9, atol=1e-14)


class TestSolutionInvariants:
    def test_minimizer_identities(self, rng):
        tri = random_triangle(rng)
        _, _, A, B = build_system(tri, 4)
        for sol in (solve_relaxed(A, B), solve_relaxed_cholesky(A, B)):
            energy = sol.minimizer @ (A @ sol.minimizer)
            assert energy == pytest.approx(sol.lambda_hB, rel=1e-8)
            Bx = np.abs(B @ sol.minimizer)
            assert Bx.max() >= 1.0 - 1e-10
            assert Bx.max() <= 1.0 + 1e-8
            assert sol.lambda_hB == pytest.approx(1.0 / sol.diag_D.max(), rel=1e-14)
            assert sol.argmax_row == int(sol.near_max_rows.min())

    def test_relaxation_direction(self, rng):
        # any coefficient vector with (sampled) sup >= 1 has energy >= lambda
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        mesh, dofs, A, B = build_system(tri, 4)
        sol = solve_relaxed(A, B)
        lat = barycentric_lattice(12)
        smooth = [
            (lambda p: np.sin(math.pi * p[..., 0]) * np.sin(math.pi * p[..., 1]),
             lambda p: np.stack([math.pi * np.cos(math.pi * p[..., 0]) * np.sin(math.pi * p[..., 1]),
                                 math.pi * np.sin(math.pi * p[..., 0]) * np.cos(math.pi * p[..., 1])],
                                axis=-1)),
            (lambda p: p[..., 0] * p[..., 1] * (1 - p[..., 0] - p[..., 1]),
             lambda p: np.stack([p[..., 1] * (1 - 2 * p[..., 0] - p[..., 1]),
                                 p[..., 0] * (1 - p[..., 0] - 2 * p[..., 1])], axis=-1)),
        ]
        Bgeo = assemble_B(mesh, dofs, orientation="geometric")
        for f, g in smooth:
            x = fm_interpolate(mesh, dofs, f, g)
            d = (Bgeo @ x).reshape(-1, 6)
            sup = max(np.abs(eval_bern2(d[t], lat)).max() for t in range(mesh.n_elements))
            xn = x / sup
            assert xn @ (A @ xn) >= sol.lambda_hB * (1 - 1e-9)

    def test_lambda_scaling(self):
        # lambda(h) = lambda(1) / h^2
        for h in (0.5, 2.0):
            t1 = make_triangle(0.8, 1.9, 1.0)
            th = make_triangle(0.8, 1.9, h)
            _, _, A1, B1 = build_system(t1, 4)
            _, _, Ah, Bh = build_system(th, 4)
            lam1 = solve_relaxed(A1, B1).lambda_hB
            lamh = solve_relaxed(Ah, Bh).lambda_hB
            assert lamh == pytest.approx(lam1 / h ** 2, rel=1e-10)

    def test_refinement_trend_right_isosceles(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        lams = []
        for N in (4, 8, 16):
            _, _, A, B = build_system(tri, N)
            lams.append(solve_relaxed(A, B).lambda_hB)
        assert lams[0] < lams[1] < lams[2]


class TestErrors:
    def test_not_spd_rejected(self):
        A = sp.identity(4, format="csr") * -1.0  # negative definite
        B = sp.identity(4, format="csr")
        with pytest.raises(NotSPDError):
            solve_relaxed_cholesky(A, B)
        # the LU route factors indefinite matrices fine but must notice the
        # negative quadratic forms
        with pytest.raises(NotSPDError):
            solve_relaxed(A, B)

    def test_singular_rejected(self):
        A = sp.csr_matrix((3, 3))
        B = sp.identity(3, format="csr")
        with pytest.raises(NotSPDError):
            solve_relaxed(A, B)
        with pytest.raises(NotSPDError):
            solve_relaxed_cholesky(A, B)
