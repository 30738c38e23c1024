"""Spatial operators and the implicit solver against dense linear algebra."""

import math

import numpy as np
import pytest

from wavecompact.errors import ContractViolation
from wavecompact.grid import build_mesh, space_norm
from wavecompact.operators import (apply_implicit, apply_spatial, mass_inv_half_norm,
                                   solve_implicit, solve_mass, stencil)

MESH = build_mesh(math.pi, math.pi, 8, 32)


def _dirichlet(values):
    w = np.asarray(values, dtype=float)
    w[0] = w[-1] = 0.0
    return w


def _dense_matrix(kind, mesh):
    n = mesh.N - 1
    out = np.zeros((n, n))
    for i in range(n):
        e = mesh.zeros()
        e[i + 1] = 1.0
        out[:, i] = apply_spatial(kind, e, mesh)[1:-1]
    return out


@pytest.mark.parametrize("k", range(1, 8))
def test_laplacian_eigen_relation(k):
    # -Lap sin(kx) = lambda_k sin(kx) with lambda_k = (2/h sin(kh/2))^2
    w = _dirichlet(np.sin(k * MESH.nodes()))
    lam = (2.0 / MESH.h * math.sin(k * MESH.h / 2.0)) ** 2
    got = apply_spatial("laplacian", w, MESH)
    np.testing.assert_allclose(got[1:-1], -lam * w[1:-1], rtol=1e-12, atol=1e-13)


def test_numerov_identity_on_random_input():
    # numerov = I + (h^2/12) laplacian
    rng = np.random.default_rng(0)
    w = _dirichlet(rng.standard_normal(MESH.N + 1))
    lhs = apply_spatial("numerov", w, MESH)
    rhs = w + MESH.h ** 2 / 12.0 * apply_spatial("laplacian", w, MESH)
    rhs[0] = rhs[-1] = 0.0
    np.testing.assert_allclose(lhs, rhs, rtol=1e-14, atol=1e-14)


def test_numerov_mass_laplacian_identity():
    # numerov = mass - (h^2/12) laplacian, exactly on random inputs
    rng = np.random.default_rng(1)
    for mesh in (MESH, build_mesh(1.0, 1.0, 64, 128)):
        w = _dirichlet(rng.standard_normal(mesh.N + 1))
        lhs = apply_spatial("numerov", w, mesh)
        rhs = (apply_spatial("mass", w, mesh)
               - mesh.h ** 2 / 12.0 * apply_spatial("laplacian", w, mesh))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-14, atol=1e-14)


def test_mass_stencil_near_boundary():
    # w = (0,1,1,...,1,0): rows adjacent to the boundary give 5/6, deep interior 1
    w = np.ones(MESH.N + 1)
    w[0] = w[-1] = 0.0
    got = apply_spatial("mass", w, MESH)
    assert got[1] == pytest.approx(5.0 / 6.0)
    assert got[-2] == pytest.approx(5.0 / 6.0)
    np.testing.assert_allclose(got[2:-2], 1.0)


def test_operators_are_symmetric():
    rng = np.random.default_rng(2)
    for kind in ("numerov", "mass", "laplacian"):
        v = _dirichlet(rng.standard_normal(MESH.N + 1))
        w = _dirichlet(rng.standard_normal(MESH.N + 1))
        av = apply_spatial(kind, v, MESH)
        aw = apply_spatial(kind, w, MESH)
        left = np.sum(av[1:-1] * w[1:-1]) * MESH.h
        right = np.sum(v[1:-1] * aw[1:-1]) * MESH.h
        assert left == pytest.approx(right, rel=1e-12)


def test_apply_spatial_rejects_non_dirichlet():
    with pytest.raises(ContractViolation):
        apply_spatial("mass", np.ones(MESH.N + 1), MESH)
    # the raw stencil accepts it (needed for pointwise data assembly)
    stencil("mass", np.ones(MESH.N + 1), MESH)


def test_solve_implicit_zero_and_round_trip():
    assert np.all(solve_implicit(MESH.zeros(), MESH) == 0.0)
    rng = np.random.default_rng(3)
    for mesh in (MESH, build_mesh(2.0, 1.5, 64, 256, a=0.7, eps0=0.8)):
        w = _dirichlet(rng.standard_normal(mesh.N + 1))
        round1 = solve_implicit(apply_implicit(w, mesh), mesh)
        np.testing.assert_allclose(round1, w, rtol=1e-12, atol=1e-12)
        round2 = apply_implicit(solve_implicit(w, mesh), mesh)
        np.testing.assert_allclose(round2, w, rtol=1e-12, atol=1e-12)


def test_solve_implicit_eigen_identity_and_dense_cross_check():
    # rhs = sin(kx) -> w = sin(kx) / (1 + (tau^2 - h^2) lambda_k / 12) at a = 1
    mesh = build_mesh(math.pi, math.pi, 8, 32)
    k = 3
    rhs = _dirichlet(np.sin(k * mesh.nodes()))
    lam = (2.0 / mesh.h * math.sin(k * mesh.h / 2.0)) ** 2
    symbol = 1.0 + (mesh.tau ** 2 - mesh.h ** 2) * lam / 12.0
    got = solve_implicit(rhs, mesh)
    np.testing.assert_allclose(got[1:-1], rhs[1:-1] / symbol, rtol=1e-12)

    dense = (_dense_matrix("mass", mesh)
             - mesh.sigma * mesh.tau ** 2 * mesh.a ** 2 * _dense_matrix("laplacian", mesh))
    ref = np.linalg.solve(dense, rhs[1:-1])
    np.testing.assert_allclose(got[1:-1], ref, rtol=1e-12)


def test_solve_implicit_residual_contract():
    rng = np.random.default_rng(4)
    mesh = build_mesh(math.pi, math.pi, 256, 1024)
    rhs = _dirichlet(rng.standard_normal(mesh.N + 1))
    w = solve_implicit(rhs, mesh)
    res = apply_implicit(w, mesh) - rhs
    assert np.max(np.abs(res[1:-1])) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_implicit_matrix_row_dominance():
    # |diag| - 2|off| = min(1/3 + 4s, 1) >= 1/3 for every s > 0
    for mesh in (MESH, build_mesh(1.0, 1.0, 16, 64, a=3.0, eps0=0.5)):
        s = mesh.sigma * mesh.tau ** 2 * mesh.a ** 2 / mesh.h ** 2
        diag = 2.0 / 3.0 + 2.0 * s
        off = abs(1.0 / 6.0 - s)
        assert diag - 2.0 * off >= min(1.0 / 3.0, 1.0) - 1e-15


def test_solve_mass_and_inverse_norm():
    rng = np.random.default_rng(5)
    w = _dirichlet(rng.standard_normal(MESH.N + 1))
    z = solve_mass(w, MESH)
    back = apply_spatial("mass", z, MESH)
    np.testing.assert_allclose(back[1:-1], w[1:-1], rtol=1e-12, atol=1e-13)
    # ||B^-1/2 w|| via dense eigendecomposition
    dense = _dense_matrix("mass", MESH)
    ref = math.sqrt(w[1:-1] @ np.linalg.solve(dense, w[1:-1]) * MESH.h)
    assert mass_inv_half_norm(w, MESH) == pytest.approx(ref, rel=1e-12)
    # sits between |w| and sqrt(3)|w| since 1/3 <= B <= 1
    l2 = space_norm(w, "l2", MESH)
    assert l2 * (1 - 1e-12) <= mass_inv_half_norm(w, MESH) <= math.sqrt(3) * l2 * (1 + 1e-12)
