import numpy as np
import pytest

from tmcontact import tensor
from tmcontact.assembly import (
    Assembler,
    BoundaryProgram,
    DofMap,
    assemble,
    build_dof_map,
    fixed,
    ramp,
    reactions,
)
from tmcontact.element import ElementFamily, element_force_stiffness, quadrature
from tmcontact.errors import BoundaryConflictError
from tmcontact.materials import LinearInF, NeoHookean, ThirdMedium
from tmcontact.mesh import ElementRecord, MeshModel, Region, StructuredQuadGrid

BULK = NeoHookean(kappa_vol=1e6, kappa_iso=0.214e6)


def single_element_mesh(material=None, quad="lobatto2x2"):
    nodes = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    mat = material if material is not None else LinearInF(E=10.0)
    return MeshModel(
        nodes=nodes,
        elements=[ElementRecord(ElementFamily.QUAD4, (0, 1, 2, 3), "bulk")],
        regions={"bulk": Region(mat, quad)},
    )


def patch_mesh(material=None, jitter=0.15, seed=3):
    """2x2 patch of distorted quads; interior node index returned too."""
    rng = np.random.default_rng(seed)
    grid = StructuredQuadGrid([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    mat = material if material is not None else BULK
    mesh = grid.build(lambda x, y: "bulk", {"bulk": Region(mat, "rule3x3")})
    # distort every node except corners, keeping geometry valid
    interior = 4  # center of the 3x3 node grid
    for n in range(mesh.n_nodes):
        if n == interior:
            mesh.nodes[n] += jitter * rng.uniform(-1, 1, 2)
        elif not np.all(np.isin(mesh.nodes[n], (0.0, 2.0))):
            mesh.nodes[n] += 0.5 * jitter * rng.uniform(-1, 1, 2)
    mesh.validate()
    return mesh, interior


def test_dof_map_counts():
    mesh = single_element_mesh()
    bc = BoundaryProgram([fixed([0, 1], 0), fixed([0, 1], 1)])
    dm = build_dof_map(mesh, bc)
    assert len(dm.free) == 4
    assert len(dm.prescribed) == 4


def test_dof_map_empty_bc():
    mesh = single_element_mesh()
    dm = build_dof_map(mesh, BoundaryProgram())
    assert len(dm.free) == 8
    assert len(dm.prescribed) == 0


def test_dof_map_conflict():
    mesh = single_element_mesh()
    bc = BoundaryProgram([fixed([0], 1), ramp([0], 1, -2.0)])
    with pytest.raises(BoundaryConflictError):
        build_dof_map(mesh, bc)


def test_zero_displacement_zero_force():
    mesh, _ = patch_mesh()
    asm = Assembler(mesh)
    f = asm.internal_force(np.zeros(mesh.n_dofs))
    np.testing.assert_allclose(f, 0.0, atol=1e-9)


def test_single_element_reduction():
    mesh = single_element_mesh()
    bc = BoundaryProgram([fixed([0, 1], 0), fixed([0, 1], 1)])
    d = np.zeros(mesh.n_dofs)
    f_free, K_free = assemble(mesh, bc, d)
    out = element_force_stiffness(
        ElementFamily.QUAD4,
        mesh.nodes,
        np.zeros(8),
        quadrature(ElementFamily.QUAD4, "lobatto2x2"),
        mesh.regions["bulk"].material,
    )
    dm = build_dof_map(mesh, bc)
    np.testing.assert_allclose(
        K_free.toarray(), out.K_e[np.ix_(dm.free, dm.free)], rtol=1e-14
    )
    np.testing.assert_allclose(f_free, out.f_e[dm.free], atol=1e-14)


def test_patch_test_affine_interior_gradient():
    # affine boundary displacements must reproduce the affine gradient at
    # every interior quadrature point once the interior node equilibrates
    mesh, interior = patch_mesh()
    A = np.array([[0.02, 0.015], [-0.01, 0.03]])
    d = (mesh.nodes @ A.T).reshape(-1)
    asm = Assembler(mesh)
    # place the interior node by solving the 2-dof equilibrium directly
    free = np.array([2 * interior, 2 * interior + 1])
    for _ in range(40):
        f, K = asm.assemble(d)
        r = f[free]
        if np.abs(r).max() < 1e-10:
            break
        d[free] -= np.linalg.solve(K[np.ix_(free, free)].toarray(), r)
    for grp in asm.point_fields(d):
        np.testing.assert_allclose(
            grp["F"], np.broadcast_to(np.eye(2) + A, grp["F"].shape), atol=1e-10
        )


def test_two_element_patch_traction_transmission():
    # under an affine field the stress is constant, so the nodal forces
    # each element exerts on the shared edge must sum to the exact
    # traction integral P.n * length, equal and opposite between sides
    grid = StructuredQuadGrid([0.0, 1.0, 2.0], [0.0, 1.0])
    mesh = grid.build(lambda x, y: "bulk", {"bulk": Region(BULK, "rule3x3")})
    A = np.array([[0.05, 0.0], [0.02, -0.04]])
    d_full = (mesh.nodes @ A.T).reshape(-1)
    shared = [n for n in range(mesh.n_nodes) if np.isclose(mesh.nodes[n, 0], 1.0)]
    rule = quadrature(ElementFamily.QUAD4, "rule3x3")
    per_edge = []
    for rec in mesh.elements:
        ed = d_full[np.array([(2 * n, 2 * n + 1) for n in rec.nodes]).ravel()]
        out = element_force_stiffness(ElementFamily.QUAD4, mesh.element_coords(rec), ed, rule, BULK)
        idx = [k for k, n in enumerate(rec.nodes) if n in shared]
        per_edge.append(sum(out.f_e[2 * k : 2 * k + 2] for k in idx))
    np.testing.assert_allclose(per_edge[0] + per_edge[1], 0.0, atol=1e-10 * 1e6)
    # exact traction from the constant first Piola-Kirchhoff stress
    from fdcheck import eval_kernel

    P = tensor.from_voigt(eval_kernel(BULK, np.eye(2) + A).P)
    np.testing.assert_allclose(per_edge[0], P @ [1.0, 0.0], rtol=1e-10)


def test_global_tangent_symmetry_and_fd_consistency():
    mesh, _ = patch_mesh(material=ThirdMedium(kappa_vol=1.0, E=0.3, kappa_fbar=1000.0))
    asm = Assembler(mesh)
    rng = np.random.default_rng(8)
    d = 0.01 * rng.uniform(-1, 1, mesh.n_dofs)
    f, K = asm.assemble(d)
    Kd = K.toarray()
    assert np.abs(Kd - Kd.T).max() / np.abs(Kd).max() < 1e-12
    # finite differences of the total energy reproduce the force
    h = 1e-7
    f_fd = np.zeros_like(f)
    for i in range(mesh.n_dofs):
        dp, dm = d.copy(), d.copy()
        dp[i] += h
        dm[i] -= h
        f_fd[i] = (asm.total_energy(dp) - asm.total_energy(dm)) / (2 * h)
    assert np.abs(f - f_fd).max() / max(np.abs(f_fd).max(), 1e-12) < 1e-5


def test_assembly_permutation_invariance():
    mesh, _ = patch_mesh()
    rng = np.random.default_rng(9)
    d = 0.01 * rng.uniform(-1, 1, mesh.n_dofs)
    f1, K1 = Assembler(mesh).assemble(d)
    # same mesh with elements listed in reverse order
    mesh2 = MeshModel(
        nodes=mesh.nodes.copy(),
        elements=list(reversed(mesh.elements)),
        regions=mesh.regions,
    )
    f2, K2 = Assembler(mesh2).assemble(d)
    scale = np.abs(K1.toarray()).max()
    assert np.abs(f1 - f2).max() <= 1e-14 * max(np.abs(f1).max(), 1.0)
    assert np.abs((K1 - K2).toarray()).max() <= 1e-14 * scale


def test_reactions_unloaded_and_balance():
    mesh = single_element_mesh(material=LinearInF(E=100.0))
    asm = Assembler(mesh)
    d0 = np.zeros(mesh.n_dofs)
    assert reactions(asm.internal_force(d0), [0, 1], component=1) == 0.0
    # stretch the element: total of all nodal forces vanishes (global
    # equilibrium of internal forces)
    d = np.zeros(mesh.n_dofs)
    d[5] = d[7] = 0.1  # lift top nodes
    f = asm.internal_force(d)
    total = reactions(f, np.arange(mesh.n_nodes))
    np.testing.assert_allclose(total, 0.0, atol=1e-12 * np.abs(f).max())
    # and the top/bottom sums are equal and opposite
    top = reactions(f, [2, 3], component=1)
    bottom = reactions(f, [0, 1], component=1)
    assert top == pytest.approx(-bottom, rel=1e-12)


def test_reactions_mesh_call_shape():
    mesh = single_element_mesh(material=LinearInF(E=100.0))
    d = np.zeros(mesh.n_dofs)
    d[5] = d[7] = 0.1
    r = reactions(mesh, d, node_set=[2, 3])
    assert r[1] > 0.0
