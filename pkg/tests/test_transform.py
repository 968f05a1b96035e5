import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockpartners.linalg import ToleranceConfig, adjoint, fro_norm, kernel_basis
from fockpartners.models import (
    ModelInstance,
    SpaceDescriptor,
    boson_lowering,
    make_invertible_model,
    make_model,
)
from fockpartners.transform import (
    CommutationError,
    ModelInvariantError,
    SingularOperatorError,
    build_transform,
    check_relations,
    completeness_defect,
    joint_eigenbasis,
    map_family,
    recover_f1,
    run_transform,
    tilde_h2,
)

from conftest import basis_vector, random_complex, random_hermitian_matrix, random_unitary


def dominant_state(model, eigensystem, j):
    return model.space.unflat(int(np.argmax(np.abs(eigensystem.vectors[:, j]))))


def index_of_state(model, eigensystem, state):
    target = model.space.flat(state)
    for j in range(eigensystem.vectors.shape[1]):
        if int(np.argmax(np.abs(eigensystem.vectors[:, j]))) == target:
            return j
    raise AssertionError(f"no eigenvector dominated by state {state}")


# ---------------------------------------------------------------------------
# partner triple


def test_partner_of_number_hamiltonian_is_shifted_product():
    # adjoint(a) n a acts as n(n-1) on level n
    model = make_model("boson", dim=6, k=1)
    _, _, h2 = build_transform(model)
    np.testing.assert_allclose(h2, np.diag([0.0, 0.0, 2.0, 6.0, 12.0, 20.0]), atol=1e-13)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_boson_partner_closed_form_polynomial(k):
    # x = a^k gives h2 = n(n-1)...(n-k) as an exact diagonal polynomial
    dim = 10
    model = make_model("boson", dim=dim, k=k)
    _, _, h2 = build_transform(model)
    ns = np.arange(dim, dtype=np.float64)
    diag = np.ones(dim)
    for j in range(k + 1):
        diag = diag * (ns - j)
    np.testing.assert_allclose(h2, np.diag(diag), atol=1e-10)


def test_partner_with_identity_intertwiner_is_h1():
    model = make_model("boson", dim=5)
    trivial = ModelInstance(
        name="trivial",
        space=model.space,
        h1=model.h1,
        x=np.eye(5, dtype=np.complex128),
        margin=0,
    )
    n1, n2, h2 = build_transform(trivial)
    np.testing.assert_allclose(h2, model.h1, atol=1e-15)
    np.testing.assert_allclose(n1, np.eye(5), atol=1e-15)
    np.testing.assert_allclose(n2, np.eye(5), atol=1e-15)


def test_landau_a_partner_operators():
    # x = A+ A- gives N1 and N2 as per-mode products
    model = make_model("landau-a", dim=4)
    a = boson_lowering(4)
    lower_weight = a @ adjoint(a)  # diag(1, 2, 3, 0)
    raise_weight = adjoint(a) @ a  # diag(0, 1, 2, 3)
    n1, n2, _ = build_transform(model)
    np.testing.assert_allclose(n1, np.kron(lower_weight, lower_weight), atol=1e-13)
    np.testing.assert_allclose(n2, np.kron(raise_weight, raise_weight), atol=1e-13)


def test_build_transform_rejects_non_hermitian_h1():
    space = SpaceDescriptor((3,))
    bad = ModelInstance(
        name="bad",
        space=space,
        h1=np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        x=np.eye(3, dtype=np.complex128),
        margin=0,
    )
    with pytest.raises(ModelInvariantError) as info:
        build_transform(bad)
    assert info.value.residual > 0.1


def test_build_transform_rejects_broken_commutation():
    # a perturbed intertwiner breaks [h1, x adjoint(x)] = 0 while the
    # universal identity N1 x = x N2 still holds exactly
    model = make_model("boson", dim=6)
    x_bad = model.x.copy()
    x_bad[0, 2] += 1e-3
    corrupted = ModelInstance(name="corrupted", space=model.space, h1=model.h1, x=x_bad, margin=1)
    with pytest.raises(ModelInvariantError) as info:
        build_transform(corrupted)
    assert 1e-6 < info.value.residual < 1e-1

    n1 = x_bad @ adjoint(x_bad)
    n2 = adjoint(x_bad) @ x_bad
    lhs = n1 @ x_bad
    rhs = x_bad @ n2
    assert fro_norm(lhs - rhs) <= 1e-13 * fro_norm(lhs)


def test_build_transform_rejects_shape_mismatch():
    space = SpaceDescriptor((3,))
    bad = ModelInstance(
        name="bad",
        space=space,
        h1=np.eye(3, dtype=np.complex128),
        x=np.eye(4, dtype=np.complex128),
        margin=0,
    )
    with pytest.raises(ModelInvariantError):
        build_transform(bad)


# ---------------------------------------------------------------------------
# joint eigenbasis labeling


def test_joint_labels_for_nondegenerate_chain():
    model = make_model("boson", dim=5)
    n1, _, _ = build_transform(model)
    eig = joint_eigenbasis(model.h1, n1)
    assert eig.labels == tuple((n, 0) for n in range(5))
    np.testing.assert_allclose(eig.eps1, np.arange(5.0), atol=1e-13)
    # weights aa^dag: n + 1 below the edge, 0 at the top
    np.testing.assert_allclose(eig.nu, [1.0, 2.0, 3.0, 4.0, 0.0], atol=1e-13)
    assert eig.retained == tuple((n, 0) for n in range(4))


def test_joint_labels_for_degenerate_landau_clusters():
    model = make_model("landau-a", dim=3)
    n1, _, _ = build_transform(model)
    eig = joint_eigenbasis(model.h1, n1)
    # three clusters of three, eps1 = 1, 3, 5
    assert eig.labels == tuple((n, kappa) for n in range(3) for kappa in range(3))
    np.testing.assert_allclose(np.unique(eig.eps1), [1.0, 3.0, 5.0], atol=1e-13)
    # weights within each cluster ascend
    np.testing.assert_allclose(eig.nu[0:3], [0.0, 1.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(eig.nu[3:6], [0.0, 2.0, 4.0], atol=1e-12)
    np.testing.assert_allclose(eig.nu[6:9], [0.0, 0.0, 0.0], atol=1e-12)


def test_joint_eigenbasis_is_orthonormal_and_complete():
    model = make_model("quon", dim=8, k=1, q=0.0)
    n1, _, _ = build_transform(model)
    eig = joint_eigenbasis(model.h1, n1)
    V = eig.vectors
    np.testing.assert_allclose(adjoint(V) @ V, np.eye(8), atol=1e-12)
    np.testing.assert_allclose(V @ adjoint(V), np.eye(8), atol=1e-12)


def test_joint_eigenbasis_simultaneously_diagonalizes():
    model = make_model("landau-b", dim=4)
    n1, _, _ = build_transform(model)
    eig = joint_eigenbasis(model.h1, n1)
    V = eig.vectors
    np.testing.assert_allclose(adjoint(V) @ model.h1 @ V, np.diag(eig.eps1), atol=1e-12)
    np.testing.assert_allclose(adjoint(V) @ n1 @ V, np.diag(eig.nu), atol=1e-12)


def test_joint_eigenbasis_rejects_noncommuting_pair():
    h1 = np.diag([1.0, 2.0])
    n1 = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(CommutationError) as info:
        joint_eigenbasis(h1, n1)
    assert info.value.residual > 0.01


def test_joint_eigenbasis_is_deterministic():
    model = make_model("landau-a", dim=4)
    n1, _, _ = build_transform(model)
    first = joint_eigenbasis(model.h1, n1)
    second = joint_eigenbasis(model.h1, n1)
    assert first.labels == second.labels
    np.testing.assert_array_equal(first.vectors, second.vectors)
    np.testing.assert_array_equal(first.nu, second.nu)


def test_index_lookup_helpers():
    model = make_model("boson", dim=5)
    result = run_transform(model)
    eig = result.eigensystem
    assert eig.index_of((2, 0)) == 2
    np.testing.assert_allclose(eig.vector((2, 0)), basis_vector(5, 2), atol=1e-13)
    assert eig.retained_indices() == [0, 1, 2, 3]


# ---------------------------------------------------------------------------
# mapped family


def test_mapped_vacuum_carries_sqrt_factorial_weight():
    # two ladder steps send the vacuum to sqrt(2) * level 2
    model = make_model("boson", dim=8, k=2)
    result = run_transform(model)
    j = list(result.family.labels).index((0, 0))
    np.testing.assert_allclose(result.family.vectors[:, j], np.sqrt(2.0) * basis_vector(8, 2), atol=1e-12)


def test_partner_eigenvalue_is_product():
    # level 2 at k = 1: eps2 = eps1 * nu = 2 * 3
    model = make_model("boson", dim=8, k=1)
    result = run_transform(model)
    j = list(result.family.labels).index((2, 0))
    assert result.family.eps2[j] == pytest.approx(6.0, rel=1e-12)
    assert result.family.eps1[j] * result.family.nu[j] == pytest.approx(6.0, rel=1e-12)


def test_mapped_family_norms_equal_weights():
    model = make_model("quon", dim=8, k=2, q=0.7)
    result = run_transform(model)
    norms2 = np.real(np.sum(np.conj(result.family.vectors) * result.family.vectors, axis=0))
    np.testing.assert_allclose(norms2, result.family.nu, rtol=1e-12, atol=1e-14)


def test_swap_model_drops_exactly_the_raised_edge():
    # every cluster loses the state at the top of the plus mode
    model = make_model("landau-b", dim=4)
    result = run_transform(model)
    assert len(result.family.dropped) == 4
    for label in result.family.dropped:
        j = result.eigensystem.index_of(label)
        state = dominant_state(model, result.eigensystem, j)
        assert state[0] == 3

    # the kernel of x is spanned by the states with empty minus mode
    K = kernel_basis(model.x)
    assert K.shape[1] == 4
    expected = np.zeros((16, 16), dtype=np.complex128)
    for n_plus in range(4):
        idx = model.space.flat((n_plus, 0))
        expected[idx, idx] = 1.0
    np.testing.assert_allclose(K @ adjoint(K), expected, atol=1e-12)


def test_chain_model_drops_only_the_edge_labels():
    model = make_model("boson", dim=6, k=2)
    result = run_transform(model)
    assert result.family.dropped == ((4, 0), (5, 0))
    assert len(result.family.labels) == 4


def test_map_family_empty_when_everything_drops():
    # x = 0 maps every weight to zero
    model = make_model("boson", dim=4)
    zero = ModelInstance(
        name="zero",
        space=model.space,
        h1=model.h1,
        x=np.zeros((4, 4), dtype=np.complex128),
        margin=0,
    )
    n1, _, _ = build_transform(zero)
    eig = joint_eigenbasis(zero.h1, n1)
    family = map_family(zero.x, eig)
    assert family.vectors.shape == (4, 0)
    assert family.labels == ()
    assert len(family.dropped) == 4


# ---------------------------------------------------------------------------
# inverse map


def test_recovery_on_chain_level():
    # phi3 = (1/4) a (adjoint(a) phi3)
    model = make_model("boson", dim=8, k=1)
    result = run_transform(model)
    recovered = recover_f1(model.x, result.family)
    j = list(result.family.labels).index((3, 0))
    assert result.family.nu[j] == pytest.approx(4.0, rel=1e-12)
    np.testing.assert_allclose(recovered[:, j], basis_vector(8, 3), atol=1e-11)


def test_recovery_on_two_mode_level():
    model = make_model("landau-a", dim=5)
    result = run_transform(model)
    j = index_of_state(model, result.eigensystem, (1, 1))
    label = result.eigensystem.labels[j]
    fam_j = list(result.family.labels).index(label)
    assert result.family.nu[fam_j] == pytest.approx(4.0, rel=1e-12)
    recovered = recover_f1(model.x, result.family)
    np.testing.assert_allclose(
        recovered[:, fam_j], basis_vector(25, model.space.flat((1, 1))), atol=1e-11
    )


def test_recovery_exact_for_unitary_intertwiner():
    # a unitary x has all weights 1, so the map inverts without loss
    h1 = random_hermitian_matrix(6, seed=2)
    U = random_unitary(6, seed=3)
    model = ModelInstance(name="unitary", space=SpaceDescriptor((6,)), h1=h1, x=U, margin=0)
    result = run_transform(model)
    np.testing.assert_allclose(result.family.nu, np.ones(6), atol=1e-12)
    recovered = recover_f1(U, result.family)
    np.testing.assert_allclose(recovered, result.eigensystem.vectors, atol=1e-11)


def test_recovery_matches_full_suite():
    for name, kwargs in [
        ("boson", {"dim": 8, "k": 2}),
        ("quon", {"dim": 8, "k": 1, "q": 0.3}),
        ("landau-a", {"dim": 4}),
        ("landau-b", {"dim": 4}),
    ]:
        model = make_model(name, **kwargs)
        result = run_transform(model)
        recovered = recover_f1(model.x, result.family)
        for j, label in enumerate(result.family.labels):
            idx = result.eigensystem.index_of(label)
            err = np.linalg.norm(recovered[:, j] - result.eigensystem.vectors[:, idx])
            assert err <= 1e-9, (name, label, err)


def test_recover_rejects_nonpositive_weights():
    model = make_model("boson", dim=5)
    result = run_transform(model)
    broken = type(result.family)(
        labels=result.family.labels,
        vectors=result.family.vectors,
        eps1=result.family.eps1,
        nu=np.zeros_like(result.family.nu),
        eps2=result.family.eps2,
        dropped=result.family.dropped,
    )
    with pytest.raises(ValueError):
        recover_f1(model.x, broken)


# ---------------------------------------------------------------------------
# inverse-normalized contrast operator


def test_contrast_is_h1_for_commuting_invertible_intertwiner():
    model = make_invertible_model("boson", dim=8)
    contrast = tilde_h2(model.h1, model.x)
    np.testing.assert_allclose(contrast, model.h1, atol=1e-12)


def test_contrast_rejects_strict_lowering():
    a = boson_lowering(6)
    h1 = adjoint(a) @ a
    with pytest.raises(SingularOperatorError) as info:
        tilde_h2(h1, a)
    assert abs(info.value.min_eigenvalue) <= 1e-12


def test_contrast_keeps_spectrum_without_hermiticity():
    # x = a + 2 is invertible but does not commute with h1: the contrast
    # operator is a similarity (so isospectral) yet loses hermiticity
    dim = 8
    a = boson_lowering(dim)
    h1 = adjoint(a) @ a
    x = a + 2.0 * np.eye(dim, dtype=np.complex128)
    contrast = tilde_h2(h1, x)

    values = np.sort(np.real(np.linalg.eigvals(contrast)))
    np.testing.assert_allclose(values, np.arange(8.0), atol=1e-9)
    assert np.abs(np.imag(np.linalg.eigvals(contrast))).max() <= 1e-9

    similarity = np.linalg.solve(x, h1 @ x)
    assert fro_norm(contrast - similarity) <= 1e-10 * fro_norm(similarity)

    # defining contract: adjoint(x) (x tilde - h1 x) = 0
    defect = adjoint(x) @ (x @ contrast - h1 @ x)
    assert fro_norm(defect) <= 1e-10 * fro_norm(adjoint(x) @ h1 @ x)

    # hermiticity genuinely fails here, which is why the partner uses the
    # sandwiched form instead
    assert fro_norm(contrast - adjoint(contrast)) > 1e-3 * fro_norm(contrast)


def test_partner_spectrum_differs_from_contrast_spectrum():
    # same intertwiner: the sandwiched partner rescales eigenvalues by the
    # weights while the contrast merely relabels them
    model = make_invertible_model("boson", dim=6)
    _, _, h2 = build_transform(model)
    partner_values = np.sort(np.linalg.eigvalsh(h2))
    level1_values = np.sort(np.linalg.eigvalsh(model.h1))
    expected = np.sort(np.array([n * (n + 2.0) ** 2 for n in range(6)]))
    np.testing.assert_allclose(partner_values, expected, atol=1e-10)
    assert np.abs(partner_values - level1_values).max() > 100.0


# ---------------------------------------------------------------------------
# completeness surrogate


def test_completeness_defect_chain():
    model = make_model("boson", dim=7, k=2)
    result = run_transform(model)
    assert completeness_defect(model.x, result.family) == (2, 5, 7)


def test_completeness_defect_invertible():
    model = make_invertible_model("boson", dim=8)
    result = run_transform(model)
    assert completeness_defect(model.x, result.family) == (0, 8, 8)


def test_completeness_defect_swap_model():
    model = make_model("landau-b", dim=4)
    result = run_transform(model)
    assert completeness_defect(model.x, result.family) == (4, 12, 16)


def test_completeness_defect_double_lowering():
    model = make_model("landau-a", dim=4)
    result = run_transform(model)
    assert completeness_defect(model.x, result.family) == (7, 9, 16)


@pytest.mark.parametrize("seed", range(10))
def test_completeness_surrogate_for_random_intertwiners(seed):
    # the identity hamiltonian commutes with anything, so arbitrary x fits
    dim = 8
    rng = np.random.default_rng(seed)
    x = random_complex(dim, dim, seed)
    drop = seed % 3
    if drop:
        # plant an exact rank deficiency
        u, s, vh = np.linalg.svd(x)
        s[-drop:] = 0.0
        x = (u * s) @ vh
    model = ModelInstance(
        name="random",
        space=SpaceDescriptor((dim,)),
        h1=np.eye(dim, dtype=np.complex128),
        x=x,
        margin=0,
    )
    result = run_transform(model)
    kernel_dim, family_rank, space_dim = completeness_defect(x, result.family)
    assert kernel_dim == drop
    assert kernel_dim + family_rank == space_dim


# ---------------------------------------------------------------------------
# relation suite and report assembly


@pytest.mark.parametrize(
    "name,kwargs",
    [
        ("boson", {"dim": 8, "k": 1}),
        ("boson", {"dim": 8, "k": 3}),
        ("quon", {"dim": 8, "k": 2, "q": 0.5}),
        ("landau-a", {"dim": 4}),
        ("landau-b", {"dim": 4}),
    ],
)
def test_check_relations_passes_for_builtins(name, kwargs):
    model = make_model(name, **kwargs)
    report = check_relations(model)
    failed = [c.name for c in report.checks if not c.passed]
    assert report.overall_pass, failed


def test_check_relations_exact_for_diagonal_chain():
    model = make_model("boson", dim=6)
    report = check_relations(model)
    by_name = {c.name: c for c in report.checks}
    assert by_name["partner_commutes_with_n2"].residual == 0.0
    assert by_name["completeness_surrogate"].residual == 0.0
    assert "dim ker x = 1" in by_name["completeness_surrogate"].note


def test_eigen_table_covers_every_label():
    model = make_model("boson", dim=16)
    report = check_relations(model)
    assert len(report.eigen_table) == 16
    assert [row.n for row in report.eigen_table] == list(range(16))
    # the edge row is flagged out of margin with no oracle claim
    edge = report.eigen_table[-1]
    assert edge.in_safe_margin is False
    assert edge.eps2_oracle is None
    inside = report.eigen_table[3]
    assert inside.in_safe_margin is True
    assert inside.eps2_oracle == pytest.approx(inside.eps2, rel=1e-10)


def test_eigen_table_oracle_agreement_two_mode():
    model = make_model("landau-a", dim=4)
    report = check_relations(model)
    assert len(report.eigen_table) == 16
    checked = 0
    for row in report.eigen_table:
        if row.in_safe_margin:
            checked += 1
            assert row.eps2_oracle == pytest.approx(row.eps2, rel=1e-10, abs=1e-12)
    assert checked == 9  # 3 x 3 interior of the 4 x 4 grid


def test_contrast_check_branches_on_invertibility():
    singular = check_relations(make_model("boson", dim=6))
    names = {c.name for c in singular.checks}
    assert "contrast_inapplicable" in names
    assert "contrast_keeps_level1_spectrum" not in names

    invertible = check_relations(make_invertible_model("boson", dim=6))
    names = {c.name for c in invertible.checks}
    assert "contrast_keeps_level1_spectrum" in names
    assert "contrast_inapplicable" not in names
    assert invertible.overall_pass


def test_errata_attached_to_the_right_models():
    assert [e.name for e in check_relations(make_model("quon", dim=8)).errata] == [
        "quon-step-recurrence"
    ]
    assert [e.name for e in check_relations(make_model("landau-a", dim=4)).errata] == [
        "landau-double-raise-order"
    ]
    assert check_relations(make_model("boson", dim=8)).errata == ()
    assert check_relations(make_model("landau-b", dim=4)).errata == ()


def test_check_relations_reports_params_and_tolerances():
    tol = ToleranceConfig(residual_tol=1e-9)
    report = check_relations(make_model("boson", dim=6, k=2), tol=tol)
    assert report.params["dim"] == 6
    assert report.params["k"] == 2
    assert report.params["residual_tol"] == 1e-9
    by_name = {c.name: c for c in report.checks}
    assert by_name["partner_hermitian"].tolerance == 1e-9
    assert by_name["level1_recovery"].tolerance == 1e-8


# ---------------------------------------------------------------------------
# universal identities (hold for every x, commutation or not)


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=10**6))
def test_intertwining_identity_is_universal(dim, seed):
    x = random_complex(dim, dim, seed)
    n1 = x @ adjoint(x)
    n2 = adjoint(x) @ x
    lhs = n1 @ x
    rhs = x @ n2
    assert fro_norm(lhs - rhs) <= 1e-12 * max(fro_norm(lhs), fro_norm(rhs))


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=10**6))
def test_sandwich_hermiticity_is_universal(dim, seed):
    h1 = random_hermitian_matrix(dim, seed)
    x = random_complex(dim, dim, seed + 1)
    h2 = adjoint(x) @ h1 @ x
    assert fro_norm(h2 - adjoint(h2)) <= 1e-12 * max(fro_norm(h2), 1.0)


@given(st.integers(min_value=2, max_value=10), st.integers(min_value=0, max_value=10**6))
def test_full_relation_suite_for_commuting_polynomials(dim, seed):
    # h1 = p(M) and x = u(M) for hermitian M: [h1, x adjoint(x)] = 0 by
    # construction, so every partner relation must hold
    rng = np.random.default_rng(seed)
    M = random_hermitian_matrix(dim, seed)
    M = M / max(1.0, fro_norm(M))
    p = rng.standard_normal(3)
    u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    eye = np.eye(dim, dtype=np.complex128)
    h1 = p[0] * eye + p[1] * M + p[2] * (M @ M)
    x = u[0] * eye + u[1] * M + u[2] * (M @ M)

    xd = adjoint(x)
    n1 = x @ xd
    n2 = xd @ x
    h2 = xd @ h1 @ x
    bound = 1e-10

    def rel(lhs, rhs):
        scale = max(fro_norm(lhs), fro_norm(rhs), 1e-30)
        return fro_norm(lhs - rhs) / scale

    assert rel(h2, adjoint(h2)) <= bound
    assert rel(h2 @ n2, n2 @ h2) <= bound
    assert rel(n1 @ x, x @ n2) <= bound
    assert rel(h1 @ n1 @ x, x @ h2) <= bound
