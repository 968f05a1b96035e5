"""Partner-hamiltonian engine.

Given a hermitian ``h1`` and an intertwiner ``x`` with ``[h1, x x^dag] = 0``,
the sandwiched operator ``h2 = x^dag h1 x`` is hermitian, commutes with
``N2 = x^dag x``, and its eigenvalues on the mapped family are the products
``eps1 * nu`` of level-1 eigenvalues with the mapping weights ``nu`` (the
joint eigenvalues of ``N1 = x x^dag``).  The map is not a similarity: labels
whose weight vanishes drop out, so the partner spectrum is genuinely
rescaled, not a relabeling of the original one.

This module builds the partner triple, labels the joint eigensystem,
pushes the eigenbasis through ``x^dag``, inverts the map on the retained
labels, exposes the inverse-normalized contrast operator (the earlier
construction that merely relabels the spectrum), and verifies the whole
chain into a CheckReport.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    adjoint,
    as_cmat,
    fro_norm,
    gram,
    hermitian_eig,
    kernel_basis,
    rank_of,
    _fix_phases,
)
from .models import ModelInstance, landau_map_order_evidence, quon_recurrence_evidence
from .report import CheckEntry, CheckReport, EigenRow, ErratumNote

__all__ = [
    "ModelInvariantError",
    "CommutationError",
    "SingularOperatorError",
    "LabeledEigensystem",
    "MappedFamily",
    "TransformResult",
    "build_transform",
    "joint_eigenbasis",
    "map_family",
    "recover_f1",
    "tilde_h2",
    "completeness_defect",
    "run_transform",
    "check_relations",
]

Label = tuple[int, int]


class ModelInvariantError(ValueError):
    """The input model violates a structural precondition."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


class CommutationError(ValueError):
    """Two operators expected to commute do not."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


class SingularOperatorError(ValueError):
    """An inverse was requested of a numerically singular operator."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(f"{message} (smallest eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True, eq=False)
class LabeledEigensystem:
    """Joint eigenbasis of (h1, N1) with labels (n, kappa).

    ``n`` indexes level-1 eigenvalue clusters in ascending order, ``kappa``
    the members within a cluster in ascending mapping weight.  ``labels``,
    ``eps1``, ``nu`` and the columns of ``vectors`` are aligned.
    ``retained`` lists the labels whose weight clears the rank threshold;
    only those survive the push through the intertwiner.
    """

    labels: tuple[Label, ...]
    eps1: np.ndarray
    nu: np.ndarray
    vectors: np.ndarray
    retained: tuple[Label, ...]

    def index_of(self, label: Label) -> int:
        return self.labels.index(label)

    def vector(self, label: Label) -> np.ndarray:
        return self.vectors[:, self.index_of(label)]

    def retained_indices(self) -> list[int]:
        return [self.labels.index(label) for label in self.retained]


@dataclass(frozen=True, eq=False)
class MappedFamily:
    """Level-2 family x^dag phi over the retained labels.

    Columns are unnormalized: the squared norm of each column equals its
    mapping weight ``nu``.  ``eps2`` carries the partner eigenvalues
    ``eps1 * nu``.  ``dropped`` lists the labels that fell out of the map.
    """

    labels: tuple[Label, ...]
    vectors: np.ndarray
    eps1: np.ndarray
    nu: np.ndarray
    eps2: np.ndarray
    dropped: tuple[Label, ...]


@dataclass(frozen=True, eq=False)
class TransformResult:
    """Everything the partner construction produces for one model."""

    model: ModelInstance
    n1: np.ndarray
    n2: np.ndarray
    h2: np.ndarray
    eigensystem: LabeledEigensystem
    family: MappedFamily


def build_transform(model: ModelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(N1, N2, h2) for a model, after validating its preconditions."""
    h1 = as_cmat(model.h1)
    x = as_cmat(model.x)
    if h1.shape != x.shape or h1.shape[0] != h1.shape[1]:
        raise ModelInvariantError("h1 and x must be square and equal-sized", float("inf"))
    herm = model.hermiticity_residual()
    if herm > tol.residual_tol:
        raise ModelInvariantError("model h1 is not hermitian", herm)
    comm = model.commutation_residual()
    if comm > tol.residual_tol:
        raise ModelInvariantError("model violates [h1, x x^dag] = 0", comm)
    xd = adjoint(x)
    n1 = x @ xd
    n2 = xd @ x
    h2 = xd @ h1 @ x
    return n1, n2, h2


def joint_eigenbasis(h1, n1, tol: ToleranceConfig = DEFAULT_TOL) -> LabeledEigensystem:
    """Simultaneous eigenbasis of a commuting hermitian pair, labeled.

    Level-1 eigenvalues are clustered with a relative gap of
    ``cluster_tol``; within each cluster the compression of ``n1`` is
    diagonalized, members are sorted by ascending weight, and exact weight
    ties are ordered by the dominant basis coefficient so the labeling is
    reproducible.
    """
    h1 = as_cmat(h1)
    n1 = as_cmat(n1)
    lhs = h1 @ n1
    rhs = n1 @ h1
    scale = max(fro_norm(lhs), fro_norm(rhs))
    residual = fro_norm(lhs - rhs)
    if residual > tol.residual_tol * scale:
        raise CommutationError("h1 and N1 do not commute", residual / scale if scale else residual)

    base = hermitian_eig(h1, tol)
    w = base.values
    V = base.vectors
    dim = w.shape[0]

    w_scale = float(np.abs(w).max()) if dim else 0.0
    gap = tol.cluster_tol * (w_scale if w_scale > 0 else 1.0)
    boundaries = [0]
    for i in range(1, dim):
        if w[i] - w[i - 1] > gap:
            boundaries.append(i)
    boundaries.append(dim)

    labels: list[Label] = []
    eps1_list: list[float] = []
    nu_list: list[float] = []
    columns: list[np.ndarray] = []
    for n, (lo, hi) in enumerate(zip(boundaries[:-1], boundaries[1:])):
        Vc = V[:, lo:hi]
        C = np.conj(Vc).T @ n1 @ Vc
        C = (C + np.conj(C).T) / 2.0
        nu_c, W = np.linalg.eigh(C)
        block = _fix_phases(Vc @ W)
        order = _tiebreak_order(nu_c, block, tol)
        nu_c = nu_c[order]
        block = block[:, order]
        eps_value = float(np.mean(w[lo:hi]))
        for kappa in range(hi - lo):
            labels.append((n, kappa))
            eps1_list.append(eps_value)
            nu_list.append(float(nu_c[kappa]))
            columns.append(block[:, kappa])

    nu_arr = np.asarray(nu_list, dtype=np.float64)
    nu_max = float(nu_arr.max()) if nu_arr.size else 0.0
    threshold = tol.rank_tol * nu_max
    retained = tuple(lab for lab, nu in zip(labels, nu_arr) if nu > threshold)

    return LabeledEigensystem(
        labels=tuple(labels),
        eps1=np.asarray(eps1_list, dtype=np.float64),
        nu=nu_arr,
        vectors=np.column_stack(columns),
        retained=retained,
    )


def _tiebreak_order(nu_values: np.ndarray, block: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Stable order for a cluster: ascending weight, ties by dominant index."""
    count = nu_values.shape[0]
    scale = float(np.abs(nu_values).max()) if count else 0.0
    gap = tol.cluster_tol * (scale if scale > 0 else 1.0)
    order = np.arange(count)
    start = 0
    for i in range(1, count + 1):
        if i == count or nu_values[i] - nu_values[i - 1] > gap:
            if i - start > 1:
                run = order[start:i]
                dominant = [int(np.argmax(np.abs(block[:, j]))) for j in run]
                order[start:i] = run[np.argsort(dominant, kind="stable")]
            start = i
    return order


def map_family(x, eigensystem: LabeledEigensystem, tol: ToleranceConfig = DEFAULT_TOL) -> MappedFamily:
    """Push the level-1 eigenbasis through x^dag, dropping null weights."""
    x = as_cmat(x)
    keep = eigensystem.retained_indices()
    dropped = tuple(lab for lab in eigensystem.labels if lab not in set(eigensystem.retained))
    if keep:
        vectors = adjoint(x) @ eigensystem.vectors[:, keep]
        eps1 = eigensystem.eps1[keep]
        nu = eigensystem.nu[keep]
    else:
        vectors = np.zeros((x.shape[1], 0), dtype=np.complex128)
        eps1 = np.zeros(0, dtype=np.float64)
        nu = np.zeros(0, dtype=np.float64)
    return MappedFamily(
        labels=eigensystem.retained,
        vectors=vectors,
        eps1=eps1,
        nu=nu,
        eps2=eps1 * nu,
        dropped=dropped,
    )


def recover_f1(x, family: MappedFamily) -> np.ndarray:
    """Invert the map on the retained labels: phi1 = (1/nu) x phi2.

    Returns the recovered unit vectors as columns aligned with
    ``family.labels``.  Raises on nonpositive weights, which cannot be
    inverted.
    """
    x = as_cmat(x)
    if family.nu.size and float(family.nu.min()) <= 0.0:
        raise ValueError("cannot invert the map: a retained label has nonpositive weight")
    if family.vectors.shape[1] == 0:
        return np.zeros((x.shape[0], 0), dtype=np.complex128)
    return (x @ family.vectors) / family.nu[np.newaxis, :]


def tilde_h2(h1, x, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Inverse-normalized partner (x^dag x)^(-1) x^dag h1 x.

    This is the earlier construction that keeps the level-1 spectrum
    instead of rescaling it; it only exists when ``x^dag x`` is
    invertible, so strict ladder powers are rejected.  Hermiticity of the
    result again needs ``[h1, x x^dag] = 0``.
    """
    h1 = as_cmat(h1)
    x = as_cmat(x)
    n2 = adjoint(x) @ x
    eig = hermitian_eig(n2, tol)
    scale = float(np.abs(eig.values).max()) if eig.values.size else 0.0
    smallest = float(eig.values[0])
    if smallest <= tol.rank_tol * scale:
        raise SingularOperatorError(
            "x^dag x admits no inverse; the inverse-normalized partner is undefined", smallest
        )
    return np.linalg.solve(n2, adjoint(x) @ h1 @ x)


def completeness_defect(x, family: MappedFamily, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[int, int, int]:
    """(dim ker x, rank of the mapped family, space dimension).

    On a finite space the mapped family is complete exactly when the
    intertwiner has no kernel; in general its rank plus the kernel
    dimension adds up to the dimension.
    """
    x = as_cmat(x)
    kernel_dim = kernel_basis(x, tol).shape[1]
    if family.vectors.shape[1] == 0:
        family_rank = 0
    else:
        family_rank = rank_of(family.vectors, tol)
    return kernel_dim, family_rank, x.shape[0]


def run_transform(model: ModelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> TransformResult:
    """Full pipeline: validate, build, label, and map one model."""
    n1, n2, h2 = build_transform(model, tol)
    eigensystem = joint_eigenbasis(model.h1, n1, tol)
    family = map_family(model.x, eigensystem, tol)
    return TransformResult(model=model, n1=n1, n2=n2, h2=h2, eigensystem=eigensystem, family=family)


def _rel(residual: float, scale: float) -> float:
    return residual / scale if scale > 0 else residual


def _identity_check(name: str, lhs: np.ndarray, rhs: np.ndarray, tolerance: float, note: str = "") -> CheckEntry:
    scale = max(fro_norm(lhs), fro_norm(rhs))
    residual = _rel(fro_norm(lhs - rhs), scale)
    return CheckEntry(name=name, residual=residual, tolerance=tolerance, passed=residual <= tolerance, note=note)


def _family_eigen_residual(op: np.ndarray, vectors: np.ndarray, values: np.ndarray) -> float:
    """Largest relative eigen-residual of op over a family of columns."""
    if vectors.shape[1] == 0:
        return 0.0
    op_scale = fro_norm(op)
    worst = 0.0
    for j in range(vectors.shape[1]):
        v = vectors[:, j]
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            continue
        res = float(np.linalg.norm(op @ v - values[j] * v))
        scale = max(op_scale * norm, abs(values[j]) * norm)
        worst = max(worst, _rel(res, scale))
    return worst


def _eigen_table(model: ModelInstance, result: TransformResult) -> tuple[EigenRow, ...]:
    """One row per joint label, dropped truncation edges included."""
    eigensystem = result.eigensystem
    rows = []
    for j, label in enumerate(eigensystem.labels):
        column = eigensystem.vectors[:, j]
        state = model.space.unflat(int(np.argmax(np.abs(column))))
        in_margin = bool(model.oracles.in_margin(state)) if model.oracles else False
        oracle: float | None = None
        if model.oracles is not None and in_margin:
            oracle = float(model.oracles.eps2(state))
        rows.append(
            EigenRow(
                n=label[0],
                kappa=label[1],
                state=state,
                eps1=float(eigensystem.eps1[j]),
                nu=float(eigensystem.nu[j]),
                eps2=float(eigensystem.eps1[j] * eigensystem.nu[j]),
                eps2_oracle=oracle,
                in_safe_margin=in_margin,
            )
        )
    return tuple(rows)


def _model_errata(model: ModelInstance) -> tuple[ErratumNote, ...]:
    if model.name == "quon":
        ev = quon_recurrence_evidence()
        return (
            ErratumNote(
                name="quon-step-recurrence",
                note=(
                    "The published k-step weight recurrence multiplies by "
                    "(q^(k+1) eps_n + eps_(n+1)); the matrix oracle and the q -> 1 "
                    "factorial limit require eps_(k+1) instead.  Evidence at "
                    f"q={ev['q']}, n={ev['n']}, k={ev['k']}: matrix weight {ev['matrix_value']}, "
                    f"published form {ev['published_value']}, adopted form {ev['adopted_value']}."
                ),
                published_residual=ev["published_gap"],
                adopted_residual=ev["adopted_gap"],
            ),
        )
    if model.name == "landau-a":
        ev = landau_map_order_evidence(min(model.space.mode_dims[0], 6))
        return (
            ErratumNote(
                name="landau-double-raise-order",
                note=(
                    "The published mapped state swaps the two mode labels; applying "
                    "x^dag to the state (0,1) lands on (1,2), not (2,1), with weight "
                    "sqrt(2).  Residuals of both candidate orders are reported."
                ),
                published_residual=ev["published_residual"],
                adopted_residual=ev["adopted_residual"],
            ),
        )
    return ()


def check_relations(
    model: ModelInstance,
    result: TransformResult | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    *,
    scenario: str | None = None,
    params: dict | None = None,
) -> CheckReport:
    """Verify the full relation suite for one model and report it.

    All residuals are relative; the per-check tolerances are the base
    ``residual_tol`` or its documented multiples (10x for the gram,
    recovery, and contrast checks, which compound two factorizations).
    """
    if result is None:
        result = run_transform(model, tol)
    h1, x = model.h1, model.x
    n1, n2, h2 = result.n1, result.n2, result.h2
    eigensystem, family = result.eigensystem, result.family
    base_tol = tol.residual_tol
    loose_tol = 10.0 * tol.residual_tol
    dim = model.space.dim
    eye = np.eye(dim, dtype=np.complex128)

    checks: list[CheckEntry] = []
    checks.append(_identity_check("model_h1_hermitian", h1, adjoint(h1), base_tol))
    checks.append(_identity_check("model_h1_n1_commute", h1 @ n1, n1 @ h1, base_tol, note="partner precondition"))
    checks.append(_identity_check("partner_hermitian", h2, adjoint(h2), base_tol))
    checks.append(_identity_check("partner_commutes_with_n2", h2 @ n2, n2 @ h2, base_tol))
    checks.append(_identity_check("intertwine_n1_x", n1 @ x, x @ n2, base_tol))
    checks.append(_identity_check("intertwine_h1_n1_x", h1 @ n1 @ x, x @ h2, base_tol))

    V = eigensystem.vectors
    checks.append(_identity_check("level1_orthonormal", gram(V), eye, base_tol))
    checks.append(_identity_check("level1_closure", V @ adjoint(V), eye, base_tol))
    res_joint_h1 = _family_eigen_residual(h1, V, eigensystem.eps1)
    checks.append(
        CheckEntry(
            name="level1_joint_h1",
            residual=res_joint_h1,
            tolerance=base_tol,
            passed=res_joint_h1 <= base_tol,
            note="max over all labels",
        )
    )
    res_joint_n1 = _family_eigen_residual(n1, V, eigensystem.nu)
    checks.append(
        CheckEntry(
            name="level1_joint_n1",
            residual=res_joint_n1,
            tolerance=base_tol,
            passed=res_joint_n1 <= base_tol,
            note="max over all labels",
        )
    )

    res_h2 = _family_eigen_residual(h2, family.vectors, family.eps2)
    checks.append(
        CheckEntry(
            name="level2_eigen_h2",
            residual=res_h2,
            tolerance=base_tol,
            passed=res_h2 <= base_tol,
            note="max over retained labels",
        )
    )
    res_n2 = _family_eigen_residual(n2, family.vectors, family.nu)
    checks.append(
        CheckEntry(
            name="level2_eigen_n2",
            residual=res_n2,
            tolerance=base_tol,
            passed=res_n2 <= base_tol,
            note="max over retained labels",
        )
    )

    if family.vectors.shape[1]:
        G = gram(family.vectors)
        nu_scale = float(family.nu.max()) if family.nu.size else 1.0
        gram_res = _rel(fro_norm(G - np.diag(family.nu)), max(nu_scale, 1e-300))
    else:
        gram_res = 0.0
    checks.append(
        CheckEntry(
            name="level2_gram_diagonal",
            residual=gram_res,
            tolerance=loose_tol,
            passed=gram_res <= loose_tol,
            note="squared norms equal the mapping weights",
        )
    )

    eps_res = 0.0
    for j in range(family.vectors.shape[1]):
        v = family.vectors[:, j]
        nrm2 = float(np.real(np.vdot(v, v)))
        if nrm2 == 0.0:
            continue
        rayleigh = float(np.real(np.vdot(v, h2 @ v)) / nrm2)
        eps_res = max(eps_res, abs(rayleigh - family.eps1[j] * family.nu[j]) / max(abs(family.eps2[j]), 1.0))
    checks.append(
        CheckEntry(
            name="level2_product_law",
            residual=eps_res,
            tolerance=base_tol,
            passed=eps_res <= base_tol,
            note="Rayleigh quotient vs eps1*nu, max over retained labels",
        )
    )

    if model.oracles is not None:
        oracle_res = 0.0
        counted = 0
        for j, label in enumerate(family.labels):
            column = eigensystem.vector(label)
            state = model.space.unflat(int(np.argmax(np.abs(column))))
            if not model.oracles.in_margin(state):
                continue
            counted += 1
            expected = float(model.oracles.eps2(state))
            oracle_res = max(oracle_res, abs(float(family.eps2[j]) - expected) / max(abs(expected), 1.0))
        checks.append(
            CheckEntry(
                name="level2_oracle_match",
                residual=oracle_res,
                tolerance=base_tol,
                passed=oracle_res <= base_tol,
                note=f"closed form over {counted} in-margin labels",
            )
        )

    recovered = recover_f1(x, family)
    rec_res = 0.0
    for j in range(recovered.shape[1]):
        idx = eigensystem.index_of(family.labels[j])
        rec_res = max(rec_res, float(np.linalg.norm(recovered[:, j] - eigensystem.vectors[:, idx])))
    checks.append(
        CheckEntry(
            name="level1_recovery",
            residual=rec_res,
            tolerance=loose_tol,
            passed=rec_res <= loose_tol,
            note="inverse map (1/nu) x phi2 returns the unit level-1 vectors",
        )
    )

    kernel_dim, family_rank, space_dim = completeness_defect(x, family, tol)
    surrogate_gap = float(abs(kernel_dim + family_rank - space_dim))
    checks.append(
        CheckEntry(
            name="completeness_surrogate",
            residual=surrogate_gap,
            tolerance=0.0,
            passed=surrogate_gap <= 0.0,
            note=f"dim ker x = {kernel_dim}, rank of mapped family = {family_rank}, dim = {space_dim}",
        )
    )

    try:
        contrast = tilde_h2(h1, x, tol)
    except SingularOperatorError as err:
        n2_scale = fro_norm(n2)
        res = _rel(abs(err.min_eigenvalue), max(n2_scale, 1e-300))
        checks.append(
            CheckEntry(
                name="contrast_inapplicable",
                residual=res,
                tolerance=tol.rank_tol,
                passed=res <= tol.rank_tol,
                note="inverse-normalized variant undefined: x^dag x is singular, as expected for strict lowering maps",
            )
        )
    else:
        keep = eigensystem.retained_indices()
        mapped = adjoint(x) @ eigensystem.vectors[:, keep]
        res = _family_eigen_residual(contrast, mapped, eigensystem.eps1[keep])
        checks.append(
            CheckEntry(
                name="contrast_keeps_level1_spectrum",
                residual=res,
                tolerance=loose_tol,
                passed=res <= loose_tol,
                note="inverse-normalized variant relabels instead of rescaling",
            )
        )

    report_params = dict(params) if params is not None else dict(model.params)
    report_params.setdefault("residual_tol", tol.residual_tol)
    report_params.setdefault("rank_tol", tol.rank_tol)
    report_params.setdefault("cluster_tol", tol.cluster_tol)

    return CheckReport(
        scenario=scenario or model.name,
        params=report_params,
        checks=tuple(checks),
        eigen_table=_eigen_table(model, result),
        errata=_model_errata(model),
    )
