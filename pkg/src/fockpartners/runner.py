"""Scenario catalogue and orchestration.

The catalogue is closed: the four oscillator families plus two
metric-dressed scenarios built on invertible commuting intertwiners.  A
scenario run always produces a CheckReport, never a stack trace: known
structural violations are converted into failing checks so the exit code
carries the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cryptoherm import (
    CryptoFamily,
    CryptoHermiticityError,
    KernelConditionError,
    MAX_METRIC_CONDITION,
    MetricConditionError,
    build_g1,
    build_g2,
    ddagger,
    frame_closed_form_evidence,
    intertwining_checks,
    level2_normalization_evidence,
    make_crypto_scenario,
)
from .linalg import HermiticityError, PositivityError, ToleranceConfig
from .models import make_invertible_model, make_model
from .report import CheckEntry, CheckReport, ErratumNote, RunConfig
from .transform import (
    CommutationError,
    ModelInvariantError,
    SingularOperatorError,
    check_relations,
    run_transform,
)

__all__ = [
    "ScenarioSpec",
    "CATALOGUE",
    "catalogue_names",
    "get_scenario",
    "resolve_config",
    "run_scenario",
    "verify_all",
]

MAX_SPACE_DIM = 512
MIN_MODE_DIM = 4


@dataclass(frozen=True)
class ScenarioSpec:
    """Catalogue entry: name, kind, defaults, and accepted parameters."""

    name: str
    kind: str
    base: str | None
    default_dim: int
    two_mode: bool
    params: tuple[str, ...]
    summary: str


CATALOGUE: tuple[ScenarioSpec, ...] = (
    ScenarioSpec(
        name="boson",
        kind="hermitian",
        base=None,
        default_dim=16,
        two_mode=False,
        params=("dim", "k"),
        summary="number hamiltonian with a k-step ladder intertwiner",
    ),
    ScenarioSpec(
        name="quon",
        kind="hermitian",
        base=None,
        default_dim=16,
        two_mode=False,
        params=("dim", "k", "q"),
        summary="q-deformed ladder family interpolating the boson case",
    ),
    ScenarioSpec(
        name="landau-a",
        kind="hermitian",
        base=None,
        default_dim=8,
        two_mode=True,
        params=("dim", "hbar_omega"),
        summary="two-mode Landau levels, double-lowering intertwiner",
    ),
    ScenarioSpec(
        name="landau-b",
        kind="hermitian",
        base=None,
        default_dim=8,
        two_mode=True,
        params=("dim", "hbar_omega"),
        summary="two-mode Landau levels, mode-swap intertwiner",
    ),
    ScenarioSpec(
        name="crypto-boson",
        kind="crypto",
        base="boson",
        default_dim=16,
        two_mode=False,
        params=("dim", "epsilon", "seed"),
        summary="metric-dressed number hamiltonian with invertible intertwiner",
    ),
    ScenarioSpec(
        name="crypto-landau",
        kind="crypto",
        base="landau",
        default_dim=4,
        two_mode=True,
        params=("dim", "epsilon", "seed", "hbar_omega"),
        summary="metric-dressed Landau levels with invertible intertwiner",
    ),
)

# criterion tolerances: crypto-hermiticity and hermitian counterparts at the
# base tolerance, everything that compounds factorizations at 10x
_G_TOL_MULTIPLIERS = {
    "crypto_hermitian_H": 1.0,
    "crypto_hermitian_N": 1.0,
    "eigen_H_Phi": 10.0,
    "eigen_N_Phi": 10.0,
    "eigen_Hdag_eta": 10.0,
    "eigen_Ndag_eta": 10.0,
    "biorthogonality": 10.0,
    "resolution_identity": 10.0,
    "frame_Phi_is_metric_inverse": 10.0,
    "frame_eta_is_metric": 10.0,
    "frame_duality": 10.0,
    "frame_sum_vs_closed": 10.0,
    "h_hermitian": 1.0,
    "n_hat_hermitian": 1.0,
    "phi_orthonormal": 10.0,
    "eps_product_law": 10.0,
    "spectrum_real": 10.0,
    "riesz_sandwich": 10.0,
}


def catalogue_names() -> tuple[str, ...]:
    return tuple(spec.name for spec in CATALOGUE)


def get_scenario(name: str) -> ScenarioSpec:
    for spec in CATALOGUE:
        if spec.name == name:
            return spec
    raise ValueError(f"unknown scenario {name!r}; choose from {catalogue_names()}")


def resolve_config(cfg: RunConfig) -> RunConfig:
    """Fill defaults and validate every parameter for the scenario."""
    spec = get_scenario(cfg.scenario)
    dim = cfg.dim if cfg.dim is not None else spec.default_dim
    if not isinstance(dim, int) or dim < MIN_MODE_DIM:
        raise ValueError(f"dim must be an integer >= {MIN_MODE_DIM}, got {dim!r}")
    space_dim = dim * dim if spec.two_mode else dim
    if space_dim > MAX_SPACE_DIM:
        raise ValueError(
            f"dim {dim} gives a space of dimension {space_dim}, above the cap {MAX_SPACE_DIM}"
            + (" (two-mode scenarios square the per-mode size)" if spec.two_mode else "")
        )
    if "k" in spec.params and not 1 <= cfg.k <= dim - 1:
        raise ValueError(f"k must satisfy 1 <= k <= dim - 1, got k={cfg.k}, dim={dim}")
    if "q" in spec.params and not 0.0 <= cfg.q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {cfg.q!r}")
    if "epsilon" in spec.params and cfg.epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {cfg.epsilon!r}")
    if "seed" in spec.params and cfg.seed < 0:
        raise ValueError(f"seed must be nonnegative, got {cfg.seed!r}")
    if "hbar_omega" in spec.params and cfg.hbar_omega <= 0.0:
        raise ValueError(f"hbar_omega must be positive, got {cfg.hbar_omega!r}")
    # constructor validates positivity of the three tolerances
    ToleranceConfig(cfg.residual_tol, cfg.rank_tol, cfg.cluster_tol)
    return replace(cfg, dim=dim)


def _report_params(spec: ScenarioSpec, cfg: RunConfig) -> dict:
    params: dict = {}
    for name in spec.params:
        value = getattr(cfg, name)
        params[name] = int(value) if name in ("dim", "k", "seed") else float(value)
    params["residual_tol"] = float(cfg.residual_tol)
    params["rank_tol"] = float(cfg.rank_tol)
    params["cluster_tol"] = float(cfg.cluster_tol)
    return params


def _violation_value(err: Exception) -> float:
    for attr in ("residual", "condition", "min_eigenvalue", "kernel_dim"):
        value = getattr(err, attr, None)
        if value is not None:
            return float(value)
    return float("nan")


_STRUCTURAL_ERRORS = (
    ModelInvariantError,
    CommutationError,
    SingularOperatorError,
    CryptoHermiticityError,
    KernelConditionError,
    MetricConditionError,
    HermiticityError,
    PositivityError,
)


def run_scenario(cfg: RunConfig) -> CheckReport:
    """Execute one catalogue scenario and assemble its report.

    Invalid configurations raise ValueError (a usage error); structural
    violations inside the pipeline are reported as failing checks.
    """
    cfg = resolve_config(cfg)
    spec = get_scenario(cfg.scenario)
    tol = ToleranceConfig(cfg.residual_tol, cfg.rank_tol, cfg.cluster_tol)
    params = _report_params(spec, cfg)
    try:
        if spec.kind == "hermitian":
            return _run_hermitian(spec, cfg, tol, params)
        return _run_crypto(spec, cfg, tol, params)
    except _STRUCTURAL_ERRORS as err:
        entry = CheckEntry(
            name="internal_invariant",
            residual=_violation_value(err),
            tolerance=tol.residual_tol,
            passed=False,
            note=f"{type(err).__name__}: {err}",
        )
        return CheckReport(
            scenario=spec.name,
            params=params,
            checks=(entry,),
            eigen_table=(),
            errata=(),
        )


def _run_hermitian(spec: ScenarioSpec, cfg: RunConfig, tol: ToleranceConfig, params: dict) -> CheckReport:
    model = make_model(spec.name, dim=cfg.dim, k=cfg.k, q=cfg.q, hbar_omega=cfg.hbar_omega)
    result = run_transform(model, tol)
    return check_relations(model, result, tol, scenario=spec.name, params=params)


def _family_entries(family: CryptoFamily, prefix: str, tol: ToleranceConfig) -> list[CheckEntry]:
    entries = []
    for name, residual in family.residuals.items():
        bound = _G_TOL_MULTIPLIERS.get(name, 10.0) * tol.residual_tol
        entries.append(
            CheckEntry(
                name=f"{prefix}_{name}",
                residual=float(residual),
                tolerance=bound,
                passed=float(residual) <= bound,
                note="",
            )
        )
    return entries


def _run_crypto(spec: ScenarioSpec, cfg: RunConfig, tol: ToleranceConfig, params: dict) -> CheckReport:
    base = make_invertible_model(spec.base, dim=cfg.dim, hbar_omega=cfg.hbar_omega)
    base_result = run_transform(base, tol)
    base_report = check_relations(base, base_result, tol, scenario=spec.name, params=params)

    H1, X, m = make_crypto_scenario(base, cfg.epsilon, cfg.seed, tol)
    N1 = X @ ddagger(X, m)
    g1 = build_g1(H1, N1, m, tol)
    g2 = build_g2(H1, X, m, tol, g1=g1)
    inter = intertwining_checks(g1, g2, tol, scenario=spec.name)

    checks = list(base_report.checks)
    checks.append(
        CheckEntry(
            name="metric_condition",
            residual=float(m.condition),
            tolerance=MAX_METRIC_CONDITION,
            passed=float(m.condition) <= MAX_METRIC_CONDITION,
            note="condition number of the scenario metric",
        )
    )
    checks.extend(_family_entries(g1, "g1", tol))
    checks.extend(_family_entries(g2, "g2", tol))
    checks.extend(inter.checks)
    checks.append(
        CheckEntry(
            name="g2_gram_spectrum",
            residual=0.0,
            tolerance=0.0,
            passed=True,
            note=(
                f"gram spectrum of the level-2 Phi family in "
                f"[{g2.gram_bounds[0]!r}, {g2.gram_bounds[1]!r}]; Riesz status reported, not asserted"
            ),
        )
    )

    if cfg.epsilon == 0.0:
        degeneration = max(
            float(np.abs(H1 - base.h1).max()),
            float(np.abs(X - base.x).max()),
            float(np.abs(g1.Phi - base_result.eigensystem.vectors).max()),
            float(np.abs(g1.S_Phi - np.eye(base.space.dim)).max()),
            float(np.abs(g2.H - base_result.h2).max()),
            float(np.abs(g2.Phi - base_result.family.vectors).max()),
        )
        bound = 0.01 * tol.residual_tol
        checks.append(
            CheckEntry(
                name="hermitian_degeneration",
                residual=degeneration,
                tolerance=bound,
                passed=degeneration <= bound,
                note="zero deformation reproduces the hermitian pipeline entry-wise",
            )
        )

    errata = list(base_report.errata)
    errata.extend(_crypto_errata(base, cfg, g1, g2, X, m, tol))

    return CheckReport(
        scenario=spec.name,
        params=params,
        checks=tuple(checks),
        eigen_table=base_report.eigen_table,
        errata=tuple(errata),
    )


def _crypto_errata(base, cfg: RunConfig, g1, g2, X, m, tol: ToleranceConfig) -> list[ErratumNote]:
    """Evidence for the two metric-level discrepancies.

    The frame-dressing discrepancy is vacuous at the identity metric, so
    zero-deformation runs evaluate both notes at a reference deformation
    to keep the evidence informative.
    """
    epsilon = cfg.epsilon
    if epsilon == 0.0:
        epsilon = 0.2
        H1e, Xe, me = make_crypto_scenario(base, epsilon, cfg.seed, tol)
        N1e = Xe @ ddagger(Xe, me)
        g1e = build_g1(H1e, N1e, me, tol)
        g2e = build_g2(H1e, Xe, me, tol, g1=g1e)
    else:
        Xe, me, g1e, g2e = X, m, g1, g2

    norm_ev = level2_normalization_evidence(g1e, g2e)
    frame_ev = frame_closed_form_evidence(Xe, me, g2e.S_Phi)
    return [
        ErratumNote(
            name="level2-orthonormal-family",
            note=(
                "The published definition whitens the level-1 vectors "
                "(S^(-1/2) phi1) instead of the mapped family (S^(-1/2) Phi2); "
                "only the latter has an identity gram matrix.  Evidence at "
                f"epsilon={epsilon}, seed={cfg.seed}."
            ),
            published_residual=norm_ev["published_residual"],
            adopted_residual=norm_ev["adopted_residual"],
        ),
        ErratumNote(
            name="frame-closed-form-dressing",
            note=(
                "The published re-expression of the level-2 frame operator dresses "
                "the intertwiner symmetrically (theta^(1/2) X theta^(1/2)); matching "
                "the rank-one sum requires the similarity dressing "
                "(theta^(1/2) X theta^(-1/2)).  Evidence at "
                f"epsilon={epsilon}, seed={cfg.seed}."
            ),
            published_residual=frame_ev["published_residual"],
            adopted_residual=frame_ev["adopted_residual"],
        ),
    ]


def verify_all(
    residual_tol: float = 1e-10,
    rank_tol: float = 1e-10,
    cluster_tol: float = 1e-8,
) -> list[tuple[str, CheckReport]]:
    """Run every catalogue scenario at default parameters, in order."""
    results = []
    for spec in CATALOGUE:
        cfg = RunConfig(
            scenario=spec.name,
            residual_tol=residual_tol,
            rank_tol=rank_tol,
            cluster_tol=cluster_tol,
        )
        results.append((spec.name, run_scenario(cfg)))
    return results
