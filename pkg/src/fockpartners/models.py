"""Truncated matrix realizations of the oscillator families.

Every model lives on a finite Fock-type space: a single chain of number
states for the boson and quon families, or a two-mode grid for the
Landau-level families.  A model bundles a hermitian hamiltonian ``h1``,
the intertwiner ``x`` that generates its partner, closed-form oracles for
the expected spectra, and the safe truncation margin inside which those
oracles are exact.

Two-mode states are flattened as ``n_plus * dim_minus + n_minus``; all
labels are tuples, ``(n,)`` for one mode and ``(n_plus, n_minus)`` for
two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .linalg import adjoint, fro_norm

__all__ = [
    "SCENARIO_MODELS",
    "SpaceDescriptor",
    "Oracles",
    "ModelInstance",
    "boson_lowering",
    "quon_eps",
    "quon_lowering",
    "quon_nu",
    "quon_nu_published",
    "two_mode_ops",
    "swap_j",
    "make_model",
    "make_invertible_model",
    "quon_recurrence_evidence",
    "landau_map_order_evidence",
]

SCENARIO_MODELS = ("boson", "quon", "landau-a", "landau-b")

Label = tuple[int, ...]


@dataclass(frozen=True)
class SpaceDescriptor:
    """Shape of a truncated Fock-type space.

    ``mode_dims`` holds the per-mode truncation sizes; the total dimension
    is their product.
    """

    mode_dims: tuple[int, ...]

    def __post_init__(self):
        if not self.mode_dims or any(d < 1 for d in self.mode_dims):
            raise ValueError(f"mode dimensions must be positive, got {self.mode_dims!r}")

    @property
    def dim(self) -> int:
        out = 1
        for d in self.mode_dims:
            out *= d
        return out

    @property
    def modes(self) -> int:
        return len(self.mode_dims)

    def flat(self, label: Label) -> int:
        """Flattened basis index of a label, last mode varying fastest."""
        if len(label) != self.modes:
            raise ValueError(f"label {label!r} has wrong arity for {self.mode_dims!r}")
        idx = 0
        for n, d in zip(label, self.mode_dims):
            if not 0 <= n < d:
                raise ValueError(f"label {label!r} outside the truncation {self.mode_dims!r}")
            idx = idx * d + n
        return idx

    def unflat(self, index: int) -> Label:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside dimension {self.dim}")
        out = []
        for d in reversed(self.mode_dims):
            out.append(index % d)
            index //= d
        return tuple(reversed(out))

    def labels(self) -> Iterator[Label]:
        for i in range(self.dim):
            yield self.unflat(i)


@dataclass(frozen=True)
class Oracles:
    """Closed-form expectations for a model's labeled spectra.

    Each callable takes a state label.  ``in_margin`` marks the labels far
    enough from the truncation edge that the infinite-space formulas are
    exact on the finite matrices.
    """

    eps1: Callable[[Label], float]
    nu: Callable[[Label], float]
    eps2: Callable[[Label], float]
    in_margin: Callable[[Label], bool]


@dataclass(frozen=True, eq=False)
class ModelInstance:
    """A concrete (h1, x) pair on a truncated space, with its oracles."""

    name: str
    space: SpaceDescriptor
    h1: np.ndarray
    x: np.ndarray
    margin: int
    params: dict = field(default_factory=dict)
    oracles: Oracles | None = None

    def hermiticity_residual(self) -> float:
        """Relative residual of h1 against its adjoint."""
        scale = fro_norm(self.h1)
        if scale == 0.0:
            return 0.0
        return fro_norm(self.h1 - adjoint(self.h1)) / scale

    def commutation_residual(self) -> float:
        """Relative residual of [h1, x x^dag], the partner precondition."""
        n1 = self.x @ adjoint(self.x)
        lhs = self.h1 @ n1
        rhs = n1 @ self.h1
        scale = max(fro_norm(lhs), fro_norm(rhs))
        if scale == 0.0:
            return 0.0
        return fro_norm(lhs - rhs) / scale


def boson_lowering(dim: int) -> np.ndarray:
    """Standard lowering operator: entry (n-1, n) equals sqrt(n)."""
    if dim < 2:
        raise ValueError(f"need dim >= 2 for a ladder, got {dim}")
    a = np.zeros((dim, dim), dtype=np.complex128)
    ns = np.arange(1, dim)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def quon_eps(n: int, q: float) -> float:
    """Deformed level value eps_n = 1 + q + ... + q^(n-1); eps_0 = 0."""
    if n < 0:
        raise ValueError(f"level must be nonnegative, got {n}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"deformation parameter must lie in [0, 1], got {q!r}")
    return float(np.sum(q ** np.arange(n)))


def quon_lowering(dim: int, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Deformed lowering operator and its coefficient vector.

    Returns (B, beta) with B maps state n to beta[n-1] * state (n-1) and
    beta[m]^2 = 1 + q + ... + q^m.  At q = 1 this is the boson ladder; at
    q = 0 every coefficient is 1.
    """
    if dim < 2:
        raise ValueError(f"need dim >= 2 for a ladder, got {dim}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"deformation parameter must lie in [0, 1], got {q!r}")
    beta = np.sqrt(np.cumsum(q ** np.arange(dim, dtype=np.float64)))
    B = np.zeros((dim, dim), dtype=np.complex128)
    ns = np.arange(1, dim)
    B[ns - 1, ns] = beta[ns - 1]
    return B, beta


def quon_nu(n: int, k: int, q: float) -> float:
    """Level-n mapping weight for a k-step deformed ladder.

    Built by the recurrence nu(k+1) = nu(k) * (q^(k+1) * eps_n + eps_(k+1))
    from nu(1) = 1 + q*eps_n, which telescopes to the product of
    eps_(n+1) ... eps_(n+k).  The q -> 1 limit is (n+k)!/n!.
    """
    if k < 1:
        raise ValueError(f"step count must be at least 1, got {k}")
    nu = 1.0 + q * quon_eps(n, q)
    for j in range(1, k):
        nu *= (q ** (j + 1)) * quon_eps(n, q) + quon_eps(j + 1, q)
    return float(nu)


def quon_nu_published(n: int, k: int, q: float) -> float:
    """Published variant of the k-step recurrence, kept as erratum evidence.

    Multiplies by (q^(k+1) * eps_n + eps_(n+1)) instead of eps_(k+1); the
    two agree at k = 1 but the variant breaks the q -> 1 factorial limit at
    higher k.
    """
    if k < 1:
        raise ValueError(f"step count must be at least 1, got {k}")
    nu = 1.0 + q * quon_eps(n, q)
    for j in range(1, k):
        nu *= (q ** (j + 1)) * quon_eps(n, q) + quon_eps(n + 1, q)
    return float(nu)


def two_mode_ops(dim_plus: int, dim_minus: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-mode ladders and number operators on the flattened grid.

    Returns (A_plus, A_minus, N_plus, N_minus) with the plus mode as the
    slow index.
    """
    a_p = boson_lowering(dim_plus)
    a_m = boson_lowering(dim_minus)
    A_plus = np.kron(a_p, np.eye(dim_minus, dtype=np.complex128))
    A_minus = np.kron(np.eye(dim_plus, dtype=np.complex128), a_m)
    N_plus = adjoint(A_plus) @ A_plus
    N_minus = adjoint(A_minus) @ A_minus
    return A_plus, A_minus, N_plus, N_minus


def swap_j(dim: int) -> np.ndarray:
    """Mode-swap involution J on the square two-mode grid.

    J maps the state (n_plus, n_minus) to (n_minus, n_plus); it is both
    hermitian and its own inverse, and it exchanges the two mode number
    operators under conjugation.
    """
    space = SpaceDescriptor((dim, dim))
    J = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for np_ in range(dim):
        for nm in range(dim):
            J[space.flat((nm, np_)), space.flat((np_, nm))] = 1.0
    return J


def _boson_model(dim: int, k: int) -> ModelInstance:
    a = boson_lowering(dim)
    h1 = adjoint(a) @ a
    x = np.linalg.matrix_power(a, k)
    top = dim - 1

    oracles = Oracles(
        eps1=lambda lab: float(lab[0]),
        nu=lambda lab: float(math.perm(lab[0] + k, k)),
        eps2=lambda lab: float(lab[0] * math.perm(lab[0] + k, k)),
        in_margin=lambda lab: lab[0] + k <= top,
    )
    return ModelInstance(
        name="boson",
        space=SpaceDescriptor((dim,)),
        h1=h1,
        x=x,
        margin=k,
        params={"dim": dim, "k": k},
        oracles=oracles,
    )


def _quon_model(dim: int, k: int, q: float) -> ModelInstance:
    B, _ = quon_lowering(dim, q)
    h1 = adjoint(B) @ B
    x = np.linalg.matrix_power(B, k)
    top = dim - 1

    oracles = Oracles(
        eps1=lambda lab: quon_eps(lab[0], q),
        nu=lambda lab: quon_nu(lab[0], k, q),
        eps2=lambda lab: quon_eps(lab[0], q) * quon_nu(lab[0], k, q),
        in_margin=lambda lab: lab[0] + k <= top,
    )
    return ModelInstance(
        name="quon",
        space=SpaceDescriptor((dim,)),
        h1=h1,
        x=x,
        margin=k,
        params={"dim": dim, "k": k, "q": q},
        oracles=oracles,
    )


def _landau_a_model(dim: int, hbar_omega: float) -> ModelInstance:
    A_plus, A_minus, _, N_minus = two_mode_ops(dim, dim)
    D2 = dim * dim
    h1 = hbar_omega * (2.0 * N_minus + np.eye(D2, dtype=np.complex128))
    x = A_plus @ A_minus
    top = dim - 1

    def eps1(lab: Label) -> float:
        return hbar_omega * (2.0 * lab[1] + 1.0)

    def nu(lab: Label) -> float:
        return float((lab[0] + 1) * (lab[1] + 1))

    oracles = Oracles(
        eps1=eps1,
        nu=nu,
        eps2=lambda lab: eps1(lab) * nu(lab),
        in_margin=lambda lab: lab[0] <= top - 1 and lab[1] <= top - 1,
    )
    return ModelInstance(
        name="landau-a",
        space=SpaceDescriptor((dim, dim)),
        h1=h1,
        x=x,
        margin=2,
        params={"dim": dim, "hbar_omega": hbar_omega},
        oracles=oracles,
    )


def _landau_b_model(dim: int, hbar_omega: float) -> ModelInstance:
    A_plus, _, _, N_minus = two_mode_ops(dim, dim)
    D2 = dim * dim
    h1 = hbar_omega * (2.0 * N_minus + np.eye(D2, dtype=np.complex128))
    x = A_plus @ swap_j(dim)
    top = dim - 1

    def eps1(lab: Label) -> float:
        return hbar_omega * (2.0 * lab[1] + 1.0)

    def nu(lab: Label) -> float:
        return float(lab[0] + 1)

    oracles = Oracles(
        eps1=eps1,
        nu=nu,
        eps2=lambda lab: eps1(lab) * nu(lab),
        # the swap feeds mode-minus occupation into the raised mode, so
        # only the plus label needs distance from the edge
        in_margin=lambda lab: lab[0] <= top - 1,
    )
    return ModelInstance(
        name="landau-b",
        space=SpaceDescriptor((dim, dim)),
        h1=h1,
        x=x,
        margin=1,
        params={"dim": dim, "hbar_omega": hbar_omega},
        oracles=oracles,
    )


def make_model(name: str, *, dim: int = 16, k: int = 1, q: float = 0.5, hbar_omega: float = 1.0) -> ModelInstance:
    """Build one of the named oscillator models.

    ``dim`` is the per-mode truncation size.  ``k`` (ladder step count)
    applies to the boson and quon families, ``q`` to the quon family,
    ``hbar_omega`` to the Landau families.
    """
    if name not in SCENARIO_MODELS:
        raise ValueError(f"unknown model {name!r}; choose from {SCENARIO_MODELS}")
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    if hbar_omega <= 0:
        raise ValueError(f"hbar_omega must be positive, got {hbar_omega!r}")
    if name in ("boson", "quon") and not 1 <= k < dim:
        raise ValueError(f"k must satisfy 1 <= k < dim, got k={k}, dim={dim}")
    if name == "boson":
        return _boson_model(dim, k)
    if name == "quon":
        return _quon_model(dim, k, q)
    if name == "landau-a":
        return _landau_a_model(dim, hbar_omega)
    return _landau_b_model(dim, hbar_omega)


def make_invertible_model(kind: str, *, dim: int = 16, hbar_omega: float = 1.0) -> ModelInstance:
    """Model whose intertwiner is invertible and commutes with h1.

    These are the bases for the metric-dressed scenarios and for the
    isospectral contrast operator: ``boson`` pairs the number hamiltonian
    with x = diag(n + 2), ``landau`` pairs the Landau hamiltonian with
    x = N_plus + 1.  Every label sits in the safe margin because nothing
    is raised past the truncation edge.
    """
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    if hbar_omega <= 0:
        raise ValueError(f"hbar_omega must be positive, got {hbar_omega!r}")
    if kind == "boson":
        ns = np.arange(dim, dtype=np.float64)
        h1 = np.diag(ns).astype(np.complex128)
        x = np.diag(ns + 2.0).astype(np.complex128)
        oracles = Oracles(
            eps1=lambda lab: float(lab[0]),
            nu=lambda lab: float((lab[0] + 2) ** 2),
            eps2=lambda lab: float(lab[0] * (lab[0] + 2) ** 2),
            in_margin=lambda lab: True,
        )
        return ModelInstance(
            name="boson-invertible",
            space=SpaceDescriptor((dim,)),
            h1=h1,
            x=x,
            margin=0,
            params={"dim": dim},
            oracles=oracles,
        )
    if kind == "landau":
        _, _, N_plus, N_minus = two_mode_ops(dim, dim)
        D2 = dim * dim
        eye = np.eye(D2, dtype=np.complex128)
        h1 = hbar_omega * (2.0 * N_minus + eye)
        x = N_plus + eye

        def eps1(lab: Label) -> float:
            return hbar_omega * (2.0 * lab[1] + 1.0)

        oracles = Oracles(
            eps1=eps1,
            nu=lambda lab: float((lab[0] + 1) ** 2),
            eps2=lambda lab: eps1(lab) * float((lab[0] + 1) ** 2),
            in_margin=lambda lab: True,
        )
        return ModelInstance(
            name="landau-invertible",
            space=SpaceDescriptor((dim, dim)),
            h1=h1,
            x=x,
            margin=0,
            params={"dim": dim, "hbar_omega": hbar_omega},
            oracles=oracles,
        )
    raise ValueError(f"unknown invertible-model kind {kind!r}; choose 'boson' or 'landau'")


def quon_recurrence_evidence(*, q: float = 1.0, n: int = 2, k: int = 2, dim: int = 8) -> dict:
    """Residuals of the two k-step recurrences against the matrix oracle.

    The oracle is the diagonal of B^k (B^dag)^k at level n, which is the
    mapping weight read straight off the truncated matrices.  Returns the
    oracle value plus absolute gaps of the adopted and published forms.
    """
    if n + k > dim - 1:
        raise ValueError(f"need n + k <= dim - 1 for an exact oracle, got n={n}, k={k}, dim={dim}")
    B, _ = quon_lowering(dim, q)
    Xk = np.linalg.matrix_power(B, k)
    matrix_value = float(np.real((Xk @ adjoint(Xk))[n, n]))
    adopted = quon_nu(n, k, q)
    published = quon_nu_published(n, k, q)
    return {
        "q": q,
        "n": n,
        "k": k,
        "matrix_value": matrix_value,
        "adopted_value": adopted,
        "published_value": published,
        "adopted_gap": abs(adopted - matrix_value),
        "published_gap": abs(published - matrix_value),
    }


def landau_map_order_evidence(dim: int = 4) -> dict:
    """Residuals of the two index orders for the double-raising map.

    Applies x^dag to the state (0, 1) and compares against
    sqrt(2) * state(1, 2) (adopted order: both labels raised in place)
    versus sqrt(2) * state(2, 1) (published order: labels swapped).
    """
    if dim < 3:
        raise ValueError(f"need dim >= 3 to separate the index orders, got {dim}")
    model = make_model("landau-a", dim=dim)
    space = model.space
    src = np.zeros(space.dim, dtype=np.complex128)
    src[space.flat((0, 1))] = 1.0
    mapped = adjoint(model.x) @ src
    coeff = math.sqrt(2.0)
    adopted_target = np.zeros(space.dim, dtype=np.complex128)
    adopted_target[space.flat((1, 2))] = coeff
    published_target = np.zeros(space.dim, dtype=np.complex128)
    published_target[space.flat((2, 1))] = coeff
    return {
        "adopted_residual": float(np.linalg.norm(mapped - adopted_target)),
        "published_residual": float(np.linalg.norm(mapped - published_target)),
    }
