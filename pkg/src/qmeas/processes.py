"""Indirect measurement processes: ancilla, coupling, meter, and what they induce.

A process couples the system to an ancilla, evolves the meter observable
back through the coupling, and reads outcome statistics from the composite
state. Contracting the evolved spectral projectors against the ancilla
state yields the induced generalized observable on the system alone, which
is the object that decides whether the process reproduces a sharp
observable's statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    PRODUCT_DIM_GUARD,
    SpectralDecomposition,
    State,
    UNITARY_TOL,
    as_complex_matrix,
    complete_isometry_to_unitary,
    is_unitary,
    tensor,
)
from .observables import (
    DEFAULT_LABEL_TOL,
    Observable,
    OutcomeDistribution,
    Povm,
    born_probabilities,
)


@dataclass(frozen=True, eq=False)
class MeasurementProcess:
    """Ancilla state, coupling unitary, and meter observable for one apparatus.

    The coupling acts on the system tensor the ancilla (system factor first);
    the meter lives on the ancilla alone.
    """

    system_dim: int
    ancilla_state: State
    coupling: np.ndarray
    meter: Observable

    def __post_init__(self) -> None:
        if self.system_dim < 1:
            raise ValueError("system dimension must be positive")
        u = as_complex_matrix(self.coupling, "coupling").copy()
        total = self.system_dim * self.ancilla_state.dim
        if u.shape != (total, total):
            raise ValueError(
                f"coupling shape {u.shape} does not match system x ancilla dimension {total}"
            )
        if not is_unitary(u):
            raise ValueError(f"coupling is not unitary within {UNITARY_TOL}")
        if self.meter.dim != self.ancilla_state.dim:
            raise ValueError("meter dimension does not match the ancilla")
        u.setflags(write=False)
        object.__setattr__(self, "coupling", u)

    @property
    def ancilla_dim(self) -> int:
        return self.ancilla_state.dim

    @property
    def total_dim(self) -> int:
        return self.system_dim * self.ancilla_dim


def heisenberg_meter(mp: MeasurementProcess) -> Observable:
    """Meter observable evolved back through the coupling.

    Each spectral projector of the meter is lifted to the composite space and
    conjugated by the coupling, so outcome labels are carried over exactly and
    the spectrum is preserved.
    """
    u = mp.coupling
    eye_sys = np.eye(mp.system_dim)
    branches = tuple(
        (value, u.conj().T @ tensor(eye_sys, proj) @ u)
        for value, proj in mp.meter.spectral.branches
    )
    return Observable.from_spectral(SpectralDecomposition(branches))


def outcome_distribution(mp: MeasurementProcess, psi: State) -> OutcomeDistribution:
    """Meter outcome statistics for a system state.

    Evaluates the evolved meter's spectral family in the composite state
    built from the system state and the ancilla state.
    """
    if psi.dim != mp.system_dim:
        raise ValueError(f"state dimension {psi.dim} does not match system dimension {mp.system_dim}")
    composite = psi.tensor(mp.ancilla_state)
    return born_probabilities(heisenberg_meter(mp), composite)


def induced_povm(mp: MeasurementProcess) -> Povm:
    """Generalized observable the process realizes on the system alone.

    Contracts both ancilla indices of each evolved spectral projector against
    the ancilla state. The effects inherit the meter's outcome labels and
    always resolve the identity.
    """
    evolved = heisenberg_meter(mp)
    d, k = mp.system_dim, mp.ancilla_dim
    xi = mp.ancilla_state.amplitudes
    outcomes = []
    for value, proj in evolved.spectral.branches:
        four = proj.reshape(d, k, d, k)
        effect = np.einsum("a,iajb,b->ij", xi.conj(), four, xi)
        outcomes.append((value, (effect + effect.conj().T) / 2))
    return Povm(tuple(outcomes))


def effect_gaps(
    mp: MeasurementProcess, a: Observable, label_tol: float = DEFAULT_LABEL_TOL
) -> tuple[tuple[float, float], ...] | None:
    """Frobenius gaps between induced effects and a sharp observable's projectors.

    Returns (label, gap) pairs when the outcome labels line up one to one
    within label_tol, else None.
    """
    if a.dim != mp.system_dim:
        raise ValueError(f"observable dimension {a.dim} does not match system dimension {mp.system_dim}")
    induced = sorted(induced_povm(mp).outcomes, key=lambda pair: pair[0])
    target = sorted(Povm.from_observable(a).outcomes, key=lambda pair: pair[0])
    if len(induced) != len(target):
        return None
    gaps = []
    for (x, effect), (y, proj) in zip(induced, target):
        if abs(x - y) > label_tol:
            return None
        gaps.append((y, float(np.linalg.norm(effect - proj))))
    return tuple(gaps)


def check_probability_reproducibility(
    mp: MeasurementProcess,
    a: Observable,
    tol: float = 1e-9,
    label_tol: float = DEFAULT_LABEL_TOL,
) -> bool:
    """Whether the process reproduces a sharp observable for every state.

    This is the algebraic characterization: the induced generalized
    observable must carry the same outcome labels as the spectral family of
    ``a`` (within label_tol) with every effect within ``tol`` of the matching
    projector in Frobenius norm. No sampling is involved; agreement of the
    meter statistics with the Born distribution on all states follows.
    """
    gaps = effect_gaps(mp, a, label_tol)
    return gaps is not None and all(gap <= tol for _, gap in gaps)


def _effect_sqrt(effect: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues that rounding pushed slightly negative are clamped to zero.
    """
    values, vectors = np.linalg.eigh(effect)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T


def naimark_dilation(p: Povm) -> MeasurementProcess:
    """Measurement process on a larger space realizing a given POVM exactly.

    The ancilla carries one basis vector per outcome. The coupling extends
    the isometry sending a system state to the sum over outcomes of
    (sqrt-effect applied to the state) tensor the outcome's basis vector; the
    meter is diagonal in the ancilla basis with the POVM's labels. The
    induced POVM of the result is the input again.
    """
    d = p.dim
    n = len(p.outcomes)
    if d * n > PRODUCT_DIM_GUARD:
        raise ValueError(f"dilation dimension {d * n} exceeds the guard {PRODUCT_DIM_GUARD}")
    isometry = np.zeros((d * n, d), dtype=complex)
    for index, effect in enumerate(p.effects):
        isometry[index::n, :] = _effect_sqrt(effect)
    completed = complete_isometry_to_unitary(isometry)
    # The isometry pins the coupling's columns at ancilla index 0; the
    # remaining completion columns fill the other slots in order.
    coupling = np.empty_like(completed)
    pinned = [j * n for j in range(d)]
    rest = [c for c in range(d * n) if c % n != 0]
    coupling[:, pinned] = completed[:, :d]
    coupling[:, rest] = completed[:, d:]
    branches = []
    for index, (label, _) in sorted(enumerate(p.outcomes), key=lambda item: item[1][0]):
        proj = np.zeros((n, n), dtype=complex)
        proj[index, index] = 1.0
        branches.append((label, proj))
    meter = Observable.from_spectral(SpectralDecomposition(tuple(branches)))
    return MeasurementProcess(d, State.basis(n, 0), coupling, meter)
