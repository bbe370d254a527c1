"""
Decoherence functional, consistency, branch probabilities and branch states.
"""
import bisect
import itertools
from functools import lru_cache
from typing import Callable, Dict, Hashable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..core.config import get_defaults
from ..core.errors import (
    CapacityError,
    FamilyValidationError,
    HistorySetError,
    InconsistentHistoriesError,
    LayoutError,
    NumericalError,
)
from ..models.histories import BranchTree, DecoherenceMatrix, History, HistorySet, ProjectorFamily
from ..models.reports import ConsistencyReport
from ..models.tensor import OperatorKind, OperatorMatrix, SpaceLayout, StateVector
from ..utils.validators import validate_density_operator
from .tensor_ops import embed_operator, propagator

logger = structlog.get_logger(__name__)
defaults = get_defaults()


class MeasurementOutcome(NamedTuple):
    """Result of a projective measurement."""
    outcome: int
    state: StateVector
    probability: float


# ---------------------------------------------------------------------------
# Family constructors
# ---------------------------------------------------------------------------

def trivial_family(layout: SpaceLayout, label: str = "1") -> ProjectorFamily:
    """The one-member family ``{I}``."""
    return ProjectorFamily(layout, (OperatorMatrix.identity(layout),), (label,))


def family_on_registers(
    layout: SpaceLayout,
    labels: Union[str, Sequence[str]],
    groups: Optional[Sequence[Sequence[Union[int, Tuple[int, ...]]]]] = None,
    names: Optional[Sequence[str]] = None,
) -> ProjectorFamily:
    """Projectors onto joint basis values of the named registers.

    Without ``groups`` there is one alternative per joint value; with
    ``groups`` each alternative is the union of the listed values, and the
    groups must cover every joint value exactly once.
    """
    if isinstance(labels, str):
        labels = [labels]
    labels = list(labels)
    positions = [layout.position(label) for label in labels]
    register_dims = [layout.dims[p] for p in positions]
    values = list(itertools.product(*(range(d) for d in register_dims)))

    if groups is None:
        groups = [[v] for v in values]
        if names is None:
            names = [",".join(f"{lab}={d}" for lab, d in zip(labels, v)) for v in values]
    normalized_groups: List[List[Tuple[int, ...]]] = [
        [tuple(v) if isinstance(v, (tuple, list)) else (int(v),) for v in group] for group in groups
    ]
    seen = sorted(v for group in normalized_groups for v in group)
    if seen != sorted(values):
        raise FamilyValidationError(f"Register groups do not partition the values of {labels}")

    digits = layout.digit_table()[:, positions]
    projectors = []
    for group in normalized_groups:
        mask = np.zeros(layout.total_dim, dtype=bool)
        for value in group:
            mask |= np.all(digits == np.asarray(value), axis=1)
        projectors.append(OperatorMatrix(layout, np.diag(mask.astype(complex)), OperatorKind.PROJECTOR))

    if names is None:
        names = ["|".join(",".join(str(d) for d in v) for v in group) for group in normalized_groups]
    return ProjectorFamily(layout, tuple(projectors), tuple(names))


def family_from_vectors(
    layout: SpaceLayout,
    vectors: Sequence[Union[np.ndarray, StateVector]],
    labels: Sequence[str] = (),
) -> ProjectorFamily:
    """Rank-1 family from an orthonormal basis."""
    projectors = []
    for vec in vectors:
        state = vec if isinstance(vec, StateVector) else StateVector(layout, vec)
        projectors.append(OperatorMatrix.projector_onto(state))
    return ProjectorFamily(layout, tuple(projectors), tuple(labels))


def embed_family(family: ProjectorFamily, layout: SpaceLayout, labels: Union[str, Sequence[str]]) -> ProjectorFamily:
    """Lift a family on a few registers to the full layout."""
    projectors = tuple(embed_operator(layout, labels, p) for p in family.projectors)
    return ProjectorFamily(layout, projectors, family.labels)


def extend_family(family: ProjectorFamily, suffix: SpaceLayout) -> ProjectorFamily:
    """``P ⊗ I`` on ``family.layout`` followed by ``suffix``."""
    layout = family.layout.concat(suffix)
    identity = np.eye(suffix.total_dim)
    projectors = tuple(
        OperatorMatrix(layout, np.kron(p.entries, identity), OperatorKind.PROJECTOR) for p in family.projectors
    )
    return ProjectorFamily(layout, projectors, family.labels)


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def interval_unitaries(history_set: HistorySet) -> Tuple[np.ndarray, ...]:
    """Unitary for each interval ``(t_{i-1}, t_i]`` with ``t_0 = 0``."""
    if history_set.unitaries is not None:
        return tuple(u.entries for u in history_set.unitaries)
    previous = 0.0
    steps = []
    for t in history_set.times:
        steps.append(propagator(history_set.hamiltonian, t - previous).entries)
        previous = t
    return tuple(steps)


def evolution_between(history_set: HistorySet, t_from: float, t_to: float) -> np.ndarray:
    """Propagator from ``t_from`` to ``t_to`` (``t_from <= t_to``)."""
    if t_to < t_from:
        raise HistorySetError(f"Cannot evolve backwards from {t_from} to {t_to}")
    if history_set.hamiltonian is not None:
        return propagator(history_set.hamiltonian, t_to - t_from).entries
    dim = history_set.layout.total_dim
    result = np.eye(dim, dtype=complex)
    for t_k, u_k in zip(history_set.times, interval_unitaries(history_set)):
        if t_from < t_k <= t_to:
            result = u_k @ result
    return result


def evolution_operator(history_set: HistorySet, t: float) -> np.ndarray:
    """``U(t)`` from time 0."""
    if history_set.hamiltonian is not None:
        return propagator(history_set.hamiltonian, t).entries
    dim = history_set.layout.total_dim
    result = np.eye(dim, dtype=complex)
    for t_k, u_k in zip(history_set.times, interval_unitaries(history_set)):
        if t_k <= t:
            result = u_k @ result
    return result


# ---------------------------------------------------------------------------
# History operators
# ---------------------------------------------------------------------------

def heisenberg_projector(P: OperatorMatrix, history_set: HistorySet, i: int) -> OperatorMatrix:
    """``U(t_i)^dag P U(t_i)`` for a member ``P`` of family ``i``."""
    if not 0 <= i < len(history_set.times):
        raise IndexError(f"Time index {i} out of range for {len(history_set.times)} times")
    if history_set.families[i].contains(P) is None:
        raise HistorySetError(f"Projector is not a member of family {i}")
    U = evolution_operator(history_set, history_set.times[i])
    return OperatorMatrix(P.layout, U.conj().T @ P.entries @ U, OperatorKind.PROJECTOR)


def history_operator(history_set: HistorySet, alpha: Sequence[int]) -> OperatorMatrix:
    """``C_alpha = P^N_{alpha_N}(t_N) ... P^1_{alpha_1}(t_1)``, latest leftmost."""
    alpha = history_set.validate_history(alpha)
    result = np.eye(history_set.layout.total_dim, dtype=complex)
    for i, a in enumerate(alpha):
        P = heisenberg_projector(history_set.families[i].projectors[a], history_set, i)
        result = P.entries @ result
    return OperatorMatrix(history_set.layout, result)


def _check_capacity(count: int, cap: Optional[int]) -> None:
    cap = defaults.history_cap if cap is None else cap
    if count > cap:
        raise CapacityError(f"{count} histories exceed the configured cap of {cap}")


def _project_levels(history_set: HistorySet, depth: int) -> Tuple[List[History], np.ndarray]:
    """Branch rows after ``depth`` projections, in the Schrödinger picture at ``t_depth``."""
    keys: List[History] = [()]
    rows = history_set.psi0.amplitudes[np.newaxis, :]
    steps = interval_unitaries(history_set)
    for i in range(depth):
        rows = rows @ steps[i].T
        stacked = history_set.families[i].stacked
        projected = np.einsum("kab,nb->nka", stacked, rows)
        n_prev, n_alt, dim = projected.shape
        rows = projected.reshape(n_prev * n_alt, dim)
        keys = [key + (k,) for key in keys for k in range(n_alt)]
    return keys, rows


def branch_vectors(history_set: HistorySet, cap: Optional[int] = None) -> Tuple[List[History], np.ndarray]:
    """Rows ``U(t_N) C_alpha psi0`` for every history, in index order."""
    _check_capacity(history_set.history_count, cap)
    return _project_levels(history_set, len(history_set.times))


def decoherence_functional(history_set: HistorySet, cap: Optional[int] = None) -> DecoherenceMatrix:
    """``D[alpha, alpha'] = <C_alpha' psi0 | C_alpha psi0>`` over all history pairs."""
    histories, rows = branch_vectors(history_set, cap)
    entries = rows @ rows.conj().T

    logger.debug(
        "Decoherence functional computed",
        histories=len(histories),
        dim=history_set.layout.total_dim,
    )
    labels = tuple(history_set.history_label(h) for h in histories)
    return DecoherenceMatrix(entries, tuple(histories), labels, set_id=id(history_set))


def history_weights(history_set: HistorySet, cap: Optional[int] = None) -> Dict[History, float]:
    """``‖C_alpha psi0‖²`` for every history, with no consistency requirement.

    These are the sequential-measurement probabilities of recorded outcome
    paths.
    """
    histories, rows = branch_vectors(history_set, cap)
    weights = np.einsum("na,na->n", rows.conj(), rows).real
    return {h: float(w) for h, w in zip(histories, weights)}


# ---------------------------------------------------------------------------
# Consistency and probabilities
# ---------------------------------------------------------------------------

def check_consistency(D: DecoherenceMatrix, epsilon: float = defaults.epsilon) -> ConsistencyReport:
    """Largest normalised off-diagonal ``|D[a,b]| / sqrt(p_a p_b)``.

    Pairs involving a negligible-probability history are judged by ``|D[a,b]|``.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")

    n = len(D.histories)
    if n < 2:
        return ConsistencyReport(
            epsilon=epsilon, max_normalized_offdiag=0.0, worst_pair=None,
            consistent=True, history_count=n, set_id=D.set_id,
        )

    p = D.diagonal.real
    magnitude = np.abs(D.entries)
    scale = np.sqrt(np.clip(np.outer(p, p), 0.0, None))
    negligible = (p[:, None] < defaults.negligible_probability) | (p[None, :] < defaults.negligible_probability)
    measure = np.where(negligible, magnitude, magnitude / np.maximum(scale, defaults.division_floor))
    np.fill_diagonal(measure, 0.0)

    flat = int(np.argmax(measure))
    row, col = divmod(flat, n)
    worst = float(measure[row, col])

    return ConsistencyReport(
        epsilon=epsilon,
        max_normalized_offdiag=worst,
        worst_pair=(D.histories[row], D.histories[col]),
        consistent=worst <= epsilon,
        history_count=n,
        set_id=D.set_id,
    )


def history_table(probabilities: Dict[History, float], history_set: HistorySet) -> Dict[str, float]:
    """Probabilities keyed by history label, or by index tuple when labels collide."""
    labels = {alpha: history_set.history_label(alpha) for alpha in probabilities}
    if len(set(labels.values())) != len(labels):
        labels = {alpha: ",".join(str(a) for a in alpha) for alpha in probabilities}
    return {labels[alpha]: p for alpha, p in probabilities.items()}


def branch_probabilities(D: DecoherenceMatrix, report: ConsistencyReport) -> Dict[History, float]:
    """Diagonal probabilities of a set that passed ``check_consistency``."""
    if report.history_count != len(D.histories) or (
        report.set_id is not None and D.set_id is not None and report.set_id != D.set_id
    ):
        raise ValueError("Consistency report does not belong to this decoherence matrix")
    if not report.consistent:
        raise InconsistentHistoriesError(
            f"Probabilities are undefined for an inconsistent set "
            f"(measure {report.max_normalized_offdiag:.6g} > epsilon {report.epsilon:.1e})",
            report=report,
        )

    p = D.diagonal.real
    if np.any(p < -defaults.negative_probability_tol):
        raise NumericalError(f"Negative history probability {float(p.min()):.3e}")
    p = np.clip(p, 0.0, None)

    total = float(np.sum(p))
    if abs(total - 1.0) > 1e-10:
        raise NumericalError(f"History probabilities sum to {total!r}")
    return {h: float(v) for h, v in zip(D.histories, p)}


def coarse_grain(
    D: DecoherenceMatrix,
    grouping: Sequence[Sequence[Sequence[int]]],
    names: Optional[Sequence[str]] = None,
) -> DecoherenceMatrix:
    """Block sums of ``D`` over a partition of its histories."""
    index = D.index_map
    n = len(D.histories)
    G = np.zeros((len(grouping), n))
    for k, block in enumerate(grouping):
        if not block:
            raise ValueError(f"Block {k} of the grouping is empty")
        for alpha in block:
            alpha = tuple(alpha)
            if alpha not in index:
                raise ValueError(f"History {alpha} is not in the decoherence matrix")
            G[k, index[alpha]] += 1.0
    if not np.array_equal(G.sum(axis=0), np.ones(n)):
        raise ValueError("Grouping is not a partition of the history index space")

    entries = G @ D.entries @ G.T
    histories = tuple((k,) for k in range(len(grouping)))
    return DecoherenceMatrix(entries, histories, tuple(names or ()), set_id=None)


def group_by(D: DecoherenceMatrix, key: Callable[[History], Hashable]) -> Tuple[List[List[History]], List[str]]:
    """Partition histories by ``key``; blocks ordered by first appearance."""
    blocks: Dict[Hashable, List[History]] = {}
    for alpha in D.histories:
        blocks.setdefault(key(alpha), []).append(alpha)
    return list(blocks.values()), [str(k) for k in blocks]


# ---------------------------------------------------------------------------
# Branch states
# ---------------------------------------------------------------------------

def branch_components(history_set: HistorySet, t: float) -> List[Tuple[History, StateVector]]:
    """Components of ``U(t) psi0`` keyed by the partial history realised before ``t``.

    With ``t_j < t <= t_{j+1}`` the components are indexed by ``(alpha_1..alpha_j)``.
    """
    if t < 0:
        raise ValueError(f"Branch components need t >= 0, got {t}")

    j = bisect.bisect_left(history_set.times, t)
    count = int(np.prod(history_set.history_shape[:j], dtype=np.int64))
    _check_capacity(count, None)

    keys, rows = _project_levels(history_set, j)
    t_j = history_set.times[j - 1] if j else 0.0
    if j:
        U = evolution_between(history_set, t_j, t)
    else:
        U = evolution_operator(history_set, t)
    rows = rows @ U.T

    layout = history_set.layout
    return [(key, StateVector(layout, row)) for key, row in zip(keys, rows)]


def branch_tree(history_set: HistorySet) -> BranchTree:
    """Branch components after each projection time with squared-norm edge weights."""
    _check_capacity(history_set.history_count, None)
    layout = history_set.layout
    steps = interval_unitaries(history_set)

    levels: List[Dict[History, StateVector]] = [{(): history_set.psi0}]
    weights: Dict[History, float] = {}
    current = {(): history_set.psi0.amplitudes}
    for i, family in enumerate(history_set.families):
        nxt: Dict[History, np.ndarray] = {}
        for key, vec in current.items():
            evolved = steps[i] @ vec
            parent = float(np.vdot(evolved, evolved).real)
            for k, P in enumerate(family.stacked):
                child = P @ evolved
                nxt[key + (k,)] = child
                weights[key + (k,)] = float(np.vdot(child, child).real) / parent if parent > 0 else 0.0
        current = nxt
        levels.append({key: StateVector(layout, vec) for key, vec in current.items()})

    return BranchTree(times=(0.0,) + history_set.times, levels=tuple(levels), edge_weights=weights)


# ---------------------------------------------------------------------------
# Collapse and decoherence primitives
# ---------------------------------------------------------------------------

def decohere(rho: OperatorMatrix, family: ProjectorFamily) -> OperatorMatrix:
    """``sum_k P_k rho P_k``."""
    if rho.layout != family.layout:
        raise LayoutError("Density operator and family live on different layouts")
    validate_density_operator(rho)
    stacked = family.stacked
    entries = np.einsum("kab,bc,kcd->ad", stacked, rho.entries, stacked)
    return OperatorMatrix(rho.layout, entries, OperatorKind.HERMITIAN)


def outcome_probabilities(psi: StateVector, family: ProjectorFamily) -> Tuple[np.ndarray, np.ndarray]:
    """``(p_k, P_k psi)`` for every member."""
    if psi.layout != family.layout:
        raise LayoutError("State and family live on different layouts")
    projected = family.stacked @ psi.amplitudes
    probabilities = np.clip(np.einsum("a,ka->k", psi.amplitudes.conj(), projected).real, 0.0, None)
    return probabilities, projected


def projective_measure(psi: StateVector, family: ProjectorFamily, rng: np.random.Generator) -> MeasurementOutcome:
    """Draw ``k`` with ``p_k = <psi|P_k|psi>`` and collapse to ``P_k psi / sqrt(p_k)``."""
    if abs(psi.norm() - 1.0) > 1e-10:
        raise ValueError(f"projective_measure needs a normalized state, norm is {psi.norm():.12g}")

    probabilities, projected = outcome_probabilities(psi, family)
    if np.all(probabilities < defaults.measurement_floor):
        raise NumericalError("Every outcome probability is below the measurement floor")

    cdf = np.cumsum(probabilities)
    cdf /= cdf[-1]
    k = int(np.searchsorted(cdf, rng.random(), side="right"))
    k = min(k, len(probabilities) - 1)

    p_k = float(probabilities[k])
    state = StateVector(psi.layout, projected[k] / np.sqrt(p_k)).normalize()
    return MeasurementOutcome(outcome=k, state=state, probability=p_k)


def sample_history(history_set: HistorySet, report: ConsistencyReport, rng: np.random.Generator) -> History:
    """Sample one history by alternating evolution and collapse."""
    if not report.consistent:
        raise InconsistentHistoriesError("Cannot sample histories of an inconsistent set", report=report)

    psi = history_set.psi0
    outcomes = []
    for U, family in zip(interval_unitaries(history_set), history_set.families):
        psi = StateVector(psi.layout, U @ psi.amplitudes)
        result = projective_measure(psi, family, rng)
        outcomes.append(result.outcome)
        psi = result.state
    return tuple(outcomes)
