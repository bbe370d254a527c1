"""
Robot observer: automaton compilation, premeasurement and Bayesian estimation.
"""
import itertools
from functools import lru_cache
from typing import Optional

import numpy as np
import structlog
from scipy.special import xlog1py, xlogy

from ..core.config import get_defaults
from ..core.errors import AutomatonError, ContractViolationError, LayoutError, OperatorValidationError
from ..models.histories import ProjectorFamily
from ..models.reports import PosteriorSummary
from ..models.robot import Automaton, Posterior, RobotLayout
from ..models.tensor import OperatorKind, OperatorMatrix, StateVector
from .tensor_ops import embed_operator, shift_matrix

logger = structlog.get_logger(__name__)
defaults = get_defaults()


def identity_automaton(state_count: int = 2, input_count: int = 2) -> Automaton:
    table = np.repeat(np.arange(state_count)[:, None], input_count, axis=1)
    return Automaton(state_count, input_count, table, name="identity")


def flip_automaton() -> Automaton:
    """Two-state machine ``B' = B xor A``."""
    table = np.array([[0, 1], [1, 0]])
    return Automaton(2, 2, table, name="flip")


def counting_automaton(capacity: int, symbol: int = 0, input_count: int = 2) -> Automaton:
    """``B' = B + [A == symbol] mod capacity``."""
    if not 0 <= symbol < input_count:
        raise AutomatonError(f"Counted symbol {symbol} out of range for {input_count} inputs")
    states = np.arange(capacity)[:, None]
    inputs = np.arange(input_count)[None, :]
    table = (states + (inputs == symbol)) % capacity
    return Automaton(capacity, input_count, table, name="counting")


def _local_step_permutation(automaton: Automaton, archiving: bool) -> np.ndarray:
    """Permutation over local digits ``(input, B[, a, b])``.

    With archives the null-archive block maps ``(m, n, 0, 0) -> (m, T[n, m], m, n)``
    and the remaining inputs are paired with the remaining outputs in
    increasing index order.
    """
    n_in, n_st = automaton.input_count, automaton.state_count
    T = automaton.transition

    if not archiving:
        if not automaton.injective_per_input():
            raise AutomatonError(
                f"Automaton {automaton.name!r} is not injective per input; compile it with archive registers"
            )
        dims = (n_in, n_st)
        perm = np.empty(n_in * n_st, dtype=np.int64)
        for m, n in itertools.product(range(n_in), range(n_st)):
            perm[np.ravel_multi_index((m, n), dims)] = np.ravel_multi_index((m, T[n, m]), dims)
        return perm

    dims = (n_in, n_st, n_in, n_st)
    size = int(np.prod(dims))
    perm = np.full(size, -1, dtype=np.int64)
    used = np.zeros(size, dtype=bool)
    for m, n in itertools.product(range(n_in), range(n_st)):
        source = np.ravel_multi_index((m, n, 0, 0), dims)
        target = np.ravel_multi_index((m, T[n, m], m, n), dims)
        perm[source] = target
        used[target] = True

    free_sources = np.flatnonzero(perm < 0)
    free_targets = np.flatnonzero(~used)
    perm[free_sources] = free_targets
    return perm


@lru_cache(maxsize=128)
def compile_automaton_step(automaton: Automaton, layout: RobotLayout, step: int) -> OperatorMatrix:
    """Permutation unitary for one automaton step, reading the step's input register."""
    space = layout.layout
    input_label = layout.input_label(step)
    if space.dim_of(input_label) != automaton.input_count:
        raise AutomatonError(
            f"Input register {input_label!r} has dimension {space.dim_of(input_label)}, "
            f"automaton reads {automaton.input_count} symbols"
        )
    if layout.state_count != automaton.state_count:
        raise AutomatonError(
            f"Brain register has {layout.state_count} values, automaton has {automaton.state_count} states"
        )

    labels = [input_label, layout.brain_label, *layout.archive_labels(step)]
    perm = _local_step_permutation(automaton, layout.archiving)
    local = OperatorMatrix.from_permutation(space.sub_layout(labels), perm)
    unitary = embed_operator(space, labels, local)

    logger.debug("Automaton step compiled", automaton=automaton.name, step=step, dim=space.total_dim)
    return OperatorMatrix(space, unitary.entries, OperatorKind.UNITARY)


def measurement_unitary(family: ProjectorFamily, layout: RobotLayout, step: int) -> OperatorMatrix:
    """``sum_k P_k ⊗ S^k``: shifts the step's pointer by the family index.

    ``family`` lives on one or more system registers of ``layout``.
    """
    ranks = family.ranks()
    if any(r != 1 for r in ranks):
        raise OperatorValidationError(f"Measurement basis must be rank-1, got ranks {ranks}")

    space = layout.layout
    pointer = layout.pointer_for(step)
    pointer_dim = space.dim_of(pointer)
    if len(family) > pointer_dim:
        raise LayoutError(f"{len(family)} outcomes do not fit pointer {pointer!r} of dimension {pointer_dim}")
    for label, dim in family.layout.factors:
        if label not in layout.system_labels or space.dim_of(label) != dim:
            raise LayoutError(f"Measured register {label!r} is not a system register of the robot")

    local = sum(
        np.kron(P.entries, shift_matrix(pointer_dim, k))
        for k, P in enumerate(family.projectors)
    )
    labels = [*family.layout.labels, pointer]
    return embed_operator(space, labels, local, OperatorKind.UNITARY)


def check_register_clear(psi: StateVector, label: str, tol: float = 1e-12) -> None:
    """Raise unless ``label`` holds value 0 on every populated basis vector."""
    digits = psi.layout.digit_table()[:, psi.layout.position(label)]
    weight = float(np.sum(np.abs(psi.amplitudes[digits != 0]) ** 2))
    if weight > tol:
        raise ContractViolationError(f"Register {label!r} is not in its null state (weight {weight:.3e})")


def check_step_registers(psi: StateVector, layout: RobotLayout, step: int, measuring: bool = False) -> None:
    """Archives of ``step`` (and its fresh pointer when measuring) must be clear."""
    labels = list(layout.archive_labels(step))
    if measuring:
        labels.append(layout.pointer_for(step))
    for label in labels:
        check_register_clear(psi, label)


def bayes_update(posterior: Posterior, n1: int, n: int) -> Posterior:
    """Multiply by ``p^n1 (1-p)^(n-n1)`` and renormalise in log space."""
    if not 0 <= n1 <= n:
        raise ValueError(f"Need 0 <= n1 <= n, got n1={n1}, n={n}")

    p = posterior.grid
    with np.errstate(divide="ignore"):
        log_prior = np.log(posterior.weights)
    log_weights = log_prior + xlogy(n1, p) + xlog1py(n - n1, -p)

    if not np.any(np.isfinite(log_weights)):
        logger.warning("Posterior likelihood vanished on the whole grid; falling back to flat", n1=n1, n=n)
        flat = np.full(p.size, 1.0 / p.size)
        return Posterior(p, flat, degenerate=True)

    weights = np.exp(log_weights - np.max(log_weights))
    weights /= weights.sum()
    return Posterior(p, weights, degenerate=posterior.degenerate)


def posterior_summary(posterior: Posterior, level: Optional[float] = None) -> PosteriorSummary:
    """MAP grid point and the shortest leftmost window holding ``level`` mass."""
    level = defaults.credible_level if level is None else level
    if not 0.0 < level < 1.0:
        raise ValueError(f"Credible level must lie in (0, 1), got {level}")

    weights = posterior.weights
    grid = posterior.grid
    map_index = int(np.argmax(weights))

    cumulative = np.concatenate(([0.0], np.cumsum(weights)))
    target = cumulative[:-1] + level - 1e-12
    ends = np.searchsorted(cumulative, target, side="left")
    starts = np.arange(weights.size)
    valid = ends <= weights.size
    widths = np.where(valid, ends - starts, np.iinfo(np.int64).max)
    start = int(np.argmin(widths))
    end = int(max(ends[start], start + 1))

    return PosteriorSummary(
        map_point=float(grid[map_index]),
        lower=float(grid[start]),
        upper=float(grid[end - 1]),
        level=level,
        mass=float(cumulative[end] - cumulative[start]),
        degenerate=posterior.degenerate,
    )
