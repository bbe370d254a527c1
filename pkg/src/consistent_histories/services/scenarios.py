"""
End-to-end scenarios built on the histories and robot services.
"""
import itertools
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.stats import binom

from ..core.config import get_defaults
from ..core.errors import CapacityError, InconsistentHistoriesError, NumericalError
from ..models.histories import History, HistorySet
from ..models.reports import CatalogEntry, ScenarioName, ScenarioResult
from ..models.robot import Posterior, PointerMode, RobotLayout
from ..models.tensor import OperatorKind, OperatorMatrix, SpaceLayout, StateVector
from ..utils.validators import check_amplitude_normalization
from .histories import (
    branch_probabilities,
    check_consistency,
    decoherence_functional,
    decohere,
    extend_family,
    family_from_vectors,
    family_on_registers,
    history_table,
    history_weights,
    interval_unitaries,
    outcome_probabilities,
    projective_measure,
    sample_history,
    trivial_family,
)
from .robot import (
    bayes_update,
    check_step_registers,
    compile_automaton_step,
    counting_automaton,
    flip_automaton,
    measurement_unitary,
    posterior_summary,
)
from .tensor_ops import apply, shift_matrix, tensor_product

logger = structlog.get_logger(__name__)
defaults = get_defaults()

PRODUCT_LAW_MAX_COPIES = 12
DISTINGUISHABLE_Z = 3.0


def _qubit(label: str, alpha: complex, beta: complex) -> StateVector:
    return StateVector(SpaceLayout.of((label, 2)), np.array([alpha, beta], dtype=complex))


def _frequencies(counts: Sequence[int], names: Sequence[str]) -> Dict[str, float]:
    total = sum(counts)
    return {name: count / total for name, count in zip(names, counts)}


# ---------------------------------------------------------------------------
# Betting on an outcome
# ---------------------------------------------------------------------------

def run_gambling(
    alpha: complex,
    beta: complex,
    odds: float,
    seed: int,
    epsilon: float = defaults.epsilon,
    samples: int = 2000,
) -> ScenarioResult:
    """A robot premeasures Q, records the pointer in its brain and bets on Q1 at ``odds``."""
    p1, p2 = check_amplitude_normalization(alpha, beta)
    if odds <= 0:
        raise ValueError(f"Odds must be positive, got {odds}")

    robot = RobotLayout(step_budget=1, input_count=2, state_count=2, systems=(("Q", 2),))
    space = robot.layout
    registers = space.sub_layout(space.labels[:-1])
    psi0 = tensor_product([StateVector.basis(registers, [0] * len(registers.factors)), _qubit("Q", alpha, beta)])

    z_basis = family_on_registers(SpaceLayout.of(("Q", 2)), "Q", names=["Q1", "Q2"])
    check_step_registers(psi0, robot, 0, measuring=True)
    U_measure = measurement_unitary(z_basis, robot, 0)
    check_step_registers(apply(U_measure, psi0), robot, 0)
    U_step = compile_automaton_step(flip_automaton(), robot, 0)

    # brain, pointer and system records at t2 are correlated and must agree
    registers_at_t2: Dict[str, Union[str, List[str]]] = {
        "brain": "B",
        "pointer": "A",
        "system": "Q",
        "pointer_and_brain": ["A", "B"],
    }
    tables: Dict[str, Dict[str, float]] = {}
    reports = []
    sets: Dict[str, HistorySet] = {}
    for name, label in registers_at_t2.items():
        family = family_on_registers(space, label)
        sets[name] = HistorySet(
            psi0=psi0,
            times=(1.0, 2.0),
            families=(trivial_family(space), family),
            unitaries=(U_measure, U_step),
        )
        D = decoherence_functional(sets[name])
        report = check_consistency(D, epsilon)
        reports.append(report)
        probabilities = branch_probabilities(D, report)
        tables[name] = {family.labels[alpha[1]]: p for alpha, p in probabilities.items()}

    p_win = tables["brain"]["B=0"]
    p_lose = tables["brain"]["B=1"]
    expected = odds * p_win - p_lose
    accept = odds * p1 >= p2
    break_even = math.isclose(odds * p1, p2, rel_tol=0.0, abs_tol=1e-12)
    if break_even:
        logger.warning("Bet is at break-even; accepting", odds=odds, p1=p1, p2=p2)

    single = {name: label for name, label in registers_at_t2.items() if isinstance(label, str)}
    agree = all(
        abs(tables[name][f"{label}={k}"] - tables["brain"][f"B={k}"]) <= 1e-10
        for name, label in single.items()
        for k in range(2)
    ) and all(
        abs(tables["pointer_and_brain"][f"A={a},B={b}"] - (tables["brain"][f"B={b}"] if a == b else 0.0)) <= 1e-10
        for a, b in itertools.product(range(2), repeat=2)
    )

    rng = np.random.default_rng(seed)
    counts = [0, 0]
    for _ in range(samples):
        counts[sample_history(sets["brain"], reports[0], rng)[1]] += 1
    sampled = _frequencies(counts, ["B=0", "B=1"])

    logger.info("Gambling scenario finished", expected_winnings=expected, accept=accept)
    return ScenarioResult(
        scenario=ScenarioName.GAMBLING.value,
        parameters={"alpha": alpha, "beta": beta, "odds": odds, "epsilon": epsilon, "samples": samples},
        probabilities=tables,
        sampled={"brain": sampled},
        derived={
            "p_q1": p1,
            "p_q2": p2,
            "expected_winnings": expected,
            "decision": "accept" if accept else "decline",
            "break_even": break_even,
            "correlated_families_agree": agree,
            "sampled_winnings": odds * sampled["B=0"] - sampled["B=1"],
        },
        consistency=reports,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Estimating an unknown state from N copies
# ---------------------------------------------------------------------------

def _sequence_label(outcomes: Sequence[int]) -> str:
    return ",".join("Q1" if o == 0 else "Q2" for o in outcomes)


def product_law_table(p1: float, copies: int) -> Dict[str, float]:
    """Outcome-sequence law of independent copies, or the count law above the enumeration limit."""
    p2 = 1.0 - p1
    if copies <= PRODUCT_LAW_MAX_COPIES:
        table = {}
        for outcomes in itertools.product((0, 1), repeat=copies):
            n1 = copies - sum(outcomes)
            table[_sequence_label(outcomes)] = p1 ** n1 * p2 ** (copies - n1)
        return table
    counts = np.arange(copies + 1)
    return {f"n1={k}": float(v) for k, v in zip(counts, binom.pmf(counts, copies, p1))}


def _estimation_set(alpha: complex, beta: complex, copies: int) -> Tuple[HistorySet, RobotLayout]:
    robot = RobotLayout(
        step_budget=copies,
        input_count=2,
        state_count=copies + 1,
        systems=tuple((f"Q{j + 1}", 2) for j in range(copies)),
        archiving=False,
        pointer_mode=PointerMode.DIRECT,
    )
    space = robot.layout
    if space.total_dim > defaults.max_dim:
        raise CapacityError(
            f"Full-quantum estimation with {copies} copies needs dimension {space.total_dim} > {defaults.max_dim}"
        )
    brain = StateVector.basis(SpaceLayout.of(("B", copies + 1)), [0])
    psi0 = tensor_product([brain] + [_qubit(f"Q{j + 1}", alpha, beta) for j in range(copies)])

    automaton = counting_automaton(copies + 1, symbol=0)
    unitaries = tuple(compile_automaton_step(automaton, robot, j) for j in range(copies))

    # after step j the count is at most j, so values above j share the last alternative
    families = []
    for j in range(1, copies + 1):
        groups = [[c] for c in range(j)] + [list(range(j, copies + 1))]
        names = [f"n1={c}" for c in range(j)] + [f"n1>={j}"]
        families.append(family_on_registers(space, "B", groups=groups, names=names))

    history_set = HistorySet(
        psi0=psi0,
        times=tuple(float(j) for j in range(1, copies + 1)),
        families=tuple(families),
        unitaries=unitaries,
    )
    return history_set, robot


def _counts_to_outcomes(counts: History) -> Optional[Tuple[int, ...]]:
    """Outcome sequence from running Q1 counts, ``None`` if the counts are not a valid run."""
    outcomes = []
    previous = 0
    for c in counts:
        step = c - previous
        if step not in (0, 1):
            return None
        outcomes.append(0 if step == 1 else 1)
        previous = c
    return tuple(outcomes)


def run_state_estimation(
    alpha: complex,
    beta: complex,
    copies: int,
    seed: int,
    mode: str = "full-quantum",
    grid_size: int = defaults.posterior_grid,
    level: float = defaults.credible_level,
    epsilon: float = defaults.epsilon,
) -> ScenarioResult:
    """A counting robot reads N copies; its posterior over ``|alpha|^2`` gives an estimate."""
    p1, p2 = check_amplitude_normalization(alpha, beta)
    if copies < 1:
        raise ValueError(f"Need at least one copy, got {copies}")
    if mode not in ("full-quantum", "classical-shortcut"):
        raise ValueError(f"Unknown estimation mode {mode!r}")

    rng = np.random.default_rng(seed)
    product_law = product_law_table(p1, copies)
    tables: Dict[str, Dict[str, float]] = {"product_law": product_law}
    reports = []
    derived: Dict[str, object] = {"mode": mode}

    if mode == "full-quantum":
        history_set, _ = _estimation_set(alpha, beta, copies)
        D = decoherence_functional(history_set)
        report = check_consistency(D, epsilon)
        reports.append(report)
        probabilities = branch_probabilities(D, report)

        sequences: Dict[str, float] = {}
        stray = 0.0
        for counts, p in probabilities.items():
            outcomes = _counts_to_outcomes(counts)
            if outcomes is None:
                stray += p
            else:
                sequences[_sequence_label(outcomes)] = p
        if stray > 1e-12:
            raise NumericalError(f"Impossible count histories carry probability {stray:.3e}")
        tables["sequences"] = sequences
        derived["max_product_law_deviation"] = max(abs(sequences[k] - v) for k, v in product_law.items())

        outcomes = _counts_to_outcomes(sample_history(history_set, report, rng))
        if outcomes is None:
            raise NumericalError("Sampled an impossible count history")
        n1 = outcomes.count(0)
    else:
        n1 = int(np.count_nonzero(rng.random(copies) < p1))

    posterior = bayes_update(Posterior.uniform(grid_size), n1, copies)
    summary = posterior_summary(posterior, level)

    derived.update({
        "all_q1_probability": p1 ** copies,
        "n1": n1,
        "map_estimate": summary.map_point,
        "credible_interval": [summary.lower, summary.upper],
        "credible_level": summary.level,
        "credible_mass": summary.mass,
        "posterior_degenerate": summary.degenerate,
    })
    logger.info("State estimation finished", mode=mode, copies=copies, n1=n1, map=summary.map_point)
    return ScenarioResult(
        scenario=ScenarioName.STATE_ESTIMATION.value,
        parameters={
            "alpha": alpha, "beta": beta, "copies": copies, "mode": mode,
            "grid_size": grid_size, "level": level, "epsilon": epsilon,
        },
        probabilities=tables,
        sampled={"outcomes": _frequencies([n1, copies - n1], ["Q1", "Q2"])},
        derived=derived,
        consistency=reports,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Pure product versus mixture
# ---------------------------------------------------------------------------

def _two_sample_z(k1: int, n1: int, k2: int, n2: int) -> Tuple[Optional[float], bool]:
    """Pooled two-proportion z statistic and the verdict at ``DISTINGUISHABLE_Z``."""
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if se == 0.0:
        return (0.0, False) if k1 * n2 == k2 * n1 else (None, True)
    z = (k1 / n1 - k2 / n2) / se
    return z, abs(z) > DISTINGUISHABLE_Z


def run_preparation_discrimination(alpha: complex, beta: complex, copies: int, seed: int) -> ScenarioResult:
    """Compare N copies of ``alpha Q1 + beta Q2`` with a shuffled Q1/Q2 mixture in two bases."""
    p1, p2 = check_amplitude_normalization(alpha, beta)
    if copies < 1:
        raise ValueError(f"Need at least one copy, got {copies}")

    q1_count = int(math.floor(p1 * copies + 0.5))
    rounding = p1 * copies - q1_count
    if abs(rounding) > 1e-9:
        logger.warning("Mixture composition rounded", target=p1 * copies, q1_count=q1_count)

    layout = SpaceLayout.of(("Q", 2))
    z_basis = family_on_registers(layout, "Q", names=["Q1", "Q2"])
    rotated = family_from_vectors(
        layout,
        [np.array([alpha, beta]), np.array([np.conj(beta), -np.conj(alpha)])],
        ["chi", "chi_perp"],
    )
    strategies = {"z_basis": z_basis, "rotated_basis": rotated}

    pure = _qubit("Q", alpha, beta)
    pure_density = OperatorMatrix(layout, np.outer(pure.amplitudes, pure.amplitudes.conj()), OperatorKind.HERMITIAN)
    mixture_density = decohere(pure_density, z_basis)
    basis_states = [StateVector.basis(layout, [0]), StateVector.basis(layout, [1])]

    tables: Dict[str, Dict[str, float]] = {}
    for name, family in strategies.items():
        pure_p, _ = outcome_probabilities(pure, family)
        mixed_p = [float(np.trace(P @ mixture_density.entries).real) for P in family.stacked]
        tables[f"pure/{name}"] = dict(zip(family.labels, map(float, pure_p)))
        tables[f"mixture/{name}"] = dict(zip(family.labels, mixed_p))
    pool_chi = (q1_count * p1 + (copies - q1_count) * p2) / copies
    tables["pool/rotated_basis"] = {"chi": pool_chi, "chi_perp": 1.0 - pool_chi}

    rng = np.random.default_rng(seed)
    pool = np.array([0] * q1_count + [1] * (copies - q1_count))
    rng.shuffle(pool)

    sampled: Dict[str, Dict[str, float]] = {}
    verdicts: Dict[str, Dict[str, object]] = {}
    for name, family in strategies.items():
        pure_hits = sum(projective_measure(pure, family, rng).outcome == 0 for _ in range(copies))
        mixed_hits = sum(projective_measure(basis_states[q], family, rng).outcome == 0 for q in pool)
        sampled[f"pure/{name}"] = _frequencies([pure_hits, copies - pure_hits], family.labels)
        sampled[f"mixture/{name}"] = _frequencies([mixed_hits, copies - mixed_hits], family.labels)
        z, distinguishable = _two_sample_z(pure_hits, copies, mixed_hits, copies)
        verdicts[name] = {"z_score": z, "distinguishable": distinguishable}

    logger.info("Preparation discrimination finished", copies=copies, verdicts=verdicts)
    return ScenarioResult(
        scenario=ScenarioName.PREPARATION_DISCRIMINATION.value,
        parameters={"alpha": alpha, "beta": beta, "copies": copies},
        probabilities=tables,
        sampled=sampled,
        derived={
            "mixture_q1_count": q1_count,
            "mixture_rounding": rounding,
            "mixture_rotated_exact": p1 ** 2 + p2 ** 2,
            "verdicts": verdicts,
        },
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Quantum versus hidden-value mechanics
# ---------------------------------------------------------------------------

def theory_history_set() -> HistorySet:
    """x, z, x measurements on a spin prepared along +z."""
    layout = SpaceLayout.of(("S", 2))
    root = 1.0 / math.sqrt(2.0)
    x_basis = family_from_vectors(layout, [np.array([root, root]), np.array([root, -root])], ["x+", "x-"])
    z_basis = family_from_vectors(layout, [np.array([1.0, 0.0]), np.array([0.0, 1.0])], ["z+", "z-"])
    identity = OperatorMatrix.identity(layout)
    return HistorySet(
        psi0=StateVector.basis(layout, [0]),
        times=(1.0, 2.0, 3.0),
        families=(x_basis, z_basis, x_basis),
        unitaries=(identity, identity, identity),
    )


def hidden_value_weights(history_set: HistorySet) -> Dict[History, float]:
    """Path law of spins that carry fixed x and z signs, each +/- with probability 1/2.

    Every reading reports the stored sign of its axis without disturbing it,
    so the path of an x, z, x triple is ``(x, z, x)``.
    """
    weights = {alpha: 0.0 for alpha in history_set.histories()}
    for x_sign, z_sign in itertools.product(range(2), repeat=2):
        weights[(x_sign, z_sign, x_sign)] += 0.25
    return weights


def _sample_paths(weights: Dict[History, float], triples: int, rng: np.random.Generator) -> np.ndarray:
    """``triples`` paths drawn at once from an exact path law, shape ``(triples, 3)``."""
    paths = list(weights)
    p = np.clip(np.array([weights[alpha] for alpha in paths]), 0.0, None)
    draws = rng.choice(len(paths), size=triples, p=p / p.sum())
    return np.asarray(paths, dtype=np.int64)[draws]


def _read_hidden_values(triples: int, rng: np.random.Generator) -> np.ndarray:
    """x, z, x readings of spins whose signs were fixed at preparation."""
    signs = rng.integers(0, 2, size=(triples, 2))
    return signs[:, [0, 1, 0]]


def run_theory_discrimination(triples: int, truth: str, seed: int, epsilon: float = defaults.epsilon) -> ScenarioResult:
    """A robot decides between quantum and hidden-value mechanics from x-z-x triples."""
    if triples < 1:
        raise ValueError(f"Need at least one triple, got {triples}")
    if truth not in ("quantum", "classical"):
        raise ValueError(f"Unknown truth {truth!r}")

    history_set = theory_history_set()
    report = check_consistency(decoherence_functional(history_set), epsilon)
    weights = history_weights(history_set)
    hidden = hidden_value_weights(history_set)
    agreement = sum(w for alpha, w in weights.items() if alpha[0] == alpha[2])
    hidden_agreement = sum(w for alpha, w in hidden.items() if alpha[0] == alpha[2])

    rng = np.random.default_rng(seed)
    if truth == "quantum":
        readings = _sample_paths(weights, triples, rng)
        misclassification = agreement ** triples
    else:
        readings = _read_hidden_values(triples, rng)
        misclassification = 0.0
    agree_count = int(np.count_nonzero(readings[:, 0] == readings[:, 2]))

    verdict = "classical" if agree_count == triples else "quantum"
    logger.info("Theory discrimination finished", truth=truth, triples=triples, verdict=verdict)
    return ScenarioResult(
        scenario=ScenarioName.THEORY_DISCRIMINATION.value,
        parameters={"triples": triples, "truth": truth, "epsilon": epsilon},
        probabilities={
            "quantum_paths": {history_set.history_label(alpha): w for alpha, w in weights.items()},
            "hidden_value_paths": {history_set.history_label(alpha): w for alpha, w in hidden.items()},
        },
        sampled={"agreement": _frequencies([agree_count, triples - agree_count], ["agree", "disagree"])},
        derived={
            "agreement_probability_exact": agreement,
            "agreement_probability_hidden_value": hidden_agreement,
            "quantum_set_consistent": report.consistent,
            "verdict": verdict,
            "misclassification_probability": misclassification,
        },
        consistency=[report],
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Adding an imaginary recorder
# ---------------------------------------------------------------------------

def default_observer_set() -> HistorySet:
    """Repeated z measurements on a spin prepared along +x."""
    layout = SpaceLayout.of(("S", 2))
    root = 1.0 / math.sqrt(2.0)
    z_basis = family_on_registers(layout, "S", names=["z+", "z-"])
    identity = OperatorMatrix.identity(layout)
    return HistorySet(
        psi0=StateVector(layout, np.array([root, root])),
        times=(1.0, 2.0),
        families=(z_basis, z_basis),
        unitaries=(identity, identity),
    )


def _max_table_deviation(a: Dict[History, float], b: Dict[History, float]) -> float:
    return max(abs(a[alpha] - b[alpha]) for alpha in a)


def run_canonical_observer(
    history_set: Optional[HistorySet] = None,
    seed: int = 0,
    epsilon: float = defaults.epsilon,
) -> ScenarioResult:
    """Append a recorder that writes each realised alternative; probabilities must not move."""
    history_set = history_set or default_observer_set()
    D = decoherence_functional(history_set)
    report = check_consistency(D, epsilon)
    if not report.consistent:
        raise InconsistentHistoriesError(
            "A recorder can only be added to a consistent set", report=report
        )
    probabilities = branch_probabilities(D, report)

    count = history_set.history_count
    if count > 64:
        raise CapacityError(f"Recorder needs {count} values; at most 64 are supported")
    layout = history_set.layout
    if layout.total_dim * count > defaults.max_dim:
        raise CapacityError(f"Recorder extension needs dimension {layout.total_dim * count} > {defaults.max_dim}")

    label = "R"
    while label in layout.labels:
        label += "_"
    recorder = SpaceLayout.of((label, count))
    extended = layout.concat(recorder)
    psi_ext = tensor_product([history_set.psi0, StateVector.basis(recorder, [0])])

    shape = history_set.history_shape
    strides = [int(np.prod(shape[i + 1:], dtype=np.int64)) for i in range(len(shape))]
    writes = [
        sum(np.kron(P, shift_matrix(count, k * stride)) for k, P in enumerate(family.stacked))
        for family, stride in zip(history_set.families, strides)
    ]
    identity = np.eye(count)
    steps = [np.kron(U, identity) for U in interval_unitaries(history_set)]

    # the record of time i is written at the start of the next interval
    unitaries = [steps[0]] + [steps[i] @ writes[i - 1] for i in range(1, len(steps))]
    ext_set = HistorySet(
        psi0=psi_ext,
        times=history_set.times,
        families=tuple(extend_family(f, recorder) for f in history_set.families),
        unitaries=tuple(OperatorMatrix(extended, U, OperatorKind.UNITARY) for U in unitaries),
    )
    D_ext = decoherence_functional(ext_set)
    report_ext = check_consistency(D_ext, epsilon)
    extended_probabilities = branch_probabilities(D_ext, report_ext)

    total = writes[-1] @ _ordered_product(unitaries)
    recorder_set = HistorySet(
        psi0=psi_ext,
        times=(history_set.times[-1] + 1.0,),
        families=(family_on_registers(extended, label),),
        unitaries=(OperatorMatrix(extended, total, OperatorKind.UNITARY),),
    )
    D_rec = decoherence_functional(recorder_set)
    report_rec = check_consistency(D_rec, epsilon)
    recorded = {
        tuple(int(d) for d in np.unravel_index(r[0], shape)): p
        for r, p in branch_probabilities(D_rec, report_rec).items()
    }

    deviation_ext = _max_table_deviation(probabilities, extended_probabilities)
    deviation_rec = _max_table_deviation(probabilities, recorded)
    if max(deviation_ext, deviation_rec) > 1e-10:
        raise NumericalError(
            f"Recorder changed probabilities: extended {deviation_ext:.3e}, recorder-only {deviation_rec:.3e}"
        )

    logger.info("Canonical observer added", histories=count, dim=extended.total_dim)
    return ScenarioResult(
        scenario=ScenarioName.CANONICAL_OBSERVER.value,
        parameters={"histories": count, "dim": layout.total_dim, "epsilon": epsilon},
        probabilities={
            "original": history_table(probabilities, history_set),
            "extended": history_table(extended_probabilities, history_set),
            "recorder": history_table(recorded, history_set),
        },
        derived={
            "recorder_label": label,
            "recorder_dim": count,
            "max_deviation_extended": deviation_ext,
            "max_deviation_recorder": deviation_rec,
        },
        consistency=[report, report_ext, report_rec],
        seed=seed,
    )


def _ordered_product(unitaries: List[np.ndarray]) -> np.ndarray:
    """``U_N ... U_1``."""
    result = np.eye(unitaries[0].shape[0], dtype=complex)
    for U in unitaries:
        result = U @ result
    return result


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

CATALOG: Tuple[CatalogEntry, ...] = (
    CatalogEntry(
        name=ScenarioName.CANONICAL_OBSERVER.value,
        anchor="imaginary-observer",
        description="Add a recorder register to a consistent set and confirm no probability changes",
        required=[],
        optional={"history_set": "repeated z on |x+>", "epsilon": defaults.epsilon},
    ),
    CatalogEntry(
        name=ScenarioName.GAMBLING.value,
        anchor="robot-betting",
        description="Robot premeasures a qubit and accepts a bet on Q1 when the odds cover the risk",
        required=["alpha|alpha_sq", "odds"],
        optional={"beta|beta_sq": "1 - |alpha|^2", "samples": 2000, "epsilon": defaults.epsilon},
    ),
    CatalogEntry(
        name=ScenarioName.HOURGLASS.value,
        anchor="quasiclassical-coarse-graining",
        description="Sand-grain drops compared through the majority variable f and the parity variable g",
        required=["grains"],
        optional={
            "horizon": 1.0, "distribution": "uniform", "perturbation": 0.01,
            "trials": 100, "grid_points": 1000,
        },
    ),
    CatalogEntry(
        name=ScenarioName.PREPARATION_DISCRIMINATION.value,
        anchor="pure-versus-mixture",
        description="Distinguish N identical superpositions from a shuffled Q1/Q2 mixture in two bases",
        required=["alpha|alpha_sq", "copies"],
        optional={"beta|beta_sq": "1 - |alpha|^2"},
    ),
    CatalogEntry(
        name=ScenarioName.STATE_ESTIMATION.value,
        anchor="state-estimation-from-copies",
        description="Counting robot reads N copies and reports a grid posterior over |alpha|^2",
        required=["alpha|alpha_sq", "copies"],
        optional={
            "beta|beta_sq": "1 - |alpha|^2", "mode": "full-quantum",
            "grid_size": defaults.posterior_grid, "level": defaults.credible_level,
            "epsilon": defaults.epsilon,
        },
    ),
    CatalogEntry(
        name=ScenarioName.THEORY_DISCRIMINATION.value,
        anchor="quantum-versus-hidden-values",
        description="x-z-x triples falsify a hidden-value model when first and last results differ",
        required=["triples", "truth"],
        optional={"epsilon": defaults.epsilon},
    ),
)


def list_scenarios() -> List[CatalogEntry]:
    """Catalogued scenarios in alphabetical order."""
    return sorted(CATALOG, key=lambda entry: entry.name)
