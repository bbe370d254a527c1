"""Tests for automaton compilation, premeasurement and the grid posterior."""
import itertools

import numpy as np
import pytest

from consistent_histories.core.errors import AutomatonError, ContractViolationError, LayoutError, OperatorValidationError
from consistent_histories.models.robot import Automaton, PointerMode, Posterior, RobotLayout
from consistent_histories.models.tensor import SpaceLayout, StateVector
from consistent_histories.services.histories import family_on_registers
from consistent_histories.services.robot import (
    bayes_update,
    check_register_clear,
    compile_automaton_step,
    counting_automaton,
    flip_automaton,
    identity_automaton,
    measurement_unitary,
    posterior_summary,
)
from consistent_histories.services.tensor_ops import apply
from consistent_histories.utils.validators import validate_operator


def _basis(layout: RobotLayout, **values: int) -> StateVector:
    space = layout.layout
    return StateVector.basis(space, [values.get(label, 0) for label in space.labels])


def _digits(psi: StateVector) -> dict:
    index = int(np.argmax(np.abs(psi.amplitudes)))
    return dict(zip(psi.layout.labels, psi.layout.digits_of(index)))


class TestAutomaton:
    def test_table_shape_checked(self):
        with pytest.raises(AutomatonError):
            Automaton(2, 2, np.array([[0, 1]]))

    def test_output_range_checked(self):
        with pytest.raises(AutomatonError):
            Automaton(2, 2, np.array([[0, 2], [1, 0]]))

    def test_fold_records_each_state(self):
        assert flip_automaton().fold([1, 1, 0, 1]) == [1, 0, 0, 1]

    def test_counting_is_injective(self):
        assert counting_automaton(4).injective_per_input()
        assert not Automaton(2, 2, np.array([[0, 0], [0, 1]])).injective_per_input()


class TestRobotLayout:
    def test_register_order(self):
        layout = RobotLayout(step_budget=2, input_count=2, state_count=3)
        assert layout.layout.labels == ("A", "a1", "a2", "B", "b1", "b2", "Q")

    def test_fresh_pointers(self):
        layout = RobotLayout(step_budget=2, input_count=2, state_count=2, archiving=False, pointer_mode="fresh")
        assert layout.pointer_labels == ("A1", "A2")
        assert layout.pointer_for(1) == "A2"

    def test_direct_sensing_reads_systems(self):
        layout = RobotLayout(
            step_budget=2, input_count=2, state_count=3,
            systems=(("Q1", 2), ("Q2", 2)), archiving=False, pointer_mode=PointerMode.DIRECT,
        )
        assert layout.input_label(1) == "Q2"
        with pytest.raises(LayoutError):
            layout.pointer_for(0)

    def test_step_out_of_budget(self):
        with pytest.raises(LayoutError):
            RobotLayout(step_budget=1, input_count=2, state_count=2).archive_labels(1)


class TestCompileAutomatonStep:
    def test_archiving_step_writes_records(self):
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2)
        U = compile_automaton_step(flip_automaton(), layout, 0)
        assert validate_operator(U, "unitary", 1e-10).passed
        after = _digits(apply(U, _basis(layout, A=1, B=1)))
        assert after == {"A": 1, "a1": 1, "B": 0, "b1": 1, "Q": 0}

    def test_non_injective_with_archives(self):
        erase = Automaton(2, 2, np.zeros((2, 2), dtype=int), name="erase")
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2)
        U = compile_automaton_step(erase, layout, 0)
        after = _digits(apply(U, _basis(layout, A=0, B=1)))
        assert after["B"] == 0
        assert after["b1"] == 1

    def test_non_injective_without_archives(self):
        erase = Automaton(2, 2, np.zeros((2, 2), dtype=int), name="erase")
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2, archiving=False)
        with pytest.raises(AutomatonError, match="injective"):
            compile_automaton_step(erase, layout, 0)

    def test_input_dimension_mismatch(self):
        layout = RobotLayout(step_budget=1, input_count=3, state_count=2)
        with pytest.raises(AutomatonError):
            compile_automaton_step(flip_automaton(), layout, 0)

    def test_identity_keeps_brain(self):
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2, archiving=False)
        U = compile_automaton_step(identity_automaton(), layout, 0)
        np.testing.assert_allclose(U.entries, np.eye(layout.layout.total_dim))

    def test_counting_reads_each_copy(self):
        layout = RobotLayout(
            step_budget=2, input_count=2, state_count=3,
            systems=(("Q1", 2), ("Q2", 2)), archiving=False, pointer_mode=PointerMode.DIRECT,
        )
        automaton = counting_automaton(3)
        psi = _basis(layout, Q1=0, Q2=0)
        for step in range(2):
            psi = apply(compile_automaton_step(automaton, layout, step), psi)
        assert _digits(psi)["B"] == 2


class TestMeasurementUnitary:
    def test_pointer_records_outcome(self):
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2)
        family = family_on_registers(SpaceLayout.of(("Q", 2)), "Q")
        U = measurement_unitary(family, layout, 0)
        assert validate_operator(U, "unitary", 1e-10).passed
        assert _digits(apply(U, _basis(layout, Q=1)))["A"] == 1
        assert _digits(apply(U, _basis(layout, Q=0)))["A"] == 0

    def test_superposition_becomes_correlated(self):
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2)
        space = layout.layout
        amplitudes = np.zeros(space.total_dim, dtype=complex)
        amplitudes[space.index_of([0, 0, 0, 0, 0])] = 0.6
        amplitudes[space.index_of([0, 0, 0, 0, 1])] = 0.8
        U = measurement_unitary(family_on_registers(SpaceLayout.of(("Q", 2)), "Q"), layout, 0)
        psi = apply(U, StateVector(space, amplitudes))
        assert abs(psi.amplitudes[space.index_of([1, 0, 0, 0, 1])]) == pytest.approx(0.8)

    def test_rank_must_be_one(self):
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2, systems=(("Q", 2), ("R", 2)))
        family = family_on_registers(SpaceLayout.of(("Q", 2), ("R", 2)), "Q")
        with pytest.raises(OperatorValidationError):
            measurement_unitary(family, layout, 0)

    def test_too_many_outcomes(self):
        layout = RobotLayout(step_budget=1, input_count=2, state_count=2, systems=(("Q", 3),))
        with pytest.raises(LayoutError):
            measurement_unitary(family_on_registers(SpaceLayout.of(("Q", 3)), "Q"), layout, 0)


def test_register_contract():
    layout = RobotLayout(step_budget=1, input_count=2, state_count=2)
    check_register_clear(_basis(layout), "a1")
    with pytest.raises(ContractViolationError):
        check_register_clear(_basis(layout, a1=1), "a1")


class TestPosterior:
    def test_uniform_window_is_leftmost(self):
        summary = posterior_summary(Posterior.uniform(101), 0.95)
        assert summary.lower == 0.0
        assert summary.upper == pytest.approx(0.95)
        assert summary.mass == pytest.approx(96 / 101)

    def test_map_at_observed_frequency(self):
        posterior = bayes_update(Posterior.uniform(101), 36, 100)
        summary = posterior_summary(posterior)
        assert summary.map_point == pytest.approx(0.36)
        assert summary.lower < 0.36 < summary.upper
        assert summary.mass >= 0.95 - 1e-12

    def test_all_successes_peak_at_one(self):
        summary = posterior_summary(bayes_update(Posterior.uniform(101), 5, 5))
        assert summary.map_point == 1.0
        assert summary.upper == 1.0

    def test_weights_sum_to_one(self):
        posterior = bayes_update(Posterior.uniform(51), 3, 10)
        assert posterior.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_vanishing_likelihood_falls_back_to_flat(self):
        grid = np.linspace(0.0, 1.0, 11)
        prior = Posterior(grid, np.eye(11)[0])
        posterior = bayes_update(prior, 1, 1)
        assert posterior.degenerate
        np.testing.assert_allclose(posterior.weights, np.full(11, 1 / 11))

    def test_counts_validated(self):
        with pytest.raises(ValueError):
            bayes_update(Posterior.uniform(11), 4, 3)

    def test_level_validated(self):
        with pytest.raises(ValueError):
            posterior_summary(Posterior.uniform(11), 1.0)


def _direct_layout(steps: int, state_count: int, archiving: bool) -> RobotLayout:
    return RobotLayout(
        step_budget=steps,
        input_count=2,
        state_count=state_count,
        systems=tuple((f"Q{k + 1}", 2) for k in range(steps)),
        archiving=archiving,
        pointer_mode=PointerMode.DIRECT,
    )


OR_AUTOMATON = Automaton(2, 2, np.array([[0, 1], [1, 1]]), name="or")


class TestMemoryFaithfulness:
    @pytest.mark.parametrize("steps", range(1, 7))
    @pytest.mark.parametrize("kind", ["counting", "flip"])
    def test_brain_follows_fold(self, steps, kind):
        automaton = counting_automaton(steps + 1) if kind == "counting" else flip_automaton()
        layout = _direct_layout(steps, automaton.state_count, archiving=False)
        unitaries = [compile_automaton_step(automaton, layout, k) for k in range(steps)]
        for symbols in itertools.product(range(2), repeat=steps):
            psi = _basis(layout, **{f"Q{k + 1}": s for k, s in enumerate(symbols)})
            expected = automaton.fold(symbols)
            for k, U in enumerate(unitaries):
                psi = apply(U, psi)
                digits = _digits(psi)
                assert digits["B"] == expected[k]
                assert [digits[f"Q{i + 1}"] for i in range(steps)] == list(symbols)

    @pytest.mark.parametrize("steps", range(1, 4))
    def test_archives_keep_the_run(self, steps):
        layout = _direct_layout(steps, 2, archiving=True)
        unitaries = [compile_automaton_step(OR_AUTOMATON, layout, k) for k in range(steps)]
        for symbols in itertools.product(range(2), repeat=steps):
            psi = _basis(layout, **{f"Q{k + 1}": s for k, s in enumerate(symbols)})
            for U in unitaries:
                psi = apply(U, psi)
            digits = _digits(psi)
            states = OR_AUTOMATON.fold(symbols)
            assert digits["B"] == states[-1]
            assert [digits[f"a{k + 1}"] for k in range(steps)] == list(symbols)
            assert [digits[f"b{k + 1}"] for k in range(steps)] == [0] + states[:-1]


@pytest.mark.parametrize(
    "automaton, archiving",
    [
        (flip_automaton(), False),
        (flip_automaton(), True),
        (counting_automaton(3), False),
        (OR_AUTOMATON, True),
        (Automaton(3, 2, np.array([[1, 0], [1, 2], [0, 0]]), name="mixed"), True),
    ],
)
def test_compiled_step_is_permutation(automaton, archiving):
    layout = _direct_layout(2, automaton.state_count, archiving)
    U = compile_automaton_step(automaton, layout, 1).entries
    assert set(np.unique(U)) <= {0, 1}
    np.testing.assert_array_equal(U.sum(axis=0), np.ones(U.shape[0]))
    np.testing.assert_array_equal(U.sum(axis=1), np.ones(U.shape[0]))


class TestBayesProperties:
    def test_update_order_does_not_matter(self):
        prior = Posterior.uniform(101)
        first = bayes_update(bayes_update(prior, 3, 10), 25, 40)
        second = bayes_update(bayes_update(prior, 25, 40), 3, 10)
        joint = bayes_update(prior, 28, 50)
        np.testing.assert_allclose(first.weights, second.weights, atol=1e-12)
        np.testing.assert_allclose(first.weights, joint.weights, atol=1e-12)

    def test_credible_window_narrows_with_data(self):
        prior = Posterior.uniform(101)
        small = posterior_summary(bayes_update(prior, 36, 100))
        large = posterior_summary(bayes_update(prior, 144, 400))
        assert large.upper - large.lower < small.upper - small.lower
        assert large.lower <= 0.36 <= large.upper
