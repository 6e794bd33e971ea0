import random

import pytest
from hypothesis import given, settings, strategies as st

from pimproto import (
    PIM,
    PresentationModel,
    generate_tests,
    must_pass_through,
    reachability,
)
from pimproto.analysis import analyze_project
from pimproto.errors import (
    InvalidPim,
    OperationCancelled,
    TargetIsInitial,
    UnknownState,
)
from pimproto.pim import Behaviour, Transition, Widget, WidgetCategory

from corpus import chain_pim, gate_oracle, random_pim, reachable_oracle


def with_extra_edge(pim, source, target):
    """Add a widget-backed transition to a hand-built PIM."""
    behaviour = f"I_{target}"
    state = pim.state(source)
    state.widgets.append(Widget(f"w_{source}_{target}", WidgetCategory.ACTION_CONTROL,
                                [Behaviour("I", behaviour, target)]))
    pim.transitions.append(Transition(source, target, behaviour))
    return pim


class TestReachability:
    def test_chain(self):
        report = reachability(chain_pim("A", "B", "C"))
        assert report.unreachable == set()
        assert report.dead_ends == {"C"}

    def test_isolated_state(self):
        pim = chain_pim("A", "B")
        pim.states.append(PresentationModel("C"))
        report = reachability(pim)
        assert report.reachable == {"A", "B"}
        assert report.unreachable == {"C"}

    def test_single_state(self):
        pim = chain_pim("A")
        report = reachability(pim)
        assert report.reachable == {"A"}
        assert report.dead_ends == {"A"}

    def test_requires_valid_pim(self):
        pim = chain_pim("A", "B")
        pim.initial = "Z"
        with pytest.raises(InvalidPim):
            reachability(pim)

    def test_cancellation_between_layers(self):
        pim = chain_pim("A", "B", "C", "D")
        calls = []

        def cancel():
            calls.append(None)
            return len(calls) > 1

        with pytest.raises(OperationCancelled):
            reachability(pim, cancel=cancel)

    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 10**9))
    def test_matches_matrix_oracle(self, seed):
        pim = random_pim(random.Random(seed))
        report = reachability(pim)
        assert report.reachable == reachable_oracle(pim)
        assert report.unreachable == set(pim.state_names()) - report.reachable


class TestMustPassThrough:
    def test_only_path_goes_through_gate(self):
        assert must_pass_through(chain_pim("A", "B", "C"), "B", "C").holds

    def test_bypass_defeats_gate(self):
        pim = with_extra_edge(chain_pim("A", "B", "C"), "A", "C")
        check = must_pass_through(pim, "B", "C")
        assert not check.holds
        assert not check.vacuous

    def test_initial_gates_everything(self):
        check = must_pass_through(chain_pim("A", "B", "C"), "A", "C")
        assert check.holds and not check.vacuous

    def test_unreachable_target_is_vacuous(self):
        pim = chain_pim("A", "B")
        pim.states.append(PresentationModel("C"))
        check = must_pass_through(pim, "B", "C")
        assert check.holds and check.vacuous

    def test_unknown_states(self):
        with pytest.raises(UnknownState):
            must_pass_through(chain_pim("A", "B"), "Z", "B")
        with pytest.raises(UnknownState):
            must_pass_through(chain_pim("A", "B"), "A", "Z")

    def test_target_is_initial(self):
        with pytest.raises(TargetIsInitial):
            must_pass_through(chain_pim("A", "B"), "B", "A")

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**9))
    def test_matches_path_enumeration_oracle(self, seed):
        rng = random.Random(seed)
        pim = random_pim(rng, max_states=8)
        names = pim.state_names()
        for _ in range(3):
            gate = rng.choice(names)
            target = rng.choice(names)
            if target == pim.initial:
                continue
            expected_holds, expected_vacuous = gate_oracle(pim, gate, target)
            check = must_pass_through(pim, gate, target)
            assert check.holds == expected_holds
            assert check.vacuous == expected_vacuous


class TestGenerateTests:
    def test_chain_collapses_to_one_test(self):
        suite = generate_tests(chain_pim("A", "B", "C"))
        assert len(suite.tests) == 1
        assert suite.tests[0].steps == [("A", "I_B", "B"), ("B", "I_C", "C")]
        assert suite.tests[0].covered_transitions == {("A", "I_B"), ("B", "I_C")}
        assert suite.uncovered_transitions == set()

    def test_star_keeps_branches_separate(self):
        pim = with_extra_edge(chain_pim("A", "B"), "A", "C")
        pim.states.append(PresentationModel("C"))
        suite = generate_tests(pim)
        assert len(suite.tests) == 2
        assert [t.steps for t in suite.tests] == [
            [("A", "I_B", "B")],
            [("A", "I_C", "C")],
        ]

    def test_unreachable_transition_reported_not_covered(self):
        pim = chain_pim("A", "B")
        pim.states.append(PresentationModel("D"))
        pim.states.append(PresentationModel("E"))
        with_extra_edge(pim, "D", "E")
        suite = generate_tests(pim)
        assert suite.uncovered_transitions == {("D", "I_E")}
        assert ("D", "I_E") not in suite.covered()

    def test_ids_and_order_deterministic(self):
        pim = with_extra_edge(chain_pim("A", "B"), "A", "C")
        pim.states.append(PresentationModel("C"))
        first = generate_tests(pim)
        second = generate_tests(pim)
        assert [t.id for t in first.tests] == ["t1", "t2"]
        assert first == second

    def test_steps_form_connected_path_from_initial(self):
        rng = random.Random(7)
        for _ in range(20):
            pim = random_pim(rng)
            suite = generate_tests(pim)
            for case in suite.tests:
                position = pim.initial
                for state, behaviour, nxt in case.steps:
                    assert state == position
                    assert any(t.source == state and t.behaviour == behaviour
                               and t.target == nxt for t in pim.transitions)
                    position = nxt

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**9))
    def test_full_transition_coverage(self, seed):
        pim = random_pim(random.Random(seed))
        suite = generate_tests(pim)
        reachable = reachability(pim).reachable
        expected = {(t.source, t.behaviour) for t in pim.transitions
                    if t.source in reachable}
        assert suite.covered() == expected
        assert suite.uncovered_transitions == {
            (t.source, t.behaviour) for t in pim.transitions
            if t.source not in reachable}


def test_analyze_project_includes_dangling_hotspots():
    from pimproto import Rect, create_project

    p = create_project("P")
    home = p.add_screen("Home")
    lost = p.add_screen("Lost")
    linked = p.add_hotspot(home.id, Rect(0, 0, 0.25, 0.25))
    p.set_hotspot_link(home.id, linked.id, home.id)
    dangling = p.add_hotspot(home.id, Rect(0.5, 0.5, 0.25, 0.25))
    report = analyze_project(p)
    assert report.unreachable == {"Lost"}
    assert report.dangling_hotspots == [(home.id, dangling.id)]
