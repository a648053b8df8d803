"""Stopping rule tests: the paired-threshold formula at pinned values, the
point and predictive criteria on hand-built posteriors, and the precedence
of the hard caps over the criteria."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaq import (
    StopDecision,
    StoppingRule,
    point_rule_met,
    predictive_rule_met,
    rule_from_config,
    should_stop,
    threshold_pair,
)
from vaq.stopping import (
    BANK_EXHAUSTED,
    CRITERION_MET,
    MAX_LENGTH_REACHED,
    NOT_STOPPED,
    _event_fraction,
)


class TestThresholdPair:
    @pytest.mark.parametrize(
        "p1st, d, causes, want",
        [(0.8, 0.0, 10, 0.02), (0.8, 0.5, 10, 0.10), (0.9, 0.5, 34, 0.05)],
    )
    def test_pinned_values(self, p1st, d, causes, want):
        assert threshold_pair(p1st, d, causes) == pytest.approx(want, abs=1e-12)

    def test_d_zero_is_uniform_residual_share(self):
        for c in (2, 5, 17):
            assert threshold_pair(0.7, 0.0, c) == pytest.approx(0.3 / c, abs=1e-12)

    def test_two_causes_ignore_d(self):
        # (C - 2) zeroes the relaxation term.
        assert threshold_pair(0.6, 0.0, 2) == threshold_pair(0.6, 1.0, 2)

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(0.01, 0.99),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
        st.integers(2, 40),
    )
    def test_monotone_in_d_and_bounded(self, p1st, d_lo, d_hi, causes):
        d_lo, d_hi = sorted((d_lo, d_hi))
        lo = threshold_pair(p1st, d_lo, causes)
        hi = threshold_pair(p1st, d_hi, causes)
        assert 0.0 < lo <= hi
        # d=1 yields (C-1)/C of the residual mass, still below p1st's slack
        assert hi <= (1.0 - p1st) * (causes - 1) / causes + 1e-12

    def test_validation(self):
        with pytest.raises(ValueError, match="p1st"):
            threshold_pair(1.0, 0.0, 10)
        with pytest.raises(ValueError, match="d must"):
            threshold_pair(0.8, 1.5, 10)
        with pytest.raises(ValueError, match="two causes"):
            threshold_pair(0.8, 0.0, 1)


class TestRuleConstruction:
    def test_flat_config_layout(self):
        rule = rule_from_config({"rule": "predictive", "p1st": 0.8, "d": 0.5, "r": 0.7})
        assert rule.kind == "predictive"
        assert rule.p1st == 0.8
        assert rule.d == 0.5
        assert rule.r == 0.7
        assert rule.p2nd is None

    def test_nested_config_layout(self):
        rule = rule_from_config({"rule": {"kind": "point", "p1st": 0.9, "p2nd": 0.05}})
        assert rule.kind == "point"
        assert rule.p2nd == 0.05

    def test_kind_defaults_to_point(self):
        rule = rule_from_config({"rule": {"p1st": 0.8, "d": 0.0}})
        assert rule.kind == "point"

    def test_unknown_fields_rejected(self):
        with pytest.raises(ValueError, match="unknown stopping rule fields"):
            rule_from_config({"rule": {"p1st": 0.8, "d": 0.0, "wat": 1}})

    def test_fixed_length_layout(self):
        rule = rule_from_config({"rule": "fixed_length", "length": 12})
        assert rule.kind == "fixed_length"
        assert rule.length == 12

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            (dict(kind="nope", length=3), "unknown stopping rule kind"),
            (dict(kind="fixed_length"), "positive length"),
            (dict(kind="fixed_length", length=0), "positive length"),
            (dict(kind="point", p1st=1.2, d=0.0), "p1st"),
            (dict(kind="point", p1st=0.8), "p2nd directly or d"),
            (dict(kind="point", p1st=0.8, p2nd=0.9), "p2nd must satisfy"),
            (dict(kind="point", p1st=0.8, p2nd=0.0), "p2nd must satisfy"),
            (dict(kind="point", p1st=0.8, d=-0.1), "d must lie"),
            (dict(kind="predictive", p1st=0.8, d=0.0), "r must lie"),
            (dict(kind="predictive", p1st=0.8, d=0.0, r=1.0), "r must lie"),
            (dict(kind="point", p1st=0.8, d=0.0, max_length=0), "max_length"),
            (dict(kind="fixed_length", length=9, max_length=5), "exceeds max_length"),
        ],
    )
    def test_validation(self, kwargs, match):
        with pytest.raises(ValueError, match=match):
            StoppingRule(**kwargs)

    def test_resolve_fills_p2nd_and_cap(self):
        rule = StoppingRule.point(0.8, d=0.5).resolve(num_causes=10, num_questions=50)
        assert rule.p2nd == pytest.approx(0.10, abs=1e-12)
        assert rule.max_length == 50

    def test_resolve_keeps_explicit_values(self):
        rule = StoppingRule.point(0.8, 0.03, max_length=20)
        resolved = rule.resolve(num_causes=10, num_questions=50)
        assert resolved.p2nd == 0.03
        assert resolved.max_length == 20

    def test_resolve_is_idempotent(self):
        rule = StoppingRule.predictive(0.8, 0.7, d=0.5).resolve(10, 50)
        assert rule.resolve(10, 50) == rule


class TestPointCriterion:
    def test_spec_examples(self):
        assert point_rule_met(np.array([0.85, 0.05, 0.10]), 0.8, 0.11)
        assert not point_rule_met(np.array([0.85, 0.12, 0.03]), 0.8, 0.10)

    def test_thresholds_are_strict(self):
        assert not point_rule_met(np.array([0.8, 0.1, 0.1]), 0.8, 0.11)
        assert not point_rule_met(np.array([0.85, 0.10, 0.05]), 0.8, 0.10)

    def test_position_does_not_matter(self):
        assert point_rule_met(np.array([0.05, 0.10, 0.85]), 0.8, 0.11)

    def test_needs_two_causes(self):
        with pytest.raises(ValueError, match="two causes"):
            point_rule_met(np.array([1.0]), 0.8, 0.1)


class TestPredictiveCriterion:
    def draws(self):
        # modal cause is the first: 3 of 4 draws put it on top
        return np.array(
            [
                [0.90, 0.05, 0.05],
                [0.85, 0.10, 0.05],
                [0.60, 0.25, 0.15],
                [0.20, 0.70, 0.10],
            ]
        )

    def test_fraction_counts_qualifying_draws(self):
        # rows 1-2 clear (0.8, 0.11); row 3 fails p1st, row 4 targets the
        # modal cause so its 0.20 entry fails too
        stop, fraction = predictive_rule_met(self.draws(), 0.8, 0.11, 0.5)
        assert fraction == pytest.approx(0.5)
        assert stop

    def test_boundary_fraction_stops(self):
        stop, fraction = predictive_rule_met(self.draws(), 0.8, 0.11, 0.5 + 1e-9)
        assert not stop
        assert fraction == pytest.approx(0.5)

    def test_fraction_is_builtin_float(self):
        frac = _event_fraction(self.draws(), 0, 0.8, 0.11)
        assert type(frac) is float

    def test_event_requires_all_others_below_second_threshold(self):
        probs = np.array([[0.85, 0.10, 0.05]])
        assert _event_fraction(probs, 0, 0.8, 0.11) == 1.0
        assert _event_fraction(probs, 0, 0.8, 0.10) == 0.0

    def test_rejects_vector_input(self):
        with pytest.raises(ValueError, match="matrix"):
            predictive_rule_met(np.array([0.9, 0.1]), 0.8, 0.1, 0.5)


class TestShouldStop:
    def point_rule(self, **kw):
        base = dict(p1st=0.8, p2nd=0.11, max_length=20)
        base.update(kw)
        return StoppingRule.point(**base)

    def test_bank_exhaustion_wins(self):
        decision = should_stop(self.point_rule(), 0, np.array([0.5, 0.5]), [])
        assert decision == StopDecision(True, BANK_EXHAUSTED)

    def test_max_length_cap(self):
        probs = np.array([0.5, 0.5])
        decision = should_stop(self.point_rule(max_length=5), 5, probs, [7])
        assert decision.stop and decision.reason == MAX_LENGTH_REACHED

    def test_cap_precedes_criterion(self):
        # criterion would also fire; the cap reason wins
        probs = np.array([0.95, 0.03, 0.02])
        decision = should_stop(self.point_rule(max_length=3), 3, probs, [9])
        assert decision.reason == MAX_LENGTH_REACHED

    def test_never_stops_before_first_answer(self):
        probs = np.array([0.99, 0.005, 0.005])
        decision = should_stop(self.point_rule(), 0, probs, [1, 2])
        assert decision == StopDecision(False, NOT_STOPPED)

    def test_point_criterion_fires(self):
        probs = np.array([0.85, 0.05, 0.10])
        decision = should_stop(self.point_rule(), 3, probs, [1])
        assert decision == StopDecision(True, CRITERION_MET)

    def test_point_criterion_not_met(self):
        probs = np.array([0.70, 0.20, 0.10])
        decision = should_stop(self.point_rule(), 3, probs, [1])
        assert decision == StopDecision(False, NOT_STOPPED)

    def test_fixed_length_reports_max_length_reason(self):
        rule = StoppingRule.fixed_length(4)
        assert should_stop(rule, 3, None, [1]) == StopDecision(False, NOT_STOPPED)
        assert should_stop(rule, 4, None, [1]) == StopDecision(
            True, MAX_LENGTH_REACHED
        )

    def test_predictive_reports_fraction_even_without_stop(self):
        rule = StoppingRule.predictive(0.8, 0.9, p2nd=0.11, max_length=20)
        draws = np.array([[0.85, 0.1, 0.05], [0.5, 0.3, 0.2]])
        decision = should_stop(rule, 2, draws, [4])
        assert not decision.stop
        assert decision.satisfied_fraction == pytest.approx(0.5)

    def test_predictive_stop(self):
        rule = StoppingRule.predictive(0.8, 0.5, p2nd=0.11, max_length=20)
        draws = np.array([[0.85, 0.1, 0.05], [0.5, 0.3, 0.2]])
        decision = should_stop(rule, 2, draws, [4])
        assert decision.stop and decision.reason == CRITERION_MET
        assert decision.satisfied_fraction == pytest.approx(0.5)

    def test_predictive_fraction_on_cap_path(self):
        rule = StoppingRule.predictive(0.8, 0.5, p2nd=0.11, max_length=2)
        draws = np.array([[0.85, 0.1, 0.05], [0.5, 0.3, 0.2]])
        decision = should_stop(rule, 2, draws, [4])
        assert decision.reason == MAX_LENGTH_REACHED
        assert decision.satisfied_fraction == pytest.approx(0.5)

    def test_input_shape_errors(self):
        with pytest.raises(ValueError, match="non-negative"):
            should_stop(self.point_rule(), -1, np.array([0.5, 0.5]), [1])
        with pytest.raises(ValueError, match="vector"):
            should_stop(self.point_rule(), 2, np.eye(2), [1])
        rule = StoppingRule.predictive(0.8, 0.5, p2nd=0.11)
        with pytest.raises(ValueError, match="matrix"):
            should_stop(rule, 2, np.array([0.5, 0.5]), [1])
