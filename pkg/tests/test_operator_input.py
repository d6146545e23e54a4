"""Stick/gesture mapping exactness and input-script handling."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nudgenav.inputs import (DEADZONE, GestureSample, NoReferenceError, ScriptError,
                             StickSample, load_input_script, map_gesture,
                             map_joystick_sj, map_joystick_sw, quantize_tick)
from nudgenav.world import ParameterSet


class TestManualMapping:
    def test_deadzone_inside(self, params):
        u = map_joystick_sw(StickSample(0.05, 0.08), params)
        assert u.v == 0.0 and u.omega == 0.0

    def test_deadzone_boundary_inclusive(self, params):
        u = map_joystick_sw(StickSample(0.1, 0.1), params)
        assert u.v == 0.0 and u.omega == 0.0

    def test_full_deflection(self, params):
        u = map_joystick_sw(StickSample(0.0, 1.0), params)
        assert u.v == pytest.approx(params.v_max, abs=1e-12)
        assert u.omega == 0.0

    def test_quadratic_midpoints(self, params):
        u = map_joystick_sw(StickSample(-0.5, 0.8), params)
        assert u.v == pytest.approx(0.64 * params.v_max, abs=1e-12)
        assert u.omega == pytest.approx(-0.25 * params.omega_max, abs=1e-12)

    @given(st.floats(-1, 1), st.floats(-1, 1))
    @settings(max_examples=80)
    def test_odd_symmetry(self, px, py):
        p = ParameterSet()
        u_pos = map_joystick_sw(StickSample(px, py), p)
        u_neg = map_joystick_sw(StickSample(-px, -py), p)
        assert u_pos.v == -u_neg.v
        assert u_pos.omega == -u_neg.omega

    @given(st.floats(-1, 1))
    @settings(max_examples=80)
    def test_deadzone_exactness(self, px):
        p = ParameterSet()
        u = map_joystick_sw(StickSample(px, 0.0), p)
        if abs(px) <= DEADZONE:
            assert u.omega == 0.0
        else:
            assert abs(u.omega) > 0.0

    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=10))
    @settings(max_examples=50)
    def test_monotone_in_deflection(self, values):
        p = ParameterSet()
        values.sort()
        outs = [map_joystick_sw(StickSample(0.0, v), p).v for v in values]
        assert all(a <= b for a, b in zip(outs, outs[1:]))

    @given(st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=50)
    def test_bounded_even_for_wild_input(self, px, py):
        p = ParameterSet()
        u = map_joystick_sw(StickSample(px, py), p)
        assert abs(u.v) <= p.v_max and abs(u.omega) <= p.omega_max


class TestSharedJoystickMapping:
    def test_centered_stick_full_speed(self, params):
        u = map_joystick_sj(StickSample(0.0, 0.0), params)
        assert u.v == params.v_max and u.omega == 0.0

    def test_p_y_ignored(self, params):
        u = map_joystick_sj(StickSample(0.9, -1.0), params)
        assert u.v == params.v_max
        assert u.omega == pytest.approx(0.81 * params.omega_max, abs=1e-12)

    def test_full_left(self, params):
        u = map_joystick_sj(StickSample(-1.0, 0.0), params)
        assert u.v == params.v_max
        assert u.omega == pytest.approx(-params.omega_max, abs=1e-12)


class TestGestureMapping:
    def test_at_reference_goes_straight(self, params):
        u = map_gesture(GestureSample(hand_x=0.2, reference_x=0.2), params)
        assert u.v == params.v_max and u.omega == 0.0

    def test_full_span_saturates(self, params):
        u = map_gesture(GestureSample(hand_x=params.gesture_span, reference_x=0.0), params)
        assert u.omega == pytest.approx(params.omega_max, abs=1e-12)

    def test_half_span_quarter_turn_rate(self, params):
        u = map_gesture(GestureSample(hand_x=params.gesture_span / 2, reference_x=0.0), params)
        assert u.omega == pytest.approx(0.25 * params.omega_max, abs=1e-12)

    def test_beyond_span_clamps(self, params):
        u = map_gesture(GestureSample(hand_x=5.0, reference_x=0.0), params)
        assert u.omega == pytest.approx(params.omega_max, abs=1e-12)

    def test_requires_reference(self, params):
        with pytest.raises(NoReferenceError):
            map_gesture(GestureSample(hand_x=0.1, reference_x=None), params)


class TestStickIngest:
    def test_clamped_on_construction(self):
        s = StickSample(3.0, -2.0)
        assert s.p_x == 1.0 and s.p_y == -1.0


class TestScripts:
    def test_quantized_to_next_tick(self):
        assert quantize_tick(10.0, 0.05) == 200
        assert quantize_tick(10.02, 0.05) == 201
        assert quantize_tick(0.0, 0.05) == 0

    def test_load_orders_and_clamps(self):
        text = "\n".join([
            '{"t": 0.30, "kind": "stick", "p_x": 2.0, "p_y": 0.0}',
            '{"t": 0.10, "kind": "button_down"}',
            "",
            '{"t": 0.10, "kind": "stick", "p_x": 0.5, "p_y": 0.5}',
        ])
        events = load_input_script(text, 0.05)
        assert [e.kind for e in events] == ["button_down", "stick", "stick"]
        assert events[2].p_x == 1.0

    def test_bad_kind_rejected(self):
        with pytest.raises(ScriptError, match="kind"):
            load_input_script('{"t": 0.0, "kind": "wave"}', 0.05)

    def test_bad_json_reports_line(self):
        with pytest.raises(ScriptError, match="line 2"):
            load_input_script('{"t": 0.0, "kind": "button_down"}\n{oops', 0.05)

    def test_missing_time_rejected(self):
        with pytest.raises(ScriptError, match="'t'"):
            load_input_script('{"kind": "button_down"}', 0.05)
