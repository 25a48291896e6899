import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puedet.errors import InvalidInputError
from puedet.propagation import LinkModel, NoiseModel, distance_from_rss, received_power_db
from puedet.scenario import (
    PU,
    PUE,
    AnchorNode,
    Scenario,
    Trajectory,
    default_scenario,
    emit_position_measurement,
    emit_rss,
    place_attacker_at_offset,
    truth_at,
    with_schedule_at,
)


def line_trajectory(vx=1.0, vy=0.0, duration=100.0, start=(0.0, 0.0)):
    return Trajectory.from_segments(start, (vx, vy), [(duration, 0.0, 0.0)])


def simple_scenario(traj, n_steps, dt=1.0, sigma_z=0.0, sigma_db=0.0, attacker=(50.0, 0.0)):
    return Scenario(
        trajectory=traj,
        attacker_pos=attacker,
        anchors=(AnchorNode("a1", 100.0, 0.0),),
        dt=dt,
        meas_noise_std=sigma_z,
        link=LinkModel(),
        rss_noise=NoiseModel(sigma_db),
        transmitter_schedule=(PU,) * n_steps,
    )


class TestTrajectory:
    def test_waypoints_derived_from_segments(self):
        traj = Trajectory.from_segments((0, 0), (1, 2), [(10, 0, 0), (5, 1, 0)])
        assert traj.times == (0.0, 10.0, 15.0)
        assert traj.positions[1] == (10.0, 20.0)
        # second segment: x = 10 + 1*5 + 0.5*1*25 = 27.5
        assert traj.positions[2] == (27.5, 30.0)
        assert traj.velocities[2] == (6.0, 2.0)

    def test_inconsistent_waypoints_rejected(self):
        with pytest.raises(InvalidInputError, match="inconsistent"):
            Trajectory(
                times=(0.0, 1.0),
                positions=((0.0, 0.0), (5.0, 0.0)),  # should be (1, 0) for v=(1,0), a=0
                velocities=((1.0, 0.0), (1.0, 0.0)),
                accels=((0.0, 0.0),),
            )

    def test_non_increasing_times_rejected(self):
        with pytest.raises(InvalidInputError):
            Trajectory(
                times=(0.0, 0.0),
                positions=((0.0, 0.0), (0.0, 0.0)),
                velocities=((0.0, 0.0), (0.0, 0.0)),
                accels=((0.0, 0.0),),
            )

    def test_segment_boundary_belongs_to_next_segment(self):
        traj = Trajectory.from_segments((0, 0), (0, 0), [(10, 1, 0), (10, -1, 0)])
        assert traj.accel_at(9.999) == (1.0, 0.0)
        assert traj.accel_at(10.0) == (-1.0, 0.0)
        assert traj.accel_at(20.0) == (-1.0, 0.0)

    @given(
        segs=st.lists(
            st.tuples(st.floats(0.5, 20), st.floats(-2, 2), st.floats(-2, 2)),
            min_size=1,
            max_size=5,
        ),
        frac=st.floats(0.0, 1.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_state_matches_fine_step_integration_oracle(self, segs, frac):
        traj = Trajectory.from_segments((3.0, -4.0), (1.5, 0.5), segs)
        t = traj.start_time + frac * (traj.end_time - traj.start_time)
        # Independent oracle: velocity-Verlet integration (exact per step for
        # piecewise-constant acceleration, so the step size only bounds float
        # accumulation error).
        pos = np.array([3.0, -4.0])
        vel = np.array([1.5, 0.5])
        h = 0.01
        clock = 0.0
        for dur, ax, ay in segs:
            acc = np.array([ax, ay])
            end = min(clock + dur, t)
            while clock < end - 1e-12:
                step = min(h, end - clock)
                pos = pos + vel * step + 0.5 * acc * step * step
                vel = vel + acc * step
                clock += step
            if end >= t - 1e-12:
                break
        state = traj.state_at(t)
        assert state.x == pytest.approx(pos[0], abs=1e-6)
        assert state.y == pytest.approx(pos[1], abs=1e-6)
        assert state.vx == pytest.approx(vel[0], abs=1e-6)
        assert state.vy == pytest.approx(vel[1], abs=1e-6)


class TestTruthAt:
    def test_straight_line(self):
        scen = simple_scenario(line_trajectory(1.0, 0.0), n_steps=20)
        s = truth_at(scen, 10)
        assert (s.x, s.y, s.vx, s.vy) == (10.0, 0.0, 1.0, 0.0)

    def test_step_zero_is_first_waypoint(self):
        scen = simple_scenario(line_trajectory(2.0, -1.0, start=(7.0, 8.0)), n_steps=5)
        s = truth_at(scen, 0)
        assert (s.x, s.y) == (7.0, 8.0)

    def test_parabolic_segment(self):
        traj = Trajectory.from_segments((0, 0), (0, 0), [(10, 0.0, 1.0)])
        scen = simple_scenario(traj, n_steps=10)
        s = truth_at(scen, 4)
        assert (s.x, s.y) == (0.0, 8.0)
        assert (s.vx, s.vy) == (0.0, 4.0)

    def test_out_of_range_step(self):
        scen = simple_scenario(line_trajectory(), n_steps=10)
        with pytest.raises(InvalidInputError):
            truth_at(scen, 10)
        with pytest.raises(InvalidInputError):
            truth_at(scen, -1)


class TestEmissions:
    def test_zero_noise_measurement_equals_truth(self):
        scen = simple_scenario(line_trajectory(), n_steps=10, sigma_z=0.0)
        z = emit_position_measurement(scen, 3, np.random.default_rng(0))
        assert np.array_equal(z, truth_at(scen, 3).position)

    def test_measurement_reproducible(self):
        scen = simple_scenario(line_trajectory(), n_steps=10, sigma_z=5.0)
        a = emit_position_measurement(scen, 3, np.random.default_rng(11))
        b = emit_position_measurement(scen, 3, np.random.default_rng(11))
        assert np.array_equal(a, b)

    def test_measurement_noise_statistics(self):
        scen = simple_scenario(line_trajectory(), n_steps=10, sigma_z=5.0)
        rng = np.random.default_rng(1)
        truth = truth_at(scen, 0).position
        zs = np.array([emit_position_measurement(scen, 0, rng) for _ in range(100_000)])
        err = zs - truth
        assert abs(err[:, 0].std() - 5.0) <= 0.15
        assert abs(err[:, 1].std() - 5.0) <= 0.15

    def test_rss_from_pu_position(self):
        scen = simple_scenario(line_trajectory(0.0, 0.0), n_steps=5)
        s = emit_rss(scen, 0, scen.anchors[0], np.random.default_rng(0))
        assert s.pr_db == received_power_db(scen.link, 100.0)
        assert s.anchor_id == "a1"

    def test_rss_from_attacker_position(self):
        scen = simple_scenario(line_trajectory(0.0, 0.0), n_steps=5, attacker=(50.0, 0.0))
        scen = with_schedule_at(scen, 2, PUE)
        anchor = AnchorNode("b", 50.0, 40.0)
        s = emit_rss(scen, 2, anchor, np.random.default_rng(0))
        assert s.pr_db == received_power_db(scen.link, 40.0)

    def test_noiseless_rss_inverts_to_true_distance(self):
        scen = simple_scenario(line_trajectory(3.0, 1.0), n_steps=20)
        for step in (0, 7, 19):
            s = emit_rss(scen, step, scen.anchors[0], np.random.default_rng(0))
            truth = truth_at(scen, step)
            d_true = math.hypot(truth.x - 100.0, truth.y - 0.0)
            assert distance_from_rss(scen.link, s.pr_db) == pytest.approx(d_true, rel=1e-9)

    def test_zero_distance_rejected(self):
        scen = simple_scenario(line_trajectory(0.0, 0.0, start=(100.0, 0.0)), n_steps=5)
        with pytest.raises(InvalidInputError):
            emit_rss(scen, 0, scen.anchors[0], np.random.default_rng(0))


class TestAttackerPlacement:
    def test_zero_offset_coincides_with_pu(self):
        traj = line_trajectory(1.0, 0.0)
        assert place_attacker_at_offset(traj, 5, 0.0, 1.234) == (5.0, 0.0)

    def test_offset_east(self):
        traj = line_trajectory(0.0, 0.0, start=(10.0, 10.0))
        assert place_attacker_at_offset(traj, 0, 50.0, 0.0) == (60.0, 10.0)

    def test_offset_north(self):
        traj = line_trajectory(0.0, 0.0)
        x, y = place_attacker_at_offset(traj, 0, 100.0, math.pi / 2)
        assert (x, y) == pytest.approx((0.0, 100.0), abs=1e-9)

    @given(
        d=st.floats(0, 1e4),
        bearing=st.floats(-10, 10),
        step=st.integers(0, 50),
    )
    @settings(max_examples=100, deadline=None)
    def test_offset_distance_is_exact(self, d, bearing, step):
        traj = line_trajectory(1.0, -0.5)
        ref = traj.state_at(float(step))
        x, y = place_attacker_at_offset(traj, step, d, bearing)
        assert math.hypot(x - ref.x, y - ref.y) == pytest.approx(d, rel=1e-9, abs=1e-9)

    def test_negative_distance_rejected(self):
        with pytest.raises(InvalidInputError):
            place_attacker_at_offset(line_trajectory(), 0, -1.0, 0.0)


class TestScenarioValidation:
    def test_bad_schedule_label(self):
        with pytest.raises(InvalidInputError, match="schedule"):
            Scenario(
                trajectory=line_trajectory(),
                attacker_pos=(0.0, 0.0),
                anchors=(AnchorNode("a", 1.0, 1.0),),
                dt=1.0,
                meas_noise_std=0.0,
                link=LinkModel(),
                rss_noise=NoiseModel(0.0),
                transmitter_schedule=("PU", "bogus"),
            )

    def test_needs_anchor_and_positive_dt(self):
        kwargs = dict(
            trajectory=line_trajectory(),
            attacker_pos=(0.0, 0.0),
            anchors=(AnchorNode("a", 1.0, 1.0),),
            dt=1.0,
            meas_noise_std=0.0,
            link=LinkModel(),
            rss_noise=NoiseModel(0.0),
            transmitter_schedule=(PU,) * 5,
        )
        with pytest.raises(InvalidInputError):
            Scenario(**{**kwargs, "anchors": ()})
        with pytest.raises(InvalidInputError):
            Scenario(**{**kwargs, "dt": 0.0})

    def test_schedule_longer_than_trajectory_rejected(self):
        with pytest.raises(InvalidInputError, match="trajectory ends"):
            simple_scenario(line_trajectory(duration=10.0), n_steps=12)

    def test_default_scenario_shape(self):
        scen = default_scenario()
        assert scen.n_steps == 200
        assert scen.evaluation_step == 199
        assert scen.anchors[0].position.tolist() == [500.0, 0.0]
        # stays within the nominal 1000 m x 1000 m field
        for k in (0, 50, 100, 150, 199):
            s = truth_at(scen, k)
            assert 0.0 <= s.x <= 1000.0 and 0.0 <= s.y <= 1000.0
