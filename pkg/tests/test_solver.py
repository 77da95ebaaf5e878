"""Polygon construction, growth bounds, refinement studies, CSV export."""

import math
import random

import pytest
from helpers import integrate_majorant

from diffinc.analyzer import check_trajectory_monotone, residual
from diffinc.selector import SelectionPolicy, WcmInfeasible, feasible_region
from diffinc.setmap import Expr, Piece, PiecewiseMap, Region, builtin
from diffinc.solver import (
    GrowthBounds,
    MeshTooCoarse,
    converge,
    euler_polygon,
    gronwall_bounds,
    min_steps,
    trajectory_from_csv,
    trajectory_to_csv,
)

LEX_MAX = SelectionPolicy("lex_max")


class TestGronwallBounds:
    def test_reference_case(self):
        g = gronwall_bounds(1, 1, 1, 1)
        assert g.state_bound == pytest.approx(4 * math.e - 3, abs=1e-12)
        assert g.velocity_bound == pytest.approx(4 * math.e, abs=1e-12)
        assert g.state_bound == pytest.approx(7.8731273138, abs=1e-6)
        assert g.velocity_bound == pytest.approx(10.8731273138, abs=1e-6)

    def test_zero_b_branch(self):
        g = gronwall_bounds(1, 0, 0, 2)
        assert (g.state_bound, g.velocity_bound) == (4.0, 2.0)

    def test_constant_speed(self):
        g = gronwall_bounds(0, 0, 5, 1)
        assert (g.state_bound, g.velocity_bound) == (6.0, 1.0)

    def test_matches_numeric_integration(self):
        for a, b, r0, horizon in [(1, 1, 1, 1), (0.5, 2, 3, 0.7), (2, 0, 1, 3)]:
            g = gronwall_bounds(a, b, r0, horizon)
            assert g.state_bound == pytest.approx(
                integrate_majorant(a, b, r0, horizon), rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            gronwall_bounds(-1, 0, 0, 1)
        with pytest.raises(ValueError):
            gronwall_bounds(0, 0, 0, 0)


class TestMinSteps:
    def test_examples(self):
        assert min_steps(gronwall_bounds(1, 1, 1, 1)) == 11
        assert min_steps(GrowthBounds(0, 0, 0, 1.0, 0.0, 0.5)) == 1
        assert min_steps(GrowthBounds(0, 0, 0, 2.0, 0.0, 3.0)) == 7

    def test_mesh_condition_holds(self):
        for t, m in [(1.0, 10.8731), (2.0, 3.0), (0.5, 0.1), (3.0, 7.7)]:
            n = min_steps(GrowthBounds(0, 0, 0, t, 0.0, m))
            assert (t / n) * m < 1.0
            assert n == 1 or (t / (n - 1)) * m >= 1.0


class TestEulerPolygon:
    def test_example4_exact_linear_solution(self):
        m = builtin("example4", {"n": 2})
        traj = euler_polygon(m, (-1.0, -0.5), 1.0, 16, v0=(-1.0, -1.0))
        assert traj.terminal == (-2.0, -1.5)
        assert all(v == (-1.0, -1.0) for v in traj.velocities)
        for t, node in zip(traj.times, traj.nodes):
            assert node == (-1.0 - t, -0.5 - t)

    def test_example2_growth_branch_closed_form(self):
        m = builtin("example2_F")
        traj = euler_polygon(m, (1.0,), 1.0, 1000, LEX_MAX, v0=(1.0,))
        h = 1.0 / 1000
        closed = 1.0
        for _ in range(1000):
            closed += h * closed  # same recurrence, independent accumulation
        assert traj.terminal[0] == closed
        assert abs(traj.terminal[0] - (1 + h) ** 1000) < 1e-9
        assert abs(traj.terminal[0] - math.e) <= 5e-3

    def test_project_policy_follows_nearest_branch(self):
        # started on the cube-root branch below the x = 1 branch crossing,
        # project keeps picking it (the t-branch point stays ~0.3 away
        # while consecutive cube roots differ by O(h)), so the polygon
        # tracks x' = x**(1/3): x(t) = ((2/3) t + 0.5**(2/3)) ** (3/2)
        from diffinc.setmap import real_cbrt
        m = builtin("example2_F")
        v0 = (real_cbrt(0.5),)
        traj = euler_polygon(m, (0.5,), 0.4, 1000, v0=v0)
        oracle = ((2.0 / 3.0) * 0.4 + 0.5 ** (2.0 / 3.0)) ** 1.5
        assert abs(traj.terminal[0] - oracle) <= 1e-3
        for node, v in zip(traj.nodes, traj.velocities):
            assert v[0] == real_cbrt(node[0])

    def test_antisign_infeasible_with_annotated_certificate(self):
        m = builtin("antisign")
        with pytest.raises(WcmInfeasible) as err:
            euler_polygon(m, (1.0,), 2.0, 64, v0=(-1.0,))
        e = err.value
        assert e.step is not None and e.state is not None
        assert e.state[0] < 0
        assert feasible_region(m.evaluate(e.state), e.prev_v, e.signs) is None

    def test_node_recurrence_and_residual(self):
        m = builtin("example2_G")
        traj = euler_polygon(m, (0.5,), 1.0, 40, v0=(1.5,))
        h = traj.mesh_size
        for i in range(traj.steps):
            expect = tuple(x + h * v for x, v in zip(traj.nodes[i], traj.velocities[i]))
            assert traj.nodes[i + 1] == expect
        assert residual(traj, m)[0] == 0.0

    def test_default_n_is_min_steps(self):
        m = builtin("example1")
        traj = euler_polygon(m, (0.0,), 1.0)
        g = gronwall_bounds(1, 0, 0, 1)
        assert traj.steps == min_steps(g)

    def test_mesh_enforcement(self):
        m = builtin("example2_F")
        with pytest.raises(MeshTooCoarse):
            euler_polygon(m, (1.0,), 1.0, 2)
        with pytest.warns(UserWarning):
            euler_polygon(m, (1.0,), 1.0, 2, enforce_mesh=False)

    def test_warns_without_growth_constants(self):
        m = PiecewiseMap(1, (Piece(Region(), (((Expr.const(0.0), Expr.const(0.0)),),)),))
        with pytest.warns(UserWarning):
            traj = euler_polygon(m, (1.0,), 1.0, 4)
        assert traj.terminal == (1.0,)

    def test_dimension_and_horizon_validation(self):
        m = builtin("example1")
        with pytest.raises(ValueError):
            euler_polygon(m, (0.0, 0.0), 1.0, 4)
        with pytest.raises(ValueError):
            euler_polygon(m, (0.0,), -1.0, 4)

    def test_monotone_by_construction(self):
        rng = random.Random(31)
        for name, params in [("example1", None), ("example2_F", None),
                             ("example2_G", None), ("example3", None),
                             ("example4", {"n": 2})]:
            m = builtin(name, dict(params) if params else None)
            for _ in range(5):
                x0 = tuple(rng.uniform(-2, 2) for _ in range(m.dim))
                traj = euler_polygon(m, x0, 1.0, 32)
                assert all(r.ok for r in check_trajectory_monotone(traj))

    def test_boundedness_under_declared_growth(self):
        m = builtin("example2_F")
        g = gronwall_bounds(1, 1, 1, 1)
        traj = euler_polygon(m, (1.0,), 1.0, 11, LEX_MAX, v0=(1.0,))
        assert max(abs(p[0]) for p in traj.nodes) <= g.state_bound
        assert max(abs(v[0]) for v in traj.velocities) <= g.velocity_bound

    def test_single_valued_monotone_maps_always_solve(self):
        # image expressions compose weakly monotone correctly-rounded ops,
        # so the sign constraint stays feasible even in floats
        from helpers import random_monotone_map
        rng = random.Random(33)
        for _ in range(25):
            m = random_monotone_map(rng, rng.randint(1, 3))
            x0 = tuple(rng.uniform(-2, 2) for _ in range(m.dim))
            traj = euler_polygon(m, x0, 0.25)
            assert all(r.ok for r in check_trajectory_monotone(traj))
            assert residual(traj, m, 2)[0] == 0.0


class TestInterpolate:
    def test_nodes_exact(self):
        traj = euler_polygon(builtin("example2_F"), (1.0,), 1.0, 37, LEX_MAX, v0=(1.0,))
        for i, t in enumerate(traj.times):
            assert traj.interpolate(t) == traj.nodes[i]

    def test_midpoint_is_average(self):
        traj = euler_polygon(builtin("example4", {"n": 1}), (-1.0,), 1.0, 16, v0=(-1.0,))
        for i in range(traj.steps):
            mid = (traj.times[i] + traj.times[i + 1]) / 2
            got = traj.interpolate(mid)[0]
            avg = (traj.nodes[i][0] + traj.nodes[i + 1][0]) / 2
            assert got == pytest.approx(avg, abs=1e-15)

    def test_exact_linear_case(self):
        traj = euler_polygon(builtin("example4", {"n": 1}), (-1.0,), 1.0, 16, v0=(-1.0,))
        assert traj.interpolate(0.3)[0] == pytest.approx(-1.3, abs=1e-12)

    def test_domain_check(self):
        traj = euler_polygon(builtin("example1"), (0.0,), 1.0, 4)
        with pytest.raises(ValueError):
            traj.interpolate(-0.1)
        with pytest.raises(ValueError):
            traj.interpolate(1.1)


class TestConverge:
    def test_first_order_on_growth_branch(self):
        rep = converge(builtin("example2_F"), (1.0,), 1.0, 125, 4, LEX_MAX, v0=(1.0,))
        assert len(rep.deltas) == 3
        for d1, d2 in zip(rep.deltas, rep.deltas[1:]):
            assert d2 <= 0.6 * d1

    def test_exact_case_zero_deltas(self):
        rep = converge(builtin("example4", {"n": 1}), (-1.0,), 1.0, 16, 3, v0=(-1.0,))
        assert rep.deltas == (0.0, 0.0)

    def test_pinned_example1(self):
        rep = converge(builtin("example1"), (0.0,), 1.0, 8, 3, v0=(1.0,))
        assert rep.deltas == (0.0, 0.0)
        assert rep.trajectories[0].terminal[0] == pytest.approx(1.0, abs=1e-12)
        assert all(mono == ("increasing",) for mono in rep.monotone)

    def test_infeasibility_carries_level(self):
        with pytest.raises(WcmInfeasible) as err:
            converge(builtin("antisign"), (1.0,), 2.0, 8, 3, v0=(-1.0,))
        assert err.value.level == 0

    def test_levels_validation(self):
        with pytest.raises(ValueError):
            converge(builtin("example1"), (0.0,), 1.0, 8, 1)

    def test_start_level_raised_to_mesh_minimum(self):
        rep = converge(builtin("example2_F"), (1.0,), 1.0, 2, 2, LEX_MAX, v0=(1.0,))
        assert rep.trajectories[0].steps == min_steps(gronwall_bounds(1, 1, 1, 1))
        assert rep.trajectories[1].steps == 2 * rep.trajectories[0].steps

    def test_thread_count_does_not_change_results(self):
        kw = dict(v0=(1.0,))
        seq = converge(builtin("example2_F"), (1.0,), 1.0, 50, 3, LEX_MAX, **kw)
        par = converge(builtin("example2_F"), (1.0,), 1.0, 50, 3, LEX_MAX,
                       threads=4, **kw)
        assert seq.deltas == par.deltas
        assert [t.terminal for t in seq.trajectories] == [t.terminal for t in par.trajectories]

    def test_report_json_shape(self):
        rep = converge(builtin("example4", {"n": 1}), (-1.0,), 1.0, 8, 2, v0=(-1.0,))
        doc = rep.to_json_dict()
        assert [lvl["steps"] for lvl in doc["levels"]] == [8, 16]
        assert doc["deltas"] == [0.0]
        assert doc["levels"][0]["node_residual"] == 0.0


class TestCsv:
    def test_roundtrip_bit_identical(self):
        traj = euler_polygon(builtin("example2_G"), (0.3,), 1.0, 25, v0=(1.3,))
        text = trajectory_to_csv(traj)
        again = trajectory_from_csv(text)
        assert again.times == traj.times
        assert again.nodes == traj.nodes
        assert again.velocities == traj.velocities

    def test_header_and_final_row(self):
        traj = euler_polygon(builtin("example4", {"n": 2}), (-1.0, -0.5), 1.0, 4,
                             v0=(-1.0, -1.0))
        lines = trajectory_to_csv(traj).strip().split("\n")
        assert lines[0] == "t,x_1,x_2,v_1,v_2"
        assert len(lines) == 1 + 5
        last = lines[-1].split(",")
        # velocity columns of the final row repeat the last interval velocity
        assert [float(c) for c in last[3:]] == list(traj.velocities[-1])

    def test_lf_and_decimal_point(self):
        traj = euler_polygon(builtin("example1"), (0.0,), 1.0, 3)
        text = trajectory_to_csv(traj)
        assert "\r" not in text and "," in text
