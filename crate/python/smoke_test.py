"""Smoke test for the pitshot Python extension.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
or `pip install crates/python`, then run `python python/smoke_test.py`.
"""

import math

import pitshot

THETA = math.radians(45.0)


def close(a, b, rel):
    assert abs(a - b) <= rel * abs(b), (a, b)


def main():
    v0 = pitshot.required_launch_speed(5.0, THETA)
    close(v0, 2.85043856, 1e-8)
    close(pitshot.spring_compression(v0), 0.0450019386, 1e-8)
    close(pitshot.max_depth(20.0, 5.0, THETA), 120.576923, 1e-8)
    close(pitshot.mission_duration(0.0), 9000.0 / 1420.0, 1e-12)

    plan = pitshot.plan_mission(5.0, 80.0, THETA, thruster="D12")
    close(math.degrees(plan.phi), 35.04, 1e-3)
    close(plan.v_f, 16.3745229, 1e-8)
    assert plan.thruster.total_impulse == 20.0
    assert plan.revolutions == round(plan.revolutions)

    flight = plan.simulate()
    assert flight["v_impact"] < 0.5, flight
    # a burn clipped at the floor leaves a small uncancelled arc
    if flight["burn_status"] == "BurnoutAboveFloor":
        assert flight["residual_transverse_impulse"] < 1e-6 * 20.0, flight
    else:
        assert flight["residual_transverse_impulse"] < 1e-2, flight

    mc = plan.monte_carlo(trials=200, sigma_w=0.1 * plan.w_f, seed=3, simulate=False)
    again = plan.monte_carlo(trials=200, sigma_w=0.1 * plan.w_f, seed=3, simulate=False)
    assert mc == again
    assert len(mc["trials"]) == 200 and mc["sim"] is None

    try:
        pitshot.plan_mission(5.0, 200.0, THETA)
    except pitshot.PitshotError as e:
        assert "insufficient impulse" in str(e)
    else:
        raise AssertionError("200 m pit should be infeasible")

    report, files = pitshot.run_command("figures", "d=5\nh=80\ntheta_deg=45\nthruster=D12\n")
    names = [name for name, _ in files]
    assert names == ["fig8a.csv", "fig8b.csv", "fig9a.csv", "fig9b.csv", "fig4.csv", "traj.csv"], names
    assert "fig8a.csv" in report

    print("pitshot python smoke test passed")


if __name__ == "__main__":
    main()
