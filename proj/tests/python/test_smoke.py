import math

import pytest

import wcl


def base_config(**over):
    cfg = {
        "scenario": "smoke",
        "deployment": {"placement": "fixed_grid", "radius": 100, "n": 100},
        "channel": {"sigma_s": 4},
        "trials": 50,
        "seed": 3,
    }
    cfg.update(over)
    return cfg


def test_grid_and_estimate():
    dep = wcl.place_fixed_grid(100.0, 100)
    # the disk clips the 10x10 lattice corners
    assert dep.size() == 96
    params = wcl.ChannelParams()
    rss = wcl.sample_rss(params, dep, wcl.Rng(1))
    est = wcl.wcl_estimate(dep, rss, wcl.border_pmin(params, 100.0))
    assert wcl.localization_error(est, dep.pu) == pytest.approx(0.0, abs=1e-9)


def test_path_loss():
    p = wcl.ChannelParams()
    assert wcl.mean_received_power(p, 10.0) == pytest.approx(-38.0)
    with pytest.raises(wcl.WclError):
        wcl.mean_received_power(p, 0.0)


def test_experiment_deterministic():
    a = wcl.run_experiment(base_config())
    b = wcl.run_experiment(base_config())
    assert a == b
    assert a["trials"] == 50
    assert a["mean_err_over_D"] * a["D"] == pytest.approx(a["mean_err_m"], rel=1e-12)


def test_theory_close_to_simulation():
    sim = wcl.run_experiment(base_config(trials=1000))
    th = wcl.run_theory(base_config())
    se = sim["std_err"] / math.sqrt(sim["trials"])
    assert abs(sim["mean_err_m"] - th["mean_err_m"]) < 4 * se


def test_overhead_arithmetic():
    assert wcl.cwcl_ops(100) == 2500
    assert wcl.dwcl_ops(100, 25, 4, 6, 0.25) == pytest.approx(10168)
    assert wcl.dwcl_message_count(25, 4, 6, 0.25) == pytest.approx((120, 12))


def test_bad_config_raises():
    with pytest.raises(wcl.WclError):
        wcl.run_experiment({"trials": 0})
