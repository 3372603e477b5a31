import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.random import Philox

from robust_kelly.controller import StaticLinear, kelly_perfect, robust_optimal
from robust_kelly.elg import elg_at
from robust_kelly.simulate import SimConfig, _heads_threshold, draw_flips, run_simulation, single_path


def test_no_bet_is_flat(example2):
    rep = run_simulation(SimConfig(StaticLinear(0.0), n=4, p_true=0.3, trials=1000, seed=3), keep_trials=True)
    assert np.all(rep.log_growths == 0.0)
    assert rep.mean_log_growth == 0.0 and rep.ruin_count == 0
    assert rep.min_final_wealth == rep.max_final_wealth == 1.0


def test_all_in_on_certain_heads():
    rep = run_simulation(SimConfig(StaticLinear(1.0), n=5, p_true=1.0, trials=100, v0=1.0), keep_trials=True)
    assert np.all(rep.final_wealth == 32.0)
    assert np.all(rep.log_growths == pytest.approx(math.log(2)))


def test_ruin_reported():
    rep = run_simulation(SimConfig(StaticLinear(1.0), n=3, p_true=0.5, trials=4000, seed=1))
    assert 0 < rep.ruin_count <= rep.trials
    assert rep.mean_log_growth == -math.inf
    assert rep.min_final_wealth == 0.0
    # survivors all won three times in a row
    assert rep.mean_log_growth_surviving == pytest.approx(math.log(2))
    assert rep.ruin_count == pytest.approx(4000 * 7 / 8, rel=0.05)


def test_matches_expected_log_growth(example2):
    c = robust_optimal(example2, 3)
    rep = run_simulation(SimConfig(c, n=3, p_true=0.75, trials=1_000_000, seed=11))
    assert abs(rep.mean_log_growth - elg_at(c, 3, 0.75)) < 3 * rep.stderr_log_growth


def test_seed_determinism(example2):
    cfg = SimConfig(robust_optimal(example2, 3), n=3, p_true=0.6, trials=200_003, seed=99)
    assert run_simulation(cfg).to_json() == run_simulation(cfg).to_json()
    other = SimConfig(cfg.controller, n=3, p_true=0.6, trials=200_003, seed=100)
    assert run_simulation(other).to_json() != run_simulation(cfg).to_json()


@pytest.mark.parametrize("start, count", [(0, 10), (3, 5), (7, 9), (1000, 1)])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_trial_blocks_are_independent(start, count, n):
    full = draw_flips(5, n, 0, start + count, 0.37)
    assert np.array_equal(draw_flips(5, n, start, count, 0.37), full[start:])


def test_bernoulli_mapping():
    p = 0.6180339887
    words = Philox(key=8).random_raw(5000)
    heads = draw_flips(8, 1, 0, 5000, p)[:, 0]
    expected = [Fraction(int(w), 2**64) < Fraction(p) for w in words]
    assert heads.tolist() == expected


def test_threshold_edges():
    assert _heads_threshold(0.0) == 0
    assert _heads_threshold(1.0) is None
    assert _heads_threshold(0.5) == 2**63
    assert not draw_flips(1, 4, 0, 10, 0.0).any()
    assert draw_flips(1, 4, 0, 10, 1.0).all()


@pytest.mark.parametrize(
    "kwargs",
    [dict(p_true=1.2), dict(p_true=-0.1), dict(trials=0), dict(v0=0.0), dict(seed=-1), dict(n=0)],
)
def test_config_validation(kwargs):
    base = dict(controller=StaticLinear(0.0), n=2, p_true=0.5)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SimConfig(**base)


def test_horizon_checked(unit):
    with pytest.raises(ValueError):
        SimConfig(robust_optimal(unit, 2), n=3, p_true=0.5)


def test_single_path_example_one(unit):
    c = robust_optimal(unit, 2)
    np.testing.assert_allclose(single_path(c, (1, 1)), [1.0, 1.0, 4 / 3], atol=1e-15)
    np.testing.assert_allclose(single_path(c, "HT"), [1.0, 1.0, 2 / 3], atol=1e-15)
    np.testing.assert_array_equal(single_path(StaticLinear(0.0), "HTTH", v0=5.0), [5.0] * 5)


def test_single_path_product_formula(example2):
    c = robust_optimal(example2, 3)
    path = (1, -1, -1)
    traj = single_path(c, path, v0=2.0)
    prod = 2.0
    for k, x in enumerate(path):
        assert abs(c.gain_at(path[:k]) * traj[k]) <= traj[k]
        prod *= 1 + c.gain_at(path[:k]) * x
    assert traj[-1] == pytest.approx(prod)
    assert np.all(traj > 0)


def test_trials_csv():
    rep = run_simulation(SimConfig(kelly_perfect(1.0), n=2, p_true=1.0, trials=3), keep_trials=True)
    assert rep.trials_csv() == "trial,final_wealth,log_growth\n0,4,0.69314718056\n1,4,0.69314718056\n2,4,0.69314718056\n"
    with pytest.raises(ValueError):
        run_simulation(SimConfig(StaticLinear(0.0), n=1, p_true=0.5)).trials_csv()


def test_report_serialization():
    rep = run_simulation(SimConfig(StaticLinear(1.0), n=2, p_true=0.5, trials=100))
    assert '"mean_log_growth": "-inf"' in rep.to_json(pset="0:1")
    assert rep.to_text().splitlines()[5] == "mean_log_growth: -inf"
