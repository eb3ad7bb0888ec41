"""Smoke test for the twoaxis_py extension module.

Build and install first, e.g. ``maturin develop -m crates/python/Cargo.toml``
or ``pip install ./crates/python``.
"""

import math

import twoaxis_py as ta


def main():
    n = 100
    coherent = ta.DickeState.coherent_x(n)
    assert coherent.n_spins == n
    assert abs(coherent.norm_sqr() - 1.0) < 1e-12
    assert abs(coherent.expectation("x") - n / 2) < 1e-9
    assert abs(coherent.variance("z") - n / 4) < 1e-9

    rotated = coherent.rotate("y", 0.3)
    assert abs(rotated.expectation("x") - n / 2 * math.cos(0.3)) < 1e-9
    assert abs(rotated.expectation("z") + n / 2 * math.sin(0.3)) < 1e-9

    t_s = 0.4 / n ** (2 / 3)
    prepared = ta.prepare(n, t_s)
    assert abs(prepared.delta_adj - ta.adjustment_angle(n, t_s)) < 1e-15
    fisher = ta.quantum_fisher_information(prepared)
    assert n < fisher <= n * n
    assert prepared.state.variance("z") < n / 4

    probe = ta.apply_channel(prepared, 1.0)
    outcomes, probs = probe.measurement_distribution("z")
    assert len(outcomes) == n + 1 and abs(sum(probs) - 1.0) < 1e-10
    est = ta.estimate(probe.expectation("x"), probe.expectation("z"))
    assert ta.circular_error(1.0, est) < 1e-9
    assert ta.estimate(0.0, 0.0) is None

    result = ta.run_experiment(n, t_s, trials=200, seed=1, records=True)
    assert len(result["records"]) == 200
    assert result["delta_phi"] * math.sqrt(n) < 1.0
    again = ta.run_experiment(n, t_s, trials=200, seed=1)
    assert again["delta_phi"] == result["delta_phi"]

    opt = ta.optimize_squeezing_time(32, trials=100, seed=2)
    assert 0.0 <= opt["t_s_opt"] <= 2 / math.sqrt(32)

    fit = ta.fit_power_law([(n, 2.0 * n ** -0.7) for n in (16, 64, 256)])
    assert abs(fit["exponent"] - 0.7) < 1e-12

    thetas, phis, values = ta.husimi_grid(coherent, 91, 120)
    assert len(values) == 91 and len(values[0]) == 120
    assert abs(values[45][0] - 1.0) < 1e-10
    assert abs(ta.husimi_normalization(probe) - 1.0) < 1e-8

    print("twoaxis_py smoke test passed")


if __name__ == "__main__":
    main()
