"""Smoke test for the orgsync Python extension.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml --release`.
"""

import math
import os
import tempfile

import orgsync


def main():
    m = orgsync.InteractionMatrix(internal=2, external=2, coupled_agents=2, seed=3)
    assert m.size == 20
    assert m.row_sums() == [7] * 20 and m.column_sums() == [7] * 20
    assert len(m.dependencies(0)) == 6 and 0 not in m.dependencies(0)

    ls = orgsync.LandscapeSet(internal=2, external=2, coupled_agents=2, seed=3)
    assert m.to_list() == ls.interactions.to_list()
    best = ls.global_argmax
    assert len(best) == 20
    assert math.isclose(ls.org_performance(best), ls.global_max)
    assert math.isclose(ls.normalized_performance(best), 1.0)
    assert ls.org_performance([0] * 20) <= ls.global_max
    per_agent = sum(ls.agent_performance(best, p) for p in range(5)) / 5
    assert math.isclose(per_agent, ls.global_max)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "landscape.bin")
        ls.save(path)
        again = orgsync.LandscapeSet.load(path)
        assert again.table(7) == ls.table(7) and again.global_max == ls.global_max

    assert orgsync.Network("star").edges() == [(0, 1), (0, 2), (0, 3), (0, 4)]
    assert orgsync.Network("cycle").in_neighbors(0) == [4]
    assert orgsync.Network("ring").in_neighbors(0) == [1, 4]

    x = [0, 1, 0, 1] * 5
    assert orgsync.hamming(x, [1 - b for b in x]) == 20
    assert orgsync.asynchrony(x) == 0 and orgsync.synchrony(x) == 1.0
    y = [0] * 12 + [1] * 8
    assert orgsync.asynchrony(y) == orgsync.max_asynchrony(5, 4) == 24
    assert orgsync.synchrony(y) == 0.0

    cfg = orgsync.ScenarioConfig(topology="ring", internal=2, external=2, coupled_agents=2, periods=50, repetitions=8)
    assert cfg.name == "ring_kcs222_w0.5-0.5_rho0.9" and cfg.memory_span == 50
    run = orgsync.run_once(cfg, orgsync.run_seed(cfg.seed, 0))
    assert len(run.performance) == 50 and all(0.0 <= v <= 1.0 + 1e-12 for v in run.performance)
    result = orgsync.run_experiment(cfg)
    assert result.runs == 8 and result.run_seeds[0] == run.seed
    assert result.mean_synchrony == orgsync.run_experiment(cfg).mean_synchrony

    for bad in (dict(performance_weight=0.6, conformity_weight=0.6), dict(internal=4), dict(topology="mesh")):
        try:
            orgsync.ScenarioConfig(**bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"accepted {bad}")

    print(
        f"orgsync {orgsync.__version__}: ring kcs222 terminal performance "
        f"{result.mean_performance[-1]:.4f}, synchrony {result.mean_synchrony[-1]:.4f}"
    )
    print("smoke test passed")


if __name__ == "__main__":
    main()
