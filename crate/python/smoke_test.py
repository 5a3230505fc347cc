"""Smoke test for the compiled extension: `python python/smoke_test.py`."""

import json
import math

import fklab


def main():
    q = 2.0
    params = fklab.FkParams.critical(q)
    assert math.isclose(params.p, math.sqrt(q) / (1 + math.sqrt(q)))
    assert math.isclose(params.dual().p, params.p)

    lattice = fklab.Lattice.rectangle(3, 2)
    wired = fklab.BoundaryCondition(lattice, "wired")
    free = fklab.BoundaryCondition(lattice, "free")
    assert free.leq(wired) and not wired.leq(free)
    assert (free.k, wired.k) == (10, 1)
    assert free.distance(wired) == 9

    model = fklab.Model(lattice, params, wired)
    probs = model.exact_probs()
    assert len(probs) == 2 ** model.num_edges
    assert math.isclose(sum(probs), 1.0, rel_tol=1e-12)

    counts = [0] * len(probs)
    draws = 4000
    for r in range(draws):
        config, _ = model.sample(seed=1, replica=r)
        counts[sum(1 << i for i, bit in enumerate(config) if bit)] += 1
    tv = 0.5 * sum(abs(c / draws - p) for c, p in zip(counts, probs))
    assert tv < 0.1, tv

    config, _ = model.sample(seed=2)
    report = model.crossings(config)
    assert report["vertical"] != report["dual_horizontal"]
    assert report["horizontal"] != report["dual_vertical"]

    checks = fklab.validate(2, 0)
    assert all(passed for *_, passed in checks), [c for c in checks if not c[3]]

    csv_text, json_text = fklab.run_experiment('experiment = "sample"\nn = 6\nreplicas = 5\nseed = 3\n')
    assert csv_text.startswith("# config_hash=")
    summary = json.loads(json_text)
    assert summary["experiment"] == "sample"
    print(f"fklab smoke test ok: {len(checks)} checks, CFTP TV {tv:.3f}")


if __name__ == "__main__":
    main()
