import numpy as np
from picksim.harness import ExperimentConfig, PolicyRef, evaluate
from dataclasses import replace

base = ExperimentConfig(master_seed=2024, n_runs=10, workers=2)
cells = [
    ("baseline1", 0.01), ("baseline1", 0.02), ("baseline1", 0.03), ("baseline1", 0.04),
    ("baseline1", 0.05), ("baseline1", 0.06), ("baseline1", 0.07), ("baseline1", 0.08),
    ("baseline1", 0.09),
    ("baseline4", 0.01),
    ("baseline2", 0.09), ("baseline3", 0.09), ("baseline4", 0.09), ("baseline5", 0.09),
    ("s_shape", 0.09), ("largest_gap", 0.09),
    ("baseline2", 0.03), ("baseline3", 0.03),
]
for name, lam in cells:
    config = replace(base, policy=PolicyRef.parse(name), rate=lam)
    result = evaluate(config)
    print(f"{name} lam={lam}: atdo={result.mean('atdo'):.3f} aoct={result.mean('aoct'):.1f} "
          f"puo={result.mean('puo'):.3f}", flush=True)
