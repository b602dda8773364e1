import time
import numpy as np
from picksim.warehouse import WarehouseConfig
from picksim.orders import ArrivalProcess, derive_seed
from picksim.env import PickingEnv, RewardParams
from picksim.agent import TrainConfig, train, greedy_policy
from picksim.harness import ExperimentConfig, PolicyRef, compute_metrics, run_policy_shift

cfg = WarehouseConfig()
tc = TrainConfig(episodes=300, steps_per_episode=1000, seed=0)
env = PickingEnv(cfg, RewardParams.for_warehouse(cfg, alpha=1.0), ArrivalProcess(rate=0.06, rng_seed=0))
t0 = time.perf_counter()
res = train(env, tc)
print(f"train done in {(time.perf_counter()-t0)/60:.1f} min; grad steps {res.gradient_steps}", flush=True)
res.network.save(".calib/model_l06_a1_s0.ckpt")

ma = res.moving_average
n = len(ma) // 10
first, last = float(np.mean(ma[:n])), float(np.mean(ma[-n:]))
print(f"moving-average first decile {first:.3f}, last decile {last:.3f}, increase {last-first:.3f}", flush=True)

net = res.network
act = greedy_policy(net)
for label in ("greedy", "random", "idle"):
    aocts, puos, comp = [], [], []
    for i in range(5):
        seed = derive_seed(123, i)
        envE = PickingEnv(cfg, RewardParams.for_warehouse(cfg, alpha=1.0), ArrivalProcess(rate=0.06, rng_seed=seed))
        rng = np.random.default_rng(derive_seed(seed, 0xA5))
        state = envE.state()
        while envE.time < 28800.0:
            mask = envE.feasible_mask(state)
            if label == "greedy":
                a = act(state, mask)
            elif label == "random":
                f = np.flatnonzero(mask); a = int(f[rng.integers(len(f))])
            else:
                a = 0
            state = envE.step(a).next_state
        m = compute_metrics(envE.ledger, envE.total_distance, 28800.0, seed)
        aocts.append(m.aoct); puos.append(m.puo); comp.append(m.completed)
    a_str = "inf" if any(a is None for a in aocts) else f"{np.mean(aocts):.1f}"
    print(f"{label}: aoct={a_str} puo={np.mean(puos):.2f} completed={np.mean(comp):.0f}", flush=True)
