"""DQN training and inference over the picking environment.

Per step: epsilon-greedy action over the feasible mask, one environment
transition into replay memory, one gradient step once the memory holds a
mini-batch, and a soft target-network blend.  Episodes are fixed-length
step counts over fresh arrival streams.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .env import N_ACTIONS, PickingEnv
from .nn import QNetwork, QNetworkSpec, huber_loss
from .orders import derive_seed


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 4500
    steps_per_episode: int = 1000
    batch_size: int = 64
    gamma: float = 0.99
    learning_rate: float = 1e-4
    tau: float = 0.001
    target_update_every: int = 1
    replay_capacity: int = 200_000
    eps_start: float = 0.9
    eps_end: float = 0.05
    eps_decay_steps: float = 20_000.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if self.batch_size > self.replay_capacity:
            raise ValueError("batch_size must not exceed replay_capacity")


class ReplayMemory:
    """Uniform-sampling ring buffer of transitions."""

    def __init__(self, capacity: int, state_dim: int):
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.next_masks = np.zeros((capacity, N_ACTIONS), dtype=bool)
        self._size = 0
        self._head = 0

    def __len__(self) -> int:
        return self._size

    def push(self, state, action, reward, next_state, next_mask) -> None:
        i = self._head
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.next_masks[i] = next_mask
        self._head = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self._size, size=batch_size)
        return (
            self.states[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_states[idx],
            self.next_masks[idx],
        )


def epsilon_at(step: int, cfg: TrainConfig) -> float:
    return cfg.eps_end + (cfg.eps_start - cfg.eps_end) * float(
        np.exp(-step / cfg.eps_decay_steps)
    )


def select_action(q_values: np.ndarray, mask: np.ndarray, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy over feasible actions; argmax ties go to the lowest index."""
    feasible = np.flatnonzero(mask)
    if len(feasible) == 0:
        raise ValueError("no feasible action")
    if epsilon > 0 and rng.random() < epsilon:
        return int(feasible[rng.integers(len(feasible))])
    masked = np.where(mask, q_values, -np.inf)
    return int(np.argmax(masked))


def compute_targets(rewards: np.ndarray, next_states: np.ndarray,
                    next_masks: np.ndarray, target_net: QNetwork,
                    gamma: float) -> np.ndarray:
    """TD targets r + gamma * max over feasible next actions of target Q."""
    picker_in = target_net.spec.picker_in
    q_next = target_net.forward(next_states[:, :picker_in], next_states[:, picker_in:])
    q_next = np.where(next_masks, q_next, -np.inf)
    return rewards + gamma * q_next.max(axis=1)


@dataclass
class TrainResult:
    network: QNetwork
    episode_rewards: list[float] = field(default_factory=list)
    moving_average: list[float] = field(default_factory=list)
    gradient_steps: int = 0

    def curve_rows(self) -> list[tuple[int, float, float]]:
        return [
            (i, self.episode_rewards[i], self.moving_average[i])
            for i in range(len(self.episode_rewards))
        ]


def moving_average(values: list[float], window: int = 20) -> list[float]:
    out = []
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out.append(float(np.mean(values[lo:i + 1])))
    return out


def train(env: PickingEnv, cfg: TrainConfig,
          spec: QNetworkSpec | None = None) -> TrainResult:
    """Run the DQN training loop and return the trained online network."""
    spec = spec or QNetworkSpec.for_warehouse(env.cfg)
    rng = np.random.default_rng(derive_seed(cfg.seed, 0))
    policy = QNetwork(spec, seed=derive_seed(cfg.seed, 1))
    target = policy.clone()
    state_dim = spec.picker_in + spec.order_in
    memory = ReplayMemory(cfg.replay_capacity, state_dim)
    result = TrainResult(network=policy)
    global_step = 0

    for episode in range(cfg.episodes):
        state = env.reset(seed=derive_seed(cfg.seed, 2 + episode))
        episode_reward = 0.0
        for _ in range(cfg.steps_per_episode):
            eps = epsilon_at(global_step, cfg)
            mask = env.feasible_mask(state)
            q = policy.q_values(state.features[:spec.picker_in],
                                state.features[spec.picker_in:])
            action = select_action(q, mask, eps, rng)
            outcome = env.step(action)
            next_state = outcome.next_state
            memory.push(state.features, action, outcome.reward,
                        next_state.features, env.feasible_mask(next_state))
            episode_reward += outcome.reward
            state = next_state

            if len(memory) >= cfg.batch_size:
                states, actions, rewards, next_states, next_masks = memory.sample(
                    cfg.batch_size, rng)
                targets = compute_targets(rewards, next_states, next_masks,
                                          target, cfg.gamma)
                q_batch, cache = policy.forward_cached(
                    states[:, :spec.picker_in], states[:, spec.picker_in:])
                taken = q_batch[np.arange(cfg.batch_size), actions]
                _, dtaken = huber_loss(taken, targets)
                dq = np.zeros_like(q_batch)
                dq[np.arange(cfg.batch_size), actions] = dtaken
                grads = policy.backward(cache, dq)
                policy.apply_gradients(grads, cfg.learning_rate)
                result.gradient_steps += 1

            global_step += 1
            if global_step % cfg.target_update_every == 0:
                target.soft_update(policy, cfg.tau)

        result.episode_rewards.append(episode_reward / cfg.steps_per_episode)

    result.moving_average = moving_average(result.episode_rewards)
    return result


def greedy_policy(net: QNetwork):
    """Closure mapping (state, mask) -> greedy feasible action."""
    picker_in = net.spec.picker_in

    def policy(state, mask) -> int:
        features = state.features
        q = net.q_values(features[:picker_in], features[picker_in:])
        masked = np.where(mask, q, -np.inf)
        return int(np.argmax(masked))

    return policy


def select_model(observed_rate: float, bank: dict[float, object],
                 appendix_b: bool = False):
    """Pick the trained model for an observed arrival rate.

    Default mapping: rates up to 0.04 use the 0.02 model, 0.05-0.07 the
    0.06 model, and 0.08+ the 0.08 model.  ``appendix_b=True`` switches
    0.05 to the 0.04 model.  Rates outside the mapped ranges fall back to
    the nearest trained rate.
    """
    if not bank:
        raise ValueError("empty model bank")
    lam = round(observed_rate, 6)
    choice: float | None = None
    if appendix_b:
        if lam <= 0.04:
            choice = 0.02
        elif lam <= 0.05:
            choice = 0.04
        elif lam <= 0.07:
            choice = 0.06
        else:
            choice = 0.08
    else:
        if 0.01 <= lam <= 0.04:
            choice = 0.02
        elif 0.05 <= lam <= 0.07:
            choice = 0.06
        elif 0.08 <= lam <= 0.09:
            choice = 0.08
    if choice is not None and choice in bank:
        return bank[choice]
    nearest = min(bank, key=lambda trained: (abs(trained - lam), trained))
    return bank[nearest]
