"""Dense Q-network numerics: two-branch MLP, Huber loss, Adam, soft updates.

Everything runs in 64-bit floats so gradient checks and checkpoints are
exact at desk scale.  The picker state and the order state feed separate
input branches whose hidden features are concatenated before the shared
trunk; the output head is linear over the five action values.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .warehouse import WarehouseConfig

_MAGIC = b"PSQN"
_VERSION = 1

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class CorruptCheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class QNetworkSpec:
    picker_in: int = 4
    order_in: int = 20
    hidden_picker: int = 64
    hidden_order: int = 160
    fc1: int = 256
    fc2: int = 128
    fc3: int = 64
    out: int = 5

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @classmethod
    def for_warehouse(cls, cfg: WarehouseConfig) -> "QNetworkSpec":
        return cls(order_in=2 * cfg.n_aisles)

    def layers(self) -> list[tuple[str, int, int]]:
        return [
            ("picker", self.picker_in, self.hidden_picker),
            ("order", self.order_in, self.hidden_order),
            ("fc1", self.hidden_picker + self.hidden_order, self.fc1),
            ("fc2", self.fc1, self.fc2),
            ("fc3", self.fc2, self.fc3),
            ("out", self.fc3, self.out),
        ]


def huber_loss(pred: np.ndarray, target: np.ndarray, delta: float = 1.0):
    """Mean Huber loss and its gradient with respect to ``pred``."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ValueError("pred and target shapes differ")
    err = pred - target
    abs_err = np.abs(err)
    quad = abs_err <= delta
    losses = np.where(quad, 0.5 * err ** 2, delta * (abs_err - 0.5 * delta))
    grad = np.where(quad, err, delta * np.sign(err)) / err.size
    return float(losses.mean()), grad


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


class QNetwork:
    """Parameter container plus forward/backward passes and Adam state."""

    def __init__(self, spec: QNetworkSpec, seed: int | None = None,
                 init: str = "uniform"):
        self.spec = spec
        self.params: dict[str, np.ndarray] = {}
        rng = np.random.default_rng(seed)
        for name, n_in, n_out in spec.layers():
            if init == "zeros":
                w = np.zeros((n_in, n_out))
            else:
                bound = 1.0 / np.sqrt(n_in)
                w = rng.uniform(-bound, bound, size=(n_in, n_out))
            self.params[f"W_{name}"] = w
            self.params[f"b_{name}"] = np.zeros(n_out)
        self._adam_m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self.adam_t = 0

    # ------------------------------------------------------------- forward
    def forward(self, picker: np.ndarray, order: np.ndarray) -> np.ndarray:
        q, _ = self.forward_cached(picker, order)
        return q

    def forward_cached(self, picker: np.ndarray, order: np.ndarray):
        picker = np.atleast_2d(np.asarray(picker, dtype=float))
        order = np.atleast_2d(np.asarray(order, dtype=float))
        if picker.shape[1] != self.spec.picker_in or order.shape[1] != self.spec.order_in:
            raise ValueError("input widths do not match the network spec")
        p = self.params
        h_p = _relu(picker @ p["W_picker"] + p["b_picker"])
        h_o = _relu(order @ p["W_order"] + p["b_order"])
        z = np.concatenate([h_p, h_o], axis=1)
        c1 = _relu(z @ p["W_fc1"] + p["b_fc1"])
        c2 = _relu(c1 @ p["W_fc2"] + p["b_fc2"])
        c3 = _relu(c2 @ p["W_fc3"] + p["b_fc3"])
        q = c3 @ p["W_out"] + p["b_out"]
        cache = (picker, order, h_p, h_o, z, c1, c2, c3)
        return q, cache

    def q_values(self, picker_vec, order_vec) -> np.ndarray:
        """Single-state convenience wrapper returning a flat (out,) vector."""
        return self.forward(picker_vec, order_vec)[0]

    # ------------------------------------------------------------ backward
    def backward(self, cache, dq: np.ndarray) -> dict[str, np.ndarray]:
        """Gradients of a scalar loss given dLoss/dQ for the cached batch."""
        picker, order, h_p, h_o, z, c1, c2, c3 = cache
        p = self.params
        grads: dict[str, np.ndarray] = {}

        grads["W_out"] = c3.T @ dq
        grads["b_out"] = dq.sum(axis=0)
        dc3 = (dq @ p["W_out"].T) * (c3 > 0)

        grads["W_fc3"] = c2.T @ dc3
        grads["b_fc3"] = dc3.sum(axis=0)
        dc2 = (dc3 @ p["W_fc3"].T) * (c2 > 0)

        grads["W_fc2"] = c1.T @ dc2
        grads["b_fc2"] = dc2.sum(axis=0)
        dc1 = (dc2 @ p["W_fc2"].T) * (c1 > 0)

        grads["W_fc1"] = z.T @ dc1
        grads["b_fc1"] = dc1.sum(axis=0)
        dz = dc1 @ p["W_fc1"].T

        hp_w = self.spec.hidden_picker
        dh_p = dz[:, :hp_w] * (h_p > 0)
        dh_o = dz[:, hp_w:] * (h_o > 0)

        grads["W_picker"] = picker.T @ dh_p
        grads["b_picker"] = dh_p.sum(axis=0)
        grads["W_order"] = order.T @ dh_o
        grads["b_order"] = dh_o.sum(axis=0)
        return grads

    def apply_gradients(self, grads: dict[str, np.ndarray], lr: float) -> None:
        """One Adam step; rejects non-finite gradients without mutating."""
        for key, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise ValueError(f"non-finite gradient for {key}; step rejected")
            if g.shape != self.params[key].shape:
                raise ValueError(f"gradient shape mismatch for {key}")
        self.adam_t += 1
        t = self.adam_t
        for key, g in grads.items():
            m = self._adam_m[key]
            v = self._adam_v[key]
            m *= ADAM_BETA1
            m += (1 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1 - ADAM_BETA2) * g * g
            m_hat = m / (1 - ADAM_BETA1 ** t)
            v_hat = v / (1 - ADAM_BETA2 ** t)
            self.params[key] -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    # ------------------------------------------------------- targetupkeep
    def clone(self) -> "QNetwork":
        other = QNetwork(self.spec, init="zeros")
        for key, value in self.params.items():
            other.params[key] = value.copy()
        other._adam_m = {k: v.copy() for k, v in self._adam_m.items()}
        other._adam_v = {k: v.copy() for k, v in self._adam_v.items()}
        other.adam_t = self.adam_t
        return other

    def soft_update(self, online: "QNetwork", tau: float) -> None:
        """theta_minus <- tau * theta + (1 - tau) * theta_minus, elementwise."""
        if not 0.0 < tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if online.spec != self.spec:
            raise ValueError("network specs differ")
        for key in self.params:
            self.params[key] *= 1.0 - tau
            self.params[key] += tau * online.params[key]

    # ---------------------------------------------------------- serialize
    def to_bytes(self) -> bytes:
        s = self.spec
        header = _MAGIC + struct.pack(
            "<9IQ", _VERSION, s.picker_in, s.order_in, s.hidden_picker,
            s.hidden_order, s.fc1, s.fc2, s.fc3, s.out, self.adam_t,
        )
        chunks = [header]
        for key in self._param_order():
            chunks.append(np.ascontiguousarray(self.params[key], dtype="<f8").tobytes())
            chunks.append(np.ascontiguousarray(self._adam_m[key], dtype="<f8").tobytes())
            chunks.append(np.ascontiguousarray(self._adam_v[key], dtype="<f8").tobytes())
        return b"".join(chunks)

    def _param_order(self) -> list[str]:
        out = []
        for name, _, _ in self.spec.layers():
            out.append(f"W_{name}")
            out.append(f"b_{name}")
        return out

    @classmethod
    def from_bytes(cls, blob: bytes) -> "QNetwork":
        head_len = 4 + struct.calcsize("<9IQ")
        if len(blob) < head_len or blob[:4] != _MAGIC:
            raise CorruptCheckpointError("bad checkpoint header")
        fields = struct.unpack("<9IQ", blob[4:head_len])
        if fields[0] != _VERSION:
            raise CorruptCheckpointError(f"unsupported checkpoint version {fields[0]}")
        spec = QNetworkSpec(*fields[1:9])
        net = cls(spec, init="zeros")
        net.adam_t = int(fields[9])
        offset = head_len
        for key in net._param_order():
            shape = net.params[key].shape
            for target in (net.params, net._adam_m, net._adam_v):
                nbytes = int(np.prod(shape)) * 8
                if offset + nbytes > len(blob):
                    raise CorruptCheckpointError("truncated checkpoint")
                arr = np.frombuffer(blob[offset:offset + nbytes], dtype="<f8")
                target[key] = arr.reshape(shape).astype(np.float64)
                offset += nbytes
        if offset != len(blob):
            raise CorruptCheckpointError("trailing bytes in checkpoint")
        return net

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "QNetwork":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
