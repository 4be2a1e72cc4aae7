"""Adam optimizer over named parameter arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .autodiff import Array, DimensionError


@dataclass
class AdamState:
    """First/second moment estimates plus the shared timestep."""

    m: dict[str, Array]
    v: dict[str, Array]
    t: int = 0

    @classmethod
    def for_params(cls, params: Mapping[str, Array]) -> "AdamState":
        return cls(
            m={name: np.zeros_like(p) for name, p in params.items()},
            v={name: np.zeros_like(p) for name, p in params.items()},
            t=0,
        )


def adam_step(
    params: Mapping[str, Array],
    grads: Mapping[str, Array],
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[dict[str, Array], AdamState]:
    """One bias-corrected Adam update; returns fresh params and state."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if set(params) != set(grads):
        raise DimensionError("adam_step: params and grads name different arrays")

    t = state.t + 1
    new_params: dict[str, Array] = {}
    new_m: dict[str, Array] = {}
    new_v: dict[str, Array] = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise DimensionError(f"adam_step: gradient shape {g.shape} != parameter shape {p.shape} for {name!r}")
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * (g * g)
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(m=new_m, v=new_v, t=t)
