"""Reference forward/gradient computations for the adversarial training losses.

Probability maps are float arrays in ``[eps, 1 - eps]``.  A critic is any
callable ``critic(candidate, condition) -> float`` and a generator any
callable ``gen(condition) -> probability map``; no network lives here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DegenerateInput, DimensionError, NonFiniteCritic

__all__ = [
    "LossConfig",
    "CLAMP_EPS",
    "as_probmap",
    "bce",
    "soft_dice",
    "wgan_interpolate",
    "numeric_gradient",
    "gradient_penalty",
    "generator_objective",
    "discriminator_objective",
    "check_grad",
    "CRITICS",
]

CLAMP_EPS = 1e-7

CriticFn = Callable[[np.ndarray, np.ndarray], float]
GeneratorFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LossConfig:
    lambda1: float = 25.0
    lambda2: float = 25.0
    lambda_baseline: float = 50.0
    alpha: float = 10.0
    clamp_eps: float = CLAMP_EPS
    baseline: bool = False

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda_baseline", "alpha", "clamp_eps"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


def as_probmap(values, eps: float = CLAMP_EPS) -> np.ndarray:
    return np.clip(np.asarray(values, dtype=np.float64), eps, 1 - eps)


def _check(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p, y = np.asarray(pred, dtype=np.float64), np.asarray(gt, dtype=np.float64)
    if p.shape != y.shape:
        raise DimensionError(f"prediction shape {p.shape} != target shape {y.shape}")
    return p, y


def bce(pred, gt, eps: float = CLAMP_EPS) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy (positive sign) and its gradient w.r.t. ``pred``."""
    p, y = _check(pred, gt)
    p = as_probmap(p, eps)
    n = p.size
    loss = -float(np.mean(y * np.log(p) + (1 - y) * np.log1p(-p)))
    grad = (-y / p + (1 - y) / (1 - p)) / n
    return loss, grad


def soft_dice(pred, gt) -> tuple[float, np.ndarray]:
    """``1 - 2<p, y> / (<p, p> + <y, y>)`` and its gradient w.r.t. ``pred``."""
    p, y = _check(pred, gt)
    inner = float(np.sum(p * y))
    s = float(np.sum(p * p) + np.sum(y * y))
    if s == 0:
        raise DegenerateInput("soft dice is undefined when both maps are all zero")
    loss = 1.0 - 2.0 * inner / s
    grad = -2.0 * (y * s - 2.0 * p * inner) / (s * s)
    return loss, grad


def wgan_interpolate(y, g, eps: float) -> np.ndarray:
    """Random-interpolate sample ``eps * y + (1 - eps) * g``."""
    y, g = _check(y, g)
    if not 0.0 <= eps <= 1.0:
        raise ConfigError("eps must lie in [0, 1]")
    return eps * y + (1.0 - eps) * g


def numeric_gradient(fn: Callable[[np.ndarray], float], point, step: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of a scalar field, one coordinate at a time."""
    x = np.array(point, dtype=np.float64)
    grad = np.empty_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        hi = fn(x)
        flat[i] = orig - step
        lo = fn(x)
        flat[i] = orig
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise NonFiniteCritic(f"non-finite value while probing coordinate {i}")
        gflat[i] = (hi - lo) / (2 * step)
    return grad


def gradient_penalty(critic: CriticFn, point, condition, alpha: float = 10.0,
                     step: float = 1e-4) -> float:
    """``alpha * (||grad critic(point)||_2 - 1)^2`` with a finite-difference gradient."""
    grad = numeric_gradient(lambda z: float(critic(z, condition)), point, step)
    return alpha * (float(np.linalg.norm(grad)) - 1.0) ** 2


def _critic_value(critic: CriticFn, candidate, condition) -> float:
    v = float(critic(candidate, condition))
    if not math.isfinite(v):
        raise NonFiniteCritic("critic returned a non-finite value")
    return v


def generator_objective(critic: CriticFn, gen: GeneratorFn, x, y,
                        cfg: LossConfig = LossConfig()) -> float:
    """Generator loss; ``cfg.baseline`` switches to ``-D + lambda * BCE``."""
    g = np.asarray(gen(x), dtype=np.float64)
    adv = -_critic_value(critic, g, x)
    if cfg.baseline:
        return adv + cfg.lambda_baseline * bce(g, y, cfg.clamp_eps)[0]
    total = adv + cfg.lambda1 * bce(g, y, cfg.clamp_eps)[0]
    if cfg.lambda2:
        total += cfg.lambda2 * soft_dice(g, y)[0]
    return total


def discriminator_objective(critic: CriticFn, y, g, x, eps: float,
                            cfg: LossConfig = LossConfig()) -> float:
    """Critic loss ``-D(y) + D(g) + GP`` at the ``eps`` interpolate of ``y`` and ``g``."""
    y, g = _check(y, g)
    mixed = wgan_interpolate(y, g, eps)
    return (-_critic_value(critic, y, x) + _critic_value(critic, g, x)
            + gradient_penalty(critic, mixed, x, cfg.alpha))


def check_grad(fn: Callable[[np.ndarray], tuple[float, np.ndarray]], point,
               step: float = 1e-4) -> float:
    """Worst error of ``fn``'s analytic gradient against central differences.

    The error is ``max|analytic - numeric| / max|numeric|``, so a gradient
    that is off by a factor of two scores about 1.
    """
    point = np.asarray(point, dtype=np.float64)
    analytic = np.asarray(fn(point)[1], dtype=np.float64)
    numeric = numeric_gradient(lambda z: fn(z)[0], point, step)
    scale = float(np.max(np.abs(numeric)))
    if scale == 0:
        return float(np.max(np.abs(analytic)))
    return float(np.max(np.abs(analytic - numeric)) / scale)


CRITICS: dict[str, CriticFn] = {
    "zero": lambda cand, cond: 0.0,
    "sum": lambda cand, cond: float(np.sum(cand)),
    "mean": lambda cand, cond: float(np.mean(cand)),
}
