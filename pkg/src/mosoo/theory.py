"""Finite-time loss and epsilon-indicator bounds, evaluated numerically.

A :class:`BoundModel` bundles, per objective, a cell-size sequence
``delta_j(h)``, a packing constant ``C_j`` and a near-optimality dimension
``d_j``, plus the conflict dimension ``psi`` and a source for the
per-iteration multiplier (the nominal ``hmax(t)`` or depth-visit counts
recorded during a run).

``h(t)`` is the smallest depth ``h`` with
``multiplier(t) * sum_{l<=h} max_j C_j * delta_j(l) ** -d_j >= t``; the loss
bound is ``delta_j(min(h(t), hmax + 1))`` and the epsilon bound adds
``psi`` to ``max_{k,l} (1 + 2 C_k delta_k ** -d_k) * delta_l`` at the same
depth.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .optimizer import HMaxPolicy, RunTrace


class AssumptionViolation(ValueError):
    """Model parameters contradict the smoothness assumptions."""


@dataclass(frozen=True)
class GeometricDelta:
    """``delta(h) = c * gamma ** h``."""

    c: float
    gamma: float

    def __post_init__(self) -> None:
        if self.c <= 0 or not 0 < self.gamma < 1:
            raise ValueError("need c > 0 and 0 < gamma < 1")

    def __call__(self, h: int) -> float:
        return self.c * self.gamma ** h


@dataclass(frozen=True)
class HolderDelta:
    """Cell-size sequence for ``||x - a||_inf ** alpha`` under coordinate-wise splits.

    ``form="cell"`` is the half-width of a cell after ``floor(h/n)`` full
    rounds of K-section, raised to ``alpha``:
    ``2**-alpha * K ** (-alpha * floor(h/n))``. ``form="triple"`` uses the
    exponent ``-3 * alpha * floor(h/n)`` instead (see :func:`delta_from_holder`).
    """

    alpha: float
    K: int = 3
    n: int = 1
    form: str = "cell"

    def __post_init__(self) -> None:
        if self.form not in ("cell", "triple"):
            raise ValueError(f"unknown delta form {self.form!r}")
        if self.K < 2 or self.n < 1 or self.alpha < 1:
            raise ValueError("need K >= 2, n >= 1, alpha >= 1")

    def __call__(self, h: int) -> float:
        rounds = h // self.n
        scale = 3 if self.form == "triple" else 1
        return 2.0 ** (-self.alpha) * float(self.K) ** (-scale * self.alpha * rounds)


def delta_from_holder(alpha: float, K: int, n: int, h: int) -> float:
    """``2**-alpha * K ** (-3 * alpha * floor(h / n))``."""
    return HolderDelta(alpha, K, n, "triple")(h)


def near_optimality_dimension(alpha: float, beta: float, n: int) -> float:
    """``n * (1/beta - 1/alpha)`` for ``||.||_inf ** alpha`` objectives and semi-metric exponent ``beta``."""
    if beta > alpha:
        raise AssumptionViolation(f"beta={beta} > alpha={alpha}: the semi-metric overstates smoothness")
    if beta <= 0:
        raise ValueError("beta must be positive")
    return n * (1.0 / beta - 1.0 / alpha)


def recorded_multipliers(trace: RunTrace) -> dict[int, int]:
    """Map iteration ``t`` to the largest depth-visit count of any sweep started by ``t``."""
    out: dict[int, int] = {}
    running = 0
    for rec in trace.records:
        running = max(running, rec.sweep_depths)
        out[rec.t] = running
    return out


@dataclass
class BoundModel:
    deltas: Sequence[Callable[[int], float]]
    C: Sequence[float]
    d: Sequence[float]
    psi: float = 0.0
    hmax: HMaxPolicy = field(default_factory=HMaxPolicy.power)
    recorded: Optional[dict[int, int]] = None
    s: Optional[Sequence[float]] = None  # scaling factors; informational only
    _prefix: list[float] = field(default_factory=list, init=False, repr=False)
    _sum: float = field(default=0.0, init=False, repr=False)
    _comp: float = field(default=0.0, init=False, repr=False)

    def __post_init__(self) -> None:
        m = len(self.deltas)
        if m == 0 or len(self.C) != m or len(self.d) != m:
            raise ValueError("deltas, C and d must have one entry per objective")
        if any(c <= 0 for c in self.C) or any(d < 0 for d in self.d):
            raise ValueError("need C_j > 0 and d_j >= 0")
        if self.psi < 0:
            raise ValueError("conflict dimension must be non-negative")

    @property
    def m(self) -> int:
        return len(self.deltas)

    @classmethod
    def holder(cls, alphas: Sequence[float], K: int = 3, n: int = 1, C: float = 2.0,
               psi: float = 0.0, form: str = "cell", betas: Optional[Sequence[float]] = None,
               **kwargs) -> "BoundModel":
        """Model for the Hölder family with semi-metric exponents ``betas`` (default ``alphas``)."""
        betas = alphas if betas is None else betas
        deltas = [HolderDelta(b, K, n, form) for b in betas]
        d = [near_optimality_dimension(a, b, n) for a, b in zip(alphas, betas)]
        return cls(deltas, [C] * len(alphas), d, psi, s=[1.0] * len(alphas), **kwargs)

    def multiplier(self, t: int) -> float:
        if self.recorded is not None:
            if t in self.recorded:
                return self.recorded[t]
            earlier = [k for k in self.recorded if k <= t]
            return self.recorded[max(earlier)] if earlier else 1
        return self.hmax(t)

    def term(self, h: int) -> float:
        return max(c * delta(h) ** (-d) for delta, c, d in zip(self.deltas, self.C, self.d))

    def prefix_sum(self, h: int) -> float:
        """``sum_{l=0}^{h} term(l)`` with Neumaier-compensated accumulation, cached."""
        while len(self._prefix) <= h:
            x = self.term(len(self._prefix))
            total = self._sum + x
            if abs(self._sum) >= abs(x):
                self._comp += (self._sum - total) + x
            else:
                self._comp += (x - total) + self._sum
            self._sum = total
            self._prefix.append(total + self._comp)
        return self._prefix[h]


def h_of_t(t: int, model: BoundModel) -> int:
    """Smallest ``h >= 0`` with ``multiplier(t) * prefix_sum(h) >= t``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    mult = model.multiplier(t)
    if mult <= 0:
        raise ValueError(f"multiplier at t={t} is {mult}; must be positive")
    hi = 1
    while mult * model.prefix_sum(hi) < t:
        hi *= 2
    # prefix sums are non-decreasing, so bisect over the cached list
    return bisect.bisect_left(model._prefix, t, 0, hi + 1, key=lambda s: mult * s)


def _depth_limit(t: int, model: BoundModel, hmax_value: float) -> int:
    h = h_of_t(t, model)
    if math.isinf(hmax_value):
        return h
    return min(h, int(hmax_value) + 1)


def loss_bound(t: int, model: BoundModel, hmax_value: float) -> tuple[float, ...]:
    depth = _depth_limit(t, model, hmax_value)
    return tuple(delta(depth) for delta in model.deltas)


def indicator_bound(t: int, model: BoundModel, hmax_value: float) -> float:
    depth = _depth_limit(t, model, hmax_value)
    deltas = [delta(depth) for delta in model.deltas]
    worst = max(1.0 + 2.0 * c * dk ** (-d) for dk, c, d in zip(deltas, model.C, model.d))
    return model.psi + worst * max(deltas)
