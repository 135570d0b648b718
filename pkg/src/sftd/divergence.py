"""Scalar function topology divergence and its subgradient."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Barcode, FieldError, SparseGradient
from .cross_barcode import FROM_F, FROM_G, bar_sources, cross_barcode


@dataclass(frozen=True)
class SftdConfig:
    degrees: tuple[int, ...] = (0,)
    p: float = 1.0
    symmetric: bool = False

    def __post_init__(self):
        degrees = tuple(sorted(set(int(k) for k in self.degrees)))
        if not degrees:
            raise FieldError("at least one degree is required")
        if degrees[0] < 0:
            raise FieldError(f"negative degree {degrees[0]}")
        if not self.p >= 1:
            raise FieldError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True)
class Divergence:
    values: dict[int, float]
    total: float
    # per-orientation values, filled in symmetric mode
    forward: dict[int, float] = field(default_factory=dict)
    backward: dict[int, float] = field(default_factory=dict)


def barcode_divergence(barcode: Barcode, k: int, p: float) -> float:
    return float(sum((b.death - b.birth) ** p for b in barcode.finite(k)))


def _one_way(f, g, config: SftdConfig, want_grad: bool):
    barcode, construction = cross_barcode(f, g, max(config.degrees))
    values = {k: barcode_divergence(barcode, k, config.p) for k in config.degrees}
    grad = SparseGradient()
    if want_grad:
        for k in config.degrees:
            for bar in barcode.finite(k):
                coef = config.p * (bar.death - bar.birth) ** (config.p - 1)
                (bk, bi), (dk, di) = bar_sources(bar, construction)
                for kind, idx, sign in ((dk, di, 1.0), (bk, bi, -1.0)):
                    if kind == FROM_F:
                        grad.add("f", idx, sign * coef)
                    elif kind == FROM_G:
                        grad.add("g", idx, sign * coef)
    return values, grad


def _swap(grad: SparseGradient) -> SparseGradient:
    return SparseGradient(dict(grad.wrt_g), dict(grad.wrt_f))


def _combine(f, g, config: SftdConfig, want_grad: bool):
    fwd, grad = _one_way(f, g, config, want_grad)
    if not config.symmetric:
        return Divergence(fwd, float(sum(fwd.values())), fwd, {}), grad
    bwd, grad_b = _one_way(g, f, config, want_grad)
    values = {k: 0.5 * (fwd[k] + bwd[k]) for k in config.degrees}
    grad = grad.merged(_swap(grad_b)).scaled(0.5)
    return Divergence(values, float(sum(values.values())), fwd, bwd), grad


def sftd(f, g, config: SftdConfig | None = None) -> Divergence:
    """Sum over finite cross-barcode bars of length**p, per requested degree."""
    return _combine(f, g, config or SftdConfig(), want_grad=False)[0]


def sftd_gradient(f, g, config: SftdConfig | None = None) -> tuple[Divergence, SparseGradient]:
    """Divergence and its derivative w.r.t. every value of f and g.

    Each bar (b, d) contributes ``p (d - b)**(p-1)`` at the vertex whose value
    set its death and the negative of that at the vertex that set its birth.
    At tied values this is one subgradient, fixed by the tie-breaking rules.
    """
    return _combine(f, g, config or SftdConfig(), want_grad=True)
