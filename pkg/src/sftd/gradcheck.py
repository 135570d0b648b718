"""Finite-difference check of the SFTD subgradient."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FieldError, GraphField, ScalarField
from .divergence import SftdConfig, sftd, sftd_gradient
from .synth import make_rng

TOLERANCE = 1e-4


@dataclass(frozen=True)
class GradcheckReport:
    trials: int
    eps: float
    jitter: float
    tied_input: bool
    vacuous: bool
    max_rel_error: float
    checked: int  # coordinates compared, summed over trials
    worst: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= TOLERANCE

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tolerance": TOLERANCE,
            "max_rel_error": self.max_rel_error,
            "trials": self.trials,
            "eps": self.eps,
            "jitter": self.jitter,
            "tied_input": self.tied_input,
            "vacuous": self.vacuous,
            "checked": self.checked,
            "worst": self.worst,
        }


def rel_error(analytic: float, numeric: float) -> float:
    """``|a - n| / max(1, |a|, |n|)``: relative for large entries, absolute near zero."""
    return abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))


def _flat(x) -> np.ndarray:
    return x.values.ravel() if isinstance(x, (ScalarField, GraphField)) else np.asarray(x).ravel()


def _rebuild(like, flat):
    if isinstance(like, ScalarField):
        return ScalarField(flat.reshape(like.shape))
    return like.with_values(flat)


def min_gap(values: np.ndarray) -> float:
    v = np.sort(values)
    return float(np.diff(v).min()) if v.size > 1 else np.inf


def generic_point(f_flat, g_flat, eps, jitter, rng):
    """Randomly jitter f and g, then pull every pair of values 4 eps apart.

    Values are shifted by ``4 eps * rank`` in the jittered order, which keeps
    that order and leaves no two values within 3 eps of each other. A
    central difference with step eps then never reorders values, so the
    divergence is a polynomial along every probed direction.
    """
    size = f_flat.size
    both = np.concatenate([f_flat, g_flat]) + jitter * rng.random(2 * size)
    ranks = np.empty(2 * size)
    ranks[np.argsort(both, kind="stable")] = np.arange(2 * size)
    both = both + 4 * eps * ranks
    return both[:size], both[size:]


def gradcheck(f, g, config: SftdConfig, eps: float = 1e-5, trials: int = 3,
              jitter: float = 1e-3, seed: int = 0, max_coords: int = 256) -> GradcheckReport:
    """Compare the analytic gradient with central differences at jittered points.

    Every coordinate is probed when f and g together have at most
    ``max_coords`` values; otherwise the gradient support plus a random
    sample of the rest.
    """
    if not eps > 0 or not jitter >= 0:
        raise FieldError("eps must be positive and jitter non-negative")
    fv, gv = _flat(f), _flat(g)
    if fv.size != gv.size:
        raise FieldError(f"size mismatch: {fv.size} vs {gv.size}")
    tied = bool(min_gap(np.concatenate([fv, gv])) <= 3 * eps)
    if np.array_equal(fv, gv):
        # SFTD(f, f) = 0 and the gradient is zero by construction
        return GradcheckReport(0, eps, 0.0, tied, True, 0.0, 0)

    rng = make_rng(seed)
    worst, worst_at, checked = 0.0, {}, 0
    for trial in range(trials):
        f2, g2 = generic_point(fv, gv, eps, jitter, rng)
        ft, gt = _rebuild(f, f2), _rebuild(g, g2)
        _, grad = sftd_gradient(ft, gt, config)
        df, dg = grad.dense(fv.size)
        coords = [("f", i) for i in range(fv.size)] + [("g", i) for i in range(gv.size)]
        if len(coords) > max_coords:
            support = [("f", i) for i in sorted(grad.wrt_f)] + [("g", i) for i in sorted(grad.wrt_g)]
            taken = set(support)
            rest = [c for c in coords if c not in taken]
            pick = rng.choice(len(rest), size=min(len(rest), max(0, max_coords - len(support))), replace=False)
            coords = support + [rest[i] for i in sorted(pick)]
        for which, i in coords:
            base = f2 if which == "f" else g2
            vals = []
            for step in (eps, -eps):
                moved = base.copy()
                moved[i] += step
                args = (_rebuild(f, moved), gt) if which == "f" else (ft, _rebuild(g, moved))
                vals.append(sftd(*args, config).total)
            numeric = (vals[0] - vals[1]) / (2 * eps)
            analytic = (df if which == "f" else dg)[i]
            err = float(rel_error(analytic, numeric))
            checked += 1
            if err > worst:
                worst = err
                worst_at = {"trial": trial, "source": which, "index": int(i),
                            "analytic": float(analytic), "numeric": float(numeric)}
    return GradcheckReport(trials, eps, jitter, tied, False, worst, checked, worst_at)
