"""Unfolding: matrix inversion, iterative Bayesian unfolding, constrained least squares.

All solvers take plain vectors and square matrices, so the qubit histograms and
the synthetic B-bin histograms share one code path.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import (
    BadPrior,
    DimensionMismatch,
    IllConditioned,
    Infeasible,
    NoConvergence,
    SingularMatrix,
)

DET_FLOOR = 1e-30
COND_WARN = 1e12
DENOM_FLOOR = 1e-30


@dataclass
class UnfoldResult:
    method: str
    t_hat: np.ndarray
    parameters: dict[str, Any] = field(default_factory=dict)
    iterations: int | None = None
    objective: float | None = None
    condition: float | None = None
    negativity_count: int = 0
    total_delta: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["t_hat"] = [float(x) for x in self.t_hat]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "UnfoldResult":
        data = dict(data)
        data["t_hat"] = np.asarray(data["t_hat"], dtype=float)
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)


def _inputs(m, response, background):
    m = np.asarray(m, dtype=float)
    r = np.asarray(response, dtype=float)
    if m.ndim != 1:
        raise DimensionMismatch("measured vector must be one-dimensional")
    if r.shape != (m.size, m.size):
        raise DimensionMismatch(f"response {r.shape} does not match {m.size} bins")
    if background is not None:
        b = np.asarray(background, dtype=float)
        if b.shape != m.shape:
            raise DimensionMismatch(f"background has {b.size} bins, expected {m.size}")
        m = m - b
    return m, r


def _finish(method, t_hat, m, **kw) -> UnfoldResult:
    return UnfoldResult(
        method=method,
        t_hat=t_hat,
        negativity_count=int(np.count_nonzero(t_hat < 0)),
        total_delta=float(t_hat.sum() - m.sum()),
        **kw,
    )


def _check_invertible(r: np.ndarray) -> None:
    sign, logdet = np.linalg.slogdet(r)
    if sign == 0 or logdet < np.log(DET_FLOOR):
        raise SingularMatrix(f"response determinant below {DET_FLOOR:g}")


def determinant(response) -> float:
    return float(np.linalg.det(np.asarray(response, dtype=float)))


def response_inverse(response) -> np.ndarray:
    r = np.asarray(response, dtype=float)
    _check_invertible(r)
    return np.linalg.inv(r)


def matrix_inversion(m, response, background=None) -> UnfoldResult:
    """Solve ``R t = m - background`` directly; the result may go negative."""
    m, r = _inputs(m, response, background)
    _check_invertible(r)
    cond = float(np.linalg.cond(r))
    if cond > COND_WARN:
        warnings.warn(f"response condition number {cond:.3g}", IllConditioned, stacklevel=2)
    try:
        t_hat = np.linalg.solve(r, m)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    return _finish("mi", t_hat, m, condition=cond)


def ibu(m, prior, response, iterations: int = 1, background=None) -> UnfoldResult:
    """Iterative Bayesian unfolding starting from ``prior``.

    Measured bins whose folded estimate vanishes (below 1e-30 in magnitude)
    are skipped for that iteration rather than dividing by zero.
    """
    m, r = _inputs(m, response, background)
    t = np.array(prior, dtype=float)
    if t.shape != m.shape:
        raise BadPrior(f"prior has {t.size} bins, expected {m.size}")
    if not np.all(np.isfinite(t)) or t.min() < 0 or not t.max() > 0:
        raise BadPrior("prior must be finite, non-negative and not all zero")
    n = int(iterations)
    if n < 0:
        raise ValueError("iterations must be >= 0")
    rt = r.T
    for _ in range(n):
        folded = r @ t
        ok = np.abs(folded) >= DENOM_FLOOR
        ratio = np.divide(m, folded, out=np.zeros_like(m), where=ok)
        t = t * (rt @ ratio)
    return _finish("ibu", t, m, iterations=n,
                   parameters={"iterations": n, "prior": [float(x) for x in prior]})


def constrained_ls(m, response, tolerance: float = 1e-6, max_steps: int = 1000,
                   seed=0, background=None) -> UnfoldResult:
    """Least squares ``|m - R x|^2`` over ``sum(x) = sum(m)``, ``0 <= x <= sum(m)``.

    Primal active-set method. The upper bound is implied by the other two
    constraints, so only the non-negativity bounds enter the working set.
    The start point is a seeded random vector scaled onto the simplex.
    """
    m, r = _inputs(m, response, background)
    total = float(m.sum())
    params = {"tolerance": tolerance, "max_steps": max_steps, "seed": seed}
    if total < 0:
        raise Infeasible(f"measured total {total:g} is negative")
    dim = m.size
    if total == 0:
        x = np.zeros(dim)
        return _finish("cls", x, m, iterations=0, objective=float(m @ m), parameters=params)

    q = r.T @ r
    c = r.T @ m
    x = np.random.default_rng(seed).random(dim)
    x *= total / x.sum()
    active = np.zeros(dim, dtype=bool)
    step_floor = 1e-12 * total
    mult_floor = -tolerance * max(1.0, float(np.abs(c).max()))

    for step in range(1, max_steps + 1):
        free = np.flatnonzero(~active)
        g = q @ x - c
        p_free, nu = _equality_step(q[np.ix_(free, free)], g[free])
        if np.abs(p_free).max(initial=0.0) <= step_floor:
            lam = g - nu
            lam[~active] = 0.0
            worst = int(np.argmin(lam))
            if lam[worst] >= mult_floor:
                break
            active[worst] = False
            continue
        alpha = 1.0
        blocking = -1
        for k, pk in zip(free, p_free):
            if pk < 0:
                a = -x[k] / pk
                if a < alpha:
                    alpha, blocking = a, k
        x[free] += alpha * p_free
        if blocking >= 0:
            x[blocking] = 0.0
            active[blocking] = True
    else:
        raise NoConvergence(f"active-set solver did not converge in {max_steps} steps")

    x = np.clip(x, 0.0, None)
    x = np.minimum(x * (total / x.sum()), total)
    resid = m - r @ x
    return _finish("cls", x, m, iterations=step, objective=float(resid @ resid),
                   parameters=params)


def _equality_step(q_ff: np.ndarray, g_f: np.ndarray) -> tuple[np.ndarray, float]:
    """Newton step on the free set keeping the total fixed, plus its multiplier."""
    k = g_f.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = q_ff
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.append(-g_f, 0.0)
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    # stationarity on the free set reads g_F + Q_FF p = -w, so the bound
    # multipliers on the active set are g_i - nu with nu = -w
    return sol[:k], -sol[k]


# ---------------------------------------------------------------- comparison

@dataclass
class Metrics:
    ratio: np.ndarray
    l2: float
    negativity_count: int
    total_delta: float


def metrics(t_hat, t) -> Metrics:
    t_hat = np.asarray(t_hat, dtype=float)
    t = np.asarray(t, dtype=float)
    if t_hat.shape != t.shape:
        raise DimensionMismatch(f"{t_hat.size} unfolded bins vs {t.size} truth bins")
    ratio = np.ones_like(t)
    pos = t > 0
    ratio[pos] = t_hat[pos] / t[pos]
    return Metrics(
        ratio=ratio,
        l2=float(np.linalg.norm(t_hat - t)),
        negativity_count=int(np.count_nonzero(t_hat < 0)),
        total_delta=float(t_hat.sum() - t.sum()),
    )


# ------------------------------------------------------------------- priors

def uniform_prior(dim: int) -> np.ndarray:
    return np.ones(dim)


def _half(dim: int) -> int:
    if dim < 2 or dim % 2:
        raise BadPrior(f"symmetric priors need an even dimension, got {dim}")
    return dim // 2


def tent_prior(dim: int) -> np.ndarray:
    """[0, 1, ..., d/2-1, d/2-1, ..., 1, 0]"""
    c = np.arange(_half(dim), dtype=float)
    return np.concatenate([c, c[::-1]])


def triangular_prior(dim: int) -> np.ndarray:
    """Triangular numbers [0, 1, 3, 6, ...] mirrored."""
    c = np.cumsum(np.arange(_half(dim), dtype=float))
    return np.concatenate([c, c[::-1]])


PRIORS = {"uniform": uniform_prior, "tent": tent_prior, "triangular": triangular_prior}
