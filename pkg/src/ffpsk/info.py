"""Information measures over a discrete channel ``W[i, j] = P(j | i)``.

Mutual information and capacity are in bits; cutoff rates are in nats.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

MI_TOL = 1e-10
MAX_ITER = 1_000_000
_ZERO_PRIOR = 1e-300
_MAX_SHRINK_BITS = 60.0
_POLISH_EVERY = 64


class ConvergenceError(RuntimeError):
    """Blahut-Arimoto hit its iteration cap; ``best`` holds the last iterate."""

    def __init__(self, message: str, best: "OptimizationReport"):
        super().__init__(message)
        self.best = best


class UnachievableError(ValueError):
    pass


@dataclass(frozen=True)
class OptimizationReport:
    optimal_prior: np.ndarray
    value: float
    iterations: int
    optimality_gap: float


def _channel(channel) -> np.ndarray:
    w = np.asarray(channel, dtype=float)
    if w.ndim != 2:
        raise ValueError(f"channel must be 2-D, got shape {w.shape}")
    return w


def as_prior(prior, M: int | None = None) -> np.ndarray:
    p = np.asarray(prior, dtype=float)
    if p.ndim != 1:
        raise ValueError("prior must be a vector")
    if M is not None and p.shape[0] != M:
        raise ValueError(f"prior has length {p.shape[0]}, channel has {M} inputs")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"prior is not a probability vector: {p}")
    return p


def uniform_prior(M: int) -> np.ndarray:
    return np.full(M, 1.0 / M)


def _row_divergences(w: np.ndarray, p: np.ndarray) -> np.ndarray:
    """D(W[i] || pW) in bits for every input, with 0 log 0 = 0."""
    q = p @ w
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # log1p keeps full relative precision when rows nearly match the output
        # law; far from a ratio of 1 the plain log is the accurate one
        rel = (w - q) / q
        log_ratio = np.where(np.abs(rel) < 0.5, np.log1p(rel), np.log(w / q))
        terms = np.where(w > 0, w * log_ratio, 0.0)
        under = np.any((w > 0) & (q <= 1e-290), axis=0)
        if under.any():
            # p_i W_ij underflowed: take log q in the log domain for those outputs
            log_q = special.logsumexp(np.log(p)[:, None] + np.log(w[:, under]), axis=0)
            sub = w[:, under]
            terms[:, under] = np.where(sub > 0, sub * (np.log(sub) - log_q), 0.0)
    return terms.sum(axis=1) / math.log(2)


def mutual_information(channel, prior) -> float:
    w = _channel(channel)
    p = as_prior(prior, w.shape[0])
    d = _row_divergences(w, p)
    return float(max(np.dot(p[p > 0], d[p > 0]), 0.0))


def capacity_gap(channel, prior) -> float:
    """max_i D(W[i] || pW) - I(p); an upper bound on capacity - I(p)."""
    w = _channel(channel)
    p = as_prior(prior, w.shape[0])
    d = _row_divergences(w, p)
    return float(d.max() - np.dot(p[p > 0], d[p > 0]))


def _ba_state(w: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, float]:
    d = _row_divergences(w, p)
    return d, float(np.dot(p[p > 0], d[p > 0]))


def _ba_step(p: np.ndarray, d: np.ndarray, step: float) -> np.ndarray:
    # p_i <- p_i 2^{step D_i} / Z, shifted by max D. The shrink per step is
    # capped so an enlarged step cannot push a live symbol into the zero clamp.
    with np.errstate(invalid="ignore"):
        e = np.where(np.isposinf(d), 0.0, step * (d - d.max()))
    q = p * np.exp2(np.maximum(e, -_MAX_SHRINK_BITS))
    q /= q.sum()
    q[q < _ZERO_PRIOR] = 0.0
    return q / q.sum()


def _equalizer_newton(w: np.ndarray, support: list[int], p0: np.ndarray, iters: int = 50) -> np.ndarray | None:
    """Solve D_i(p) = C for i in ``support``, sum p = 1, by damped Newton.

    The capacity-achieving prior equalizes the divergences on its support, so
    near the optimum this converges quadratically where the multiplicative
    update crawls (e.g. nearly duplicated rows). Returns None on failure.
    """
    k = len(support)
    ws = w[support]
    x = np.append(p0[support] / p0[support].sum(), 0.0)
    for _ in range(iters):
        p = np.zeros(w.shape[0])
        p[support] = x[:k]
        d = _row_divergences(w, p)[support]
        if not np.all(np.isfinite(d)):
            return None
        q = x[:k] @ ws
        live = q > 0
        jac_d = -(ws[:, live] / q[live]) @ ws[:, live].T / math.log(2)
        jac = np.zeros((k + 1, k + 1))
        jac[:k, :k] = jac_d
        jac[:k, k] = -1.0
        jac[k, :k] = 1.0
        res = np.append(d - x[k], x[:k].sum() - 1.0)
        try:
            dx = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(dx)):
            return None
        # damp so the prior stays strictly positive
        shrink = dx[:k] < 0
        t = min(1.0, 0.9 * float(np.min(-x[:k][shrink] / dx[:k][shrink]))) if shrink.any() else 1.0
        x = x + t * dx
        if np.max(np.abs(res)) < 1e-15 and t == 1.0:
            break
    p = np.zeros(w.shape[0])
    p[support] = np.clip(x[:k], 0.0, None)
    return p / p.sum() if p.sum() > 0 else None


def _polish(w: np.ndarray, p: np.ndarray, tolerance: float):
    """Try equalizer solutions on the supports spanned by the largest priors."""
    order = np.argsort(-p, kind="stable")
    for k in range(1, w.shape[0] + 1):
        support = sorted(int(i) for i in order[:k])
        if p[support].sum() <= 0:
            continue
        cand = _equalizer_newton(w, support, p)
        if cand is None:
            continue
        d, info = _ba_state(w, cand)
        if float(d.max()) - info <= tolerance:
            return cand, d, info
    return None


def maximize_mutual_information(channel, tolerance: float = MI_TOL, max_iter: int = MAX_ITER) -> OptimizationReport:
    """Blahut-Arimoto capacity, stopped on the certified gap max_i D_i - I.

    The multiplicative update p_i <- p_i 2^{s D_i} uses an adaptive exponent
    s >= 1: it doubles while I keeps increasing and falls back toward the
    classic s = 1 (always monotone) otherwise. Nearly useless channels, whose
    rows differ only slightly, otherwise need millions of classic steps.
    Every few iterations a Newton solve of the equalizer conditions is tried
    and accepted only if it meets the same certificate.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    w = _channel(channel)
    p = uniform_prior(w.shape[0])
    d, info = _ba_state(w, p)
    step = 1.0
    for it in range(max_iter + 1):
        gap = float(d.max()) - info
        if gap <= tolerance:
            break
        if it == max_iter:
            best = OptimizationReport(p, max(info, 0.0), it, gap)
            raise ConvergenceError(f"capacity gap {gap:.3e} > {tolerance:.1e} after {it} iterations", best)
        if it % _POLISH_EVERY == _POLISH_EVERY - 1:
            polished = _polish(w, p, tolerance)
            if polished is not None:
                p, d, info = polished
                gap = float(d.max()) - info
                break
        while True:
            cand = _ba_step(p, d, step)
            d_c, info_c = _ba_state(w, cand)
            if info_c >= info or step == 1.0:
                break
            step = max(step / 4, 1.0)
        p, d, info = cand, d_c, info_c
        step = min(step * 2, 1e12)
    return OptimizationReport(p, max(info, 0.0), it, max(gap, 0.0))


def bhattacharyya_matrix(channel) -> np.ndarray:
    s = np.sqrt(_channel(channel))
    b = s @ s.T
    return (b + b.T) / 2


def cutoff_rate_at(prior, b) -> float:
    b = np.asarray(b, dtype=float)
    p = as_prior(prior, b.shape[0])
    q = float(p @ b @ p)
    return 0.0 - math.log(min(q, 1.0))


def kkt_residual(prior, b) -> float:
    """Largest violation of the simplex KKT conditions for min p'bp.

    On the support every (b p)_i equals p'bp; off the support it is no smaller.
    """
    b = np.asarray(b, dtype=float)
    p = np.asarray(prior, dtype=float)
    g = b @ p
    value = float(p @ g)
    support = p > 0
    on = np.abs(g[support] - value).max(initial=0.0)
    off = np.maximum(value - g[~support], 0.0).max(initial=0.0)
    return float(max(on, off))


def minimize_cutoff_objective(b) -> OptimizationReport:
    """Exact minimum of p'bp over the probability simplex by support enumeration.

    Each support S yields the stationary point p_S proportional to
    inv(b_S) 1; the global minimum is the best nonnegative one. Singular
    supports are skipped since their optimum also lives on a sub-support.
    """
    b = np.asarray(b, dtype=float)
    M = b.shape[0]
    if np.max(np.abs(b - 1.0)) <= 1e-12:
        # Flat objective: every prior is optimal.
        return OptimizationReport(uniform_prior(M), 0.0, 0, 0.0)
    best_p, best_q = None, math.inf
    examined = 0
    for size in range(1, M + 1):
        for support in itertools.combinations(range(M), size):
            examined += 1
            idx = list(support)
            sub = b[np.ix_(idx, idx)]
            try:
                if np.linalg.cond(sub) > 1e12:
                    continue
                x = np.linalg.solve(sub, np.ones(size))
            except np.linalg.LinAlgError:
                continue
            if x.sum() <= 0 or np.any(x < 0):
                continue
            p = np.zeros(M)
            p[idx] = x / x.sum()
            q = float(p @ b @ p)
            # strict improvement only: earlier supports win ties
            if q < best_q - 1e-15:
                best_p, best_q = p, q
    return OptimizationReport(best_p, 0.0 - math.log(min(best_q, 1.0)), examined, 0.0)


def average_error_rate(channel, prior) -> float:
    """Symbol error rate 1 - sum_i p_i P(i|i)."""
    w = _channel(channel)
    p = as_prior(prior, w.shape[0])
    return float(min(max(1.0 - np.dot(p, np.diag(w)), 0.0), 1.0))


def decoding_error_bound(rc: float, code_length: int) -> float:
    if rc < 0 or code_length < 1:
        raise ValueError("need rc >= 0 and code_length >= 1")
    return math.exp(-code_length * rc)


def required_code_length(rc: float, target_error: float = 1e-9) -> int:
    """Least N with exp(-N rc) <= target_error."""
    if not 0 < target_error < 1:
        raise ValueError("target_error must lie in (0, 1)")
    if not rc > 0:
        raise UnachievableError(f"cutoff rate {rc} <= 0: no finite code length reaches {target_error}")
    x = math.log(1.0 / target_error) / rc
    # absorb rounding when x lands on an integer, e.g. rc = ln 10, target 1e-9
    return max(math.ceil(x - 1e-9 * x), 1)
