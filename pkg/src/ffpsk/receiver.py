"""Three-stage feedforward displacement receiver for 3-/4-PSK coherent states.

All detection probabilities are closed-form functions of the real signal
amplitude, so the receiver reduces to a small probabilistic decision tree.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

import numpy as np

OFF = 0
ON = 1
STAGES = 3

Prefix = tuple[int, ...]
Leaf = tuple[int, int, int]


class DomainError(ValueError):
    """Argument outside the domain of a receiver operation."""


class UnsupportedError(DomainError):
    """Symbol count without a canonical feedforward tree."""


@dataclass(frozen=True)
class ReceiverConfig:
    """Physical parameters of the signal set and the receiver.

    ``alpha_sq`` is the mean photon number |alpha|^2 of the received state,
    ``gamma`` the dark-count exponent, and ``r1``/``r2`` the reflectances of
    the two beam splitters feeding stages 2 and 3.
    """

    M: int = 4
    alpha_sq: float = 1.0
    eta: float = 1.0
    gamma: float = 1e-8
    r1: float = 2.0 / 3.0
    r2: float = 0.5

    def __post_init__(self):
        if self.M not in (3, 4):
            raise UnsupportedError(f"M must be 3 or 4, got {self.M}")
        if not (self.alpha_sq >= 0 and math.isfinite(self.alpha_sq)):
            raise DomainError(f"alpha_sq must be finite and >= 0, got {self.alpha_sq}")
        if not 0 <= self.eta <= 1:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma}")
        for name in ("r1", "r2"):
            r = getattr(self, name)
            if not 0 < r < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {r}")

    @property
    def stage_fractions(self) -> tuple[float, float, float]:
        """Energy fraction reaching each stage: (1-r1, r1*r2, r1*(1-r2))."""
        return (1.0 - self.r1, self.r1 * self.r2, self.r1 * (1.0 - self.r2))


@dataclass(frozen=True)
class DecisionTree:
    """Feedforward strategy.

    ``stage_hypotheses`` maps an outcome prefix (length 0..2) to the symbol
    nulled by the displacement of the next stage. A prefix of length < 3
    without an entry marks a skipped stage; its detector outcome is ignored
    and recorded as OFF. ``leaf_decisions`` maps each outcome triple to an
    exact distribution over the final guess.
    """

    M: int
    stage_hypotheses: Mapping[Prefix, int]
    leaf_decisions: Mapping[Leaf, Mapping[int, Fraction]]
    stage_count: int = STAGES

    def __post_init__(self):
        for leaf, dist in self.leaf_decisions.items():
            if sum(dist.values()) != 1 or any(w < 0 for w in dist.values()):
                raise DomainError(f"leaf {leaf} is not a distribution: {dict(dist)}")
            if any(not 0 <= j < self.M for j in dist):
                raise DomainError(f"leaf {leaf} decides outside [0, {self.M})")
        if set(self.leaf_decisions) != set(itertools.product((OFF, ON), repeat=self.stage_count)):
            raise DomainError("leaf_decisions must cover every outcome triple")

    def hypothesis(self, prefix: Prefix) -> int | None:
        return self.stage_hypotheses.get(tuple(prefix))

    def leaf_vector(self, leaf: Leaf) -> np.ndarray:
        v = np.zeros(self.M)
        for j, w in self.leaf_decisions[tuple(leaf)].items():
            v[j] = float(w)
        return v


@dataclass(frozen=True)
class ChannelMatrix:
    """Row-stochastic table with ``p[i, j] = P(j | i)``."""

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DomainError(f"channel matrix must be square, got shape {p.shape}")
        if np.any(p < 0) or np.any(p > 1):
            raise DomainError("channel entries must lie in [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-12:
            raise DomainError("channel rows must sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def M(self) -> int:
        return self.p.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.p if dtype is None else self.p.astype(dtype)

    def __repr__(self):
        return f"ChannelMatrix(M={self.M}, p={self.p.tolist()!r})"


def _check_symbol(m: int, M: int) -> None:
    if not (isinstance(m, (int, np.integer)) and 0 <= m < M):
        raise DomainError(f"symbol index {m!r} outside [0, {M})")


def residual_distance_sq(m: int, h: int, M: int, alpha_sq: float) -> float:
    """Squared amplitude left after nulling hypothesis ``h`` when ``m`` was sent.

    |alpha u^m - alpha u^h|^2 = 4 alpha^2 sin^2(pi (m - h) / M).
    """
    _check_symbol(m, M)
    _check_symbol(h, M)
    if alpha_sq < 0:
        raise DomainError(f"alpha_sq must be >= 0, got {alpha_sq}")
    if m == h:
        return 0.0
    k = min((m - h) % M, (h - m) % M)  # fold so (m, h) and (h, m) round identically
    return 4.0 * alpha_sq * math.sin(math.pi * k / M) ** 2


def off_probability(d_sq: float, eta: float, gamma: float) -> float:
    """Probability that an on-off detector stays dark on a coherent state of
    squared amplitude ``d_sq``."""
    if d_sq < 0 or gamma < 0 or not 0 <= eta <= 1:
        raise DomainError(f"invalid detector inputs d_sq={d_sq}, eta={eta}, gamma={gamma}")
    return math.exp(-gamma - eta * d_sq)


def _on_probability(d_sq: float, eta: float, gamma: float) -> float:
    # 1 - exp(-x) without cancellation for tiny x (gamma ~ 1e-8).
    return -math.expm1(-gamma - eta * d_sq)


def _uniform(symbols) -> dict[int, Fraction]:
    symbols = tuple(symbols)
    return {s: Fraction(1, len(symbols)) for s in symbols}


def build_decision_tree(M: int) -> DecisionTree:
    """Canonical three-stage tree; the first stage always nulls symbol 0."""
    if M == 4:
        hyp = {
            (): 0,
            (OFF,): 0, (ON,): 2,
            (OFF, OFF): 0, (OFF, ON): 2, (ON, OFF): 2, (ON, ON): 1,
        }
        leaves = {
            (OFF, OFF, OFF): {0: Fraction(1)},
            (OFF, OFF, ON): _uniform((1, 2, 3)),
            (OFF, ON, OFF): {2: Fraction(1)},
            (OFF, ON, ON): _uniform((1, 3)),
            (ON, OFF, OFF): {2: Fraction(1)},
            (ON, OFF, ON): _uniform((1, 3)),
            (ON, ON, OFF): {1: Fraction(1)},
            (ON, ON, ON): {3: Fraction(1)},
        }
    elif M == 3:
        # Two clicks already rule out 0 and 1; stage 3 is skipped.
        hyp = {
            (): 0,
            (OFF,): 0, (ON,): 1,
            (OFF, OFF): 0, (OFF, ON): 1, (ON, OFF): 1,
        }
        leaves = {
            (OFF, OFF, OFF): {0: Fraction(1)},
            (OFF, OFF, ON): _uniform((1, 2)),
            (OFF, ON, OFF): {1: Fraction(1)},
            (OFF, ON, ON): {2: Fraction(1)},
            (ON, OFF, OFF): {1: Fraction(1)},
            (ON, OFF, ON): {2: Fraction(1)},
            (ON, ON, OFF): {2: Fraction(1)},
            (ON, ON, ON): {2: Fraction(1)},
        }
    else:
        raise UnsupportedError(f"no feedforward tree for M={M}; supported: 3, 4")
    return DecisionTree(
        M=M,
        stage_hypotheses=MappingProxyType(hyp),
        leaf_decisions=MappingProxyType({k: MappingProxyType(v) for k, v in leaves.items()}),
    )


def stage_off_probabilities(config: ReceiverConfig, tree: DecisionTree, symbol: int) -> dict[Prefix, float]:
    """Off-probability of the detector reached after each outcome prefix.

    Skipped stages report 1.0 so that their outcome is always OFF.
    """
    fractions = config.stage_fractions
    out = {}
    for k in range(tree.stage_count):
        for prefix in itertools.product((OFF, ON), repeat=k):
            h = tree.hypothesis(prefix)
            if h is None:
                out[prefix] = 1.0
                continue
            d_sq = fractions[k] * residual_distance_sq(symbol, h, config.M, config.alpha_sq)
            out[prefix] = off_probability(d_sq, config.eta, config.gamma)
    return out


def path_probabilities(config: ReceiverConfig, tree: DecisionTree, symbol: int) -> dict[Leaf, float]:
    """Probability of every outcome triple given the transmitted symbol."""
    fractions = config.stage_fractions
    dist = config.alpha_sq
    probs = {}
    for leaf in itertools.product((OFF, ON), repeat=tree.stage_count):
        prob = 1.0
        for k, outcome in enumerate(leaf):
            h = tree.hypothesis(leaf[:k])
            if h is None:
                prob *= 1.0 if outcome == OFF else 0.0
                continue
            d_sq = fractions[k] * residual_distance_sq(symbol, h, config.M, dist)
            if outcome == OFF:
                prob *= off_probability(d_sq, config.eta, config.gamma)
            else:
                prob *= _on_probability(d_sq, config.eta, config.gamma)
        probs[leaf] = prob
    return probs


def exact_channel_matrix(config: ReceiverConfig, tree: DecisionTree | None = None) -> ChannelMatrix:
    """Channel matrix by exhaustive enumeration of the eight outcome paths."""
    if tree is None:
        tree = build_decision_tree(config.M)
    if tree.M != config.M:
        raise DomainError(f"tree is for M={tree.M} but config has M={config.M}")
    leaf_vectors = {leaf: tree.leaf_vector(leaf) for leaf in tree.leaf_decisions}
    p = np.zeros((config.M, config.M))
    for i in range(config.M):
        for leaf, prob in path_probabilities(config, tree, i).items():
            p[i] += prob * leaf_vectors[leaf]
    return ChannelMatrix(p)
