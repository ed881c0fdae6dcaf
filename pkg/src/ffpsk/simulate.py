"""Seeded Monte-Carlo trials of the feedforward receiver.

Every trial owns four uniform variates (three detector stages plus the leaf
draw) taken from one Philox block. The Philox key is derived from
``(seed, input_symbol)`` and the block counter is the trial index, so any
trial can be regenerated in isolation and chunked or threaded runs give the
same counts as a serial run.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .receiver import (
    OFF,
    ON,
    DecisionTree,
    ReceiverConfig,
    build_decision_tree,
    stage_off_probabilities,
)

VARIATES_PER_TRIAL = 4
CHUNK = 1 << 16


@dataclass(frozen=True)
class SimulationSpec:
    config: ReceiverConfig
    trials_per_input: int
    seed: int = 0

    def __post_init__(self):
        if int(self.trials_per_input) < 1:
            raise ValueError(f"trials_per_input must be >= 1, got {self.trials_per_input}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SimulationReport:
    counts: np.ndarray
    seed: int
    trials_per_input: int

    @property
    def empirical(self) -> np.ndarray:
        return self.counts / self.trials_per_input


def _philox_key(seed: int, symbol: int) -> np.ndarray:
    return np.random.SeedSequence([int(seed), int(symbol)]).generate_state(2, np.uint64)


def _uniforms(seed: int, symbol: int, start: int, n: int) -> np.ndarray:
    """Variates of trials ``start .. start+n-1`` as an (n, 4) array in [0, 1)."""
    # Philox(counter=c) emits block c+1 first; trial t owns block t+1.
    bitgen = np.random.Philox(key=_philox_key(seed, symbol), counter=[start, 0, 0, 0])
    raw = bitgen.random_raw(VARIATES_PER_TRIAL * n)
    return ((raw >> np.uint64(11)) * (1.0 / 9007199254740992.0)).reshape(n, VARIATES_PER_TRIAL)


def trial_stream(seed: int, symbol: int, trial: int) -> Iterator[float]:
    """Deterministic variate source for a single trial."""
    return iter(_uniforms(seed, symbol, trial, 1)[0].tolist())


def simulate_trial(config: ReceiverConfig, tree: DecisionTree, input_symbol: int, random_stream: Iterator[float]) -> int:
    """Walk the tree once and return the receiver's decision.

    A stage is OFF when its variate falls below the stage's off-probability.
    Skipped stages still consume their variate. The leaf variate is drawn only
    when the leaf distribution is randomized.
    """
    p_off = stage_off_probabilities(config, tree, input_symbol)
    outcomes: tuple[int, ...] = ()
    for _ in range(tree.stage_count):
        u = next(random_stream)
        outcomes += (OFF if u < p_off[outcomes] else ON,)
    dist = tree.leaf_decisions[outcomes]
    if len(dist) == 1:
        return next(iter(dist))
    u = next(random_stream)
    cum = 0.0
    symbols = sorted(dist)
    for j in symbols:
        cum += float(dist[j])
        if u < cum:
            return j
    return symbols[-1]


def _leaf_table(tree: DecisionTree) -> np.ndarray:
    """(8, M) cumulative leaf distributions indexed by the outcome bits."""
    cum = np.zeros((2 ** tree.stage_count, tree.M))
    for leaf in itertools.product((OFF, ON), repeat=tree.stage_count):
        row = np.cumsum(tree.leaf_vector(leaf))
        # Mirror the scalar walk: once the leaf mass is exhausted, stay put.
        row[row >= 1.0 - 1e-15] = 1.0
        cum[_leaf_index(leaf)] = row
    return cum


def _leaf_index(leaf) -> int:
    idx = 0
    for bit in leaf:
        idx = 2 * idx + bit
    return idx


def _count_chunk(config, tree, cum_leaf, symbol, seed, start, n) -> np.ndarray:
    u = _uniforms(seed, symbol, start, n)
    p_off = stage_off_probabilities(config, tree, symbol)
    # Heap-style prefix index: node = 2**k - 1 + prefix bits.
    node_p = np.array([p_off[prefix] for k in range(tree.stage_count)
                       for prefix in itertools.product((OFF, ON), repeat=k)])
    bits = np.zeros(n, dtype=np.int64)
    for k in range(tree.stage_count):
        threshold = node_p[(1 << k) - 1 + bits]
        bits = 2 * bits + (u[:, k] >= threshold)
    decisions = (u[:, tree.stage_count, None] >= cum_leaf[bits]).sum(axis=1)
    decisions = np.minimum(decisions, tree.M - 1)
    return np.bincount(decisions, minlength=tree.M)


def estimate_channel_matrix(spec: SimulationSpec, tree: DecisionTree | None = None, threads: int = 1) -> SimulationReport:
    """Count decisions over ``trials_per_input`` trials for each input symbol."""
    config = spec.config
    if tree is None:
        tree = build_decision_tree(config.M)
    cum_leaf = _leaf_table(tree)
    n_total = int(spec.trials_per_input)
    jobs = [(i, start, min(CHUNK, n_total - start))
            for i in range(config.M) for start in range(0, n_total, CHUNK)]

    def run(job):
        i, start, n = job
        return i, _count_chunk(config, tree, cum_leaf, i, spec.seed, start, n)

    counts = np.zeros((config.M, config.M), dtype=np.int64)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    for i, c in results:
        counts[i] += c
    return SimulationReport(counts=counts, seed=int(spec.seed), trials_per_input=n_total)
