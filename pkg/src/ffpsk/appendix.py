"""Literal transcription of the published closed-form channel matrices.

Each entry P(j|i) is stored as a sum of weighted terms; every term is a
product of three detector factors ``e^{-g - c*f*eta*a^2}`` (off) or
``1 - e^{-g - c*f*eta*a^2}`` (on), where ``c`` is the printed distance
coefficient and ``f`` one of the printed beam-splitter fractions. Printing
errors are kept as printed; ``CORRECTIONS`` lists the repaired factors so the
audit can separate transcription typos from model disagreement.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .receiver import DomainError, ReceiverConfig, _on_probability, exact_channel_matrix, off_probability

VARIANTS = {"a1_4psk": 4, "a2_3psk": 3}

_FRACTIONS = {
    "1-r1": lambda r1, r2: 1.0 - r1,
    "r1r2": lambda r1, r2: r1 * r2,
    "r1(1-r2)": lambda r1, r2: r1 * (1.0 - r2),
}

Factor = tuple[bool, int, str]  # (is_on, distance coefficient, fraction key)


def _off(c: int = 0, f: str = "1-r1") -> Factor:
    return (False, c, f)


def _on(c: int = 0, f: str = "1-r1") -> Factor:
    return (True, c, f)


_A, _B, _C = "1-r1", "r1r2", "r1(1-r2)"
_T, _H = Fraction(1, 3), Fraction(1, 2)
_one = Fraction(1)

# fmt: off
_A1 = {
    (0, 0): [(_one, (_off(), _off(), _off()))],
    (0, 1): [(_T, (_off(), _off(), _on())),
             (_H, (_off(), _on(), _on(4, _C))),
             (_H, (_on(), _off(4, _B), _on(4, _C))),
             (_one, (_on(), _off(4, _B), _off(2, _C)))],
    (0, 2): [(_T, (_off(), _off(), _on())),
             (_one, (_off(), _on(), _on(4, _C))),
             (_one, (_on(), _off(4, _B), _off(4, _C)))],
    (0, 3): [(_T, (_off(), _off(), _on())),
             (_H, (_off(), _on(), _on(4, _C))),
             (_H, (_on(), _off(4, _B), _on(4, _C))),
             (_one, (_on(), _off(4, _B), _on(2, _C)))],
    (1, 0): [(_one, (_off(2, _A), _off(2, _B), _off(2, _C)))],
    (1, 1): [(_T, (_off(2, _A), _off(2, _B), _on(2, _C))),
             (_H, (_off(2, _A), _on(2, _B), _on(2, _C))),
             (_H, (_on(2, _A), _off(2, _B), _on(2, _C))),
             (_one, (_on(2, _A), _on(2, _B), _off()))],
    (1, 2): [(_T, (_off(2, _A), _off(2, _B), _on(2, _C))),
             (_one, (_off(2, _A), _on(2, _B), _off(2, _C))),
             (_one, (_on(2, _A), _off(2, _B), _off(2, _C)))],
    (1, 3): [(_T, (_off(2, _A), _off(2, _B), _on(2, _C))),
             (_H, (_off(2, _A), _on(2, _B), _on(2, _C))),
             (_H, (_on(2, _A), _off(2, _B), _on(2, _C))),
             (_one, (_on(2, _A), _on(2, _B), _on()))],
    (2, 0): [(_one, (_off(4, _A), _off(4, _B), _off(4, _C)))],
    (2, 1): [(_T, (_off(4, _A), _off(4, _B), _on(4, _C))),
             (_H, (_off(4, _A), _on(4, _B), _on())),
             (_H, (_on(4, _A), _off(), _on())),
             (_one, (_on(4, _A), _on(), _off(2, _C)))],
    (2, 2): [(_T, (_off(4, _A), _off(4, _B), _on(4, _C))),
             (_one, (_off(4, _A), _on(4, _B), _off())),
             (_one, (_on(4, _A), _off(), _off()))],
    (2, 3): [(_T, (_off(4, _A), _off(4, _B), _on(4, _C))),
             (_H, (_off(4, _A), _on(4, _B), _on())),
             (_H, (_on(4, _A), _off(), _on())),
             (_one, (_on(4, _A), _on(), _on(2, _C)))],
    (3, 0): [(_one, (_off(2, _A), _off(2, _B), _off(2, _C)))],
    (3, 1): [(_T, (_off(2, _A), _off(2, _B), _on(2, _C))),
             (_H, (_off(2, _A), _on(2, _B), _on(2, _C))),
             (_H, (_on(2, _A), _off(2, _B), _on(2, _C))),
             (_one, (_on(2, _A), _on(2, _B), _off(4, _C)))],
    (3, 2): [(_T, (_off(2, _A), _off(2, _B), _on(2, _C))),
             (_one, (_off(2, _A), _on(2, _B), _on(2, _C))),
             (_one, (_on(2, _A), _off(2, _B), _off(2, _C)))],
    (3, 3): [(_T, (_off(2, _A), _off(2, _B), _on(2, _C))),
             (_H, (_off(2, _A), _on(2, _B), _on(2, _C))),
             (_H, (_on(2, _A), _off(2, _B), _on(2, _C))),
             (_one, (_on(2, _A), _on(2, _B), _on(4, _C)))],
}

# The 3-PSK table routes r1(1-r2) to stage 2 and r1*r2 to stage 3.
_A2 = {
    (0, 0): [(_one, (_off(), _off(), _off()))],
    (0, 1): [(_H, (_off(), _off(), _on())),
             (_one, (_off(), _on(), _off(3, _B))),
             (_one, (_on(), _off(3, _C), _off(3, _B)))],
    (0, 2): [(_H, (_off(), _off(), _on())),
             (_one, (_off(), _on(), _on(3, _B))),
             (_one, (_on(), _off(3, _C), _on(3, _B))),
             (_one, (_on(), _on(3, _C)))],
    (1, 0): [(_one, (_off(3, _A), _off(3, _C), _off(3, _B)))],
    (1, 1): [(_H, (_off(3, _A), _off(3, _C), _on(3, _B))),
             (_one, (_off(3, _A), _on(3, _C), _off())),
             (_one, (_on(3, _A), _off(), _off()))],
    (1, 2): [(_H, (_off(3, _A), _off(3, _C), _on(3, _B))),
             (_one, (_off(3, _A), _on(3, _C), _on())),
             (_one, (_on(3, _A), _on()))],
    (2, 0): [(_one, (_off(3, _A), _off(3, _C), _off(3, _B)))],
    (2, 1): [(_H, (_off(3, _A), _off(3, _C), _on(3, _B))),
             (_one, (_off(3, _A), _on(3, _C), _off(3, _B))),
             (_one, (_on(3, _A), _off(3, _C), _off(3, _B)))],
    (2, 2): [(_H, (_off(3, _A), _off(3, _C), _on(3, _B))),
             (_one, (_off(3, _A), _on(3, _C), _on(3, _B))),
             (_one, (_on(3, _A), _off(3, _A), _on(3, _B))),
             (_one, (_on(3, _A), _on(3, _A)))],
}

# (variant, i, j, term index) -> (weight, factors) consistent with the tree.
# A term index equal to the printed term count is a term missing from print.
CORRECTIONS = {
    ("a1_4psk", 0, 1, 3): (_one, (_on(), _on(4, _B), _off(2, _C))),
    ("a1_4psk", 0, 2, 1): (_one, (_off(), _on(), _off(4, _C))),
    ("a1_4psk", 0, 3, 3): (_one, (_on(), _on(4, _B), _on(2, _C))),
    ("a1_4psk", 3, 2, 1): (_one, (_off(2, _A), _on(2, _B), _off(2, _C))),
    ("a2_3psk", 1, 2, 3): (_one, (_on(3, _A), _off(), _on())),
    ("a2_3psk", 2, 2, 2): (_one, (_on(3, _A), _off(3, _C), _on(3, _B))),
    ("a2_3psk", 2, 2, 3): (_one, (_on(3, _A), _on(3, _C))),
}
# fmt: on

TABLES = {"a1_4psk": _A1, "a2_3psk": _A2}


def _factor_value(factor: Factor, config: ReceiverConfig) -> float:
    is_on, c, f = factor
    d_sq = c * _FRACTIONS[f](config.r1, config.r2) * config.alpha_sq
    if is_on:
        return _on_probability(d_sq, config.eta, config.gamma)
    return off_probability(d_sq, config.eta, config.gamma)


def term_value(weight: Fraction, factors, config: ReceiverConfig) -> float:
    value = float(weight)
    for factor in factors:
        value *= _factor_value(factor, config)
    return value


def _table_matrix(table, M: int, config: ReceiverConfig, corrected_variant: str | None = None) -> np.ndarray:
    out = np.zeros((M, M))
    for (i, j), terms in table.items():
        terms = list(terms)
        if corrected_variant is not None:
            terms.extend(
                fix for (v, ci, cj, t), fix in CORRECTIONS.items()
                if (v, ci, cj) == (corrected_variant, i, j) and t >= len(table[(i, j)])
            )
            terms = [CORRECTIONS.get((corrected_variant, i, j, t), term) for t, term in enumerate(terms)]
        for w, factors in terms:
            out[i, j] += term_value(w, factors, config)
    return out


@dataclass(frozen=True)
class TermDiscrepancy:
    i: int
    j: int
    term: int
    printed: tuple | None  # None for a term missing from print
    corrected: tuple
    printed_value: float
    corrected_value: float

    def describe(self) -> str:
        return (
            f"P({self.j}|{self.i}) term {self.term + 1}: printed {_render(self.printed)} "
            f"-> {_render(self.corrected)} (delta {self.printed_value - self.corrected_value:+.3e})"
        )


@dataclass(frozen=True)
class AppendixAudit:
    variant: str
    printed: np.ndarray
    exact: np.ndarray
    diff: np.ndarray  # printed - exact
    corrected: np.ndarray
    discrepancies: tuple[TermDiscrepancy, ...]

    @property
    def row_sums(self) -> np.ndarray:
        return self.printed.sum(axis=1)

    def flagged_entries(self, atol: float = 1e-12) -> list[tuple[int, int]]:
        return [tuple(map(int, ij)) for ij in np.argwhere(np.abs(self.diff) > atol)]


def _render(factors) -> str:
    if factors is None:
        return "(missing)"
    parts = []
    for is_on, c, f in factors:
        arg = "-g" if c == 0 else f"-g-{c}({f})eta*a^2"
        parts.append(f"(1-e^{{{arg}}})" if is_on else f"e^{{{arg}}}")
    return "*".join(parts)


def appendix_matrix(config: ReceiverConfig, variant: str) -> AppendixAudit:
    """Evaluate the printed table and audit it against the tree evaluator."""
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}; expected one of {sorted(VARIANTS)}")
    M = VARIANTS[variant]
    if config.M != M:
        raise DomainError(f"variant {variant} needs M={M}, config has M={config.M}")
    table = TABLES[variant]
    printed = _table_matrix(table, M, config)
    corrected = _table_matrix(table, M, config, corrected_variant=variant)
    exact = np.asarray(exact_channel_matrix(config))
    found = []
    for (v, i, j, t), fixed in CORRECTIONS.items():
        if v != variant:
            continue
        terms = table[(i, j)]
        w_fix, fixed_factors = fixed
        if t < len(terms):
            w, factors = terms[t]
            printed_value = term_value(w, factors, config)
        else:
            w, factors, printed_value = w_fix, None, 0.0
        found.append(TermDiscrepancy(
            i, j, t, factors, fixed_factors,
            printed_value, term_value(w_fix, fixed_factors, config),
        ))
    return AppendixAudit(variant, printed, exact, printed - exact, corrected, tuple(found))
