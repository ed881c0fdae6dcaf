"""Photon-number sweeps over receivers and priors, serialized as CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .baselines import HeterodyneSpec, heterodyne_channel_matrix, helstrom_error_psk
from .info import (
    average_error_rate,
    bhattacharyya_matrix,
    cutoff_rate_at,
    maximize_mutual_information,
    minimize_cutoff_objective,
    mutual_information,
    required_code_length,
    uniform_prior,
)
from .receiver import ReceiverConfig, exact_channel_matrix

SCHEMES = ("displacement_optimized", "displacement_equal", "heterodyne", "helstrom")
OBJECTIVES = ("mi", "cutoff")
GRIDS = ("linear", "log")
CSV_HEADER = ("alpha_sq", "scheme", "mi_bits", "error_rate", "cutoff_nats", "code_length", "p0", "p1", "p2", "p3")
# -ln(p'bp) of identical rows is a few ulps, not a usable rate
RC_FLOOR = 1e-12


@dataclass(frozen=True)
class SweepConfig:
    m: int = 4
    alpha_sq_min: float = 0.0
    alpha_sq_max: float = 5.0
    steps: int = 101
    grid: str = "linear"
    eta: float = 1.0
    gamma: float = 1e-8
    r1: float = 2.0 / 3.0
    r2: float = 0.5
    objective: str = "mi"
    schemes: tuple[str, ...] = SCHEMES
    target_error: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.m not in (3, 4):
            raise ValueError(f"m must be 3 or 4, got {self.m}")
        if not 0 <= self.alpha_sq_min <= self.alpha_sq_max:
            raise ValueError("need 0 <= alpha_sq_min <= alpha_sq_max")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.grid not in GRIDS:
            raise ValueError(f"grid must be one of {GRIDS}")
        if self.grid == "log" and self.alpha_sq_min <= 0 and self.steps > 1:
            raise ValueError("log grid needs alpha_sq_min > 0")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown or not self.schemes:
            raise ValueError(f"unknown schemes {sorted(unknown)}; choose from {SCHEMES}")
        if not 0 < self.target_error < 1:
            raise ValueError("target_error must lie in (0, 1)")
        # surface receiver parameter errors early
        self.receiver(self.alpha_sq_min)

    @classmethod
    def from_dict(cls, values: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        extra = set(values) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**values)

    def receiver(self, alpha_sq: float) -> ReceiverConfig:
        return ReceiverConfig(M=self.m, alpha_sq=alpha_sq, eta=self.eta, gamma=self.gamma, r1=self.r1, r2=self.r2)

    def grid_points(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.alpha_sq_min])
        if self.grid == "log":
            return np.geomspace(self.alpha_sq_min, self.alpha_sq_max, self.steps)
        return np.linspace(self.alpha_sq_min, self.alpha_sq_max, self.steps)


@dataclass
class SweepRow:
    alpha_sq: float
    scheme: str
    mi_bits: float | None = None
    error_rate: float | None = None
    cutoff_nats: float | None = None
    code_length: int | float | None = None  # math.inf when unachievable
    prior: list[float] = field(default_factory=list)


def _code_length(rc: float, target_error: float) -> float:
    if rc <= RC_FLOOR:
        return float("inf")
    return required_code_length(rc, target_error)


def _channel_row(alpha_sq, scheme, w, prior, target_error, rc=None, mi=None) -> SweepRow:
    b = bhattacharyya_matrix(w)
    rc = cutoff_rate_at(prior, b) if rc is None else rc
    mi = mutual_information(w, prior) if mi is None else mi
    return SweepRow(
        alpha_sq=float(alpha_sq),
        scheme=scheme,
        mi_bits=mi,
        error_rate=average_error_rate(w, prior),
        cutoff_nats=rc,
        code_length=_code_length(rc, target_error),
        prior=[float(x) for x in prior],
    )


def evaluate_point(config: SweepConfig, alpha_sq: float) -> list[SweepRow]:
    """All requested schemes at one photon number, in declared order."""
    M = config.m
    rows = []
    w = het = None
    for scheme in config.schemes:
        if scheme.startswith("displacement") and w is None:
            w = np.asarray(exact_channel_matrix(config.receiver(alpha_sq)))
        if scheme == "displacement_optimized":
            if config.objective == "mi":
                rep = maximize_mutual_information(w)
                rows.append(_channel_row(alpha_sq, scheme, w, rep.optimal_prior, config.target_error, mi=rep.value))
            else:
                rep = minimize_cutoff_objective(bhattacharyya_matrix(w))
                rows.append(_channel_row(alpha_sq, scheme, w, rep.optimal_prior, config.target_error, rc=rep.value))
        elif scheme == "displacement_equal":
            rows.append(_channel_row(alpha_sq, scheme, w, uniform_prior(M), config.target_error))
        elif scheme == "heterodyne":
            if het is None:
                het = np.asarray(heterodyne_channel_matrix(HeterodyneSpec(M, alpha_sq)))
            rows.append(_channel_row(alpha_sq, scheme, het, uniform_prior(M), config.target_error))
        elif scheme == "helstrom":
            rows.append(SweepRow(
                alpha_sq=float(alpha_sq), scheme=scheme,
                error_rate=helstrom_error_psk(M, alpha_sq), prior=list(uniform_prior(M)),
            ))
    return rows


def run_sweep(config: SweepConfig, threads: int = 1) -> list[SweepRow]:
    points = config.grid_points()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_point = list(pool.map(lambda a: evaluate_point(config, a), points))
    else:
        per_point = [evaluate_point(config, a) for a in points]
    return [row for rows in per_point for row in rows]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x == float("inf"):
        return "inf"
    return format(float(x), ".17g")


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        prior = [_fmt(p) for p in r.prior] + [""] * (4 - len(r.prior))
        writer.writerow([_fmt(r.alpha_sq), r.scheme, _fmt(r.mi_bits), _fmt(r.error_rate),
                         _fmt(r.cutoff_nats), _fmt(r.code_length), *prior])
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    return x


def rows_to_json(config: SweepConfig, rows: list[SweepRow]) -> str:
    out_rows = []
    for r in rows:
        d = {k: _json_value(getattr(r, k)) for k in CSV_HEADER[:6]}
        for k in range(4):
            d[f"p{k}"] = r.prior[k] if k < len(r.prior) else None
        out_rows.append(d)
    cfg = asdict(config)
    cfg["schemes"] = list(config.schemes)
    return json.dumps({"config": cfg, "rows": out_rows}, indent=2) + "\n"
