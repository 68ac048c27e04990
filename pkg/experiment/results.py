"""
Sweep tables and their CSV / JSON renderings.

Trial CSV:      d0_m,scheme,trial,rate_bpshz,mode,alpha,seed
Aggregate CSV:  d0_m,scheme,mean_rate,std_rate,relay_fraction,mean_alpha,trials

std_rate is the sample standard deviation (0 for a single trial); mean_alpha
averages over all trials, with conventional-mode trials counting as α = 1.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from errors import ValidationError
from experiment.records import Scheme, TrialRecord

TRIAL_HEADER = ("d0_m", "scheme", "trial", "rate_bpshz", "mode", "alpha", "seed")
AGGREGATE_HEADER = ("d0_m", "scheme", "mean_rate", "std_rate", "relay_fraction", "mean_alpha", "trials")


def _num(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True)
class AggregateRow:
    d0: float
    scheme: Scheme
    mean_rate: float
    std_rate: float
    relay_fraction: float
    mean_alpha: float
    trials: int

    def __post_init__(self):
        if self.mean_rate < 0:
            raise ValidationError(f"negative mean rate {self.mean_rate} at d0={self.d0}")
        if not 0.0 <= self.relay_fraction <= 1.0:
            raise ValidationError(f"relay fraction {self.relay_fraction} outside [0, 1]")


@dataclass(frozen=True)
class SweepResult:
    records: tuple[TrialRecord, ...]
    rows: tuple[AggregateRow, ...]

    @classmethod
    def from_records(cls, records: list[TrialRecord], schemes) -> "SweepResult":
        groups: dict[tuple[float, Scheme], list[TrialRecord]] = {}
        for r in records:
            groups.setdefault((r.d0, r.scheme), []).append(r)

        order = {scheme: i for i, scheme in enumerate(schemes)}
        rows = []
        for (d0, scheme), group in sorted(groups.items(), key=lambda kv: (kv[0][0], order[kv[0][1]])):
            rates = np.array([r.rate for r in group])
            rows.append(AggregateRow(
                d0=d0,
                scheme=scheme,
                mean_rate=float(rates.mean()),
                std_rate=float(rates.std(ddof=1)) if rates.size > 1 else 0.0,
                relay_fraction=sum(r.mode == "relaying" for r in group) / len(group),
                mean_alpha=float(np.mean([r.alpha for r in group])),
                trials=len(group),
            ))
        return cls(records=tuple(records), rows=tuple(rows))

    def row(self, d0: float, scheme: Scheme) -> AggregateRow:
        for row in self.rows:
            if row.d0 == d0 and row.scheme is scheme:
                return row
        raise KeyError(f"no aggregate row for d0={d0}, scheme={scheme.value}")

    # -----------------------------------------------------------------------
    # Rendering
    # -----------------------------------------------------------------------

    def trial_rows(self) -> list[dict]:
        return [
            {
                "d0_m": r.d0,
                "scheme": r.scheme.value,
                "trial": r.trial,
                "rate_bpshz": r.rate,
                "mode": r.mode,
                "alpha": r.alpha,
                "seed": r.seed,
            }
            for r in self.records
        ]

    def aggregate_rows(self) -> list[dict]:
        return [
            {
                "d0_m": row.d0,
                "scheme": row.scheme.value,
                "mean_rate": row.mean_rate,
                "std_rate": row.std_rate,
                "relay_fraction": row.relay_fraction,
                "mean_alpha": row.mean_alpha,
                "trials": row.trials,
            }
            for row in self.rows
        ]

    def trial_csv(self) -> str:
        return _to_csv(TRIAL_HEADER, self.trial_rows())

    def aggregate_csv(self) -> str:
        return _to_csv(AGGREGATE_HEADER, self.aggregate_rows())

    def trial_json(self) -> str:
        return json.dumps(self.trial_rows(), indent=2) + "\n"

    def aggregate_json(self) -> str:
        return json.dumps(self.aggregate_rows(), indent=2) + "\n"


def _to_csv(header, rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in (row[k] for k in header)])
    return buffer.getvalue()
