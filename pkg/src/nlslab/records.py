"""Run summaries and sweep verdicts shared between the solver and the analysis layer."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np


def canonical_fingerprint(mapping: dict) -> str:
    """Short stable hash of a JSON-serializable mapping; changes iff a field changes."""
    blob = json.dumps(mapping, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class RunRecord:
    """Per-run summary of a blow-up measurement.

    T_eps is the measured lifespan (None when the run is invalid for
    bound-checking); `censored` marks runs that reached t_max without blowing
    up, so their T_eps is only a lower bound.  invariant_quantity is
    eps^(2 theta / d) * T_eps^(1 - theta) in the subcritical range and
    eps^(2/d) * log(T_eps) in the critical case theta = 1.
    """

    eps: float
    theta: float
    d: int
    lam: complex
    status: str
    T_eps: float | None = None
    censored: bool = False
    t_blow_pointwise: float | None = None
    t_blow_threshold: float | None = None
    invariant_quantity: float | None = None
    bound_value: float | None = None
    grid_fingerprint: str = ""
    config_fingerprint: str = ""
    max_remainder_scaled: float | None = None
    max_tail_fraction: float | None = None
    max_shell_fraction: float | None = None
    outside_hypotheses: bool = False
    diagnostics: object | None = None

    def q_value(self) -> float | None:
        """Recompute the invariant quantity from the stored scalars."""
        if self.T_eps is None:
            return None
        if self.theta < 1.0:
            return self.eps ** (2.0 * self.theta / self.d) * self.T_eps ** (1.0 - self.theta)
        return self.eps ** (2.0 / self.d) * float(np.log(self.T_eps))

    def usable_for_bound(self) -> bool:
        return self.T_eps is not None and not self.censored and self.status == "blown-up"


@dataclass
class SweepSummary:
    """Ladder-level verdict: running minimum of q_eps against the theoretical bound."""

    eps_ladder: list
    q_values: list          # one entry per rung, None for unusable runs
    running_min: list       # running min over usable rungs (None until one exists)
    bound_value: float
    tolerance: float
    verdict: str            # PASS / FAIL / INCONCLUSIVE
    d0_estimate: float | None = None
    statuses: list = field(default_factory=list)

    def gaps(self) -> list:
        """q_eps - bound_value per rung; the sweep reports the slack, asserts nothing about it."""
        return [None if q is None else q - self.bound_value for q in self.q_values]
