"""Run configuration shared by criteria, oracles, corpus and CLI."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Literal

# Keys accepted by ``--tol KEY=VAL`` and :meth:`RunConfig.with_overrides`.
TOLERANCE_KEYS = (
    "tail_mass",
    "zero_tol",
    "eq_tol",
    "st_tol",
    "exact_tol",
    "hr_slack",
    "lr_slack",
    "hazard_floor",
    "curv_tol",
    "touch_tol",
    "tail_tol",
    "limit_rtol",
    "mean_tol",
)


@dataclass(frozen=True)
class RunConfig:
    """Grid size and every numeric tolerance used in one run.

    Attributes:
        grid_n: points on a real-support evaluation grid (breakpoints are added on top).
        tail_mass: survival level at which infinite supports are truncated.
        zero_tol: |phi| at or below this is a zero letter in a sign word.
        eq_tol: half-width of the undecidable band around l = 1 and around zero slopes.
        st_tol: allowed positive excess of survival(P) over survival(Q) on grids.
        exact_tol: same, for finite discrete supports (floating round-off only).
        hr_slack: allowed increase of the survival ratio between grid points.
        lr_slack: allowed relative increase of the likelihood ratio.
        hazard_floor: survivals at or below this are treated as zero.
        curv_tol: allowed positive second (divided) difference of log l.
        touch_tol: interpolated |phi| minimum below which a touch of level 1 is reported.
        tail_tol: allowed positive conditional tail mean in the tail-mean lemma.
        limit_rtol: relative agreement needed between successive limit estimates.
        mean_tol: allowed |E phi| for the tail-mean lemma.
    """

    grid_n: int = 2001
    tail_mass: float = 1e-12
    zero_tol: float = 1e-9
    eq_tol: float = 1e-9
    st_tol: float = 1e-8
    exact_tol: float = 1e-12
    hr_slack: float = 1e-8
    lr_slack: float = 1e-9
    hazard_floor: float = 1e-12
    curv_tol: float = 1e-8
    touch_tol: float = 1e-8
    tail_tol: float = 1e-9
    limit_rtol: float = 1e-6
    mean_tol: float = 1e-8
    output_format: Literal["json", "csv"] = "json"
    seed: int = 0

    def __post_init__(self):
        if self.grid_n < 16:
            raise ValueError("grid_n must be at least 16")
        for key in TOLERANCE_KEYS:
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be positive")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def with_overrides(self, **changes) -> RunConfig:
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ValueError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **changes)


DEFAULT_CONFIG = RunConfig()
