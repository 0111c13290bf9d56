"""Constants for the quadtree-driven refiner."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .exceptions import ConfigError

SQRT2 = math.sqrt(2.0)

# Operational defaults.  The proven values (c_reach ~ 1.4e5, c_span = 21
# at beta = sqrt(2)) make every cell see essentially the whole input; the
# practical ones below keep the final sweep empty on the test corpus.
DEFAULT_REACH = 3.0
DEFAULT_SPAN = 4
MIN_REACH = 2.0 * SQRT2


@dataclass
class RefinementConstants:
    beta: float = SQRT2
    c_low: float = 0.5
    c_up: float = 6.0 * SQRT2
    c_shrink: float = 0.25
    c_reach: Optional[float] = None
    c_span: Optional[int] = None
    theoretical: bool = False
    validate: bool = True

    def __post_init__(self):
        if not self.beta >= 1.0 / 2.0 + 1e-12:
            raise ConfigError(f"beta must exceed 1/2, got {self.beta}")
        if not (0 < self.c_low and 2 * self.c_low <= self.c_up):
            raise ConfigError("need 0 < 2 c_low <= c_up")
        if not 0 < self.c_shrink <= 1:
            raise ConfigError("c_shrink must lie in (0, 1]")
        if self.c_reach is None:
            self.c_reach = self.c_reach_theory if self.theoretical else DEFAULT_REACH
        if self.c_span is None:
            self.c_span = self.c_span_theory if self.theoretical else DEFAULT_SPAN
        if self.c_span < 0:
            raise ConfigError("c_span must be non-negative")
        if self.validate and self.c_reach < MIN_REACH:
            raise ConfigError(f"c_reach={self.c_reach} is below 2*sqrt(2)")
        if self.c_reach <= 0:
            raise ConfigError("c_reach must be positive")

    @property
    def alpha(self) -> float:
        return math.asin(min(1.0, 1.0 / (2.0 * self.beta)))

    @property
    def c_gbu(self) -> float:
        return (2.0 * self.beta) ** (math.pi / self.alpha)

    @property
    def c_g(self) -> float:
        return (2.0 * self.beta) ** (math.pi / self.alpha + 1.0)

    @property
    def c_low_prime(self) -> float:
        return self.c_low * self.c_shrink

    @property
    def c_reach_theory(self) -> float:
        return 2.0 * self.c_up * self.c_gbu

    @property
    def c_span_theory(self) -> int:
        return int(math.ceil(math.log2(self.c_gbu * self.c_up / self.c_low_prime) + 1.0))

    def table(self) -> dict:
        return {
            "beta": self.beta, "alpha": self.alpha, "c_g": self.c_g,
            "c_gbu": self.c_gbu, "c_low": self.c_low, "c_up": self.c_up,
            "c_shrink": self.c_shrink, "c_low_prime": self.c_low_prime,
            "c_reach": self.c_reach, "c_span": self.c_span,
            "c_reach_theory": self.c_reach_theory, "c_span_theory": self.c_span_theory,
        }


def eta_bound(stage: int, consts: RefinementConstants, depth: int) -> float:
    """Lower bound on loose-pair length when stage ``stage`` starts.

    Stage 1 handles the deepest level ``depth``; stage i handles depth
    depth - i + 1, so the bound is c_low' times that level's cell size.
    """
    if not 1 <= stage <= depth + 1:
        raise ValueError(f"stage must lie in [1, {depth + 1}]")
    return consts.c_low_prime / 2.0 ** (depth - stage + 1)


def packing_bound(consts: RefinementConstants) -> float:
    """Bound on active points held by one cell.

    Active points in a cell of size s were stored in cells no smaller than
    s / 2**c_span and keep a nearest-neighbour distance of at least c_low'
    times that size, so their half-distance disks are disjoint.
    """
    ratio = 2.0 ** (consts.c_span + 1) / consts.c_low_prime
    return (ratio + 2.0) ** 2 / math.pi
