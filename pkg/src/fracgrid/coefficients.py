"""History weights for the fractional-order time stepping.

The explicit scheme weighs each past stencil evaluation by a binomial-type
coefficient psi(gamma, m).  The weights obey a two-term recursion, which is
how we evaluate them: it is exact at gamma = 1 (every weight beyond m = 0
collapses to zero, recovering the classical single-step update) and loses
almost nothing to rounding for moderate m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAMMA_MIN = 0.0
GAMMA_MAX = 2.0


def _checked_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma) or not GAMMA_MIN < gamma < GAMMA_MAX:
        raise ValueError(
            f"gamma must lie in the open interval ({GAMMA_MIN}, {GAMMA_MAX}), got {gamma!r}"
        )
    return gamma


def psi(gamma: float, m: int) -> float:
    """Weight of the m-th history term for anomalous exponent ``gamma``.

    Defined by ``psi(gamma, 0) = 1`` and the recursion

        psi(gamma, m) = -psi(gamma, m - 1) * (2 - gamma - m) / m.

    Parameters
    ----------
    gamma : float
        Anomalous exponent, in (0, 2).
    m : int
        History offset, >= 0.
    """
    gamma = _checked_gamma(gamma)
    m = int(m)
    if m < 0:
        raise ValueError(f"history offset m must be >= 0, got {m}")
    value = 1.0
    for j in range(1, m + 1):
        value = -value * (2.0 - gamma - j) / j
    return value


@dataclass(frozen=True)
class PsiTable:
    """Precomputed weights psi(gamma, m) for every m from 0 to ``capacity``.

    ``values[m]`` holds psi(gamma, m).  The array is read-only; a solver run
    builds the table once up front and shares it across all steps.
    """

    gamma: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("psi table must be a non-empty 1D array")
        self.values.setflags(write=False)

    @property
    def capacity(self) -> int:
        """Largest history offset the table covers."""
        return self.values.size - 1


def build_table(gamma: float, n_steps: int) -> PsiTable:
    """Tabulate psi(gamma, m) for m = 0..n_steps via the recursion.

    The table is filled by one sequential pass so that ``values[m]`` is
    bitwise identical to what the scalar recursion produces.
    """
    gamma = _checked_gamma(gamma)
    n_steps = int(n_steps)
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    values = np.empty(n_steps + 1, dtype=np.float64)
    value = 1.0
    values[0] = value
    for m in range(1, n_steps + 1):
        value = -value * (2.0 - gamma - m) / m
        values[m] = value
    return PsiTable(gamma=gamma, values=values)


def partial_sum(table: PsiTable, m_max: int) -> float:
    """Sum of table weights from m = 0 through ``m_max`` inclusive."""
    m_max = int(m_max)
    if not 0 <= m_max <= table.capacity:
        raise ValueError(
            f"m_max must lie in [0, {table.capacity}], got {m_max}"
        )
    return float(np.sum(table.values[: m_max + 1]))
