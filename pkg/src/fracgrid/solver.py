"""Explicit fractional-order stepper for 2D reaction-diffusion.

Each step advances the field by

    u_next = u * (1 - beta * dt) + alpha * dt**gamma / dx**2 * S_k

where S_k is the weighted backward sum of stored stencil fields dictated by
the active memory schedule.  All strategies funnel through the same
summation code, so a truncated schedule that happens to visit every offset
reproduces the full-memory result bit for bit.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .coefficients import PsiTable, build_table
from .grid import (
    DEFAULT_HISTORY_BYTE_CAP,
    Grid2D,
    HistoryBuffer,
    stencil,
)
from .schedule import FullMemory, MemorySchedule, MemoryStrategy

log = logging.getLogger("fracgrid")

# Heuristic explicit-step stability bound on alpha * dt**gamma / dx**2.
STABILITY_LIMIT = 0.25


class DivergenceError(RuntimeError):
    """A step produced non-finite concentrations."""

    def __init__(self, step: int, peak: float):
        super().__init__(
            f"solution diverged at step {step}: max |u| reached {peak!r}"
        )
        self.step = step
        self.peak = peak


class StabilityWarning(UserWarning):
    """The explicit-step stability heuristic is exceeded; results may blow up."""


@dataclass(frozen=True)
class SimulationConfig:
    """Fully-resolved parameters of one run.

    Parameters
    ----------
    gamma : float
        Anomalous exponent in (0, 1]; 1 recovers classical diffusion.
    alpha : float
        Diffusion coefficient, >= 0.
    beta : float
        Linear reaction (decay) rate, >= 0.
    dt, dx : float
        Time step and grid spacing, > 0.
    nx, ny : int
        Grid extent including the pinned-zero boundary ring; >= 3 each.
    n_steps : int
        Number of steps to take, >= 0.
    sources : tuple of (j, l, value)
        Initial point concentrations in the grid interior.
    strategy : memory strategy
        Which history offsets each step visits (full / short / adaptive).
    snapshot_every : int or None
        Snapshot cadence in steps; None picks ~100 snapshots per run.
    history_byte_cap : int or None
        Ceiling on the stencil-history allocation; None disables the check.
    """

    gamma: float
    alpha: float
    beta: float
    dt: float
    dx: float
    nx: int
    ny: int
    n_steps: int
    sources: tuple[tuple[int, int, float], ...] = ()
    strategy: MemoryStrategy = field(default_factory=FullMemory)
    snapshot_every: int | None = None
    history_byte_cap: int | None = DEFAULT_HISTORY_BYTE_CAP

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        if not self.alpha >= 0.0 or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if not self.beta >= 0.0 or not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")
        if not self.dt > 0.0 or not math.isfinite(self.dt):
            raise ValueError(f"dt must be positive and finite, got {self.dt!r}")
        if not self.dx > 0.0 or not math.isfinite(self.dx):
            raise ValueError(f"dx must be positive and finite, got {self.dx!r}")
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid must be at least 3x3, got {self.nx}x{self.ny}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be >= 0, got {self.n_steps}")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError(
                f"snapshot_every must be >= 1, got {self.snapshot_every}"
            )
        seen: set[tuple[int, int]] = set()
        for j, l, value in self.sources:
            if not (1 <= j <= self.nx - 2 and 1 <= l <= self.ny - 2):
                raise ValueError(
                    f"source ({j}, {l}) is outside the interior of a "
                    f"{self.nx}x{self.ny} grid"
                )
            if not math.isfinite(value):
                raise ValueError(f"source ({j}, {l}) has non-finite value {value!r}")
            if (j, l) in seen:
                raise ValueError(f"duplicate source at ({j}, {l})")
            seen.add((j, l))
        if self.stability_ratio > STABILITY_LIMIT:
            warnings.warn(
                f"stability ratio alpha*dt**gamma/dx**2 = {self.stability_ratio:.4g} "
                f"exceeds {STABILITY_LIMIT}; the explicit step may diverge",
                StabilityWarning,
                stacklevel=2,
            )

    @property
    def stability_ratio(self) -> float:
        return self.alpha * self.dt**self.gamma / self.dx**2

    @property
    def snapshot_cadence(self) -> int:
        """Steps between snapshots (about 100 per run unless pinned)."""
        if self.snapshot_every is not None:
            return self.snapshot_every
        return max(1, math.ceil(self.n_steps / 100))

    def initial_grid(self) -> Grid2D:
        return Grid2D.from_sources(self.nx, self.ny, self.dx, self.sources)


@dataclass(frozen=True)
class SimulationResult:
    """Snapshots, final state and stepping-loop wall time of one run."""

    config: SimulationConfig
    snapshots: tuple[tuple[int, Grid2D], ...]
    final: Grid2D
    elapsed_seconds: float

    @property
    def n_steps(self) -> int:
        return self.config.n_steps


def history_sum(
    history: HistoryBuffer,
    schedule: MemorySchedule,
    table: PsiTable,
    k: int,
) -> np.ndarray:
    """Weighted backward sum  S_k = sum over (m, w) of  w * psi(m) * delta[k - m].

    ``history`` holds one stencil field per completed step, oldest first, so
    offset m maps to buffer entry k - m.  When the schedule is the contiguous
    block 0..M the sum reads a single slice of the buffer in place; sparse
    schedules gather their entries first.  Either way the weighted reduction
    itself is the same single-threaded contraction, keeping results
    independent of strategy wherever the visited offsets coincide.
    """
    k = int(k)
    if k < 0 or len(history) <= k:
        raise ValueError(
            f"step {k} needs {k + 1} history entries, buffer holds {len(history)}"
        )
    offsets = schedule.offsets
    oldest = int(offsets[-1])
    if oldest > k:
        raise ValueError(f"schedule reaches offset {oldest}, beyond step {k}")
    if oldest > table.capacity:
        raise ValueError(
            f"psi table covers offsets up to {table.capacity}, schedule needs {oldest}"
        )
    coeffs = schedule.weights * table.values[offsets]
    if int(offsets[0]) == 0 and oldest == len(schedule) - 1:
        # Contiguous offsets 0..M: buffer entries k-M..k in storage order
        # correspond to descending offset, so flip the coefficients.
        block = history.block(k - oldest, k)
        return np.einsum("t,txy->xy", coeffs[::-1], block)
    stack = history.gather(k - offsets)
    return np.einsum("t,txy->xy", coeffs, stack)


def step(
    u: np.ndarray,
    history: HistoryBuffer,
    k: int,
    config: SimulationConfig,
    table: PsiTable,
) -> np.ndarray:
    """Advance the field from step k to k+1 and record the new stencil field.

    Requires ``history`` to hold entries for steps 0..k already.  Returns the
    new field; raises :class:`DivergenceError` if it contains non-finite
    values (the bad field is not recorded).
    """
    schedule = config.strategy.schedule_at(k, config.dt)
    acc = history_sum(history, schedule, table, k)
    decay = 1.0 - config.beta * config.dt
    diffuse = config.alpha * config.dt**config.gamma / config.dx**2
    nxt = u * decay + diffuse * acc
    nxt[0, :] = 0.0
    nxt[-1, :] = 0.0
    nxt[:, 0] = 0.0
    nxt[:, -1] = 0.0
    if not np.isfinite(nxt).all():
        finite = nxt[np.isfinite(nxt)]
        peak = float(np.abs(finite).max()) if finite.size else math.inf
        raise DivergenceError(k + 1, peak)
    history.append(stencil(nxt))
    return nxt


def run(config: SimulationConfig, *, progress_every: int = 0) -> SimulationResult:
    """Run a complete simulation from the configured initial grid.

    Snapshots are taken at step 0, every ``snapshot_cadence`` steps, and at
    the final step.  ``progress_every`` > 0 logs a progress line every that
    many steps.  The reported wall time covers only the stepping loop.
    """
    table = build_table(config.gamma, config.n_steps)
    u = config.initial_grid().data.copy()
    history = HistoryBuffer(
        config.n_steps + 1,
        (config.nx, config.ny),
        byte_cap=config.history_byte_cap,
    )
    history.append(stencil(u))
    snapshots: list[tuple[int, Grid2D]] = [(0, Grid2D(u.copy(), config.dx))]
    cadence = config.snapshot_cadence

    start = time.perf_counter()
    for k in range(config.n_steps):
        u = step(u, history, k, config, table)
        done = k + 1
        if done % cadence == 0 or done == config.n_steps:
            if snapshots[-1][0] != done:
                snapshots.append((done, Grid2D(u.copy(), config.dx)))
        if progress_every > 0 and done % progress_every == 0:
            log.info("step %d/%d", done, config.n_steps)
    elapsed = time.perf_counter() - start

    final = snapshots[-1][1] if snapshots[-1][0] == config.n_steps else Grid2D(u, config.dx)
    return SimulationResult(
        config=config,
        snapshots=tuple(snapshots),
        final=final,
        elapsed_seconds=elapsed,
    )
