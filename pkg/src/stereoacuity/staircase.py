"""Adaptive threshold procedure over a disparity level table.

The run starts at the coarsest level and moves one level finer per
correct response. The first incorrect response re-presents the same
level; every further consecutive incorrect response moves one level
coarser. A correct response after the first failure ends the run at the
current level; a correct response at the finest level ends there (floor
rule); failing past the coarsest level ends outside device limits.
"""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional, Union

import numpy as np

from .errors import InvalidGeometry, SessionFinished
from .geometry import (
    DEFAULT_REFERENCE_M,
    DisparityLevel,
    DisplayProfile,
    LevelTable,
)
from .ol import OL, OutsideLimits
from .renderer import ORIENTATIONS, Orientation

# Chance performance on the four-alternative gap judgment.
GUESS_RATE = 0.25

# Nominal per-trial pacing used by simulations.
SIMULATED_TRIAL_MS = 2500

Outcome = Union[float, OutsideLimits]

DESCENDING = "descending"
POST_FAIL = "post_fail"


@dataclass
class TrialRecord:
    """One presentation and its response; response is absent when a
    simulated observer forces the outcome directly."""

    level_index: int
    pixel_shift: int
    arcsec: float
    presented_orientation: Orientation
    response_orientation: Optional[Orientation]
    correct: bool
    elapsed_ms: int = 0


class StaircaseSession:
    """Mutable state of one adaptive run."""

    def __init__(self, table: LevelTable, seed: int):
        if len(table.levels) == 0:
            raise InvalidGeometry("level table is empty")
        self.table = table
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        self.current_index = len(table.levels)
        self.phase = DESCENDING
        self.trials: list[TrialRecord] = []
        self.outcome: Optional[Outcome] = None
        self._pending = self._draw_orientation()

    def _draw_orientation(self) -> Orientation:
        return ORIENTATIONS[int(self._rng.integers(0, len(ORIENTATIONS)))]

    @property
    def finished(self) -> bool:
        return self.outcome is not None

    @property
    def current_level(self) -> DisparityLevel:
        return self.table.level(self.current_index)

    @property
    def pending_orientation(self) -> Optional[Orientation]:
        """Orientation of the trial awaiting a response; None once finished."""
        return None if self.finished else self._pending

    def respond(self, response: Orientation, elapsed_ms: int = 0) -> TrialRecord:
        """Score an observer's orientation response and advance the run."""
        correct = response == self._pending
        return self._apply(correct, response, elapsed_ms)

    def force(self, correct: bool, elapsed_ms: int = 0) -> TrialRecord:
        """Advance the run with a forced correctness (simulated observers)."""
        return self._apply(correct, None, elapsed_ms)

    def _apply(self, correct: bool, response: Optional[Orientation], elapsed_ms: int) -> TrialRecord:
        if self.finished:
            raise SessionFinished("session already has an outcome")
        level = self.current_level
        trial = TrialRecord(
            level_index=level.index,
            pixel_shift=level.pixel_shift,
            arcsec=level.arcsec,
            presented_orientation=self._pending,
            response_orientation=response,
            correct=correct,
            elapsed_ms=elapsed_ms,
        )
        self.trials.append(trial)

        if self.phase == DESCENDING:
            if correct:
                if self.current_index == 1:
                    self.outcome = level.arcsec
                else:
                    self.current_index -= 1
            else:
                self.phase = POST_FAIL
        else:
            if correct:
                self.outcome = level.arcsec
            else:
                if self.current_index == len(self.table.levels):
                    self.outcome = OL
                else:
                    self.current_index += 1

        if not self.finished:
            self._pending = self._draw_orientation()
        return trial


def new_session(table: LevelTable, seed: int) -> StaircaseSession:
    return StaircaseSession(table, seed)


def step(state: StaircaseSession, response: Orientation, elapsed_ms: int = 0) -> StaircaseSession:
    state.respond(response, elapsed_ms)
    return state


@dataclass(frozen=True)
class DeterministicObserver:
    """Answers correctly exactly when the trial disparity is resolvable."""

    threshold_arcsec: float
    seed: Optional[int] = None

    def correct_probability(self, arcsec: float) -> float:
        return 1.0 if arcsec >= self.threshold_arcsec else 0.0


@dataclass(frozen=True)
class PsychometricObserver:
    """Logistic observer on a four-alternative task with a guess floor."""

    threshold_arcsec: float
    slope_arcsec: float
    lapse_rate: float = 0.0
    seed: Optional[int] = None

    def correct_probability(self, arcsec: float) -> float:
        u = (arcsec - self.threshold_arcsec) / self.slope_arcsec
        if u >= 0:
            logistic = 1.0 / (1.0 + math.exp(-u))
        else:
            e = math.exp(u)
            logistic = e / (1.0 + e)
        return GUESS_RATE + (1.0 - GUESS_RATE - self.lapse_rate) * logistic


SimulatedObserver = Union[DeterministicObserver, PsychometricObserver]


@dataclass
class SessionRecord:
    """Persisted trial-by-trial log of one run."""

    session_id: str
    created_at: str
    distance_m: float
    reference_m: float
    seed: int
    level_table: LevelTable
    trials: list[TrialRecord]
    outcome: Optional[Outcome]
    profile: Optional[DisplayProfile] = None


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def make_record(
    session: StaircaseSession,
    profile: Optional[DisplayProfile] = None,
    reference_m: float = DEFAULT_REFERENCE_M,
    session_id: Optional[str] = None,
    created_at: Optional[str] = None,
) -> SessionRecord:
    return SessionRecord(
        session_id=session_id or str(uuid.uuid4()),
        created_at=created_at or utc_now_iso(),
        distance_m=session.table.distance_m,
        reference_m=reference_m,
        seed=session.seed,
        level_table=session.table,
        trials=list(session.trials),
        outcome=session.outcome,
        profile=profile,
    )


def simulate(
    observer: SimulatedObserver,
    table: LevelTable,
    seed: int,
    profile: Optional[DisplayProfile] = None,
) -> SessionRecord:
    """Run a simulated observer through a full session."""
    session = StaircaseSession(table, seed)
    observer_seed = observer.seed if observer.seed is not None else seed
    rng = np.random.default_rng([observer_seed, 0x0B5])
    while not session.finished:
        p = observer.correct_probability(session.current_level.arcsec)
        correct = bool(rng.random() < p)
        session.force(correct, elapsed_ms=SIMULATED_TRIAL_MS)
    return make_record(session, profile=profile)


def replay_outcome(table: LevelTable, trials: list[TrialRecord]) -> Optional[Outcome]:
    """Re-run the transition function over a trial log.

    Raises SessionFinished if the log continues past termination and
    InvalidGeometry if a logged level disagrees with the replayed state.
    """
    session = StaircaseSession(table, seed=0)
    for trial in trials:
        if trial.level_index != session.current_index:
            raise InvalidGeometry(
                f"trial at level {trial.level_index} but staircase was at "
                f"{session.current_index}"
            )
        session.force(trial.correct, trial.elapsed_ms)
    return session.outcome
