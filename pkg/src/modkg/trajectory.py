"""Time-indexed sequences of fields."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTrajectory, InvalidGrid
from .grid import Field, GridSpec


@dataclass(eq=False)
class Trajectory:
    """Frames ``u[m]`` (and optionally ``ut[m]``) at uniform times ``times[m]``.

    ``u`` and ``ut`` are arrays of shape ``(M + 1, *spec.shape)``.
    """

    spec: GridSpec
    times: np.ndarray
    u: np.ndarray = field(repr=False)
    ut: np.ndarray | None = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.u = np.asarray(self.u, dtype=complex)
        if self.u.ndim != self.spec.n + 1 or self.u.shape[0] == 0:
            raise EmptyTrajectory("trajectory needs at least one frame")
        if self.u.shape[1:] != self.spec.shape or self.times.shape != (self.u.shape[0],):
            raise InvalidGrid("frame shape or time count mismatch")
        if self.ut is not None:
            self.ut = np.asarray(self.ut, dtype=complex)
            if self.ut.shape != self.u.shape:
                raise InvalidGrid("u and ut frame counts differ")

    @classmethod
    def from_fields(cls, times, frames, ut_frames=None) -> "Trajectory":
        frames = list(frames)
        if not frames:
            raise EmptyTrajectory("no frames given")
        spec = frames[0].spec
        ut = None if ut_frames is None else np.array([f.values for f in ut_frames])
        return cls(spec, np.asarray(times), np.array([f.values for f in frames]), ut)

    @classmethod
    def stationary(cls, f: Field, times) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        return cls(f.spec, times, np.broadcast_to(f.values, (len(times),) + f.spec.shape).copy())

    def __len__(self) -> int:
        return self.u.shape[0]

    @property
    def horizon(self) -> float:
        return float(self.times[-1] - self.times[0])

    def frame(self, m: int) -> Field:
        return Field(self.spec, self.u[m])

    def ut_frame(self, m: int) -> Field:
        if self.ut is None:
            raise EmptyTrajectory("trajectory carries no time derivative")
        return Field(self.spec, self.ut[m])


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size == 1:
        return np.ones(1)
    dt = np.diff(times)
    w = np.zeros_like(times)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w
