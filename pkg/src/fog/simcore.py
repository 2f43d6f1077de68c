"""Deterministic discrete-event engine and seeded random-number streams.

All simulated timing in the package sits on top of this module: an integer
microsecond clock (floats would drift under event ordering), a binary heap
keyed by (fire_time, insertion sequence) so ties dispatch in schedule order,
and per-entity PCG64 streams split off a single root seed.
"""

from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .errors import DistributionParameterError, SimHandlerError, SimTimeOverflowError

MAX_TIME_US = 2**63 - 1

# Bounded worst case for truncated-normal sampling: resample this many times,
# then clamp to the lower bound.
TNORM_MAX_RESAMPLES = 64


@dataclass(frozen=True)
class Dist:
    """A sampling distribution: constant, uniform(a, b) or truncated normal.

    The truncated normal resamples up to TNORM_MAX_RESAMPLES times and then
    clamps to `low`, so the worst case is bounded and the bias is negligible
    whenever `low` sits a few sigma below the mean.
    """

    kind: str  # "const" | "uniform" | "tnorm"
    a: float = 0.0  # const value / uniform low / tnorm mean
    b: float = 0.0  # uniform high / tnorm std
    low: float = 0.0  # tnorm lower bound

    @classmethod
    def constant(cls, value: float) -> "Dist":
        return cls("const", float(value))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Dist":
        if lo > hi:
            raise DistributionParameterError(f"uniform: low {lo} > high {hi}")
        return cls("uniform", float(lo), float(hi))

    @classmethod
    def tnorm(cls, mean: float, std: float, low: float = 0.0) -> "Dist":
        if std < 0:
            raise DistributionParameterError(f"tnorm: std {std} < 0")
        return cls("tnorm", float(mean), float(std), float(low))

    def mean(self) -> float:
        """Nominal mean, ignoring truncation (bias negligible at shipped ratios)."""
        if self.kind == "const":
            return self.a
        if self.kind == "uniform":
            return (self.a + self.b) / 2.0
        return self.a

    def support_min(self) -> float:
        if self.kind == "const":
            return self.a
        if self.kind == "uniform":
            return self.a
        return self.low

    def draw(self, stream: "RngStream") -> float:
        if self.kind == "const":
            return self.a
        if self.kind == "uniform":
            return stream.generator.uniform(self.a, self.b)
        # tnorm
        if self.b == 0.0:
            return self.a if self.a >= self.low else self.low
        for _ in range(TNORM_MAX_RESAMPLES):
            x = stream.generator.normal(self.a, self.b)
            if x >= self.low:
                return x
        return self.low


def rng_draw(stream: "RngStream", dist: Dist) -> float:
    """Draw one value from `dist` using `stream`. Advances the stream."""
    return dist.draw(stream)


def stream_id_for(entity_id: str) -> int:
    """Stable 64-bit stream id derived from an entity id string."""
    digest = hashlib.sha256(entity_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class RngStream:
    """One independent PCG64 stream, keyed by (root_seed, stream_id).

    Identical keys replay the identical sequence; distinct stream ids are
    statistically independent (numpy SeedSequence splitting).
    """

    def __init__(self, root_seed: int, stream_id: int):
        self.root_seed = int(root_seed)
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(entropy=(self.root_seed & MAX_TIME_US, self.stream_id))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    @classmethod
    def for_entity(cls, root_seed: int, entity_id: str) -> "RngStream":
        return cls(root_seed, stream_id_for(entity_id))

    def __repr__(self) -> str:
        return f"RngStream(root_seed={self.root_seed}, stream_id={self.stream_id})"


@dataclass
class SimEvent:
    """A scheduled occurrence. `fire_time` and `sequence` order dispatch."""

    kind: str
    target: str = ""
    payload: Any = None
    callback: Optional[Callable[["Engine", "SimEvent"], None]] = None
    fire_time: int = 0  # microseconds, set by schedule()
    sequence: int = 0  # insertion counter, set by schedule()


@dataclass
class EventHandle:
    event: SimEvent
    cancelled: bool = field(default=False)

    def cancel(self) -> None:
        self.cancelled = True


class Engine:
    """Single-threaded discrete-event loop over an integer microsecond clock.

    Dispatch order is the total order (fire_time, sequence); the clock never
    decreases. Run one engine per thread; engines share nothing.
    """

    def __init__(self, root_seed: int = 0):
        self.root_seed = int(root_seed)
        self._now = 0
        self._sequence = 0
        self._heap: list[tuple[int, int, EventHandle]] = []
        self._finished = False
        self.dispatch_log: list[tuple[int, int, str, str]] = []
        self._streams: dict[str, RngStream] = {}

    def now(self) -> int:
        return self._now

    def stream(self, entity_id: str) -> RngStream:
        """Per-entity stream, created on first use and cached."""
        st = self._streams.get(entity_id)
        if st is None:
            st = RngStream.for_entity(self.root_seed, entity_id)
            self._streams[entity_id] = st
        return st

    def schedule(self, event: SimEvent, delay: int) -> EventHandle:
        if self._finished:
            raise RuntimeError("engine is finished; cannot schedule")
        delay = int(delay)
        if delay < 0:
            raise ValueError(f"delay must be >= 0, got {delay}")
        fire_time = self._now + delay
        if fire_time > MAX_TIME_US:
            raise SimTimeOverflowError(
                f"fire time {fire_time} exceeds 64-bit microsecond clock"
            )
        event.fire_time = fire_time
        event.sequence = self._sequence
        self._sequence += 1
        handle = EventHandle(event)
        heapq.heappush(self._heap, (fire_time, event.sequence, handle))
        return handle

    def run_until(self, t_end: int) -> int:
        """Dispatch every pending event with fire_time <= t_end.

        Returns the number of events dispatched; leaves the clock at t_end.
        """
        t_end = int(t_end)
        if t_end < self._now:
            raise ValueError(f"t_end {t_end} is before now() {self._now}")
        dispatched = 0
        while self._heap and self._heap[0][0] <= t_end:
            fire_time, seq, handle = heapq.heappop(self._heap)
            if handle.cancelled:
                continue
            self._now = fire_time
            ev = handle.event
            self.dispatch_log.append((fire_time, seq, ev.kind, ev.target))
            if ev.callback is not None:
                try:
                    ev.callback(self, ev)
                except Exception as exc:
                    raise SimHandlerError(ev, exc) from exc
            dispatched += 1
        self._now = t_end
        return dispatched

    def run_all(self, hard_limit: int = MAX_TIME_US) -> int:
        """Dispatch until the queue drains (or hard_limit). Clock stops at the
        last event time rather than advancing to the limit."""
        dispatched = 0
        while self._heap and self._heap[0][0] <= hard_limit:
            fire_time, seq, handle = heapq.heappop(self._heap)
            if handle.cancelled:
                continue
            self._now = fire_time
            ev = handle.event
            self.dispatch_log.append((fire_time, seq, ev.kind, ev.target))
            if ev.callback is not None:
                try:
                    ev.callback(self, ev)
                except Exception as exc:
                    raise SimHandlerError(ev, exc) from exc
            dispatched += 1
        return dispatched

    def finish(self) -> None:
        self._finished = True


def ms_to_us(ms: float) -> int:
    """Round a millisecond quantity to the integer microsecond clock."""
    if not math.isfinite(ms):
        raise ValueError(f"non-finite duration: {ms}")
    return int(round(ms * 1000.0))


def us_to_ms(us: int) -> float:
    return us / 1000.0
