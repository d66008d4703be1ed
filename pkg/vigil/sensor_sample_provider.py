import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

from vigil.constants import TIMESTAMP_EPSILON
from vigil.signal_synth import AccelTrace, Frame, PirTrace, PpgTrace, SensorBundle, read_bundle
from vigil.units import Seconds

_logger = logging.getLogger(__name__)


class NoMoreSamplesError(Exception):
    pass


@dataclass
class SensorSampleChunk:
    """Every sample of every stream with a timestamp in (start_time, end_time]."""

    start_time: Seconds
    end_time: Seconds
    frames: list[Frame]
    accel: AccelTrace
    ppg: PpgTrace
    pir: PirTrace


class SensorSampleProvider(ABC):
    @abstractmethod
    def get_samples_until(self, end_time: Seconds) -> SensorSampleChunk:
        ...

    @abstractmethod
    def seconds_since_start(self) -> Seconds:
        ...

    @abstractmethod
    def duration(self) -> Seconds:
        ...


class SensorSampleProviderBackedByBundle(SensorSampleProvider):
    def __init__(self, bundle: SensorBundle) -> None:
        self.bundle = bundle
        self._frame_times = [frame.timestamp for frame in bundle.frames]
        self._frame_cursor = 0
        # Samples at exactly t=0 belong to the first chunk
        self.cursor_time: Seconds = -1.0

    def seconds_since_start(self) -> Seconds:
        return max(0.0, self.cursor_time)

    def duration(self) -> Seconds:
        return self.bundle.duration

    def get_samples_until(self, end_time: Seconds) -> SensorSampleChunk:
        if end_time > self.duration() + TIMESTAMP_EPSILON:
            raise NoMoreSamplesError(f"Ran out of samples at {self.duration():.2f}s (asked for {end_time:.2f}s)")
        if end_time < self.cursor_time:
            raise ValueError(f"Cannot rewind the sample stream from {self.cursor_time}s to {end_time}s")

        start_time = self.cursor_time
        # Tolerate timestamps produced by accumulating float tick periods
        cutoff = end_time + TIMESTAMP_EPSILON
        frames = []
        while self._frame_cursor < len(self._frame_times) and self._frame_times[self._frame_cursor] <= cutoff:
            frames.append(self.bundle.frames[self._frame_cursor])
            self._frame_cursor += 1

        chunk = SensorSampleChunk(
            start_time=max(0.0, start_time),
            end_time=end_time,
            frames=frames,
            accel=self.bundle.accel.between(start_time, cutoff),
            ppg=self.bundle.ppg.between(start_time, cutoff),
            pir=self.bundle.pir.between(start_time, cutoff),
        )
        self.cursor_time = cutoff
        return chunk


class SensorSampleProviderBackedByDirectory(SensorSampleProviderBackedByBundle):
    def __init__(self, directory: Path) -> None:
        self.path = directory
        super().__init__(read_bundle(directory))
        _logger.info(f"Set up sensor sample stream backed by recording: {directory.as_posix()}")
