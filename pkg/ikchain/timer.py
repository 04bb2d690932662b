import time


class Timer:
    """Wall-clock timer for solver stages.

    Works like a stopwatch: start, pause and resume as often as needed, and read
    ``time`` at any point. Also usable as a context manager around a stage.
    """

    def __init__(self, label=""):
        """Creates a new, stopped timer

        Args:
            label (str): Name of the timed stage, used in log messages
        """
        self.label = label

        # perf_counter stamp for each start/pause
        self._ticks = []

    def __repr__(self):
        return f"<Timer '{self.label}' {self.time:.3f}s>"

    def __enter__(self):
        self.restart()
        return self

    def __exit__(self, *exc):
        self.pause()
        return False

    @property
    def time(self) -> float:
        """Returns the elapsed running time in seconds, rounded to the nearest ms"""
        if self.stopped:
            return 0.0

        ticks = list(self._ticks)
        if not self.paused:
            ticks.append(time.perf_counter())

        # Starts sit at even positions, pauses at odd ones
        elapsed = sum(ticks[i + 1] - ticks[i] for i in range(0, len(ticks), 2))
        return round(elapsed, 3)

    @property
    def stopped(self) -> bool:
        """Returns whether the timer has been stopped (or never started)"""
        return len(self._ticks) == 0

    @property
    def paused(self) -> bool:
        """Returns whether the timer is paused. A stopped timer is not paused."""
        return not self.stopped and len(self._ticks) % 2 == 0

    def start(self) -> None:
        """Starts the timer or resumes it after a pause. No effect while running."""
        if self.stopped or self.paused:
            self._ticks.append(time.perf_counter())

    def pause(self) -> None:
        """Pauses the timer. No effect if stopped or already paused."""
        if not self.stopped and not self.paused:
            self._ticks.append(time.perf_counter())

    def stop(self) -> None:
        """Stops the timer and discards the elapsed time"""
        self._ticks.clear()

    def restart(self) -> None:
        """Discards the elapsed time and starts again"""
        self._ticks = [time.perf_counter()]
