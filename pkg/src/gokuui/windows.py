"""Multiple-shooting partition of a sequence into overlapping windows."""
from dataclasses import dataclass

from .errors import InvalidPlanError


@dataclass(frozen=True)
class WindowPlan:
    seq_len: int
    window_len: int

    @property
    def overlap(self):
        return 1

    @property
    def n_windows(self):
        return 1 + (self.seq_len - self.window_len) // (self.window_len - 1)

    @property
    def windows(self):
        """``(start, stop)`` index pairs; consecutive windows share one point."""
        step = self.window_len - 1
        return [(k * step, k * step + self.window_len) for k in range(self.n_windows)]

    @property
    def junction_index_pairs(self):
        """Latent time indices ``(end of window k, start of window k+1)``; they coincide."""
        return [(e - 1, s) for (_, e), (s, _) in zip(self.windows[:-1], self.windows[1:])]

    @property
    def n_junctions(self):
        return self.n_windows - 1


def _nearest_valid(seq_len, window_len):
    step = window_len - 1
    below = window_len + ((seq_len - window_len) // step) * step
    return sorted({max(window_len, below), below + step})


def plan_windows(seq_len, window_len):
    """Partition ``seq_len`` points into windows of ``window_len`` overlapping by one point.

    >>> plan_windows(46, 10).n_windows
    5
    """
    seq_len, window_len = int(seq_len), int(window_len)
    if window_len < 2:
        raise InvalidPlanError(f"window_len must be >= 2, got {window_len}")
    if seq_len < window_len:
        raise InvalidPlanError(f"seq_len {seq_len} is shorter than window_len {window_len}")
    if (seq_len - window_len) % (window_len - 1):
        near = _nearest_valid(seq_len, window_len)
        raise InvalidPlanError(
            f"seq_len {seq_len} cannot be split into windows of {window_len} overlapping by one point; "
            f"nearest valid seq_len values: {near}"
        )
    return WindowPlan(seq_len, window_len)


def single_shooting(seq_len):
    return plan_windows(seq_len, seq_len)
