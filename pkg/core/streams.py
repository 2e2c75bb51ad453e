# core/streams.py
"""
Reproducible uniform random streams.

RandomStream wraps numpy's Philox4x64 counter-based generator keyed by a
SeedSequence built from (seed, path). Sub-streams are addressed by appending
an index to the path, so stratum i of a run always draws from the same
independent sequence whatever order the strata are executed in. Philox output
is specified bit-for-bit, which keeps results identical across platforms.
"""
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import InvalidParameter

Shape = Union[int, Tuple[int, ...]]

SEED_LIMIT = 1 << 64


class RandomStream:
    def __init__(self, seed: int, path: Tuple[int, ...] = ()):
        if not 0 <= int(seed) < SEED_LIMIT:
            raise InvalidParameter(f"Seed must be a 64-bit unsigned integer, got {seed}.")
        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    def spawn(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + (index,))

    def uniform(self, size: Shape) -> np.ndarray:
        """Uniform draws in [0, 1); consecutive calls continue one sequence."""
        return self._generator.random(size)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path})"


class ReplayStream:
    """
    Replays recorded uniform draws in order. With `blocks`, sub-stream i
    replays block i, matching the stratum-per-sub-stream layout.
    """

    def __init__(self, draws: Sequence[float] = (), blocks: Optional[Sequence[Sequence[float]]] = None):
        self._draws: List[float] = [float(d) for d in draws]
        self._blocks = [list(b) for b in blocks] if blocks is not None else None
        self._position = 0
        self.seed: Optional[int] = None

    def spawn(self, index: int) -> "ReplayStream":
        if self._blocks is None:
            return self
        if not 0 <= index < len(self._blocks):
            raise InvalidParameter(f"No recorded block for sub-stream {index}.")
        return ReplayStream(self._blocks[index])

    def uniform(self, size: Shape) -> np.ndarray:
        count = int(np.prod(size))
        if self._position + count > len(self._draws):
            raise InvalidParameter(
                f"Replay needs {count} more draw(s) but only {len(self._draws) - self._position} remain.")
        values = self._draws[self._position:self._position + count]
        self._position += count
        return np.array(values, dtype=np.float64).reshape(size)
