"""Counter-based random streams: results depend only on (seed, stream), never on call order elsewhere."""
import numpy as np


def philox(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), int(stream)]))
