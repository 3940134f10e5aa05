import numpy as np
import pytest

from qdkd.quantum import TwoQubitState


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_state(rng) -> TwoQubitState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoQubitState.from_amplitudes(*v)


class ScriptedRng:
    """Duck-typed generator replaying fixed draws, for branch-exact tests."""

    def __init__(self, integers=(), randoms=()):
        self._integers = list(integers)
        self._randoms = list(randoms)

    def integers(self, high):
        value = self._integers.pop(0)
        assert 0 <= value < high
        return value

    def random(self):
        return self._randoms.pop(0)
