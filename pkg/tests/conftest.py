import functools

import pytest

from finosc.heisenberg import heisenberg_system
from finosc.oscillator import nonsplit_system, oscillator_system, split_system

_BUILDERS = {
    "heisenberg": heisenberg_system,
    "split": split_system,
    "nonsplit": nonsplit_system,
    "oscillator": oscillator_system,
}


@functools.lru_cache(maxsize=None)
def _cached(kind: str, p: int):
    return _BUILDERS[kind](p)


@pytest.fixture(scope="session")
def built():
    """Shared system builder; construction is deterministic so caching is safe."""
    return _cached
