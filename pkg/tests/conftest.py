import numpy as np
import pytest
from hypothesis import settings

from lpc.cipher import KeyMaterial

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

ENC_HEX = "00112233445566778899aabbccddeeff00112233445566778899aabbccddeeff"
HIDE_HEX = "ffeeddccbbaa99887766554433221100ffeeddccbbaa99887766554433221100"


@pytest.fixture
def keys():
    return KeyMaterial.from_hex(ENC_HEX, HIDE_HEX)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def smooth_image(m, n, seed=0):
    """A deterministic smooth gradient-plus-blobs image."""
    r = np.random.default_rng(seed)
    y, x = np.mgrid[0:m, 0:n]
    base = 60 + 100 * (x / max(n - 1, 1)) + 40 * np.sin(y / 9.0)
    base += r.normal(0, 1.0, size=(m, n))
    return np.clip(base.round(), 0, 255).astype(np.uint8)


# Acceptance lines recorded by tests/test_acceptance.py, echoed at the end of the run.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
