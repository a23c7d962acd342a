import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from torgap import (
    decaying_gap_family,
    uniform_gap_family,
)


@pytest.fixture(scope="session")
def good_family():
    return uniform_gap_family()


@pytest.fixture(scope="session")
def bad_family():
    return decaying_gap_family()
