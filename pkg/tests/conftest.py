import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from salttex.attributes import got_map
from salttex.synth import disk_section, drifting_disk_volume


@pytest.fixture(scope="session")
def disk_fixture():
    """The 128x128 detection benchmark section with its true boundary."""
    return disk_section()


@pytest.fixture(scope="session")
def disk_got(disk_fixture):
    section, _ = disk_fixture
    return got_map(section)


@pytest.fixture(scope="session")
def tracking_volume():
    """5-section drifting-disk volume with per-section true boundaries."""
    return drifting_disk_volume()


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
