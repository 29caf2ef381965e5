import pytest

from nomaspc import (
    Diversity,
    PacketSpec,
    PowerSplit,
    ReliabilityTargets,
    SelectionMethod,
    SystemConfig,
)

ALL_COMBOS = [(m, d) for m in SelectionMethod for d in Diversity]


@pytest.fixture(scope="session")
def baseline_cfg():
    """Two BS antennas, two antennas per user, one user per cluster,
    Nakagami shape 2, 5 m links, 20 dB."""
    return SystemConfig()


@pytest.fixture(scope="session")
def opt_cfg():
    """Blocklength-study layout: same antennas, two users per cluster."""
    return SystemConfig(users_h=2, users_l=2)


@pytest.fixture(scope="session")
def split():
    return PowerSplit.from_alpha_l(0.3)


@pytest.fixture(scope="session")
def pkt():
    return PacketSpec(80, 100.0)


@pytest.fixture(scope="session")
def targets():
    return ReliabilityTargets()
