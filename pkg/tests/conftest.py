from pathlib import Path

import pytest

from hablab import Box, GrowthProfile, Landscape, build_grid

SCENARIOS = Path(__file__).parents[1] / "scenarios"


def interval_landscape(
    d: float = 1.0,
    b: tuple[tuple[float, float], ...] = ((-6.0, 6.0),),
    growth: float = 1.0,
    omega: tuple[float, float] = (-10.0, 10.0),
    c_values=(0.0,),
) -> Landscape:
    return Landscape(
        dim=1,
        omega=Box((omega[0],), (omega[1],)),
        b_region=tuple(Box((lo,), (hi,)) for lo, hi in b),
        diffusion=d,
        growth=GrowthProfile(default=growth),
        c_values=c_values,
    ).validate()


@pytest.fixture(scope="session")
def grid_fine():
    """2001 nodes (h = 0.01) on the centered-interval landscape."""
    return build_grid(interval_landscape(), 2001)


@pytest.fixture(scope="session")
def grid_mid():
    """1001 nodes (h = 0.02) on the centered-interval landscape."""
    return build_grid(interval_landscape(), 1001)


@pytest.fixture(scope="session")
def grid_coarse():
    """501 nodes (h = 0.04) for fast dynamics tests."""
    return build_grid(interval_landscape(), 501)
