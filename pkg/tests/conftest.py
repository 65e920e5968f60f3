import numpy as np
import pytest

from leoirs.arrays import tilt_feasibility
from leoirs.channel import LinkGeometry, SystemParams
from leoirs.geo import DirectionAngles
from leoirs.sim import Scene, SimulationConfig


def random_angles(rng, az_range=(-np.pi, np.pi), el_range=(-0.5 * np.pi, 0.5 * np.pi)):
    return DirectionAngles(float(rng.uniform(*az_range)), float(rng.uniform(*el_range)))


def random_geometry(rng, direct=False) -> LinkGeometry:
    """A snapshot with the satellite and GU both in front of the IRS.

    The satellite arrives from the upper half of the IRS plane
    (``0 < az < pi``) and the GU sits in the lower half, which keeps the
    tilt interval non-empty.
    """
    front = (0.05, 0.5 * np.pi - 0.05)
    return LinkGeometry(
        sat_to_irs=random_angles(rng, el_range=front),
        irs_from_sat=random_angles(rng, (0.05, np.pi - 0.05), front),
        irs_to_gu=random_angles(rng, (-np.pi + 0.05, -0.05), front),
        gu_from_irs=random_angles(rng, el_range=front),
        sat_to_gu=random_angles(rng, el_range=front),
        gu_from_sat=random_angles(rng, el_range=front),
        d_si=float(rng.uniform(7e5, 2e6)),
        d_ig=float(rng.uniform(100.0, 1500.0)),
        d_sg=float(rng.uniform(7e5, 2e6)),
        direct=direct,
    )


def physical_geometries(rng, count, scenario="II"):
    """Snapshots of satellites scattered over the sky of the default scene.

    Only snapshots with a feasible tilt (and, for ``"II"``, a live direct
    link) are kept.
    """
    scene = Scene(SimulationConfig())
    out = []
    while len(out) < count:
        sat = scene.satellite_frame((rng.uniform(40.0, 65.0), rng.uniform(-20.0, 20.0)))
        geom = scene.geometry(sat, scenario=scenario)
        if tilt_feasibility(geom.irs_from_sat, geom.irs_to_gu).is_empty:
            continue
        if scenario == "II" and min(geom.sat_to_gu.elevation, geom.gu_from_sat.elevation) <= 0:
            continue
        out.append(geom)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def system():
    return SystemParams()


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def acceptance(request):
    """Record one criterion's verdict; the lines are printed after the run."""
    lines = request.config.stash[ACCEPTANCE_LINES]

    def report(label, ok, detail=""):
        # ok=None marks a reported, non-binding figure
        status = "INFO" if ok is None else "PASS" if ok else "FAIL"
        lines.append(f"{status}  {label}" + (f"  ({detail})" if detail else ""))
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
