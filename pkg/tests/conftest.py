import pytest

import fcm
from fcm import harness
from fcm.assembly import assemble_system


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger jit compilation once so timed tests measure the method,
    not the compiler."""
    domain = fcm.make_disc_polygon((0.0, 0.0), 1.0, 64)
    grid, mesh, space, layer = harness.build_case(domain, 0.5, 0.3)
    assemble_system(space, domain, layer, fcm.MethodParams(),
                    harness.manufactured_problem(), cuts=mesh)


@pytest.fixture(scope="session")
def disc():
    return harness.disc_domain(harness.ExperimentConfig())
