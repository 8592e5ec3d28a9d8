import pytest

from lamvar import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile jitted kernels once so timed tests measure steady-state runtime
    kernels.warm_up()
