import numpy as np
import pytest

from msrank import (
    Segment,
    brute_force_opt,
    ptas_solve,
    validate_instance,
)


def make_e1():
    """Single-segment, three-product instance used across the suite."""
    return validate_instance(
        weights=(2.0, 1.0, 0.5),
        segments=(Segment(theta=1.0, prices=(3.0, 1.5, 0.0)),),
    )


@pytest.fixture
def e1():
    return make_e1()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Compile the jitted kernels once so per-test timing budgets measure
    # steady-state work, not compilation.
    inst = make_e1()
    brute_force_opt(inst)
    ptas_solve(inst, eps=0.5, mode="count")
    ptas_solve(inst, eps=0.5, mode="grid", budget=10 ** 5)


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))
