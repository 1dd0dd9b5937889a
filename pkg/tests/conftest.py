import os

import numpy as np
import pytest

from cwbal import _kernels_py

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")
HOUSING_SCHEMA = os.path.join(ROOT, "datasets", "housing.json")
HEART_SCHEMA = os.path.join(ROOT, "datasets", "heart.json")
HOUSING_CONFIG = os.path.join(ROOT, "configs", "housing-linear.json")
HEART_CONFIG = os.path.join(ROOT, "configs", "heart-logistic.json")

try:
    from cwbal import _kernels as _compiled
except ImportError:
    _compiled = None

KERNEL_MODULES = [pytest.param(_kernels_py, id="python")]
if _compiled is not None:
    KERNEL_MODULES.append(pytest.param(_compiled, id="compiled"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=KERNEL_MODULES)
def kernels(request):
    return request.param


@pytest.fixture(scope="session")
def heart():
    from cwbal import load_csv, load_schema
    schema = load_schema(HEART_SCHEMA)
    return load_csv(schema.path, schema)


@pytest.fixture(scope="session")
def housing():
    from cwbal import load_csv, load_schema
    schema = load_schema(HOUSING_SCHEMA)
    return load_csv(schema.path, schema)


# criterion id -> (passed, detail), filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
