import os
import random
import zlib

import pytest

DEFAULT_SEED = 20250817


def _resolve_seed(config) -> int:
    opt = config.getoption("--seed")
    if opt is not None:
        return opt
    return int(os.environ.get("SHEAFMEALY_SEED", str(DEFAULT_SEED)))


def pytest_addoption(parser):
    parser.addoption(
        "--seed",
        type=int,
        default=None,
        help="seed for the randomized property suites "
        "(default: SHEAFMEALY_SEED or 20250817)",
    )


def pytest_report_header(config):
    return f"property seed: {_resolve_seed(config)}"


@pytest.fixture(scope="session")
def seed(request) -> int:
    return _resolve_seed(request.config)


@pytest.fixture
def rng(seed, request) -> random.Random:
    # Independent stream per test so suites do not perturb each other.
    offset = zlib.crc32(request.node.nodeid.encode())
    return random.Random(seed + offset)
