import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from qifcheck.corpus import gen_intro_examples, gen_login_corpus, gen_zw_example
from qifcheck.randprog import random_formula, random_program

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_program(seed: int, **kwargs):
    rng = random.Random(seed)
    params = dict(n_high=rng.randint(1, 3), n_low=rng.randint(0, 2), n_out=rng.randint(1, 2),
                  n_local=rng.randint(0, 1), n_stmts=rng.randint(1, 5))
    params.update(kwargs)
    return random_program(rng, **params)


def rng_formula(seed: int, n_vars: int, size: int = 8):
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(n_vars)]
    return random_formula(rng, names, size), names


@pytest.fixture(scope="session")
def intro():
    return gen_intro_examples()


@pytest.fixture(scope="session")
def zw():
    return gen_zw_example()


@pytest.fixture(scope="session")
def login4():
    return gen_login_corpus(4)


@pytest.fixture(scope="session")
def login8():
    return gen_login_corpus(8)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
