import pytest

import bakerlab as bl


def pytest_runtest_logreport(report):
    # acceptance tests print their own [ACCEPT] ... PASS lines; mirror FAIL
    if report.when == "call" and report.failed and "test_acceptance" in report.nodeid:
        print(f"\n[ACCEPT] {report.nodeid.split('::')[-1]}: FAIL")


@pytest.fixture(scope="session")
def model_i():
    return bl.build_map(bl.PoleCase.CASE_I, 0.1)


@pytest.fixture(scope="session")
def model_ii():
    return bl.build_map(bl.PoleCase.CASE_II, 0.1)


@pytest.fixture(scope="session")
def model_ii_plus():
    return bl.build_map(bl.PoleCase.CASE_II_PLUS, 0.1)


@pytest.fixture(scope="session")
def model_iii():
    return bl.build_map(bl.PoleCase.CASE_III, 0.1)


@pytest.fixture(scope="session")
def model_free():
    # pure translation fixture: zero coefficients, only meaningful in tests
    return bl.MapModel(case=bl.PoleCase.CASE_II, epsilon=0.1, delta=0.2,
                       coeff_amplitude=0.0, coeff_decay=0.25)
