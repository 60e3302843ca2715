"""Shared fixtures: the bundled 3x3 model and small helper builders."""

from __future__ import annotations

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """One visible pass/fail line per acceptance criterion."""
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        verdict = "PASS" if report.passed else "FAIL"
        capman = item.config.pluginmanager.getplugin("capturemanager")
        if capman:
            with capman.global_and_fixture_disabled():
                print(f"\nACCEPTANCE {item.name}: {verdict}")
        else:
            print(f"\nACCEPTANCE {item.name}: {verdict}")

from rubric_bn import (
    AxisEntry,
    ParameterSpec,
    Rubric,
    compile_network,
    fixture_path,
    load_params,
    load_rubric,
)


def make_rubric(n_rows: int, n_cols: int, rows_ordered: bool = True, name: str = "grid") -> Rubric:
    return Rubric(
        name=name,
        rows=tuple(AxisEntry(f"r{i}") for i in range(1, n_rows + 1)),
        columns=tuple(AxisEntry(f"c{j}") for j in range(1, n_cols + 1)),
        cells=tuple(
            tuple(f"behaviour {i}.{j}" for j in range(1, n_cols + 1))
            for i in range(1, n_rows + 1)
        ),
        rows_ordered=rows_ordered,
    )


@pytest.fixture(scope="session")
def cat_doc():
    return load_rubric(fixture_path("cat_rubric"))


@pytest.fixture(scope="session")
def model1_params():
    return load_params(fixture_path("model1"))


@pytest.fixture(scope="session")
def cat_network(cat_doc, model1_params):
    return compile_network(cat_doc.rubric, list(cat_doc.tasks), model1_params)


@pytest.fixture(scope="session")
def cat_network_dense(cat_doc, model1_params):
    return compile_network(
        cat_doc.rubric, list(cat_doc.tasks), model1_params, materialize_unit_arcs=True
    )


@pytest.fixture
def small_params():
    return ParameterSpec(default_prior=0.5, default_lambda=0.2, leak_guess=0.1)
