import importlib.resources

import pytest

from journeymap.ingestion import cleanse, load


def fixture_text() -> str:
    return (
        importlib.resources.files("journeymap")
        .joinpath("data/fixture_127.csv")
        .read_text(encoding="utf-8")
    )


@pytest.fixture(scope="session")
def fixture_csv() -> str:
    return fixture_text()


@pytest.fixture(scope="session")
def fixture_records(fixture_csv):
    return load(fixture_csv, format="csv")


@pytest.fixture(scope="session")
def fixture_dataset(fixture_records):
    dataset, _ = cleanse(fixture_records, provenance="fixture_127")
    return dataset


@pytest.fixture(scope="session")
def fixture_report(fixture_records):
    _, report = cleanse(fixture_records, provenance="fixture_127")
    return report
