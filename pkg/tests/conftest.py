from pathlib import Path

import pytest

from phinder.detector import default_brand_directory, default_rule_config
from phinder.generator import bundled_corpus

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def brands():
    return default_brand_directory()


@pytest.fixture(scope="session")
def rules():
    return default_rule_config()


@pytest.fixture(scope="session")
def corpus():
    return bundled_corpus()


@pytest.fixture(scope="session")
def podesta_plain_text():
    return (DATA / "podesta_plain.txt").read_text("utf-8")


@pytest.fixture(scope="session")
def podesta_html_text():
    return (DATA / "podesta_html.txt").read_text("utf-8")
