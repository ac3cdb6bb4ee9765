"""Shared test fixtures and utilities for all tests."""
import pytest
from dependency_injector import providers

from src.app.config import Settings, get_settings
from src.app.containers import Container
from src.app.core.domain.grassmann import set_consistency_checks


# =============================================================================
# Session-scoped container (settings loaded once, shared across all tests)
# =============================================================================


@pytest.fixture(scope="session")
def test_settings() -> Settings:
    """Settings with environment overrides ignored by the cache."""
    get_settings.cache_clear()
    settings = Settings()
    yield settings
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def test_container(test_settings):
    """Session-scoped container using the test settings."""
    container = Container()
    container.config.override(providers.Object(test_settings))

    yield container

    container.config.reset_override()


@pytest.fixture
def packing_analyzer(test_container):
    return test_container.packing_analyzer()


@pytest.fixture
def theorem_verifier(test_container):
    return test_container.theorem_verifier()


@pytest.fixture
def transitivity_verifier(test_container):
    return test_container.transitivity_verifier()


@pytest.fixture
def family_service(test_container):
    return test_container.family_service()


@pytest.fixture
def group_order_service(test_container):
    return test_container.group_order_service()


# =============================================================================
# Function-scoped fixtures
# =============================================================================


@pytest.fixture(autouse=True)
def consistency_checks():
    """Cross-check every exact distance against the Frobenius form during tests."""
    set_consistency_checks(True)
    yield
    set_consistency_checks(False)
