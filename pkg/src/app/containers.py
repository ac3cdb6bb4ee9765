"""Dependency injection container using dependency-injector library."""
from dependency_injector import containers, providers

from src.app.config import Settings
from src.app.core.services.clifford import TransitivityVerifier
from src.app.core.services.construction import TheoremVerifier
from src.app.core.services.families import FamilyService
from src.app.core.services.packing_analyzer import PackingAnalyzer
from src.app.core.services.stabilizer_chain import GroupOrderService


class Container(containers.DeclarativeContainer):
    """Main application dependency injection container."""

    # =========================================================================
    # CONFIGURATION - Singleton (loaded once, cached)
    # =========================================================================
    config = providers.Singleton(Settings)

    # =========================================================================
    # SINGLETONS - Stateless services (settings captured once)
    # =========================================================================
    packing_analyzer = providers.Singleton(
        PackingAnalyzer,
        settings=config.provided.sweep,
    )

    transitivity_verifier = providers.Singleton(
        TransitivityVerifier,
        settings=config.provided.orbit,
    )

    # =========================================================================
    # FACTORIES - Verification services
    # =========================================================================
    theorem_verifier = providers.Factory(
        TheoremVerifier,
        analyzer=packing_analyzer,
        transitivity=transitivity_verifier,
        settings=config.provided.sweep,
    )

    family_service = providers.Factory(
        FamilyService,
        analyzer=packing_analyzer,
        settings=config.provided.families,
        orbit_settings=config.provided.orbit,
    )

    group_order_service = providers.Factory(
        GroupOrderService,
        settings=config.provided.order,
    )
