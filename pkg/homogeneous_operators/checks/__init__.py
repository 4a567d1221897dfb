"""Verification checks, registered by id."""

from typing import Dict, Iterable, List, Type

from ..exceptions import ConfigurationError
from .algebraic import (
    CEquationCheck,
    ContractivityCheck,
    DefectIdentityCheck,
    GodIdentityCheck,
    IdentitiesCheck,
    PositivityCheck,
    SeriesCheck,
)
from .base import BaseCheck
from .dilation import CharacteristicOperatorCheck, DilationCheck, SigmaHatCheck
from .extremal import ExtremalProductCheck, FiltrationCheck, HBasisSpanCheck, JetCheck, KernelDimensionCheck
from .group import CocycleCheck, CompanionCheck, MultiplierCheck, ProjectiveLawCheck
from .product import CovarianceCheck, DualityCheck, EntrywiseCheck, MasterCheck

ALL_CHECKS = "all"

_ORDERED: List[Type[BaseCheck]] = [
    IdentitiesCheck,
    SeriesCheck,
    CocycleCheck,
    MultiplierCheck,
    GodIdentityCheck,
    PositivityCheck,
    DefectIdentityCheck,
    CEquationCheck,
    ContractivityCheck,
    ProjectiveLawCheck,
    CompanionCheck,
    MasterCheck,
    EntrywiseCheck,
    CovarianceCheck,
    DualityCheck,
    DilationCheck,
    CharacteristicOperatorCheck,
    SigmaHatCheck,
    HBasisSpanCheck,
    FiltrationCheck,
    KernelDimensionCheck,
    JetCheck,
    ExtremalProductCheck,
]

CHECK_REGISTRY: Dict[str, Type[BaseCheck]] = {cls.check_id: cls for cls in _ORDERED}
CHECK_IDS = tuple(CHECK_REGISTRY)


def resolve_check_ids(requested: Iterable[str]) -> List[str]:
    """
    Expand ``all``, drop duplicates and sort into registry order.

    Raises:
        ConfigurationError: If an id is not registered.
    """
    wanted = set()
    for check_id in requested:
        key = check_id.strip().lower()
        if key == ALL_CHECKS:
            wanted.update(CHECK_IDS)
        elif key in CHECK_REGISTRY:
            wanted.add(key)
        else:
            raise ConfigurationError(f"Unknown check id: {check_id}. Available: {', '.join(CHECK_IDS)}")
    return [check_id for check_id in CHECK_IDS if check_id in wanted]


def get_check(check_id: str) -> Type[BaseCheck]:
    """
    Raises:
        ConfigurationError: If the id is not registered.
    """
    try:
        return CHECK_REGISTRY[check_id]
    except KeyError:
        raise ConfigurationError(f"Unknown check id: {check_id}") from None


__all__ = [
    "ALL_CHECKS",
    "BaseCheck",
    "CHECK_IDS",
    "CHECK_REGISTRY",
    "get_check",
    "resolve_check_ids",
    *[cls.__name__ for cls in _ORDERED],
]
