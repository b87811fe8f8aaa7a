"""Class-2 p-group workbench: collection arithmetic, central automorphisms, Aut censuses."""

from .group import ConsistencyReport, Group, validate
from .presentation import PcPresentation, PresentationError, from_relations

__all__ = ["ConsistencyReport", "Group", "PcPresentation", "PresentationError", "from_relations", "validate"]
