"""Exact cohomology of small categories, groups and diagrams of groups.

Submodules: ``exactlinalg`` (exact matrices, Smith form), ``chaincomplex``
(cochain and double complexes, spectral sequences), ``fincat`` (finite
categories), ``natsys`` (natural systems and Baues-Wirsching cohomology),
``groupcoh`` (finite groups, bar complex), ``diagramcoh`` (diagrams of groups
and the local-to-global spectral sequence), ``psiring`` (ψ-rings over finite
monoids) and ``cli``.
"""

from .exactlinalg import GF, QQ, ZZ, FgAbelianGroup, Matrix, ring_from_tag
from .fincat import FiniteCategory, validate_category
from .natsys import NaturalSystem, bw_cohomology, bw_complex
from .groupcoh import FiniteGroup, GModule, group_cohomology
from .diagramcoh import DiagramModule, GroupDiagram, diagram_cohomology, local_to_global

__version__ = "0.1.0"

__all__ = [
    "GF",
    "QQ",
    "ZZ",
    "FgAbelianGroup",
    "Matrix",
    "ring_from_tag",
    "FiniteCategory",
    "validate_category",
    "NaturalSystem",
    "bw_cohomology",
    "bw_complex",
    "FiniteGroup",
    "GModule",
    "group_cohomology",
    "DiagramModule",
    "GroupDiagram",
    "diagram_cohomology",
    "local_to_global",
]
