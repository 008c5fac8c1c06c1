from fractile.geom2d.domain import (
    AffineMap2,
    CellSet,
    Component,
    ConvexPoly,
    GeomTolerance,
    Point2,
)
from fractile.geom2d.enums import MapKind

__all__ = [
    "AffineMap2",
    "CellSet",
    "Component",
    "ConvexPoly",
    "GeomTolerance",
    "MapKind",
    "Point2",
]
