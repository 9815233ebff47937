"""Harmonic and biharmonic maps into symmetric spaces through the
Maurer-Cartan form of a lift."""
from .liealg import GroupElement, GroupKind, Quaternion, bracket, expm, norm, quat_embed
from .spaces import ComplexProjective, EuclideanType, QuaternionProjective, Sphere, make_space

__all__ = [
    "GroupElement",
    "GroupKind",
    "Quaternion",
    "bracket",
    "expm",
    "norm",
    "quat_embed",
    "ComplexProjective",
    "EuclideanType",
    "QuaternionProjective",
    "Sphere",
    "make_space",
]
__version__ = "0.1.0"
