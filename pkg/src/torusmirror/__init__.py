"""Exact-arithmetic tools for affine Lagrangian products on tori and their
theta-series mirrors, with supporting A-infinity, transfer, Morse, and
Legendre-duality machinery."""

from .novikov import NovikovElem

__all__ = ["NovikovElem"]
__version__ = "0.1.0"
