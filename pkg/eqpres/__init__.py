"""Γ-equivariant group presentations: realization, deweakification and H₂."""

from .models import EQPRES_VERSION

__version__ = EQPRES_VERSION
