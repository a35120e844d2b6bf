"""Synthesis and exceptional-point characterization of PT-symmetric
SUSY resonator arrays."""

__version__ = "0.1.0"

from .synthesis import ChainSpec, build_chain  # noqa: F401
