"""Photon-pair generation in silicon microring and coupled-resonator devices."""

from __future__ import annotations

from .model import CouplingProfile, DeviceSpec, RateSet, RingGeometry, WaveguideParams, derive_rates

__all__ = ["CouplingProfile", "DeviceSpec", "RateSet", "RingGeometry", "WaveguideParams", "derive_rates"]
