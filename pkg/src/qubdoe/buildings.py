"""Access to the example building documents shipped with the package."""
from __future__ import annotations

from importlib import resources

from .network import ThermalCircuit, parse_building

__all__ = ["bungalow_json", "house_json", "load_bungalow", "load_house"]


def _read(name: str) -> str:
    return (resources.files(__package__) / "data" / name).read_text(encoding="utf-8")


def bungalow_json() -> str:
    """Document of the single-zone lightweight bungalow test box."""
    return _read("bungalow.json")


def house_json() -> str:
    """Document of the two-storey, two-zone house with a ground boundary."""
    return _read("house.json")


def load_bungalow() -> ThermalCircuit:
    return parse_building(bungalow_json())


def load_house() -> ThermalCircuit:
    return parse_building(house_json())
