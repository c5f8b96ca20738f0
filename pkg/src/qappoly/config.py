"""Caps configuration: simple key=value files, explicit acknowledgment to raise."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import QappolyError
from .graphs import DEFAULT_CLIQUE_CAP
from .perms import DEFAULT_ENUMERATION_CAP


@dataclass
class Caps:
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    clique_cap: int = DEFAULT_CLIQUE_CAP


def parse_config(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise QappolyError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def caps_from_config(values: dict[str, str], acknowledge: bool = False) -> Caps:
    """Apply cap overrides; raising a cap beyond its default demands the
    explicit acknowledgment flag."""
    caps = Caps()
    known = {"enumeration_cap", "clique_cap"}
    for key, value in values.items():
        if key not in known:
            raise QappolyError(f"unknown config key {key!r}")
        try:
            number = int(value)
        except ValueError:
            raise QappolyError(f"config key {key} needs an integer, got {value!r}")
        default = getattr(Caps(), key)
        if number > default and not acknowledge:
            raise QappolyError(
                f"raising {key} to {number} (default {default}) requires "
                f"--acknowledge-caps")
        setattr(caps, key, number)
    return caps
