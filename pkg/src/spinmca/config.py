"""Plain-text key/value parameter files.

Format, one assignment per line, SI units::

    # comment
    memristor.r_on = 5e3
    dw.r_high = 20e3
    im.k = 4

The part before the first dot names a section (``memristor``, ``dw``,
``schedule``, ``im``, ``write``, ``crossbar``); the rest must match a field name
of the corresponding parameter dataclass.
"""
import dataclasses
from pathlib import Path

from .errors import ArgumentError, ParseError

SECTIONS = ("memristor", "dw", "schedule", "im", "write", "crossbar")


def parse_config(text, source="<string>"):
    """Parse config text into ``{section: {key: float}}``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        section, dot, name = key.partition(".")
        if not dot or section not in SECTIONS or not name:
            raise ParseError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            out.setdefault(section, {})[name] = float(value)
        except ValueError:
            raise ParseError(f"{source}:{lineno}: {key} is not a number: {value!r}") from None
    return out


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))


def apply_overrides(obj, overrides):
    """Return a copy of dataclass ``obj`` with ``overrides`` applied.

    Integer fields are converted back to ``int``.
    """
    if not overrides:
        return obj
    fields = {f.name: f for f in dataclasses.fields(obj)}
    changes = {}
    for name, value in overrides.items():
        if name not in fields:
            raise ArgumentError(f"{type(obj).__name__} has no parameter {name!r}")
        current = getattr(obj, name)
        changes[name] = int(value) if isinstance(current, int) and not isinstance(current, bool) else value
    return dataclasses.replace(obj, **changes)
