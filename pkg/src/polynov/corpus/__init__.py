"""Bundled example complexes used by the demo and the test suite.

Each entry is a JSON document in this package directory, in either input
mode understood by `polynov.complexes.ingest` (explicit boundaries or a
group presentation with a deck map).
"""

import json
from importlib import resources

from .. import complexes
from ..errors import InputError

__all__ = ["names", "document", "load"]


def _files():
    return resources.files(__package__)


def names() -> tuple:
    """Sorted names of the bundled complexes."""
    found = []
    for entry in _files().iterdir():
        if entry.name.endswith(".json"):
            found.append(entry.name[: -len(".json")])
    return tuple(sorted(found))


def document(name: str) -> dict:
    """The raw JSON document for one bundled complex."""
    if name not in names():
        raise InputError(
            f"unknown example {name!r}; available: {', '.join(names())}"
        )
    text = _files().joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def load(name: str) -> complexes.EquivariantComplex:
    """Build one bundled complex by name."""
    return complexes.ingest(document(name))
