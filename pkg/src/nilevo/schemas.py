"""JSON schemas shipped with the package and validation on read."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

NAMES = ("algebra", "cocycle", "catalog", "report")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(f"no schema named {name!r}")
    text = resources.files("nilevo").joinpath("data").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(data, name: str) -> None:
    """Raise ``jsonschema.ValidationError`` if data does not match the schema."""
    jsonschema.validate(data, load_schema(name))
