"""Built-in fields and the JSON field-definition format.

A field file looks like::

    {"name": "cbrt2", "degree": 3, "min_poly": [-2, 0, 0, 1]}

with an optional ``"mult_table"`` (n x n x n integer array) overriding the
power-basis table generated from ``min_poly``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ConfigInvalid
from .numfield import FieldContext, make_field

# Monic minimal polynomials, lowest degree first.  Each power basis is an
# integral basis of the full ring of integers.
FIXTURES = {
    "gaussian": dict(min_poly=[1, 0, 1], labels=("1", "i")),
    "zeta8": dict(min_poly=[1, 0, 0, 0, 1], labels=("1", "w", "w^2", "w^3")),
    "cbrt2": dict(min_poly=[-2, 0, 0, 1], labels=("1", "2^(1/3)", "2^(2/3)")),
    "sqrt2": dict(min_poly=[-2, 0, 1], labels=("1", "sqrt2")),
}

_cache: dict[str, FieldContext] = {}


def fixture(name: str) -> FieldContext:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture field {name!r}; known: {sorted(FIXTURES)}")
    if name not in _cache:
        entry = FIXTURES[name]
        _cache[name] = make_field(min_poly=entry["min_poly"], name=name, basis_labels=entry["labels"])
    return _cache[name]


def field_from_dict(data: dict) -> FieldContext:
    try:
        name = data.get("name", "")
        min_poly = data.get("min_poly")
        table = data.get("mult_table")
        ctx = make_field(mult_table=table, min_poly=min_poly, name=name)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid("field", str(exc)) from exc
    degree = data.get("degree")
    if degree is not None and int(degree) != ctx.degree:
        raise ConfigInvalid("field", f"declared degree {degree} but table has degree {ctx.degree}")
    return ctx


def load_field(source: str | Path) -> FieldContext:
    """Resolve a fixture name or a path to a JSON field file."""
    if isinstance(source, str) and source in FIXTURES:
        return fixture(source)
    path = Path(source)
    if not path.exists():
        raise ConfigInvalid("field", f"no fixture named {str(source)!r} and no file at {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("field", f"{path}: {exc}") from exc
    return field_from_dict(data)


def field_to_dict(ctx: FieldContext) -> dict:
    return {
        "name": ctx.name,
        "degree": ctx.degree,
        "min_poly": list(ctx.min_poly) if ctx.min_poly else None,
        "mult_table": ctx.mult_table.tolist(),
    }
