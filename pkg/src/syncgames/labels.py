"""JSON codec for game/strategy labels: tuples round-trip as lists, scalars pass through."""
from __future__ import annotations

from .errors import ValidationError


def label_to_json(label):
    if isinstance(label, tuple):
        return [label_to_json(part) for part in label]
    if isinstance(label, (int, str)):
        return label
    raise ValidationError(f"label {label!r} is not JSON-serializable (int, str or tuple expected)")


def label_from_json(data):
    if isinstance(data, list):
        return tuple(label_from_json(part) for part in data)
    if isinstance(data, bool) or not isinstance(data, (int, str)):
        raise ValidationError(f"malformed label {data!r}")
    return data
