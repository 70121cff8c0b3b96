"""Classical plane curves with known genus and singularity data."""

import json
from importlib import resources


def load_corpus(name: str = "curves.json") -> list[dict]:
    text = resources.files(__name__).joinpath(name).read_text(encoding="utf-8")
    return json.loads(text)["curves"]


def corpus_point(entry) -> tuple[complex, ...]:
    """Homogeneous point from JSON, where a coordinate is a number or [re, im]."""
    return tuple(complex(*c) if isinstance(c, list) else complex(c) for c in entry)


def normalise_point(pt) -> tuple[complex, ...]:
    pt = [complex(z) for z in pt]
    lead = next(z for z in pt if abs(z) > 1e-12)
    return tuple(z / lead for z in pt)
