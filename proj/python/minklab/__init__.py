"""Parallel volumes, pluriphase data and Minkowski measurability of self-similar sets."""

import json

from ._core import (
    CapacityError,
    ConditionFailure,
    ConsistencyError,
    DegenerateRegionError,
    MinklabError,
    ValidationError,
    corpus_names,
    p,
    parallel_volume,
    render_svg,
    set_thread_limit,
    similarity_dimension,
)
from . import _core

__all__ = [
    "CapacityError",
    "ConditionFailure",
    "ConsistencyError",
    "DegenerateRegionError",
    "MinklabError",
    "ValidationError",
    "corpus_names",
    "decide",
    "fit",
    "p",
    "parallel_volume",
    "render_svg",
    "scene",
    "set_thread_limit",
    "similarity_dimension",
]


def scene(source):
    """Normalized scene document for a built-in name, JSON text or path."""
    return json.loads(_core.scene_json(source))


def decide(source, n=200_000, seed=None):
    """Measurability verdict as a dict (minklab.verdict/1)."""
    if seed is None:
        return json.loads(_core.decide(source, n))
    return json.loads(_core.decide(source, n, seed))


def fit(eps, values, sigma, d, D, g):
    """Pluriphase fit of a Γ-restricted curve as a scene "pluriphase" block."""
    return json.loads(_core.fit(list(eps), list(values), list(sigma), d, D, g))
