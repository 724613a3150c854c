"""Toy-scale parser-free virtual try-on pipeline."""

import json

from ._plvton import (
    DimensionError,
    EmptyRegionError,
    Error,
    FormatError,
    InvariantError,
    IoError,
    ParameterError,
    StructureError,
    ValidationError,
    frechet_distance,
    make_fixture,
    prealign,
    pyramid_level_sizes,
    tv_loss,
    tv_loss_gradient,
    warp,
    weighted_cross_entropy,
)
from ._plvton import tryon as _tryon


def tryon(inputs, **config):
    """Runs the pipeline; keyword arguments override PipelineConfig fields."""
    person = inputs["person"]
    config.setdefault("height", int(person.shape[1]))
    config.setdefault("width", int(person.shape[2]))
    return _tryon(inputs, json.dumps(config))


__all__ = [name for name in dir() if not name.startswith("_")]
