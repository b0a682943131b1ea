"""Helper functions"""
import dataclasses
import random
from fractions import Fraction

from pydantic import BaseModel

from iwasawa_sha.services.padic import AtLeast, PadicNumber, PadicScalar


def serialize(obj):
    """Convert arithmetic values and models to JSON serializable form"""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json", by_alias=True)
    if isinstance(obj, (AtLeast, PadicScalar, PadicNumber, Fraction)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(key): serialize(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [serialize(item) for item in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name.rstrip("_"): serialize(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return str(obj)


def trial_rng(seed: int, trial: int) -> random.Random:
    """Independent stream per (seed, trial), stable across processes and scheduling"""
    rng = random.Random()
    rng.seed(f"{seed}:{trial}")
    return rng

