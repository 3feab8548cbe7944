"""Small shared helpers."""
from __future__ import annotations

import hashlib

import numpy as np


def as_rng(seed) -> np.random.Generator:
    """Coerce an int seed, None, or an existing Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
