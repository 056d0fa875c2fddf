import os
import tempfile
import zlib
from pathlib import Path
from typing import Union

import numpy as np


def stable_tag(tag: Union[str, int]) -> int:
    """Map a purpose tag to a non-negative int that is stable across processes."""
    if isinstance(tag, int):
        if tag < 0:
            raise ValueError(f"integer tags must be non-negative, got {tag}")
        return tag
    return zlib.crc32(tag.encode('utf-8'))


def substream(seed: int, *tags: Union[str, int]) -> np.random.Generator:
    """
    Independent generator for (master seed, purpose tags).

    Streams with different tag tuples are statistically independent, and the
    same (seed, tags) always reproduces the same draws.
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(stable_tag(t) for t in tags))
    return np.random.Generator(np.random.PCG64(sequence))


def atomic_write_text(path: Path, content: str) -> None:
    """Write ``content`` to ``path`` via a temp file in the same directory and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            f.write(content)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
