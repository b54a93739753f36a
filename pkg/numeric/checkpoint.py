"""
Parameter checkpoint file
Layout: 8-byte little-endian manifest length, UTF-8 JSON manifest, then each
parameter's values as little-endian float64 in manifest order.
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Union

import numpy as np

from numeric.optim import Parameter
from utils.errors import CheckpointMismatchError

logger = logging.getLogger(__name__)

MAGIC = "taas-checkpoint"
FORMAT_VERSION = 1
_LENGTH = struct.Struct("<Q")


@dataclass
class Checkpoint:
    """Loaded checkpoint contents"""
    seed: int
    arrays: Dict[str, np.ndarray]
    step_counts: Dict[str, int] = field(default_factory=dict)

    def names(self) -> List[str]:
        return list(self.arrays)


def save_checkpoint(path: Union[str, Path], parameters: Mapping[str, Parameter], seed: int) -> Path:
    """Write parameters in manifest order; output is a pure function of the values"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": MAGIC,
        "version": FORMAT_VERSION,
        "seed": int(seed),
        "parameters": [
            {"name": name, "rows": int(p.shape[0]), "cols": int(p.shape[1]), "step_count": int(p.step_count)}
            for name, p in parameters.items()
        ],
    }
    header = json.dumps(manifest, sort_keys=True).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(_LENGTH.pack(len(header)))
        fh.write(header)
        for p in parameters.values():
            fh.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())
    logger.debug("wrote %d parameters to %s", len(parameters), path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _LENGTH.size:
        raise CheckpointMismatchError([f"{path} is too short to be a checkpoint"])
    (header_len,) = _LENGTH.unpack_from(raw, 0)
    offset = _LENGTH.size
    try:
        manifest = json.loads(raw[offset: offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointMismatchError([f"{path}: unreadable manifest ({e})"])
    if manifest.get("format") != MAGIC:
        raise CheckpointMismatchError([f"{path}: not a checkpoint file"])
    offset += header_len

    arrays: Dict[str, np.ndarray] = {}
    steps: Dict[str, int] = {}
    for entry in manifest["parameters"]:
        rows, cols = entry["rows"], entry["cols"]
        nbytes = rows * cols * 8
        if offset + nbytes > len(raw):
            raise CheckpointMismatchError([f"{path}: payload for '{entry['name']}' is truncated"])
        arrays[entry["name"]] = np.frombuffer(raw, dtype="<f8", count=rows * cols, offset=offset) \
            .reshape(rows, cols).astype(np.float64)
        steps[entry["name"]] = entry.get("step_count", 0)
        offset += nbytes
    return Checkpoint(seed=manifest["seed"], arrays=arrays, step_counts=steps)


def restore_parameters(parameters: Mapping[str, Parameter], checkpoint: Checkpoint) -> None:
    """
    Copy checkpoint values into live parameters

    Raises:
        CheckpointMismatchError: names or shapes differ
    """
    problems = []
    for name in parameters.keys() - checkpoint.arrays.keys():
        problems.append(f"missing parameter '{name}'")
    for name in checkpoint.arrays.keys() - parameters.keys():
        problems.append(f"unexpected parameter '{name}'")
    for name in parameters.keys() & checkpoint.arrays.keys():
        if parameters[name].shape != checkpoint.arrays[name].shape:
            problems.append(
                f"'{name}': model {parameters[name].shape} vs checkpoint {checkpoint.arrays[name].shape}"
            )
    if problems:
        raise CheckpointMismatchError(sorted(problems))

    for name, p in parameters.items():
        p.data[...] = checkpoint.arrays[name]
        p.step_count = checkpoint.step_counts.get(name, 0)
