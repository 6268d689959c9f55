"""
Run manifests.

Every file a command writes gets a sidecar <file>.manifest.json naming
the command, its arguments, the digests of the files it read, the seed,
the tool version and the wall-clock duration.
"""

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .. import __version__
from ..core.serialization import dump_document

MANIFEST_SUFFIX = ".manifest.json"


def file_digest(path: str | Path) -> str:
    """SHA-256 of a file's bytes, as hex."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


@dataclass
class RunManifest:
    """Provenance of one command run."""

    command: str
    arguments: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__
    duration_seconds: float = 0.0

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "arguments": list(self.arguments),
            "inputs": dict(sorted(self.inputs.items())),
            "seed": self.seed,
            "version": self.version,
            "duration_seconds": self.duration_seconds,
        }

    def write_for(self, output: str | Path) -> Path:
        """Write the manifest beside an output file."""
        path = manifest_path(output)
        dump_document(self.to_dict(), path)
        return path
