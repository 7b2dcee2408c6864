"""Run provenance: named sub-seeds, input digests and manifest files."""
import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional

from emotion_core import __version__
from emotion_core.exceptions import ArtifactIOError
from emotion_core.logging_config import get_logger
from emotion_core.models.report import RunManifest

logger = get_logger("manifest")

SEED_NAMES = ("split", "init", "shuffle", "jitter", "random-baseline")
MANIFEST_FILENAME = "manifest.json"


def derive_seed(master_seed: int, name: str) -> int:
    """Derive a named 63-bit sub-seed from the master seed.

    Components seeded this way are reproducible independently of each other.
    """
    digest = hashlib.sha256(f"{master_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def fan_out_seeds(master_seed: int, names: Iterable[str] = SEED_NAMES) -> dict[str, int]:
    return {name: derive_seed(master_seed, name) for name in names}


def compute_file_digest(path: Path) -> str:
    """SHA-256 of a file's bytes."""
    sha = hashlib.sha256()
    try:
        with open(path, "rb") as handle:
            for block in iter(lambda: handle.read(1 << 20), b""):
                sha.update(block)
    except OSError as e:
        raise ArtifactIOError(f"Cannot read {path}: {e.strerror or e}") from e
    return sha.hexdigest()


def build_manifest(
    subcommand: str,
    flags: dict,
    master_seed: Optional[int],
    inputs: Iterable[Path],
    outputs: Iterable[Path],
) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        flags={k: _jsonable(v) for k, v in sorted(flags.items())},
        seeds={"master": master_seed, **fan_out_seeds(master_seed)} if master_seed is not None else {},
        input_digests={str(p): compute_file_digest(Path(p)) for p in inputs},
        tool_version=__version__,
        outputs=[str(p) for p in outputs],
    )


def write_manifest(manifest: RunManifest, out_dir: Path) -> Path:
    """Write ``manifest.json`` into the run's output directory."""
    path = Path(out_dir) / MANIFEST_FILENAME
    try:
        path.write_text(json.dumps(manifest.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write manifest {path}: {e.strerror or e}") from e
    logger.info(f"Manifest written: {path}")
    return path


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value"):  # Enum members
        return value.value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
