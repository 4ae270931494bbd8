"""Dataset manifests: named sources, image lists, estimation/test split.

Manifest files are TOML:

    n_estimation = 512

    [[source]]
    label = "cycle_a"
    images = ["cycle_a/img_00000.png", "cycle_a/img_00001.png"]

    [[source]]
    label = "pro_b"
    dir = "pro_b"        # all files in the directory, sorted by name

Paths are relative to the manifest file. The split is the first
n_estimation images per source in manifest order (the manifest author
owns any randomization); the remainder is the test set.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import (
    DuplicateLabelError,
    ManifestError,
    MissingFileError,
    TooFewImagesError,
)

DEFAULT_N_ESTIMATION = 512


@dataclass
class ManifestSource:
    label: str
    image_paths: list[Path]

    def estimation_paths(self, n_estimation: int) -> list[Path]:
        return self.image_paths[:n_estimation]

    def test_paths(self, n_estimation: int) -> list[Path]:
        return self.image_paths[n_estimation:]


@dataclass
class DatasetManifest:
    sources: list[ManifestSource]
    n_estimation: int = DEFAULT_N_ESTIMATION

    def labels(self) -> list[str]:
        return [s.label for s in self.sources]


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"manifest not found: {path}")
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    if not isinstance(data.get("source"), list) or not data["source"]:
        raise ManifestError(f"{path}: no [[source]] tables")
    n_estimation = int(data.get("n_estimation", DEFAULT_N_ESTIMATION))
    if n_estimation < 1:
        raise ManifestError("n_estimation must be >= 1")
    base = path.parent
    sources = []
    seen = set()
    for entry in data["source"]:
        label = entry.get("label")
        if not label or not isinstance(label, str):
            raise ManifestError("every source needs a string label")
        if label in seen:
            raise DuplicateLabelError(f"duplicate source label {label!r}")
        seen.add(label)
        if "images" in entry:
            paths = [base / p for p in entry["images"]]
        elif "dir" in entry:
            d = base / entry["dir"]
            if not d.is_dir():
                raise MissingFileError(f"source directory not found: {d}")
            paths = sorted(p for p in d.iterdir() if p.is_file())
        else:
            raise ManifestError(f"source {label!r} needs 'images' or 'dir'")
        for p in paths:
            if not p.is_file():
                raise MissingFileError(f"source {label!r}: missing image {p}")
        if len(paths) < n_estimation + 1:
            raise TooFewImagesError(
                f"source {label!r} has {len(paths)} images; "
                f"needs at least n_estimation+1 = {n_estimation + 1}")
        sources.append(ManifestSource(label=label, image_paths=paths))
    return DatasetManifest(sources=sources, n_estimation=n_estimation)


def write_manifest(path, sources: list[tuple[str, list[str]]],
                   n_estimation: int) -> None:
    """Emit a manifest; `sources` pairs labels with relative path lists."""
    lines = [f"n_estimation = {n_estimation}", ""]
    for label, paths in sources:
        lines.append("[[source]]")
        lines.append(f'label = "{label}"')
        listing = ", ".join(f'"{p}"' for p in paths)
        lines.append(f"images = [{listing}]")
        lines.append("")
    Path(path).write_text("\n".join(lines))
