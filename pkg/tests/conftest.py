import numpy as np
import pytest

from ganprint.denoise import DenoiserConfig, Residual
from ganprint.harness import save_image
from ganprint.manifest import write_manifest
from ganprint.synthgen import SynthSourceSpec, generate_dataset

DUMMY_HASH = "0" * 64

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_VERDICTS):
            terminalreporter.write_line(line)


def make_residual(planes, source_id="r", denoiser_hash=DUMMY_HASH):
    return Residual(planes=np.asarray(planes, dtype=np.float32),
                    source_id=source_id, denoiser_hash=denoiser_hash)


def write_corpus(root, specs, count, n_estimation):
    """Render synthetic sources to PNG files plus a manifest; returns
    (manifest path, {label: true fingerprint})."""
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    truths = {}
    for spec in specs:
        ds = generate_dataset(spec, count)
        truths[spec.label] = ds.true_fingerprint
        (root / spec.label).mkdir(exist_ok=True)
        rels = []
        for i, img in enumerate(ds.images):
            rel = f"{spec.label}/img_{i:05d}.png"
            save_image(root / rel, img)
            rels.append(rel)
        entries.append((spec.label, rels))
    manifest_path = root / "manifest.toml"
    write_manifest(manifest_path, entries, n_estimation)
    return manifest_path, truths


@pytest.fixture(scope="session")
def default_cfg():
    return DenoiserConfig()


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """3 tiny independent sources on disk: 20 images each at 64x64,
    split 12 estimation / 8 test."""
    root = tmp_path_factory.mktemp("small_corpus")
    specs = [
        SynthSourceSpec(label=f"src{i}", width=64, height=64, seed=300 + i)
        for i in range(3)
    ]
    return write_corpus(root, specs, count=20, n_estimation=12)
