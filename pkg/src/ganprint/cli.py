"""Command-line entry points.

Every subcommand is a thin wrapper over a library operation. On failure
the process exits nonzero after printing one machine-readable JSON line
on stderr: {"error": <exception class>, "message": <text>}.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .attribution import ScoreSet, corr_matrix_to_csv, corr_matrix_to_json, score_against
from .attribution import CorrMatrix
from .container import (
    read_fingerprint,
    read_residual,
    write_fingerprint,
    write_residual,
)
from .denoise import DenoiserConfig, extract_residual
from .errors import GanprintError
from .fingerprint import (
    EnergyCurve,
    INVERSE_N,
    PAPER_EXP,
    autocorrelation,
    energy_progression,
    estimate_fingerprint,
    fit_energy_curve,
)
from .harness import (
    default_threads,
    extract_residuals,
    load_image,
    run_identification,
    run_robustness,
    save_image,
    write_heatmap,
)
from .imageops import flatten, inner_product, zero_mean_unit_norm
from .manifest import load_manifest, write_manifest
from .synthgen import generate_dataset, spec_from_text


def _denoiser_from_args(args) -> DenoiserConfig:
    if args.denoiser_config:
        return DenoiserConfig.from_text(Path(args.denoiser_config).read_text())
    return DenoiserConfig()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--denoiser-config", default=None,
                   help="key=value config file for the denoiser")
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker processes for residual extraction")


def cmd_residual(args) -> int:
    cfg = _denoiser_from_args(args)
    res = extract_residual(load_image(args.image), cfg,
                           source_id=Path(args.image).name)
    write_residual(args.out, res, image_index=args.index)
    return 0


def cmd_estimate(args) -> int:
    residuals = []
    for p in args.residuals:
        res, _ = read_residual(p)
        residuals.append(res)
    fp = estimate_fingerprint(residuals, args.label)
    write_fingerprint(args.out, fp)
    return 0


def cmd_energy_curve(args) -> int:
    residuals = [read_residual(p)[0] for p in args.residuals]
    ns = [int(v) for v in args.ns.split(",") if v]
    curve = energy_progression(residuals, ns)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "energy_curve.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_residuals", "energy"])
        for n, e in curve.points:
            writer.writerow([n, repr(e)])
    fits = {}
    for model in (INVERSE_N, PAPER_EXP):
        fit = fit_energy_curve(curve, model)
        fits[model] = {"e_inf": fit.e_inf, "e0": fit.e0, "rss": fit.rss}
    (out / "energy_fit.json").write_text(json.dumps(fits, indent=2) + "\n")
    return 0


def cmd_autocorr(args) -> int:
    fp = read_fingerprint(args.fingerprint)
    m = autocorrelation(fp, args.max_lag)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "autocorr.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag_y\\lag_x"] + [str(x) for x in m.lags_x])
        for y, row in zip(m.lags_y, m.values):
            writer.writerow([str(y)] + [repr(float(v)) for v in row])
    write_heatmap(out / "autocorr.png", m.values)
    return 0


def cmd_corr(args) -> int:
    res, _ = read_residual(args.residual)
    fp = read_fingerprint(args.fingerprint)
    value = inner_product(zero_mean_unit_norm(flatten(res.planes)),
                          zero_mean_unit_norm(flatten(fp.planes)))
    print(repr(float(min(1.0, max(-1.0, value)))))
    return 0


def cmd_matrix(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = _denoiser_from_args(args)
    labels = manifest.labels()
    fps = []
    for src in manifest.sources:
        est = extract_residuals(src.estimation_paths(manifest.n_estimation),
                                cfg, src.label, args.threads)
        fps.append(estimate_fingerprint(est, src.label))
        del est
    values = np.zeros((len(labels), len(labels)))
    for i, src in enumerate(manifest.sources):
        sums = np.zeros(len(labels))
        count = 0
        for p in src.test_paths(manifest.n_estimation):
            res = extract_residual(load_image(p), cfg, source_id=str(p))
            sums += [score_against([res], fp)[0].value for fp in fps]
            count += 1
        values[i] = sums / count
    matrix = CorrMatrix(row_labels=labels, col_labels=labels, values=values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corr_matrix_to_csv(matrix, out / "corr_matrix.csv")
    corr_matrix_to_json(matrix, out / "corr_matrix.json")
    write_heatmap(out / "corr_matrix.png", matrix.values)
    return 0


def cmd_identify(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = _denoiser_from_args(args)
    report = run_identification(manifest, cfg, args.out, threads=args.threads)
    print(json.dumps({"accuracy": report.accuracy,
                      "auc": {k: v.auc for k, v in report.roc_curves.items()}}))
    return 0


def cmd_robustness(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = _denoiser_from_args(args)
    result = run_robustness(manifest, cfg, args.quality, args.out,
                            threads=args.threads)
    print(json.dumps({"accuracy_original": result["original"].accuracy,
                      "accuracy_recompressed": result["recompressed"].accuracy,
                      "delta": result["delta"]}))
    return 0


def cmd_synth(args) -> int:
    spec = spec_from_text(Path(args.spec).read_text())
    dataset = generate_dataset(spec, args.count)
    out = Path(args.out)
    src_dir = out / spec.label
    src_dir.mkdir(parents=True, exist_ok=True)
    rel_paths = []
    for i, img in enumerate(dataset.images):
        rel = f"{spec.label}/img_{i:05d}.png"
        save_image(out / rel, img)
        rel_paths.append(rel)
    np.save(src_dir / "true_fingerprint.npy", dataset.true_fingerprint)
    manifest_path = out / "manifest.toml"
    if manifest_path.exists():
        # append the new source to an existing corpus manifest
        from .manifest import load_manifest as _load
        existing = _load(manifest_path)
        sources = [(s.label, [str(p.relative_to(out)) for p in s.image_paths])
                   for s in existing.sources]
        sources.append((spec.label, rel_paths))
        write_manifest(manifest_path, sources, args.n_estimation)
    else:
        write_manifest(manifest_path, [(spec.label, rel_paths)],
                       args.n_estimation)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ganprint",
        description="Noise-residual fingerprints for generated-image forensics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("residual", help="extract one residual to a GRES file")
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--index", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("estimate", help="average residuals into a fingerprint")
    p.add_argument("--residuals", nargs="+", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("energy-curve",
                       help="fingerprint energy vs number of residuals")
    p.add_argument("--residuals", nargs="+", required=True)
    p.add_argument("--ns", required=True, help="comma-separated N values")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_energy_curve)

    p = sub.add_parser("autocorr", help="autocorrelation map of a fingerprint")
    p.add_argument("--fingerprint", required=True)
    p.add_argument("--max-lag", type=int, default=32)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("corr", help="residual vs fingerprint correlation")
    p.add_argument("--residual", required=True)
    p.add_argument("--fingerprint", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("matrix", help="average correlation matrix for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("identify", help="full source-identification protocol")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("robustness",
                       help="identification before/after JPEG re-encoding")
    p.add_argument("--manifest", required=True)
    p.add_argument("--quality", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("synth", help="generate a synthetic source on disk")
    p.add_argument("--spec", required=True, help="key=value source spec file")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n-estimation", type=int, default=512)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GanprintError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
