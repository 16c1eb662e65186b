"""Batch pipeline driver.

Every artifact-producing command writes a JSON run manifest next to its
primary output, recording resolved parameters, seeds, input/output hashes,
and wall time. Reruns with identical inputs and seeds produce hash-equal
outputs.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import dataio, drmetrics, pga, plotting, qml, qsim
from .errors import QpgaError
from .kernelmap import KernelSpec, apply_feature_map, fit_feature_map
from .manifold import FrechetConfig

DATA_ROOT_ENV = "QPGA_DATA_ROOT"


def _sha256(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _write_manifest(out_path, command, params, inputs, outputs, t0):
    manifest = {
        "command": command,
        "params": params,
        "inputs": {str(p): _sha256(p) for p in inputs if Path(p).exists()},
        "outputs": {str(p): _sha256(p) for p in outputs if Path(p).exists()},
        "wall_time_s": round(time.time() - t0, 3),
    }
    Path(str(out_path) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _emit(args, record):
    if getattr(args, "json", False):
        print(json.dumps(record, sort_keys=True))


def _resolve_path(p):
    root = os.environ.get(DATA_ROOT_ENV)
    path = Path(p)
    if not path.is_absolute() and root and not path.exists() and (Path(root) / path).exists():
        return Path(root) / path
    return path


def _kernel_spec(args) -> KernelSpec:
    return KernelSpec(
        kind=args.kernel,
        degree=args.degree,
        gamma=args.gamma,
        coef0=args.coef0,
    )


def _load_rows(path):
    rows, manifest = dataio.load_matrix(_resolve_path(path))
    labels = np.asarray(manifest.get("labels", []), dtype=int)
    return rows, labels, manifest


# ---------------------------------------------------------------------------
# Subcommand implementations


def cmd_ingest(args):
    t0 = time.time()
    classes = tuple(int(c) for c in args.classes.split(","))
    if args.dataset == "cifar10":
        paths = {"batches": [_resolve_path(p) for p in args.batches.split(",")]}
        inputs = paths["batches"]
    else:
        paths = {"images": _resolve_path(args.images), "labels": _resolve_path(args.labels)}
        inputs = [paths["images"], paths["labels"]]
    batch = dataio.ingest(
        args.dataset, paths, classes, args.samples_per_class,
        resize=args.resize, seed=args.seed,
    )
    manifest = dict(batch.source)
    manifest["labels"] = [int(v) for v in batch.labels]
    dataio.save_matrix(args.out, batch.rows, manifest)
    _write_manifest(args.out, "ingest", vars_of(args), inputs, [args.out], t0)
    _emit(args, {"rows": int(batch.rows.shape[0]), "pixels": int(batch.rows.shape[1])})
    return 0


def cmd_fit(args):
    t0 = time.time()
    rows, labels, in_manifest = _load_rows(args.input)
    spec = _kernel_spec(args)
    mapper = fit_feature_map(rows, spec, m=args.landmarks, seed=args.seed)
    sphere = apply_feature_map(mapper, rows)
    model = pga.fit(sphere, args.d, FrechetConfig(), mode=args.mode)
    pga.save_model(model, args.out)
    if mapper.landmarks is not None:
        payload = np.vstack([mapper.landmarks, mapper.whitener])
        dataio.save_matrix(
            str(args.out) + ".mapper",
            payload,
            {
                "kind": "feature-mapper",
                "kernel": spec.kind,
                "degree": spec.degree,
                "gamma": spec.gamma,
                "coef0": spec.coef0,
                "m": mapper.m,
                "seed": mapper.seed,
                "n_features": mapper.n_features,
            },
        )
    _write_manifest(args.out, "fit", vars_of(args), [args.input], [args.out], t0)
    record = {
        "d": model.n_components,
        "mode": model.mode,
        "mean_radius": model.mean_radius,
        "explained_variance_topD": float(model.ev_ratios.sum()),
    }
    _emit(args, record)
    return 0


def _load_mapper(model_path):
    mapper_path = Path(str(model_path) + ".mapper")
    if not mapper_path.exists():
        return None
    payload, manifest = dataio.load_matrix(mapper_path)
    m = int(manifest["m"])
    from .kernelmap import FeatureMapper

    spec = KernelSpec(
        kind=manifest["kernel"], degree=int(manifest["degree"]),
        gamma=manifest["gamma"], coef0=manifest["coef0"],
    )
    return FeatureMapper(
        spec=spec, landmarks=payload[:m], whitener=payload[m:],
        m=m, seed=int(manifest["seed"]), n_features=int(manifest["n_features"]),
    )


def _sphere_rows(model_path, rows):
    mapper = _load_mapper(model_path)
    if mapper is not None:
        return apply_feature_map(mapper, rows)
    norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None]


def cmd_transform(args):
    t0 = time.time()
    rows, labels, in_manifest = _load_rows(args.input)
    model = pga.load_model(_resolve_path(args.model))
    sphere = _sphere_rows(_resolve_path(args.model), rows)
    latent = pga.transform(model, sphere)
    manifest = {"kind": "latent", "labels": in_manifest.get("labels", []),
                "model": str(args.model), "mode": model.mode}
    dataio.save_matrix(args.out, latent, manifest)
    _write_manifest(args.out, "transform", vars_of(args), [args.input, args.model], [args.out], t0)
    _emit(args, {"rows": int(latent.shape[0]), "d": int(latent.shape[1])})
    return 0


def cmd_invert(args):
    t0 = time.time()
    latent, labels, in_manifest = _load_rows(args.input)
    model = pga.load_model(_resolve_path(args.model))
    recon = pga.inverse_transform(model, latent)
    dataio.save_matrix(args.out, recon, {"kind": "reconstruction",
                                         "labels": in_manifest.get("labels", [])})
    _write_manifest(args.out, "invert", vars_of(args), [args.input, args.model], [args.out], t0)
    _emit(args, {"rows": int(recon.shape[0])})
    return 0


def cmd_metrics(args):
    t0 = time.time()
    high, _, _ = _load_rows(args.high)
    low, _, _ = _load_rows(args.low)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cm = drmetrics.coranking_matrix(high, low, args.d_high, args.d_low)
    np.savetxt(outdir / "coranking.csv", cm.counts, fmt="%d", delimiter=",")
    plotting.save_coranking_heatmap(cm.counts, outdir / "coranking.svg")
    ks = list(range(1, args.kmax + 1))
    trust = [drmetrics.trustworthiness(high, low, k, args.d_high, args.d_low) for k in ks]
    cont = [drmetrics.continuity(high, low, k, args.d_high, args.d_low) for k in ks]
    with open(outdir / "tc_curves.csv", "w") as fh:
        fh.write("k,trustworthiness,continuity\n")
        for k, t, c in zip(ks, trust, cont):
            fh.write(f"{k},{t:.12g},{c:.12g}\n")
    plotting.save_tc_curves(ks, trust, cont, outdir / "tc_curves.svg")
    record = {
        "n": cm.n,
        "coranking_trace_fraction": float(np.trace(cm.counts)) / (cm.n * (cm.n - 1)),
        "trustworthiness_at_kmax": trust[-1],
        "continuity_at_kmax": cont[-1],
    }
    (outdir / "metrics.json").write_text(json.dumps(record, indent=2, sort_keys=True))
    _write_manifest(outdir / "metrics.json", "metrics", vars_of(args),
                    [args.high, args.low],
                    [outdir / "coranking.csv", outdir / "tc_curves.csv"], t0)
    _emit(args, record)
    return 0


def cmd_bounds(args):
    budget = bounds_mod.NoiseBudget(p=args.p, p_max=args.p_max)
    if args.eigenvalues:
        evals = [float(v) for v in args.eigenvalues.split(",")]
        qb = bounds_mod.feasible_qubit_range(evals, args.beta, budget)
    else:
        q_min = bounds_mod.min_qubits(args.D)
        q_max = bounds_mod.max_qubits(budget)
        qb = bounds_mod.QubitBudget(
            q_min=q_min, q_max=q_max,
            feasible=q_max is None or q_min <= q_max,
            system_error_at_qmin=bounds_mod.system_error(args.p, q_min),
        )
    print(json.dumps(qb.to_dict(), sort_keys=True))
    return 0


def cmd_kernel(args):
    t0 = time.time()
    latent, labels, in_manifest = _load_rows(args.input)
    K = qml.kernel_matrix(latent, latent, backend=args.backend)
    dataio.save_matrix(args.out, K, {"kind": "kernel-matrix",
                                     "labels": in_manifest.get("labels", [])})
    _write_manifest(args.out, "kernel", vars_of(args), [args.input], [args.out], t0)
    _emit(args, {"n": int(K.shape[0]), "min": float(K.min()), "max": float(K.max())})
    return 0


def _binary_pm1(labels):
    classes = np.unique(labels)
    if classes.size != 2:
        raise QpgaError("need exactly two classes")
    return np.where(labels == classes[1], 1.0, -1.0), classes


def cmd_train_qsvm(args):
    t0 = time.time()
    latent, labels, _ = _load_rows(args.latent)
    y_pm, classes = _binary_pm1(labels)
    batch = dataio.ImageBatch(rows=latent, labels=labels, source={})
    folds = dataio.make_folds(batch, k=args.folds, seed=args.seed)

    def fit_predict(train_X, train_y, test_X):
        K = qml.kernel_matrix(train_X, train_X)
        model = qml.svm_train(K, train_y, C=args.C, tol=args.tol)
        K_test = qml.kernel_matrix(test_X, train_X)
        return qml.svm_predict(model, K_test)

    result = qml.evaluate_folds(fit_predict, folds, latent, y_pm, positive=1.0)
    record = {
        "classes": [int(c) for c in classes],
        "fold_accuracy": result.accuracies,
        "fold_f1": result.f1_scores,
        "mean_accuracy": result.mean_accuracy,
        "mean_f1": result.mean_f1,
    }
    Path(args.out).write_text(json.dumps(record, indent=2, sort_keys=True))
    _write_manifest(args.out, "train-qsvm", vars_of(args), [args.latent], [args.out], t0)
    _emit(args, record)
    return 0


def cmd_train_vqc(args):
    t0 = time.time()
    latent, labels, _ = _load_rows(args.latent)
    classes = np.unique(labels)
    y01 = (labels == classes[1]).astype(float)
    q = bounds_mod.min_qubits(latent.shape[1])
    q = max(q, 1)
    batch = dataio.ImageBatch(rows=latent, labels=labels, source={})
    folds = dataio.make_folds(batch, k=args.folds, seed=args.seed)
    cfg = qml.TrainConfig(epochs=args.epochs, learning_rate=args.lr, seed=args.seed)
    fold_records = []
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for f, (train_idx, test_idx) in enumerate(folds):
        model0 = qml.init_vqc(q, layers=args.layers, seed=args.seed + f)
        model, history = qml.vqc_train(latent[train_idx], y01[train_idx], model0, cfg)
        preds = np.array([qml.vqc_predict(model, x)[1] for x in latent[test_idx]])
        acc = qml.accuracy_score(y01[test_idx], preds)
        f1 = qml.f1_score(y01[test_idx], preds, positive=1)
        dataio.save_matrix(
            outdir / f"vqc_fold{f}.qpm", model.params[None, :],
            {"kind": "vqc-model", "q": q, "layers": args.layers,
             "threshold": model.threshold, "classes": [int(c) for c in classes]},
        )
        with open(outdir / f"loss_fold{f}.csv", "w") as fh:
            fh.write("epoch,loss\n")
            for e, val in enumerate(history):
                fh.write(f"{e + 1},{val:.12g}\n")
        plotting.save_loss_history(history, outdir / f"loss_fold{f}.svg")
        fold_records.append({"fold": f, "accuracy": acc, "f1": f1, "final_loss": history[-1] if history else None})
    record = {
        "classes": [int(c) for c in classes],
        "folds": fold_records,
        "mean_accuracy": float(np.mean([r["accuracy"] for r in fold_records])),
        "mean_f1": float(np.mean([r["f1"] for r in fold_records])),
    }
    (outdir / "vqc_results.json").write_text(json.dumps(record, indent=2, sort_keys=True))
    _write_manifest(outdir / "vqc_results.json", "train-vqc", vars_of(args),
                    [args.latent], [outdir / "vqc_results.json"], t0)
    _emit(args, record)
    return 0


def _load_vqc(path):
    payload, manifest = dataio.load_matrix(_resolve_path(path))
    return qml.VqcModel(
        params=payload[0], q=int(manifest["q"]), layers=int(manifest["layers"]),
        threshold=float(manifest["threshold"]),
    ), manifest


def cmd_evaluate(args):
    model, manifest = _load_vqc(args.model)
    latent, labels, _ = _load_rows(args.latent)
    classes = np.unique(labels)
    y01 = (labels == classes[1]).astype(float)
    noise = None
    if args.p1 or args.p2:
        noise = NoiseSpecArgs(args)
    preds = np.array([qml.vqc_predict(model, x, noise)[1] for x in latent])
    record = {
        "accuracy": qml.accuracy_score(y01, preds),
        "f1": qml.f1_score(y01, preds, positive=1),
        "n": int(latent.shape[0]),
        "noise": {"p1": args.p1, "p2": args.p2},
    }
    print(json.dumps(record, sort_keys=True))
    return 0


def NoiseSpecArgs(args):
    return qsim.NoiseSpec(p1=args.p1, p2=args.p2)


def cmd_noise_sweep(args):
    t0 = time.time()
    model, _ = _load_vqc(args.model)
    latent, labels, _ = _load_rows(args.latent)
    classes = np.unique(labels)
    y01 = (labels == classes[1]).astype(float)
    if args.samples and args.samples < latent.shape[0]:
        latent = latent[: args.samples]
        y01 = y01[: args.samples]
    ps = [float(v) for v in args.p.split(",")]
    rows = []
    for p in ps:
        noise = qsim.NoiseSpec(p1=p, p2=p) if p > 0 else None
        preds = np.array([qml.vqc_predict(model, x, noise)[1] for x in latent])
        rows.append((p, qml.accuracy_score(y01, preds), qml.f1_score(y01, preds, positive=1)))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "noise_sweep.csv", "w") as fh:
        fh.write("p,accuracy,f1\n")
        for p, acc, f1 in rows:
            fh.write(f"{p},{acc:.12g},{f1:.12g}\n")
    plotting.save_noise_sweep([r[0] for r in rows], [r[1] for r in rows], outdir / "noise_sweep.svg")
    _write_manifest(outdir / "noise_sweep.csv", "noise-sweep", vars_of(args),
                    [args.model, args.latent], [outdir / "noise_sweep.csv"], t0)
    _emit(args, {"sweep": [{"p": p, "accuracy": a, "f1": f} for p, a, f in rows]})
    return 0


def cmd_dsweep(args):
    t0 = time.time()
    rows, labels, _ = _load_rows(args.input)
    norms = np.linalg.norm(rows, axis=1)
    sphere = rows / norms[:, None]
    dims = [int(v) for v in args.ds.split(",")]
    results = []
    for d in dims:
        model = pga.fit(sphere, d, FrechetConfig(), mode="renormalize")
        latent = pga.transform(model, sphere)
        recon = pga.inverse_transform(model, latent)
        err = drmetrics.reconstruction_error(sphere, recon)
        results.append((d, err, float(model.cumulative_explained_variance()[d - 1])))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "dsweep.csv", "w") as fh:
        fh.write("D,reconstruction_mse,cumulative_explained_variance\n")
        for d, err, ev in results:
            fh.write(f"{d},{err:.12g},{ev:.12g}\n")
    plotting.save_dsweep([r[0] for r in results], [r[1] for r in results], outdir / "dsweep.svg")
    _write_manifest(outdir / "dsweep.csv", "dsweep", vars_of(args), [args.input],
                    [outdir / "dsweep.csv"], t0)
    _emit(args, {"sweep": [{"D": d, "mse": e, "cum_ev": ev} for d, e, ev in results]})
    return 0


def cmd_report(args):
    t0 = time.time()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in ("metrics.json", "vqc_results.json"):
        p = Path(args.indir) / name
        if p.exists():
            summary[name] = json.loads(p.read_text())
    for name in ("noise_sweep.csv", "dsweep.csv", "tc_curves.csv"):
        p = Path(args.indir) / name
        if not p.exists():
            continue
        lines = p.read_text().strip().splitlines()
        header = lines[0].split(",")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        summary[name] = {"columns": header, "rows": data.tolist()}
        if name == "noise_sweep.csv":
            plotting.save_noise_sweep(data[:, 0], data[:, 1], outdir / "noise_sweep.svg")
        elif name == "dsweep.csv":
            plotting.save_dsweep(data[:, 0], data[:, 1], outdir / "dsweep.svg")
        else:
            plotting.save_tc_curves(data[:, 0], data[:, 1], data[:, 2], outdir / "tc_curves.svg")
    (outdir / "report.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    _write_manifest(outdir / "report.json", "report", vars_of(args), [], [outdir / "report.json"], t0)
    _emit(args, {"sections": sorted(summary)})
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def vars_of(args) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _add_kernel_flags(p):
    p.add_argument("--kernel", default="linear",
                   choices=["linear", "polynomial", "rbf", "sigmoid"])
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--coef0", type=float, default=None)
    p.add_argument("--landmarks", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpga", description=__doc__)
    parser.add_argument("--config", default=None,
                        help="JSON file with default values for any flag; "
                             "command-line values win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a raw dataset into the matrix container")
    p.add_argument("--dataset", required=True, choices=list(dataio.DATASETS))
    p.add_argument("--images")
    p.add_argument("--labels")
    p.add_argument("--batches", help="comma-separated CIFAR-10 binary batch files")
    p.add_argument("--classes", required=True, help="two labels, e.g. 0,1")
    p.add_argument("--samples-per-class", type=int, required=True)
    p.add_argument("--resize", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit feature map + geodesic PCA model")
    p.add_argument("--input", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", default="renormalize", choices=list(pga.MODES))
    _add_kernel_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("transform", help="project data through a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("invert", help="approximate inverse of a latent file")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("metrics", help="co-ranking + trustworthiness/continuity")
    p.add_argument("--high", required=True)
    p.add_argument("--low", required=True)
    p.add_argument("--d-high", default="euclidean", choices=["euclidean", "geodesic"])
    p.add_argument("--d-low", default="geodesic", choices=["euclidean", "geodesic"])
    p.add_argument("--kmax", type=int, default=50)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bounds", help="qubit bounds for a noise budget")
    p.add_argument("--D", type=int, default=None)
    p.add_argument("--eigenvalues", default=None, help="comma-separated spectrum")
    p.add_argument("--beta", type=float, default=0.75)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--p-max", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("kernel", help="quantum kernel matrix of a latent file")
    p.add_argument("--input", required=True)
    p.add_argument("--backend", default="analytic", choices=["analytic", "circuit"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("train-qsvm", help="cross-validated QSVM on a latent file")
    p.add_argument("--latent", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_qsvm)

    p = sub.add_parser("train-vqc", help="cross-validated variational classifier")
    p.add_argument("--latent", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_train_vqc)

    p = sub.add_parser("evaluate", help="evaluate a saved classifier on a latent file")
    p.add_argument("--model", required=True)
    p.add_argument("--latent", required=True)
    p.add_argument("--p1", type=float, default=0.0)
    p.add_argument("--p2", type=float, default=0.0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("noise-sweep", help="accuracy of a saved classifier vs noise")
    p.add_argument("--model", required=True)
    p.add_argument("--latent", required=True)
    p.add_argument("--p", default="0.01,0.15,0.2", help="comma-separated probabilities")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("dsweep", help="reconstruction error across latent dimensions")
    p.add_argument("--input", required=True)
    p.add_argument("--ds", default="4,16,32", help="comma-separated dimensions")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_dsweep)

    p = sub.add_parser("report", help="re-render figures and summarize artifacts")
    p.add_argument("--indir", required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_report)

    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", help="print results as JSON")
    return parser


def _apply_config(parser, argv):
    # Pull --config out first, then feed its values as parser defaults.
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config:
        values = json.loads(Path(known.config).read_text())
        for subparser in parser._subparsers._group_actions[0].choices.values():
            subparser.set_defaults(**values)
            for action in subparser._actions:
                if action.dest in values:
                    action.required = False
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QpgaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
