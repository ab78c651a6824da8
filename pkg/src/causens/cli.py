"""Command-line interface: ``causens generate | run | evaluate``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import (CausensError, ConfigError, DimensionMismatch, EnsembleConfig,
                   StrengthMatrix, TimeSeriesDataset, ValidationError, config_from_mapping,
                   format_config, read_config, read_matrix, write_matrix, write_text_atomic)
from .evaluation import confusion_metrics, credibility_level, credibility_score
from .graph import to_dot
from .learners import LEARNER_NAMES

log = logging.getLogger("causens")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PIPELINE = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- CSV ----------------------------------------------------------------------

def dataset_to_csv(d: TimeSeriesDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(d.names)
    for row in d.values.T:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def read_csv(path) -> TimeSeriesDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path} is empty")
    names = tuple(h.strip() for h in rows[0])
    body = [r for r in rows[1:] if r]
    for lineno, r in enumerate(body, 2):
        if len(r) != len(names):
            raise ValidationError(f"{path}:{lineno}: expected {len(names)} fields, got {len(r)}")
    try:
        values = np.array(body, dtype=float).T.reshape(len(names), len(body))
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric value ({exc})") from exc
    return TimeSeriesDataset(names, values)


# -- tables -------------------------------------------------------------------

TABLE_COLUMNS = ("method", "TP", "FN", "FP", "TN", "accuracy", "precision", "recall",
                 "F1", "CS")


def table_rows(per_learner: dict, ensemble, cs: float | None) -> list[list[str]]:
    rows = []
    for name, rep in list(per_learner.items()) + [("Ensemble", ensemble)]:
        rows.append([name, str(rep.tp), str(rep.fn), str(rep.fp), str(rep.tn),
                     f"{rep.accuracy:.2f}", f"{rep.precision:.2f}", f"{rep.recall:.2f}",
                     f"{rep.f1:.2f}",
                     f"{cs:.2f}" if name == "Ensemble" and cs is not None else "-"])
    return rows


def format_table(rows, sep: str | None = None) -> str:
    lines = [TABLE_COLUMNS] + [tuple(r) for r in rows]
    if sep is not None:
        return "\n".join(sep.join(r) for r in lines) + "\n"
    widths = [max(len(r[c]) for r in lines) for c in range(len(TABLE_COLUMNS))]
    return "\n".join("  ".join(v.rjust(w) if c else v.ljust(w)
                               for c, (v, w) in enumerate(zip(r, widths)))
                     for r in lines) + "\n"


# -- commands -----------------------------------------------------------------

def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}", EXIT_IO) from exc
    return out


def cmd_generate(args) -> int:
    from .synthetic import generate
    if args.dataset not in (1, 2, 3):
        raise CliError(f"--dataset must be 1, 2 or 3, got {args.dataset}", EXIT_USAGE)
    data, truth, cfg = generate(args.dataset, args.seed, T=args.length)
    out = _out_dir(args.out)
    try:
        write_text_atomic(out / "data.csv", dataset_to_csv(data))
        write_matrix(out / "truth.json", data.names, truth.adjacency.astype(int))
        write_text_atomic(out / "config.txt", format_config(cfg))
    except OSError as exc:
        raise CliError(f"cannot write outputs: {exc}", EXIT_IO) from exc
    print(f"wrote {data.T} x {data.n} series, {truth.n_links} true links, to {out}")
    return EXIT_OK


def _config_from_args(args) -> EnsembleConfig:
    cfg = EnsembleConfig()
    if args.config:
        try:
            cfg = read_config(args.config)
        except OSError as exc:
            raise CliError(f"cannot read config {args.config}: {exc}", EXIT_IO) from exc
    inline = {"partitions": args.partitions, "partition_length": args.partition_length,
              "tau_max": args.tau_max, "alpha21": args.alpha21, "alpha22": args.alpha22,
              "rng_seed": args.seed}
    return config_from_mapping({k: v for k, v in inline.items() if v is not None}, cfg)


def _read_truth(path, names) -> np.ndarray:
    try:
        tnames, truth = read_matrix(path)
    except OSError as exc:
        raise CliError(f"cannot read truth {path}: {exc}", EXIT_IO) from exc
    if list(tnames) != list(names):
        raise DimensionMismatch(f"truth variables {tnames} do not match {list(names)}")
    return truth.astype(bool)


def cmd_run(args) -> int:
    from .pipeline import PipelineFailure, default_jobs, run_pipeline
    from .plotting import plot_matrices, plot_window_strengths
    cfg = _config_from_args(args)
    try:
        data = read_csv(args.input)
    except OSError as exc:
        raise CliError(f"cannot read input {args.input}: {exc}", EXIT_IO) from exc
    truth = _read_truth(args.truth, data.names) if args.truth else None
    jobs = args.jobs if args.jobs is not None else default_jobs()
    try:
        res = run_pipeline(data, cfg, jobs=jobs)
    except (ValidationError, ConfigError):
        raise
    except (PipelineFailure, CausensError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise CliError(f"pipeline failed: {exc}", EXIT_PIPELINE) from exc

    out = _out_dir(args.out)
    names = data.names
    try:
        for name, mats in res.window_matrices.items():
            for k, m in enumerate(mats):
                write_matrix(out / f"strength_{name}_{k}.json", names, m.s)
            write_matrix(out / f"me_{name}.json", names, res.me[name].s)
            write_matrix(out / f"trust_{name}.json", names, res.trust[name].t)
        write_matrix(out / "mre.json", names, res.mre.s)
        write_matrix(out / "mre_optimized.json", names, res.mre_bar.s)
        write_text_atomic(out / "graph.dot", to_dot(res.graph))
        write_text_atomic(out / "config.txt", format_config(cfg))
        report = {"cs": res.cs, "credibility_level": credibility_level(res.cs),
                  "edges": [[e.source, e.target, e.strength] for e in res.graph.edges],
                  "failures": res.failures, "config": cfg.to_dict()}
        if truth is not None:
            per = {l: confusion_metrics(res.me[l], truth) for l in res.me}
            ens = confusion_metrics(res.mre_bar, truth).with_credibility(res.cs)
            report["ensemble"] = ens.to_dict()
            report["learners"] = {l: r.to_dict() for l, r in per.items()}
            table = table_rows(per, ens, res.cs)
            write_text_atomic(out / "table.txt", format_table(table))
            write_text_atomic(out / "table.tsv", format_table(table, "\t"))
        write_text_atomic(out / "report.json", json.dumps(report, indent=1))
        if not args.no_figures:
            mats = {f"ME {l}": res.me[l].s for l in res.me}
            mats["MRE"] = res.mre.s
            mats["final"] = res.mre_bar.s
            plot_matrices(mats, names, out / "strengths.png", truth)
            plot_window_strengths(res.window_matrices, names, out / "windows.png")
    except OSError as exc:
        raise CliError(f"cannot write outputs: {exc}", EXIT_IO) from exc

    print(f"CS {res.cs:.4f} ({credibility_level(res.cs)})")
    print(f"{len(res.graph.edges)} edges")
    for e in res.graph.edges:
        print(f"{e.source} -> {e.target}\t{e.strength:.4f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .plotting import plot_matrices
    try:
        names, pred = read_matrix(args.pred)
    except OSError as exc:
        raise CliError(f"cannot read prediction {args.pred}: {exc}", EXIT_IO) from exc
    truth = _read_truth(args.truth, names)
    pred_m = StrengthMatrix(pred)
    me_paths = list(args.me or [])
    if not me_paths:
        me_paths = [p for p in (Path(args.pred).parent / f"me_{l}.json" for l in LEARNER_NAMES)
                    if p.exists()]
    per, mes = {}, []
    for p in me_paths:
        try:
            mnames, m = read_matrix(p)
        except OSError as exc:
            raise CliError(f"cannot read {p}: {exc}", EXIT_IO) from exc
        if list(mnames) != list(names):
            raise DimensionMismatch(f"{p} variables do not match the prediction")
        label = Path(p).stem.removeprefix("me_")
        mes.append(StrengthMatrix(m))
        per[label] = confusion_metrics(mes[-1], truth)
    ens = confusion_metrics(pred_m, truth)
    cs = credibility_score(pred_m, mes) if mes else None
    if cs is not None:
        ens = ens.with_credibility(cs)
    rows = table_rows(per, ens, cs)
    out = _out_dir(args.out or Path(args.pred).parent)
    try:
        report = {"ensemble": ens.to_dict(), "learners": {k: v.to_dict() for k, v in per.items()}}
        write_text_atomic(out / "evaluation.json", json.dumps(report, indent=1))
        write_text_atomic(out / "table.txt", format_table(rows))
        write_text_atomic(out / "table.tsv", format_table(rows, "\t"))
        if not args.no_figures:
            plot_matrices({"prediction": pred, "truth": truth.astype(float)}, names,
                          out / "evaluation.png", truth)
    except OSError as exc:
        raise CliError(f"cannot write outputs: {exc}", EXIT_IO) from exc
    sys.stdout.write(format_table(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causens",
                                description="Multi-split causal ensemble for time series.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a benchmark dataset")
    g.add_argument("--dataset", type=int, required=True, help="1, 2 or 3")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--length", type=int, default=None, help="override the series length")
    g.add_argument("--out", default=".", help="output directory")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run the ensemble on a CSV file")
    r.add_argument("--input", required=True, help="CSV with a header of variable names")
    r.add_argument("--config", help="key = value config file")
    r.add_argument("--partitions", type=int)
    r.add_argument("--partition-length", type=int)
    r.add_argument("--tau-max", type=int)
    r.add_argument("--alpha21", type=float)
    r.add_argument("--alpha22", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int, help="worker processes (default: CAUSENS_JOBS or 1)")
    r.add_argument("--truth", help="optional truth.json for metrics in the report")
    r.add_argument("--out", default="out", help="output directory")
    r.add_argument("--no-figures", action="store_true")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("evaluate", help="score a result against ground truth")
    e.add_argument("--pred", required=True, help="mre_optimized.json")
    e.add_argument("--truth", required=True, help="truth.json")
    e.add_argument("--me", nargs="*", help="fused learner matrices (default: me_*.json "
                   "next to --pred)")
    e.add_argument("--out", help="output directory (default: next to --pred)")
    e.add_argument("--no-figures", action="store_true")
    e.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"causens: error: {exc}", file=sys.stderr)
        return exc.code
    except (ValidationError, ValueError) as exc:
        print(f"causens: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"causens: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
