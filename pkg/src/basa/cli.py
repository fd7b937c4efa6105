"""Command-line driver for the readability pipeline.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
Output files are written atomically, so a failed command never leaves a
partial file behind.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .corpus import CorpusError, format_manifest, ingest, read_manifest, read_text, text_files
from .evaluation import (ALGORITHMS, DEFAULT_GRIDS, MODEL_PARAMS, ConfusionMatrix,
                         EvaluationError, dumps_report, evaluate_table, grid_search_cv,
                         labels_of, run_ablation, stratified_folds)
from .features import FeatureError, FeatureExtractor, parse_mask, read_feature_file, write_feature_file
from .ml import ModelError
from .model import ModelFileError, TrainedModel
from .nglm import LEVELS, LanguageModelError, dumps_models, load_model_dir, train_lm
from .syllabifier import load_onsets
from .tagger import RuleFileError, RuleTable
from .textcore import tokenize

log = logging.getLogger("basa")

EXIT_USAGE, EXIT_DATA = 1, 2
DATA_ERRORS = (CorpusError, EvaluationError, FeatureError, LanguageModelError, ModelError,
               ModelFileError, RuleFileError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _orders(text: str) -> list[int]:
    try:
        orders = sorted({int(p) for p in text.split(",") if p.strip()})
    except ValueError:
        raise UsageError(f"--n expects comma-separated integers, got {text!r}") from None
    if not orders or any(n not in (1, 2, 3) for n in orders):
        raise UsageError("--n values must be among 1, 2, 3")
    return orders


def _mask(text):
    try:
        return parse_mask(text)
    except FeatureError as exc:
        raise UsageError(str(exc)) from None


def _param_value(text: str):
    low = text.lower()
    if low in ("none", "null", "unbounded"):
        return None
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        out[key.strip()] = _param_value(value.strip())
    return out


def _extractor(args, need_lm: bool) -> FeatureExtractor:
    rules = RuleTable.load(args.rules) if args.rules else None
    onsets = load_onsets(args.onsets) if args.onsets else None
    models = None
    if need_lm:
        if not args.lm_dir:
            raise UsageError("LM features requested but --lm-dir not given")
        models = load_model_dir(args.lm_dir)
    return FeatureExtractor(rules, onsets, models,
                            polysyllabic_threshold=getattr(args, "polysyllabic_threshold", 3))


# -- commands ---------------------------------------------------------------

def cmd_ingest(args):
    rows = ingest(args.corpus)
    out = Path(args.out)
    write_atomic(out, format_manifest(rows, out.parent))
    log.info("wrote %d manifest rows to %s", len(rows), out)


def cmd_train_lm(args):
    orders = _orders(args.n)
    if args.level not in LEVELS:
        raise UsageError(f"--level must be one of {', '.join(LEVELS)}")
    files = text_files(args.corpus) if Path(args.corpus).is_dir() else []
    if not files:
        raise CorpusError(f"no text files found under {args.corpus}")
    docs = [tokenize(read_text(p), p.name) for p in files]
    models = [train_lm(docs, args.level, n, args.alpha) for n in orders]
    write_atomic(args.out, dumps_models(models))
    log.info("trained %s models n=%s on %d documents", args.level, orders, len(docs))


def cmd_extract(args):
    mask = _mask(args.sets)
    rows = read_manifest(args.manifest)
    extractor = _extractor(args, "LM" in mask)
    vectors = [extractor.extract(read_text(r.path), r.doc_id, r.label, mask) for r in rows]
    buf = io.StringIO()
    write_feature_file(vectors, buf)
    write_atomic(args.out, buf.getvalue())
    log.info("extracted %d feature vectors (%d features)", len(vectors), len(vectors[0].names))


def _check_algorithm(name):
    if name not in ALGORITHMS:
        raise UsageError(f"--model must be one of {', '.join(ALGORITHMS)}")


def cmd_evaluate(args):
    _check_algorithm(args.model)
    if args.folds < 2:
        raise UsageError("--folds must be at least 2")
    table = read_feature_file(args.features)
    mask = _mask(args.sets) if args.sets else None
    report = evaluate_table(table, args.model, mask, args.folds, args.seed)
    write_atomic(args.out, dumps_report(report))
    if args.confusion_csv:
        cm = report["confusion_matrix"]
        write_atomic(args.confusion_csv,
                     ConfusionMatrix(tuple(cm["labels"]),
                                     tuple(map(tuple, cm["counts"]))).to_csv())
    m = report["metrics"]
    print(f"{report['mask_label']} {args.model}: accuracy {m['accuracy']:.3f} "
          f"precision {m['precision']:.3f} recall {m['recall']:.3f} f1 {m['f1']:.3f}")


def cmd_ablate(args):
    _check_algorithm(args.model)
    if args.folds < 2:
        raise UsageError("--folds must be at least 2")
    table = read_feature_file(args.features)
    report = run_ablation(table, args.model, args.seed, args.folds)
    write_atomic(args.out, dumps_report(report.to_dict()))
    if args.confusion_csv:
        best = report.rows[report.best_index]
        write_atomic(args.confusion_csv, best.result.confusion.to_csv())
    print(report.table())


def cmd_train(args):
    _check_algorithm(args.model)
    table = read_feature_file(args.features)
    mask = _mask(args.sets) if args.sets else table.sets_present()
    if not mask:
        raise FeatureError("feature file holds no complete feature set")
    X = table.matrix(mask)
    y = labels_of(table)
    params = _params(args.param)
    unknown = sorted(set(params) - set(MODEL_PARAMS[args.model]))
    if unknown:
        raise UsageError(f"unknown {args.model} parameter(s): {', '.join(unknown)}; "
                         f"expected {', '.join(MODEL_PARAMS[args.model])}")
    if not params:
        plan = stratified_folds(y, args.folds, args.seed)
        params = grid_search_cv(X, y, args.model, DEFAULT_GRIDS[args.model], plan,
                                args.seed).params
        log.info("grid search selected %s", params)
    model = TrainedModel.fit(X, y, args.model, mask, params, args.seed)
    write_atomic(args.out, model.dumps())


def cmd_predict(args):
    model = TrainedModel.load(args.model)
    extractor = _extractor(args, "LM" in model.mask)
    text = read_text(args.text)
    result = model.predict_text(text, extractor, Path(args.text).name)
    result["mask"] = list(model.mask)
    print(json.dumps(result, sort_keys=True))


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="basa", description="Readability assessment for Filipino texts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def text_tools(sp):
        sp.add_argument("--rules", help="morphology rule file (default: bundled)")
        sp.add_argument("--onsets", help="onset-cluster table (default: bundled)")

    sp = sub.add_parser("ingest", help="build a manifest from grade1/grade2/grade3 folders")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("train-lm", help="train n-gram language models for one level")
    sp.add_argument("--corpus", required=True, help="directory of .txt files")
    sp.add_argument("--level", required=True, choices=LEVELS)
    sp.add_argument("--n", default="1,2,3", help="n-gram orders, e.g. 1,2,3")
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train_lm)

    sp = sub.add_parser("extract", help="write the feature file for a manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--lm-dir")
    sp.add_argument("--sets", default="ALL", help="e.g. TRAD,LEX,LM,SYLL,MORPH or ALL")
    sp.add_argument("--polysyllabic-threshold", type=int, default=3)
    sp.add_argument("--out", required=True)
    text_tools(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("evaluate", help="grid-searched stratified cross-validation")
    sp.add_argument("--features", required=True)
    sp.add_argument("--model", required=True, choices=ALGORITHMS)
    sp.add_argument("--sets", help="feature sets to use (default: all present)")
    sp.add_argument("--folds", type=int, default=5)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", required=True)
    sp.add_argument("--confusion-csv")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("ablate", help="evaluate the 15 feature-set combinations")
    sp.add_argument("--features", required=True)
    sp.add_argument("--model", required=True, choices=ALGORITHMS)
    sp.add_argument("--folds", type=int, default=5)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", required=True)
    sp.add_argument("--confusion-csv")
    sp.set_defaults(func=cmd_ablate)

    sp = sub.add_parser("train", help="train the final model on the whole feature file")
    sp.add_argument("--features", required=True)
    sp.add_argument("--model", required=True, choices=ALGORITHMS)
    sp.add_argument("--sets", help="feature sets to use (default: all present)")
    sp.add_argument("--param", action="append", metavar="KEY=VALUE",
                    help="fixed hyperparameter; skips the grid search")
    sp.add_argument("--folds", type=int, default=5)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("predict", help="predict the grade of one text file")
    sp.add_argument("--model", required=True)
    sp.add_argument("--lm-dir")
    sp.add_argument("--text", required=True)
    text_tools(sp)
    sp.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "seed", 0) < 0:
        parser.error("--seed must be non-negative")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"basa {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"basa {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
