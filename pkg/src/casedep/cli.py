"""Command-line front end: learn, show, perplexity, deps, attach, simulate.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (missing
files, unknown heads, malformed input).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from urllib.parse import quote, unquote

from . import attach as attach_mod
from . import evaluation
from .caseframes import (
    CaseFrameError,
    SLOT_VIEW,
    VALUE_VIEW,
    group_by_head,
    parse_case_frames,
    project,
)
from .learner import dependency_report, learn_model
from .modelio import ModelFormatError, deserialize, format_pattern, serialize

DEFAULT_SEED = 1996
DEFAULT_MIN_FRAMES = 50
DEFAULT_DEP_THRESHOLD = 0.25

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep 2 for data errors
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="casedep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, seed=False, frames=False, fmt=False, out=False):
        if frames:
            p.add_argument("--input", required=True, help="case-frame file")
            p.add_argument("--head", action="append", help="restrict to this head (repeatable)")
            p.add_argument(
                "--view", choices=[SLOT_VIEW, VALUE_VIEW], default=SLOT_VIEW,
                help="dataset view (default slot)",
            )
            p.add_argument(
                "--min-frames", type=int, default=DEFAULT_MIN_FRAMES,
                help=f"skip heads with fewer frames (default {DEFAULT_MIN_FRAMES})",
            )
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                           help=f"random seed (default {DEFAULT_SEED})")
        if fmt:
            p.add_argument("--format", choices=["text", "csv"], default="text")
        if out:
            p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("learn", help="learn one model file per head")
    common(p, frames=True, out=True)

    p = sub.add_parser("show", help="print a model file as a readable pattern")
    p.add_argument("--model", required=True, help="model file")

    p = sub.add_parser("perplexity", help="cross-validated perplexity per head")
    common(p, frames=True, seed=True, fmt=True, out=True)
    p.add_argument("--folds", type=int, default=10)

    p = sub.add_parser("deps", help="report positively dependent slot pairs")
    common(p, frames=True, fmt=True, out=True)
    p.add_argument("--dep-threshold", type=float, default=DEFAULT_DEP_THRESHOLD)

    p = sub.add_parser("attach", help="decide attachment test tuples")
    p.add_argument("--input", required=True, help="test-tuple file")
    p.add_argument("--model", required=True, help="directory of learned model files")
    p.add_argument("--dep-threshold", type=float, default=DEFAULT_DEP_THRESHOLD)
    p.add_argument("--tie-default", choices=["verb", "noun"], default="noun")
    common(p, fmt=True, out=True)

    p = sub.add_parser("simulate", help="learning-curve experiment CSV")
    p.add_argument("--vars", type=int, default=6, help="number of variables")
    p.add_argument("--values", type=int, default=2, help="domain size per variable")
    p.add_argument("--edges", type=int, default=3)
    p.add_argument("--strength", type=float, default=0.75)
    p.add_argument("--sizes", default="25,50,100,200,400,800,1600",
                   help="comma-separated data sizes")
    p.add_argument("--trials", type=int, default=10)
    common(p, seed=True, out=True)
    return parser


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_groups(args):
    path = Path(args.input)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    try:
        instances = parse_case_frames(path.read_text(encoding="utf-8"))
    except CaseFrameError as exc:
        raise DataError(f"{path}: {exc}") from exc
    groups = group_by_head(instances)
    if args.head:
        missing = [h for h in args.head if h not in groups]
        if missing:
            raise DataError(f"unknown head: {missing[0]!r}")
        groups = {h: groups[h] for h in args.head}
    kept = {
        head: frames
        for head, frames in groups.items()
        if len(frames) >= args.min_frames
    }
    if not kept:
        raise DataError(
            f"no head has at least {args.min_frames} frames (use --min-frames)"
        )
    return kept


def model_filename(head: str) -> str:
    return quote(head, safe="") + ".model"


def _cmd_learn(args) -> int:
    groups = _load_groups(args)
    out_dir = Path(args.out or "models")
    out_dir.mkdir(parents=True, exist_ok=True)
    for head in sorted(groups):
        data = project(groups[head], view=args.view)
        model = learn_model(data)
        path = out_dir / model_filename(head)
        path.write_text(serialize(model), encoding="utf-8")
        arcs = ", ".join(
            f"{model.names[p]}->{model.names[c]}" for p, c in model.arcs
        )
        print(f"{head}: {data.num_rows} frames, {data.n} slots -> {path}"
              + (f" [{arcs}]" if arcs else ""))
    return EXIT_OK


def _cmd_show(args) -> int:
    path = Path(args.model)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    try:
        model = deserialize(path.read_text(encoding="utf-8"))
    except ModelFormatError as exc:
        raise DataError(f"{path}: {exc}") from exc
    sys.stdout.write(format_pattern(model))
    return EXIT_OK


def _cmd_perplexity(args) -> int:
    groups = _load_groups(args)
    rows = []
    for head in sorted(groups):
        data = project(groups[head], view=args.view)
        try:
            result = evaluation.cross_validate(data, folds=args.folds, seed=args.seed)
        except ValueError as exc:
            raise DataError(f"head {head!r}: {exc}") from exc
        rows.append((head, result))
    if args.format == "csv":
        lines = ["head,independent,dendroid,reduction_percent"]
        for head, r in rows:
            lines.append(
                f"{head},{r.independent_perplexity:.4f},"
                f"{r.dendroid_perplexity:.4f},{r.reduction_percent:.2f}"
            )
        _write("\n".join(lines) + "\n", args.out)
    else:
        width = max(len("head"), *(len(h) for h, _ in rows))
        lines = [f"{'head':<{width}}  independent  dendroid  reduction"]
        for head, r in rows:
            lines.append(
                f"{head:<{width}}  {r.independent_perplexity:>11.2f}  "
                f"{r.dendroid_perplexity:>8.2f}  {r.reduction_percent:>8.1f}%"
            )
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_deps(args) -> int:
    if args.view != SLOT_VIEW:
        raise UsageError("deps requires the slot view")
    groups = _load_groups(args)
    found = []
    for head in sorted(groups):
        data = project(groups[head], view=SLOT_VIEW)
        for link in dependency_report(data, score_threshold=args.dep_threshold):
            found.append((head, link))
    if args.format == "csv":
        lines = ["head,slot_i,slot_j,score"]
        for head, link in found:
            lines.append(f"{head},{link.name_i},{link.name_j},{link.score:.4f}")
        _write("\n".join(lines) + "\n", args.out)
    else:
        if not found:
            _write("no dependent slot pairs above the threshold\n", args.out)
            return EXIT_OK
        lines = ["head  dependent slots  score"]
        for head, link in found:
            lines.append(f"{head}  {link.name_i} {link.name_j}  {link.score:.3f}")
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _load_model_dir(path_str: str) -> dict[str, object]:
    path = Path(path_str)
    if not path.is_dir():
        raise DataError(f"model directory not found: {path}")
    models = {}
    for file in sorted(path.glob("*.model")):
        try:
            model = deserialize(file.read_text(encoding="utf-8"))
        except ModelFormatError as exc:
            raise DataError(f"{file}: {exc}") from exc
        models[unquote(file.stem)] = model
    if not models:
        raise DataError(f"no .model files in {path}")
    return models


def _cmd_attach(args) -> int:
    path = Path(args.input)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    try:
        tuples = attach_mod.parse_attachment_tuples(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    models = _load_model_dir(args.model)

    def model_for(head, required=False):
        model = models.get(head)
        if model is None and required:
            raise DataError(f"no model file for head {head!r}")
        return model

    lines = []
    header = "kind,verb,prep,verdict,rule,gold,correct"
    scored = 0
    correct = 0
    for item in tuples:
        verb_model = model_for(item.verb, required=True)
        if item.kind == "v":
            noun_model = model_for(item.noun1)
            try:
                decision = attach_mod.attach_single(
                    verb_model, noun_model, item.prep1, args.dep_threshold
                )
            except ValueError as exc:
                raise DataError(f"tuple for {item.verb!r}: {exc}") from exc
            resolved = decision.resolved(args.tie_default)
            outcome = {"verb": "V", "noun": "N"}[resolved]
            ok = None
            if item.gold:
                scored += 1
                ok = outcome == item.gold
                correct += ok
            lines.append(
                (item.kind, item.verb, item.prep1, decision.verdict, decision.rule,
                 item.gold or "", "" if ok is None else str(ok).lower())
            )
        else:
            noun_models = (None, model_for(item.noun1))
            try:
                d1, d2 = attach_mod.attach_double(
                    verb_model, item.prep1, item.prep2, noun_models,
                    args.dep_threshold,
                )
            except ValueError as exc:
                raise DataError(f"tuple for {item.verb!r}: {exc}") from exc
            if d1.verdict == attach_mod.BOTH_TO_VERB:
                outcome = "VV"
            else:
                outcome = "".join(
                    {"verb": "V", "noun": "N"}[d.resolved(args.tie_default)]
                    for d in (d1, d2)
                )
            ok = None
            if item.gold:
                scored += 1
                ok = outcome == item.gold
                correct += ok
            verdict = (
                d1.verdict
                if d1.verdict == attach_mod.BOTH_TO_VERB
                else f"{d1.verdict}/{d2.verdict}"
            )
            rule = (
                d1.rule
                if d1.verdict == attach_mod.BOTH_TO_VERB
                else f"{d1.rule}/{d2.rule}"
            )
            lines.append(
                (item.kind, item.verb, f"{item.prep1}+{item.prep2}", verdict, rule,
                 item.gold or "", "" if ok is None else str(ok).lower())
            )
    if args.format == "csv":
        body = [header] + [",".join(parts) for parts in lines]
        _write("\n".join(body) + "\n", args.out)
    else:
        body = ["  ".join(parts).rstrip() for parts in lines]
        if scored:
            body.append(f"accuracy: {correct}/{scored}"
                        f" ({100.0 * correct / scored:.1f}%)")
        _write("\n".join(body) + "\n", args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes list: {args.sizes!r}") from None
    if not sizes or min(sizes) < 1:
        raise UsageError("--sizes must list positive integers")
    try:
        true_model = evaluation.make_random_dendroid(
            n=args.vars, k=args.values, edges=args.edges,
            seed=args.seed, strength=args.strength,
        )
        rows = evaluation.learning_curve(true_model, sizes, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(evaluation.learning_curve_csv(rows), args.out)
    return EXIT_OK


_COMMANDS = {
    "learn": _cmd_learn,
    "show": _cmd_show,
    "perplexity": _cmd_perplexity,
    "deps": _cmd_deps,
    "attach": _cmd_attach,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
