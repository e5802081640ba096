"""Command-line entry points.

Exit codes: 0 success, 1 validation/domain error, 2 I/O error.
All writers emit canonical JSON so identical flags and seeds give
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import location, metrics, pipeline, planner, world
from .errors import ParseError, WayfinderError
from .grounder import FollowerConfig

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; flag errors are validation errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_cost_model(path: str | None) -> planner.CostModel:
    if path is None:
        return planner.neutral_cost_model()
    return planner.load_cost_model(_read(path))


def _load_pairs(data: bytes) -> list[tuple[str, str]]:
    pairs = []
    for i, line in enumerate(data.decode("utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            pairs.append((doc["start"], doc["goal"]))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ParseError(f"pairs line {i + 1}: {e}") from None
    return pairs


def cmd_gen_world(args) -> int:
    g = world.generate_grid_world(args.rows, args.cols, args.spacing, args.seed)
    _write(args.output, world.world_to_json(g))
    return EXIT_OK


def cmd_build_dataset(args) -> int:
    g = world.load_world(_read(args.world))
    examples = []
    for path in args.timed:
        timed, trace = location.load_timed_file(_read(path))
        examples.extend(location.build_phrase_dataset(timed, trace, g))
    _write(args.output, location.dataset_to_jsonl(examples))
    return EXIT_OK


def cmd_train_locator(args) -> int:
    g = world.load_world(_read(args.world))
    examples = location.dataset_from_jsonl(_read(args.data))
    model = location.train_bow(examples, alpha=args.alpha)
    if model.world_id != g.world_id:
        raise ParseError(f"dataset world {model.world_id!r} does not match "
                         f"--world {g.world_id!r}")
    for vid in model.prior:
        g.require(vid)
    _write(args.output, location.model_to_json(model))
    return EXIT_OK


def cmd_eval_locator(args) -> int:
    g = world.load_world(_read(args.world))
    model = location.model_from_json(_read(args.model))
    examples = location.dataset_from_jsonl(_read(args.test))
    per = []
    n_success = 0
    total_err = 0.0
    for i, ex in enumerate(examples):
        utt = location.Utterance(" ".join(ex.tokens), "describe_position")
        guess, _ = location.locate(model, g, utt)
        err = world.geodesic_distance(g, guess, ex.viewpoint)
        ok = metrics.is_success(err, args.threshold)
        n_success += ok
        total_err += err
        per.append({"index": i, "truth": ex.viewpoint, "guess": guess,
                    "error_m": err, "success": ok})
    n = len(examples)
    doc = {
        "kind": "locator",
        "n": n,
        "mean_error_m": round(total_err / n, 2) if n else 0.0,
        "success_pct": round(100.0 * n_success / n, 2) if n else 0.0,
        "per_example": per,
    }
    _write(args.output, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_eval_planner(args) -> int:
    g = world.load_world(_read(args.world))
    cm = _load_cost_model(args.profile)
    pairs = _load_pairs(_read(args.pairs))
    follower = FollowerConfig(noise_epsilon=args.epsilon,
                              max_steps=args.max_steps)
    report = planner.evaluate_planner(g, pairs, cm, style=args.style,
                                      follower=follower,
                                      root_seed=args.seed,
                                      threshold=args.threshold)
    _write(args.output, metrics.report_to_json(report))
    return EXIT_OK


def cmd_eval_e2e(args) -> int:
    g = world.load_world(_read(args.world))
    model = location.model_from_json(_read(args.model))
    specs = pipeline.episodes_from_jsonl(_read(args.episodes))
    cm = _load_cost_model(args.profile)
    base = FollowerConfig(noise_epsilon=args.epsilon, max_steps=args.max_steps)
    report = pipeline.run_eval(specs, g, model, cm, base,
                               root_seed=args.seed, threshold=args.threshold,
                               style=args.style)
    _write(args.output, metrics.report_to_json(report))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import Engine, create_app

    engine = Engine(reports_dir=args.reports_dir,
                    transcripts_dir=args.transcripts_dir)
    for path in args.world:
        g = world.load_world(_read(path))
        model = None
        if args.model:
            candidate = location.model_from_json(_read(args.model))
            if candidate.world_id == g.world_id:
                model = candidate
        engine.add_world(g, model)
    app = create_app(engine, cors_origins=args.cors_origin or None)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_report(args) -> int:
    doc = json.loads(_read(args.input))
    if args.format == "csv":
        sys.stdout.write(metrics.render_csv(doc))
    else:
        sys.stdout.write(metrics.render_table(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wayfinder",
                     description="navigation instruction pipeline tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-world", parents=[], help="generate a grid world")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--spacing", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_world)

    p = sub.add_parser("build-dataset",
                       help="phrase dataset from timed instructions")
    p.add_argument("--timed", action="append", required=True,
                   help="timed instruction JSON (repeatable)")
    p.add_argument("--world", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("train-locator", help="train the bag-of-words locator")
    p.add_argument("--data", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_train_locator)

    p = sub.add_parser("eval-locator", help="score a locator on a test set")
    p.add_argument("--model", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--threshold", type=float, default=3.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_eval_locator)

    p = sub.add_parser("eval-planner",
                       help="plan, instruct, and ground start/goal pairs")
    p.add_argument("--world", required=True)
    p.add_argument("--pairs", required=True,
                   help='JSONL of {"start", "goal"}')
    p.add_argument("--profile", default=None)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--threshold", type=float, default=3.0)
    p.add_argument("--style", default="default",
                   help="instruction template set")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_eval_planner)

    p = sub.add_parser("eval-e2e", help="full pipeline over scripted episodes")
    p.add_argument("--world", required=True)
    p.add_argument("--episodes", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--profile", default=None)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--threshold", type=float, default=3.0)
    p.add_argument("--style", default="default",
                   help="instruction template set")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_eval_e2e)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--world", action="append", required=True,
                   help="world JSON (repeatable)")
    p.add_argument("--model", default=None)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors-origin", action="append", default=None)
    p.add_argument("--reports-dir", default=None)
    p.add_argument("--transcripts-dir", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="render a saved report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except WayfinderError as err:
        print(f"wayfinder: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as err:
        print(f"wayfinder: {err}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as err:
        print(f"wayfinder: invalid JSON: {err}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
