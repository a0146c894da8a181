"""Command-line interface for the curation and evaluation pipeline.

Subcommands mirror the pipeline stages: ``score`` and ``filter`` curate
a corpus manifest, ``plan`` emits render jobs, ``tasks`` prepares blind
comparison grids, ``evaluate`` judges them with a hosted model or the
scripted mock, ``serve`` collects human verdicts over HTTP, and ``elo``
turns comparison records into rating tables.

Settings resolve in precedence order: command-line flag, then
environment variable, then config file (plain ``key = value`` lines),
then the built-in default. Exit codes: 0 success, 1 unusable input or
environment, 2 completed with per-item failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from pathlib import Path

from . import __version__
from .dataset_curation import (
    ScoringConfig,
    load_manifest,
    save_manifest,
    score_corpus,
    select_top_k,
)
from .elo_engine import (
    DEFAULT_INITIAL_RATING,
    DEFAULT_K_FACTOR,
    DEFAULT_SHUFFLES,
    EloConfig,
    run_tournament,
)
from .errors import TexcurveError
from .jsonio import canonical_dumps, write_jsonl
from .pairwise_eval import (
    DIMENSIONS,
    JudgingServer,
    MethodEntry,
    VlmConfig,
    build_tasks,
    judge_mock,
    judge_vlm,
    read_records,
    read_tasks,
    render_grids,
    run_judging,
    write_records,
    write_tasks,
)
from .pairwise_eval.grid import DEFAULT_CELL_SIZE, DEFAULT_STRIP_HEIGHT
from .quality_metrics import DEFAULT_COLOR_WEIGHT, DEFAULT_ENTROPY_BASE
from .render_plan import (
    DEFAULT_HDRI_POOL,
    DEFAULT_REFERENCE_COUNT,
    emit_plan,
    generate_plan,
)

ENV_ENDPOINT = "TEXCURVE_VLM_ENDPOINT"
ENV_MODEL = "TEXCURVE_VLM_MODEL"

METHODS_SCHEMA = "methods/1"
RATINGS_SCHEMA = "ratings/1"

REFERENCE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _read_config_file(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    settings: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TexcurveError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TexcurveError(f"config line {lineno} is not 'key = value': {raw!r}")
        key, _, value = line.partition("=")
        settings[key.strip()] = value.strip()
    return settings


class _Settings:
    """Flag > environment > config file > default resolution."""

    def __init__(self, args: argparse.Namespace, file_cfg: dict[str, str]):
        self._args = args
        self._file = file_cfg
        self.effective: dict[str, object] = {}

    def get(self, name: str, default, cast=None, env: str | None = None):
        value = getattr(self._args, name, None)
        if value is None and env is not None and os.environ.get(env):
            value = os.environ[env]
        if value is None and name in self._file:
            value = self._file[name]
        if value is None:
            value = default
        if cast is not None and value is not None:
            try:
                value = cast(value)
            except (TypeError, ValueError) as exc:
                raise TexcurveError(f"bad value for setting {name!r}: {exc}") from exc
        self.effective[name] = value
        return value

    def echo(self, verbose: bool) -> None:
        if not verbose:
            return
        for key in sorted(self.effective):
            value = self.effective[key]
            shown = "***" if "key" in key and value else value
            print(f"setting {key} = {shown}", file=sys.stderr)


def _load_methods_spec(path: str) -> tuple[list[MethodEntry], list[str]]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TexcurveError(f"cannot read methods spec {path}: {exc}") from exc
    if doc.get("schema") != METHODS_SCHEMA:
        raise TexcurveError(f"unexpected methods schema {doc.get('schema')!r}")
    entries = []
    samples: set[str] = set()
    try:
        for item in doc["methods"]:
            renders = {
                sid: tuple(str(p) for p in paths)
                for sid, paths in item["samples"].items()
            }
            entries.append(MethodEntry(method_id=str(item["method_id"]), renders=renders))
            samples.update(renders)
    except (KeyError, TypeError) as exc:
        raise TexcurveError(f"malformed methods spec {path}: {exc}") from exc
    if not entries:
        raise TexcurveError(f"methods spec {path} lists no methods")
    return entries, sorted(samples)


def _find_references(directory: str, samples: list[str]) -> dict[str, str]:
    refs: dict[str, str] = {}
    for sample in samples:
        for suffix in REFERENCE_SUFFIXES:
            candidate = Path(directory) / f"{sample}{suffix}"
            if candidate.is_file():
                refs[sample] = str(candidate)
                break
        else:
            raise TexcurveError(
                f"no reference image for sample {sample!r} under {directory}"
            )
    return refs


def _print_failures(failures: list[dict], what: str) -> None:
    for failure in failures:
        key = failure.get("object_id") or failure.get("task_id")
        print(f"warning: {what} {key}: {failure['error']}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_score(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    config = ScoringConfig(
        color_weight=settings.get("color_weight", DEFAULT_COLOR_WEIGHT, float),
        entropy_base=settings.get("entropy_base", DEFAULT_ENTROPY_BASE, float),
        mask_mode=settings.get("mask_mode", "auto", str),
        view_aggregate=settings.get("view_aggregate", "mean", str),
        jobs=settings.get("jobs", 1, int),
    )
    settings.echo(args.verbose)
    manifest = load_manifest(args.manifest)
    scored, failures = score_corpus(manifest, config)
    save_manifest(scored, args.out)
    _print_failures(failures, "object")
    print(
        f"scored {len(scored.records) - len(failures)} of "
        f"{len(scored.records)} objects -> {args.out}"
    )
    return 2 if failures else 0


def cmd_filter(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    top_k = settings.get("top_k", None, int)
    settings.echo(args.verbose)
    if top_k is None:
        raise TexcurveError("--top-k is required")
    manifest = load_manifest(args.manifest)
    try:
        selected = select_top_k(manifest, top_k)
    except ValueError as exc:
        raise TexcurveError(str(exc)) from exc
    save_manifest(selected, args.out)
    print(f"kept top {len(selected.records)} objects -> {args.out}")
    return 0


def cmd_plan(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    seed = settings.get("seed", 0, int)
    refs = settings.get("refs", DEFAULT_REFERENCE_COUNT, int)
    hdri_pool = settings.get("hdri_pool", DEFAULT_HDRI_POOL, int)
    settings.echo(args.verbose)
    try:
        object_ids = [
            line.strip()
            for line in Path(args.objects).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    except OSError as exc:
        raise TexcurveError(f"cannot read object list: {exc}") from exc
    if not object_ids:
        raise TexcurveError("object list is empty")
    if len(set(object_ids)) != len(object_ids):
        raise TexcurveError("object list contains duplicates")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    used: set[str] = set()
    for object_id in object_ids:
        plan = generate_plan(
            object_id, seed, reference_count=refs, hdri_pool=hdri_pool
        )
        safe = re.sub(r"[^A-Za-z0-9._-]+", "-", object_id)
        if safe in used:
            safe = f"{safe}-{hashlib.sha256(object_id.encode()).hexdigest()[:8]}"
        used.add(safe)
        (out_dir / f"{safe}.plan.json").write_bytes(emit_plan(plan))
    print(f"wrote {len(object_ids)} render plans -> {out_dir}")
    return 0


def _prepare_tasks(args: argparse.Namespace, settings: _Settings):
    methods, samples = _load_methods_spec(args.methods)
    references = _find_references(args.reference, samples)
    dimensions = args.dimension or list(DIMENSIONS)
    for dim in dimensions:
        if dim not in DIMENSIONS:
            raise TexcurveError(f"unknown dimension {dim!r}")
    seed = settings.get("seed", 0, int)
    cell_size = settings.get("cell_size", DEFAULT_CELL_SIZE, int)
    strip_height = settings.get("strip_height", DEFAULT_STRIP_HEIGHT, int)
    grid_dir = settings.get("grid_dir", None, str)
    if grid_dir is None:
        raise TexcurveError("--grid-dir is required")
    tasks = build_tasks(methods, samples, dimensions, references, grid_dir, seed=seed)
    return methods, tasks, cell_size, strip_height


def cmd_tasks(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    methods, tasks, cell_size, strip_height = _prepare_tasks(args, settings)
    settings.echo(args.verbose)
    written = render_grids(tasks, methods, cell_size=cell_size, strip_height=strip_height)
    write_tasks(tasks, args.out)
    print(f"prepared {len(tasks)} tasks ({len(written)} grids) -> {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    methods, tasks, cell_size, strip_height = _prepare_tasks(args, settings)
    jobs = settings.get("jobs", 1, int)
    if args.judge == "mock":
        order_raw = settings.get("mock_order", None, str)
        order = (
            [m.strip() for m in order_raw.split(",") if m.strip()]
            if order_raw
            else sorted(m.method_id for m in methods)
        )
        settings.echo(args.verbose)

        def judge(task):
            return judge_mock(task, order)

    else:
        endpoint = settings.get("vlm_endpoint", None, str, env=ENV_ENDPOINT)
        model = settings.get("vlm_model", None, str, env=ENV_MODEL)
        timeout_s = settings.get("vlm_timeout", 120.0, float)
        retries = settings.get("vlm_retries", 3, int)
        settings.echo(args.verbose)
        if not endpoint or not model:
            raise TexcurveError(
                "vlm judging needs an endpoint and model "
                f"(--endpoint/--model, {ENV_ENDPOINT}/{ENV_MODEL}, or config)"
            )
        vlm_config = VlmConfig(
            endpoint=endpoint, model=model, timeout_s=timeout_s, retries=retries
        )

        def judge(task):
            return judge_vlm(task, vlm_config)

    render_grids(tasks, methods, cell_size=cell_size, strip_height=strip_height)
    records, failures = run_judging(tasks, judge, jobs=jobs)
    write_records(records, args.out)
    failures_path = settings.get("failures_out", f"{args.out}.failures", str)
    if failures:
        write_jsonl(failures_path, failures)
    _print_failures(failures, "task")
    print(f"judged {len(records)} of {len(tasks)} tasks -> {args.out}")
    return 2 if failures else 0


def cmd_elo(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    config = EloConfig(
        k_factor=settings.get("k_factor", DEFAULT_K_FACTOR, float),
        initial_rating=settings.get("initial_rating", DEFAULT_INITIAL_RATING, float),
        shuffles=settings.get("shuffles", DEFAULT_SHUFFLES, int),
        seed=settings.get("seed", 0, int),
    )
    settings.echo(args.verbose)
    try:
        records = read_records(args.records)
    except (OSError, ValueError, TexcurveError) as exc:
        raise TexcurveError(f"cannot read records {args.records}: {exc}") from exc
    if not records:
        raise TexcurveError(f"records file {args.records} is empty")
    by_dimension: dict[str, list] = {}
    for record in records:
        by_dimension.setdefault(record.dimension, []).append(record)
    tables = {}
    for dimension in sorted(by_dimension):
        table = run_tournament(by_dimension[dimension], config, dimension=dimension)
        tables[dimension] = table.as_dict()
        for method in table.ranking():
            print(
                f"{dimension:24s} {method:20s} "
                f"{table.ratings[method]:8.1f} +- {table.spread[method]:.1f}"
            )
    doc = {"schema": RATINGS_SCHEMA, "tables": tables}
    Path(args.out).write_text(canonical_dumps(doc) + "\n", encoding="utf-8")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    cfg_file = _read_config_file(args.config)
    settings = _Settings(args, cfg_file)
    host = settings.get("host", "127.0.0.1", str)
    port = settings.get("port", 8008, int)
    judge_id = settings.get("judge_id", "human", str)
    ui_dir = settings.get("ui_dir", None, str)
    settings.echo(args.verbose)
    try:
        tasks = read_tasks(args.tasks)
    except (OSError, ValueError, TexcurveError) as exc:
        raise TexcurveError(f"cannot read tasks {args.tasks}: {exc}") from exc
    if not tasks:
        raise TexcurveError(f"tasks file {args.tasks} is empty")
    if ui_dir is not None and not Path(ui_dir).is_dir():
        raise TexcurveError(f"ui dir {ui_dir} does not exist")
    try:
        server = JudgingServer(
            tasks,
            args.records_out,
            host=host,
            port=port,
            judge_id=judge_id,
            ui_dir=ui_dir,
        )
    except OSError as exc:
        raise TexcurveError(f"cannot bind {host}:{port}: {exc}") from exc
    bound_host, bound_port = server.address
    remaining = server.queue.remaining
    print(
        f"serving {remaining} pending of {len(tasks)} tasks "
        f"on http://{bound_host}:{bound_port}/ (records -> {args.records_out})",
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("interrupted; records are safe, rerun to resume", file=sys.stderr)
    finally:
        server.close()
    print(f"session complete: {server.queue.progress()['done']} of {len(tasks)} judged")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texcurve",
        description="Curate texture-generation datasets and run pairwise evaluations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="config file with 'key = value' lines")
        p.add_argument("--verbose", action="store_true", help="echo effective settings")

    p = sub.add_parser("score", help="score every object of a corpus manifest")
    p.add_argument("manifest", help="input manifest (JSONL)")
    p.add_argument("--out", required=True, help="output manifest path")
    p.add_argument("--lambda", dest="color_weight", type=float,
                   help="weight of the color term in the total score")
    p.add_argument("--entropy-base", dest="entropy_base", type=float,
                   help="logarithm base for channel entropy")
    p.add_argument("--mask-mode", dest="mask_mode", choices=["auto", "alpha", "none"],
                   help="which pixels count: auto, alpha, or none")
    p.add_argument("--aggregate", dest="view_aggregate", choices=["mean", "max"],
                   help="how per-view scores combine into an object score")
    p.add_argument("--jobs", type=int, help="scoring thread count")
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("filter", help="keep the top-K objects of a scored manifest")
    p.add_argument("manifest", help="scored manifest (JSONL)")
    p.add_argument("--out", required=True, help="output manifest path")
    p.add_argument("--top-k", dest="top_k", type=int, help="number of objects to keep")
    common(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("plan", help="emit render plans for a list of object ids")
    p.add_argument("--objects", required=True, help="text file, one object id per line")
    p.add_argument("--out", required=True, help="output directory for plan files")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--refs", type=int, help="reference views per object")
    p.add_argument("--hdri-pool", dest="hdri_pool", type=int,
                   help="size of the HDRI pool to draw from")
    common(p)
    p.set_defaults(func=cmd_plan)

    def eval_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--methods", required=True,
                       help="methods spec JSON mapping methods to rendered views")
        p.add_argument("--reference", required=True,
                       help="directory of reference images named <sample_id>.png")
        p.add_argument("--grid-dir", dest="grid_dir", help="directory for grid images")
        p.add_argument("--dimension", action="append",
                       help="judging dimension (repeatable; default: all three)")
        p.add_argument("--seed", type=int, help="seed for position randomization")
        p.add_argument("--cell-size", dest="cell_size", type=int,
                       help="grid cell edge in pixels")
        p.add_argument("--strip-height", dest="strip_height", type=int,
                       help="header strip height in pixels")

    p = sub.add_parser("tasks", help="build comparison tasks and their grids")
    eval_common(p)
    p.add_argument("--out", required=True, help="output tasks file (JSONL)")
    common(p)
    p.set_defaults(func=cmd_tasks)

    p = sub.add_parser("evaluate", help="judge comparison tasks with a model or mock")
    eval_common(p)
    p.add_argument("--judge", required=True, choices=["vlm", "mock"],
                   help="judging backend")
    p.add_argument("--out", required=True, help="output records file (JSONL)")
    p.add_argument("--endpoint", dest="vlm_endpoint",
                   help="chat-completions endpoint URL")
    p.add_argument("--model", dest="vlm_model", help="model name to request")
    p.add_argument("--timeout", dest="vlm_timeout", type=float,
                   help="request timeout in seconds")
    p.add_argument("--retries", dest="vlm_retries", type=int,
                   help="retry count for failed judge calls")
    p.add_argument("--mock-order", dest="mock_order",
                   help="comma-separated method preference for the mock judge")
    p.add_argument("--jobs", type=int, help="parallel judge calls")
    p.add_argument("--failures-out", dest="failures_out",
                   help="failure report path (default: <out>.failures)")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("elo", help="compute rating tables from comparison records")
    p.add_argument("--records", required=True, help="comparison records (JSONL)")
    p.add_argument("--out", required=True, help="output ratings JSON")
    p.add_argument("--k-factor", dest="k_factor", type=float, help="Elo K factor")
    p.add_argument("--initial", dest="initial_rating", type=float,
                   help="initial rating for every method")
    p.add_argument("--shuffles", type=int, help="number of shuffled passes to average")
    p.add_argument("--seed", type=int, help="shuffle seed")
    common(p)
    p.set_defaults(func=cmd_elo)

    p = sub.add_parser("serve", help="serve tasks to human judges over HTTP")
    p.add_argument("--tasks", required=True, help="tasks file from the tasks command")
    p.add_argument("--records-out", dest="records_out", required=True,
                   help="append-only records file; reused to resume")
    p.add_argument("--host", help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, help="bind port (default 8008)")
    p.add_argument("--judge-id", dest="judge_id", help="judge id stamped on records")
    p.add_argument("--ui-dir", dest="ui_dir", help="directory with a built web UI")
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TexcurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
