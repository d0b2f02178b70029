"""Command-line entry point.

Subcommands:
  generate  run the pipeline for a package: readme -> examples -> traces ->
            declaration file (or start from a recorded trace)
  parse     parse a declaration file and print its structure as JSON
  compare   compare an expected declaration file against a generated one
  extract   print the fenced JavaScript examples found in a markdown file

Configuration can come from an INI-style key=value file and from
environment variables (DTSGEN_REGISTRY, DTSGEN_FIXTURES, DTSGEN_OUTPUT,
DTSGEN_DEPTH_LIMIT, DTSGEN_TRACER); command-line flags win.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .compare import compare
from .declaration import module_to_dict, normalize, unimplemented_tags
from .emitter import emit
from .harvester import (
    FetchError,
    FixtureFetcher,
    LiveFetcher,
    extract_code_examples,
    fetch_readme,
    resolve_repository,
)
from .inference import DEFAULT_DEPTH_LIMIT, InferenceConfig, InsufficientTraceError, infer_module
from .parser import AliasCycleError, DtsSyntaxError, expand_aliases, parse_declaration
from .trace_model import TraceFormatError, load_trace, merge_traces, save_trace

# funnel stages; each failed stage has its own exit code
NO_REPOSITORY_URL = ("no repository url", 10)
NO_README = ("no readme", 11)
NO_EXAMPLES = ("no examples", 12)
EXAMPLES_FAILED = ("examples failed", 13)
NO_RUNTIME_INFO = ("no run-time info", 14)
INSUFFICIENT_TRACE = ("insufficient trace", 15)

_ENV_PREFIX = "DTSGEN_"
_CONFIG_KEYS = ("registry", "fixtures", "output", "depth_limit", "tracer")


def _load_config(path: str | None) -> dict[str, str]:
    values: dict[str, str] = {}
    candidates = [path] if path else ["dtsgen.ini", ".dtsgenrc"]
    for candidate in candidates:
        if candidate and Path(candidate).is_file():
            text = Path(candidate).read_text(encoding="utf-8")
            parser = configparser.ConfigParser()
            try:
                parser.read_string("[__top__]\n" + text)
            except configparser.Error as exc:
                raise SystemExit(f"bad config file {candidate}: {exc}")
            for section in parser.sections():
                for key, value in parser.items(section):
                    values[key.replace("-", "_").lower()] = value
            break
    for key in _CONFIG_KEYS:
        env = os.environ.get(_ENV_PREFIX + key.upper())
        if env is not None:
            values[key] = env
    return values


def _funnel_exit(stage: tuple[str, int]) -> int:
    label, code = stage
    print(label, file=sys.stderr)
    return code


def _run_tracer(tracer: str, example_path: Path, module_name: str,
                out_path: Path, module_path: str | None) -> bool:
    env = dict(os.environ)
    if module_path:
        env["DTSGEN_MODULE_PATH"] = str(Path(module_path).resolve())
    try:
        result = subprocess.run(
            ["node", tracer, str(example_path), module_name, str(out_path)],
            capture_output=True,
            text=True,
            env=env,
        )
    except OSError:
        return False
    return result.returncode == 0 and out_path.is_file()


def _default_tracer() -> str | None:
    here = Path(__file__).resolve()
    for base in (Path.cwd(), *here.parents):
        candidate = base / "tracer" / "tracer.js"
        if candidate.is_file():
            return str(candidate)
    return None


def _generate_one(package: str, args, config: dict[str, str]) -> int:
    output_root = Path(args.output or config.get("output") or "output")
    depth = args.depth or int(config.get("depth_limit", DEFAULT_DEPTH_LIMIT))
    module_name = args.module_name or package
    out_dir = output_root / package
    inference_config = InferenceConfig(depth_limit=depth)

    if args.trace:
        try:
            trace = load_trace(Path(args.trace))
        except (OSError, TraceFormatError) as exc:
            print(f"cannot load trace: {exc}", file=sys.stderr)
            return 2
    else:
        fixtures = args.fixtures or config.get("fixtures")
        if fixtures:
            fetcher = FixtureFetcher(Path(fixtures))
        else:
            registry = args.registry or config.get("registry")
            fetcher = LiveFetcher(registry) if registry else LiveFetcher()
        try:
            repo_url = resolve_repository(package, fetcher)
        except FetchError as exc:
            print(f"registry error: {exc}", file=sys.stderr)
            return 2
        if not repo_url:
            return _funnel_exit(NO_REPOSITORY_URL)
        readme = fetch_readme(package, repo_url, fetcher)
        if readme is None:
            return _funnel_exit(NO_README)
        examples = extract_code_examples(readme)
        if not examples:
            return _funnel_exit(NO_EXAMPLES)

        tracer = args.tracer or config.get("tracer") or _default_tracer()
        if tracer is None:
            print("tracer not found; pass --tracer or use --trace", file=sys.stderr)
            return 2
        module_path = None
        if fixtures:
            candidate = Path(fixtures) / package / "module"
            if candidate.is_dir():
                module_path = str(candidate)
        examples_dir = out_dir / "examples"
        traces_dir = out_dir / "traces"
        examples_dir.mkdir(parents=True, exist_ok=True)
        traces_dir.mkdir(parents=True, exist_ok=True)
        traces = []
        for example in examples:
            example_path = examples_dir / f"example{example.index}.js"
            example_path.write_text(example.code, encoding="utf-8")
            trace_path = traces_dir / f"example{example.index}.json"
            if not _run_tracer(tracer, example_path, package, trace_path, module_path):
                continue
            try:
                traces.append(load_trace(trace_path))
            except TraceFormatError:
                continue
        if not traces:
            return _funnel_exit(EXAMPLES_FAILED)
        trace = traces[0]
        for extra in traces[1:]:
            trace = merge_traces(trace, extra)
        if trace.is_empty():
            return _funnel_exit(NO_RUNTIME_INFO)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_trace(trace, out_dir / "trace.json")

    if trace.is_empty():
        return _funnel_exit(NO_RUNTIME_INFO)
    try:
        module = infer_module(trace, module_name, inference_config)
    except InsufficientTraceError:
        return _funnel_exit(INSUFFICIENT_TRACE)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / "index.d.ts"
    out_file.write_text(emit(module), encoding="utf-8")
    print(str(out_file))
    return 0


def cmd_generate(args) -> int:
    config = _load_config(args.config)
    if args.batch:
        packages = [
            line.strip()
            for line in Path(args.batch).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.strip().startswith("#")
        ]
        codes: dict[str, int] = {}
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {
                pkg: pool.submit(_generate_one, pkg, args, config) for pkg in packages
            }
            for pkg, future in futures.items():
                codes[pkg] = future.result()
        failures = {pkg: code for pkg, code in codes.items() if code != 0}
        print(f"{len(packages) - len(failures)}/{len(packages)} packages generated")
        return 1 if failures else 0
    if not args.package:
        print("a package name is required (or --batch)", file=sys.stderr)
        return 2
    return _generate_one(args.package, args, config)


def cmd_parse(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    module_name = args.module_name or Path(args.file).stem.removesuffix(".d")
    try:
        module = parse_declaration(text, module_name)
        if args.expand_aliases:
            module = expand_aliases(module)
    except DtsSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except AliasCycleError as exc:
        print(f"alias error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(module_to_dict(module), indent=2))
    return 0


def cmd_compare(args) -> int:
    modules = []
    for label, path in (("expected", args.expected), ("actual", args.actual)):
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"cannot read {label} file {path}: {exc}", file=sys.stderr)
            return 2
        try:
            modules.append(parse_declaration(text, args.module_name))
        except DtsSyntaxError as exc:
            print(f"parse error in {label} file {path}: {exc}", file=sys.stderr)
            return 2
    expected, actual = modules
    tags = expected.feature_tags | actual.feature_tags
    blocked = unimplemented_tags(tags)
    if blocked:
        print(
            "comparison skipped, unimplemented features present: "
            + ", ".join(sorted(blocked)),
            file=sys.stderr,
        )
        return 2
    try:
        expected = normalize(expand_aliases(expected))
        actual = normalize(expand_aliases(actual))
    except AliasCycleError as exc:
        print(f"alias error: {exc}", file=sys.stderr)
        return 2
    report = compare(expected, actual, args.module_name, tags=tags)
    print(report.to_json())
    return 0 if not report.differences else 1


def cmd_extract(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    examples = extract_code_examples(text)
    for example in examples:
        header = f"--- example {example.index}"
        if example.language:
            header += f" ({example.language})"
        print(header + " ---")
        print(example.code, end="")
    print(f"{len(examples)} example(s)")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtsgen",
        description="Generate and check TypeScript declaration files from run-time traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", help="generate a declaration file for a package")
    generate.add_argument("package", nargs="?", help="npm package name")
    generate.add_argument("--fixtures", help="directory with recorded package fixtures")
    generate.add_argument("--trace", help="start from a recorded trace file")
    generate.add_argument("-o", "--output", help="output directory (default: output)")
    generate.add_argument("--depth", type=int, help="interface nesting depth limit")
    generate.add_argument("--module-name", help="module name override for the declaration")
    generate.add_argument("--batch", help="file listing packages, one per line")
    generate.add_argument("--jobs", type=int, default=4, help="parallel workers for --batch")
    generate.add_argument("--registry", help="npm registry endpoint")
    generate.add_argument("--tracer", help="path to the tracer script")
    generate.add_argument("--config", help="config file (key=value lines)")
    generate.set_defaults(func=cmd_generate)

    parse = sub.add_parser("parse", help="parse a declaration file to JSON")
    parse.add_argument("file")
    parse.add_argument("--module-name", help="module name for the parsed structure")
    parse.add_argument("--expand-aliases", action="store_true",
                       help="expand type aliases before printing")
    parse.set_defaults(func=cmd_parse)

    cmp_parser = sub.add_parser("compare", help="compare two declaration files")
    cmp_parser.add_argument("-e", "--expected", required=True)
    cmp_parser.add_argument("-a", "--actual", required=True)
    cmp_parser.add_argument("--module-name", required=True)
    cmp_parser.set_defaults(func=cmd_compare)

    extract = sub.add_parser("extract", help="list JavaScript examples in a markdown file")
    extract.add_argument("file")
    extract.set_defaults(func=cmd_extract)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
