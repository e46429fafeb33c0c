"""Command-line surface: align, score, curve, subset, synth.

Exit codes: 0 success, 1 computation error, 2 usage or input error.
Flag precedence is command line > --config file > built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from dispersion import align as align_mod
from dispersion import coverage, ingest, plot, subsetex, synth
from dispersion.errors import ComputeError, DispersionError, InputError
from dispersion.model import Topic
from dispersion.propositions import ExtractorConfig, ensure_propositions

ENDPOINT_ENV = "DISP_ENDPOINT"


def _parse_config_file(path: str) -> dict[str, str]:
    config_path = Path(path)
    if not config_path.exists():
        raise InputError(f"no such config file: {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(config_path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InputError(f"{path}: line {lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(args, key: str, default, convert=str):
    """flags > config file > default."""
    flag_value = getattr(args, key, None)
    if flag_value is not None:
        return flag_value
    config = getattr(args, "_config_values", None) or {}
    if key in config:
        raw = config[key]
        try:
            if convert is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            return convert(raw)
        except ValueError:
            raise InputError(f"config key {key}: cannot parse {raw!r}") from None
    return default


_CONFIG_KEYS = {
    "tau", "n_max", "scorer", "endpoint", "k", "jobs", "seed",
    "summary_kind", "batch_size", "min_tokens", "extractor",
}


def _load_config(args) -> None:
    values = {}
    if getattr(args, "config", None):
        values = _parse_config_file(args.config)
        unknown = set(values) - _CONFIG_KEYS
        if unknown:
            raise InputError(f"config file: unknown key {sorted(unknown)[0]}")
    args._config_values = values


def _default_jobs() -> int:
    return os.cpu_count() or 1


def _parallel_map(fn, items, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _units_for_kind(topics: list[Topic], kind: str) -> list[tuple[Topic, str]]:
    units = []
    for topic in topics:
        for summary in topic.summaries_of_kind(kind):
            units.append((topic, summary.summary_id))
    if not units:
        raise InputError(f"dataset has no summaries of kind {kind!r}")
    return units


# ---------------------------------------------------------------- align

def cmd_align(args) -> int:
    _load_config(args)
    tau = _resolve(args, "tau", align_mod.DEFAULT_TAU, float)
    scorer_kind = _resolve(args, "scorer", "lexical")
    endpoint = _resolve(args, "endpoint", os.environ.get(ENDPOINT_ENV))
    batch_size = _resolve(args, "batch_size", 128, int)
    jobs = _resolve(args, "jobs", _default_jobs(), int)
    min_tokens = _resolve(args, "min_tokens", 3, int)
    extractor_mode = _resolve(args, "extractor", "sentence")

    if scorer_kind == "remote" and not endpoint:
        raise InputError(
            f"--scorer remote requires --endpoint or ${ENDPOINT_ENV}"
        )

    topics = ingest.load_dataset(args.dataset)
    extractor = ExtractorConfig(
        mode=extractor_mode, min_tokens=min_tokens, sidecar=args.tuples
    )
    topics = _parallel_map(lambda t: ensure_propositions(t, extractor), topics, jobs)

    spec = align_mod.ScorerSpec(
        kind=scorer_kind, tau=tau, endpoint=endpoint, batch_size=batch_size,
        remove_stopwords=bool(args.stopwords),
    )
    if scorer_kind == "remote":
        health = align_mod.fetch_health(endpoint)
        scorer = align_mod.RemoteScorer(spec, model_id=health.get("model_id"))
    else:
        scorer = align_mod.LexicalScorer(spec)
    cache = align_mod.ScoreCache()

    units = []
    for topic in topics:
        for summary in topic.summaries:
            units.append((topic, summary.summary_id))
    relations = _parallel_map(
        lambda unit: align_mod.align_topic(unit[0], unit[1], scorer, cache),
        units, jobs,
    )
    ingest.write_alignments(relations, args.out)
    pairs = sum(len(r.edges) for r in relations)
    edges = sum(len(r.binary_edges()) for r in relations)
    print(
        f"aligned {len(topics)} topics / {len(units)} summaries: "
        f"{pairs} scored pairs, {edges} edges at tau={tau} -> {args.out}"
    )
    return 0


# ---------------------------------------------------------------- score

def _safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name) or "unnamed"


def cmd_score(args) -> int:
    _load_config(args)
    tau = _resolve(args, "tau", align_mod.DEFAULT_TAU, float)
    n_max = _resolve(args, "n_max", coverage.DEFAULT_N_MAX, int)
    kind = _resolve(args, "summary_kind", "reference")
    jobs = _resolve(args, "jobs", _default_jobs(), int)
    min_tokens = _resolve(args, "min_tokens", 3, int)
    extractor_mode = _resolve(args, "extractor", "sentence")

    topics = ingest.load_dataset(args.dataset)
    # re-derive propositions deterministically when the dataset lacks them,
    # with the same defaults cmd_align uses, so alignment ids bind
    extractor = ExtractorConfig(
        mode=extractor_mode, min_tokens=min_tokens,
        sidecar=getattr(args, "tuples", None),
    )
    needed_extraction = any(
        unit.propositions is None
        for topic in topics
        for unit in (*topic.documents, *topic.summaries)
    )
    if needed_extraction:
        topics = _parallel_map(lambda t: ensure_propositions(t, extractor), topics, jobs)
    extractor_id = extractor.extractor_id if needed_extraction else None

    relations = ingest.load_alignments(args.alignments, tau=tau)
    relations_by_unit = {(r.topic_id, r.summary_id): r for r in relations}
    out_dir = Path(args.out_dir)
    dataset_name = Path(args.dataset).stem

    def evaluate(units, name, target_dir):
        missing = [
            f"({topic.topic_id}, {summary_id})"
            for topic, summary_id in units
            if (topic.topic_id, summary_id) not in relations_by_unit
        ]
        if missing:
            raise InputError("no alignment relation for: " + ", ".join(missing))
        results = _parallel_map(
            lambda unit: coverage.topic_result(
                unit[0], unit[1], relations_by_unit[(unit[0].topic_id, unit[1])], n_max
            ),
            units, jobs,
        )
        report = coverage.aggregate(
            results, n_max, name=name, tau=tau, scorer_id="precomputed",
            extractor_id=extractor_id,
        )
        ingest.write_report(report, results, target_dir)
        print(
            f"{name}: AAC {report.dataset_aac:.4f} "
            f"(mean {report.aac_mean:.4f} +/- {report.aac_std:.4f}), "
            f"{report.topics_evaluated} evaluated / {report.topics_skipped} skipped "
            f"-> {target_dir}"
        )

    if kind == "reference":
        units = _units_for_kind(topics, "reference")
        evaluate(units, dataset_name, out_dir)
    else:
        by_system: dict[str, list[tuple[Topic, str]]] = {}
        for topic in topics:
            for summary in topic.summaries_of_kind("system"):
                label = summary.system_name or summary.summary_id
                by_system.setdefault(label, []).append((topic, summary.summary_id))
        if not by_system:
            raise InputError("dataset has no system summaries")
        for label in sorted(by_system):
            evaluate(
                by_system[label], f"{dataset_name}:{label}",
                out_dir / _safe_name(label),
            )
    return 0


# ---------------------------------------------------------------- curve

def cmd_curve(args) -> int:
    _load_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    named_curves = []
    used: dict[str, int] = {}
    for report_path in args.reports:
        report = ingest.load_report(report_path)
        if not report.aggregate_cov:
            raise ComputeError(f"{report_path}: report has an empty curve")
        name = report.name or Path(report_path).stem
        base = _safe_name(name)
        used[base] = used.get(base, 0) + 1
        if used[base] > 1:
            base = f"{base}-{used[base]}"
        named_curves.append((name, list(report.aggregate_cov)))
        csv_path = out_dir / (base + ".curve.csv")
        ingest.write_curve_csv(report.aggregate_cov, csv_path)
        print(f"{name}: {csv_path}")
    if args.svg:
        svg_path = out_dir / "curves.svg"
        svg_path.write_text(plot.curve_svg(named_curves), encoding="utf-8")
        print(f"chart: {svg_path}")
    return 0


# ---------------------------------------------------------------- subset

def cmd_subset(args) -> int:
    _load_config(args)
    tau = _resolve(args, "tau", align_mod.DEFAULT_TAU, float)
    k = _resolve(args, "k", None, int)
    kind = _resolve(args, "summary_kind", "reference")
    if k is None:
        raise InputError("--k is required")

    topics = ingest.load_dataset(args.dataset)
    relations = ingest.load_alignments(args.alignments, tau=tau)
    manifest = subsetex.export_reduced_dataset(
        topics, relations, k, args.out,
        summary_kind=kind, system_name=args.system,
    )
    print(
        f"wrote {manifest.topics} topics with top-{k} coverage documents "
        f"-> {args.out}"
    )
    return 0


# ---------------------------------------------------------------- synth

_DESIGN_ALIASES = {
    "disjoint": "disjoint_uniform",
}


def cmd_synth(args) -> int:
    _load_config(args)
    seed = _resolve(args, "seed", 0, int)
    n_max = _resolve(args, "n_max", coverage.DEFAULT_N_MAX, int)
    design = _DESIGN_ALIASES.get(args.design, args.design)
    matrix = None
    if design == "custom":
        if not args.matrix:
            raise InputError("--design custom requires --matrix FILE")
        try:
            raw = json.loads(Path(args.matrix).read_text(encoding="utf-8"))
            matrix = tuple(tuple(int(v) for v in row) for row in raw)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise InputError(f"{args.matrix}: not a JSON 0/1 matrix: {exc}") from None
    config = synth.SynthConfig(
        topics=args.topics, n_docs=args.n, m_props=args.m, design=design,
        p=args.p, matrix=matrix, seed=seed, n_max=n_max,
    )
    topics, relations, expected = synth.generate(config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset_path = out_dir / "dataset.jsonl"
    alignments_path = out_dir / "alignments.jsonl"
    expected_path = out_dir / "expected.json"
    ingest.write_dataset(topics, dataset_path)
    ingest.write_alignments(relations, alignments_path)
    with open(expected_path, "w", encoding="utf-8") as handle:
        json.dump(ingest.report_to_dict(expected), handle, indent=2)
        handle.write("\n")
    print(
        f"synthesized {config.topics} topics (design={design}, seed={seed}), "
        f"expected AAC {expected.dataset_aac:.4f} -> {out_dir}"
    )
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disp",
        description="Coverage-curve dispersion scoring for multi-document "
                    "summaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_align = sub.add_parser("align", help="score summary-document proposition pairs")
    p_align.add_argument("dataset")
    p_align.add_argument("--out", required=True)
    p_align.add_argument("--scorer", choices=["lexical", "remote"])
    p_align.add_argument("--endpoint")
    p_align.add_argument("--tau", type=float)
    p_align.add_argument("--batch-size", dest="batch_size", type=int)
    p_align.add_argument("--stopwords", action="store_true",
                         help="drop stopwords in the lexical scorer")
    p_align.add_argument("--extractor", choices=["sentence", "precomputed", "external"])
    p_align.add_argument("--tuples", help="sidecar tuple file for --extractor external")
    p_align.add_argument("--min-tokens", dest="min_tokens", type=int)
    p_align.add_argument("--jobs", type=int)
    p_align.add_argument("--config")
    p_align.set_defaults(func=cmd_align)

    p_score = sub.add_parser("score", help="compute coverage curves and AAC")
    p_score.add_argument("dataset")
    p_score.add_argument("alignments")
    p_score.add_argument("--out-dir", dest="out_dir", required=True)
    p_score.add_argument("--n-max", dest="n_max", type=int)
    p_score.add_argument("--tau", type=float)
    p_score.add_argument("--summary-kind", dest="summary_kind",
                         choices=["reference", "system"])
    p_score.add_argument("--extractor", choices=["sentence", "precomputed", "external"])
    p_score.add_argument("--tuples", help="sidecar tuple file for --extractor external")
    p_score.add_argument("--min-tokens", dest="min_tokens", type=int)
    p_score.add_argument("--jobs", type=int)
    p_score.add_argument("--config")
    p_score.set_defaults(func=cmd_score)

    p_curve = sub.add_parser("curve", help="export cov_k curves as CSV/SVG")
    p_curve.add_argument("reports", nargs="+", help="report.json files")
    p_curve.add_argument("--out-dir", dest="out_dir", required=True)
    p_curve.add_argument("--svg", action="store_true")
    p_curve.add_argument("--config")
    p_curve.set_defaults(func=cmd_curve)

    p_subset = sub.add_parser("subset", help="export top-k coverage documents")
    p_subset.add_argument("dataset")
    p_subset.add_argument("alignments")
    p_subset.add_argument("--k", type=int)
    p_subset.add_argument("--out", required=True)
    p_subset.add_argument("--summary-kind", dest="summary_kind",
                          choices=["reference", "system"])
    p_subset.add_argument("--system", help="system name when --summary-kind system")
    p_subset.add_argument("--tau", type=float)
    p_subset.add_argument("--config")
    p_subset.set_defaults(func=cmd_subset)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--design", required=True,
                         choices=["single_doc", "disjoint", "geometric", "custom"])
    p_synth.add_argument("--topics", type=int, default=1)
    p_synth.add_argument("--n", type=int, default=4, help="documents per topic")
    p_synth.add_argument("--m", type=int, default=4, help="summary propositions")
    p_synth.add_argument("--p", type=float, default=0.5,
                         help="geometric decay parameter")
    p_synth.add_argument("--matrix", help="JSON coverage matrix for --design custom")
    p_synth.add_argument("--seed", type=int)
    p_synth.add_argument("--n-max", dest="n_max", type=int)
    p_synth.add_argument("--out-dir", dest="out_dir", required=True)
    p_synth.add_argument("--config")
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DispersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
