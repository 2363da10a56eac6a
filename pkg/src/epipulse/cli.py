"""Command-line pipeline over files, as a thin client of the service layer.

Every subcommand builds the same typed requests the HTTP service accepts.
By default they are dispatched in-process; with --server URL they are sent
to a running service instead. Post-stream subcommands (preprocess, filter,
detect) work in batches so corpora larger than memory stream through; the
output order always equals the input order regardless of worker count.

Exit codes: 0 success, 1 validation error, 2 I/O or endpoint failure.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import date
from typing import Callable, Iterator, Optional, TypeVar

import click
import httpx
from pydantic import ValidationError

from .config import ConfigError, PipelineConfig, load_config
from .detect import DetectorError, ExternalDetector
from .embed import EmbeddingError
from .jsonl import chunked, dump_line, iter_jsonl, open_in, open_out, read_jsonl
from .monitor import series_from_csv, series_to_csv
from .ontology import EventType, OntologyError
from .selfcheck import run_selfcheck
from .service import handlers
from .service import models as m

T = TypeVar("T")
R = TypeVar("R")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class CliError(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _fail_validation(msg: str) -> CliError:
    return CliError(msg, EXIT_VALIDATION)


def _fail_io(msg: str) -> CliError:
    return CliError(msg, EXIT_IO)


# --- backends -----------------------------------------------------------------

class LocalBackend:
    """In-process dispatch through the service handlers."""

    def __init__(self, config: PipelineConfig):
        self.state = handlers.ServiceState(config=config)

    def preprocess(self, req: m.PreprocessRequest) -> m.PreprocessResponse:
        return handlers.handle_preprocess(self.state, req)

    def filter(self, req: m.FilterRequest) -> m.FilterResponse:
        return handlers.handle_filter(self.state, req)

    def frequency(self, req: m.FrequencyRequest) -> m.FrequencyResponse:
        return handlers.handle_frequency(self.state, req)

    def sample(self, req: m.SampleRequest) -> m.SampleResponse:
        return handlers.handle_sample(self.state, req)

    def detect(self, req: m.DetectRequest, min_tier: str) -> m.DetectResponse:
        return handlers.handle_detect(self.state, req, min_tier=min_tier)

    def score(self, req: m.ScoreRequest) -> m.ScoreResponse:
        return handlers.handle_score(self.state, req)

    def kappa_table(self, req: m.KappaTableRequest) -> m.KappaResponse:
        return handlers.handle_kappa_table(self.state, req)

    def kappa_annotations(self, req: m.KappaAnnotationsRequest) -> m.KappaResponse:
        return handlers.handle_kappa_annotations(self.state, req)

    def coverage(self, req: m.CoverageRequest) -> m.CoverageResponse:
        return handlers.handle_coverage(self.state, req)

    def aggregate(self, req: m.AggregateRequest) -> m.AggregateResponse:
        return handlers.handle_aggregate(self.state, req)

    def warnings(self, req: m.WarningsRequest) -> m.WarningsResponse:
        return handlers.handle_warnings(self.state, req)

    def profile(self, req: m.ProfileRequest) -> m.ProfileResponse:
        return handlers.handle_profile(self.state, req)


class HttpBackend:
    """Dispatch to a running epipulse service."""

    def __init__(self, base_url: str, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self._client = httpx.Client(timeout=timeout)

    def _post(self, path: str, payload, response_model, params: Optional[dict] = None):
        try:
            resp = self._client.post(
                self.base_url + path,
                json=payload.model_dump(mode="json", exclude_none=True),
                params=params,
            )
        except httpx.HTTPError as e:
            raise _fail_io(f"service unreachable at {self.base_url}: {e}")
        if resp.status_code in (400, 422):
            raise _fail_validation(f"service rejected request: {resp.text}")
        if resp.status_code != 200:
            raise _fail_io(f"service error HTTP {resp.status_code}: {resp.text}")
        return response_model.model_validate(resp.json())

    def preprocess(self, req):
        return self._post("/preprocess", req, m.PreprocessResponse)

    def filter(self, req):
        return self._post("/filter", req, m.FilterResponse)

    def frequency(self, req):
        return self._post("/frequency", req, m.FrequencyResponse)

    def sample(self, req):
        return self._post("/sample", req, m.SampleResponse)

    def detect(self, req, min_tier: str):
        return self._post("/detect", req, m.DetectResponse, params={"min_tier": min_tier})

    def score(self, req):
        return self._post("/score", req, m.ScoreResponse)

    def kappa_table(self, req):
        return self._post("/kappa", req, m.KappaResponse)

    def kappa_annotations(self, req):
        return self._post("/kappa/annotations", req, m.KappaResponse)

    def coverage(self, req):
        return self._post("/coverage", req, m.CoverageResponse)

    def aggregate(self, req):
        return self._post("/aggregate", req, m.AggregateResponse)

    def warnings(self, req):
        return self._post("/warnings", req, m.WarningsResponse)

    def profile(self, req):
        return self._post("/profile", req, m.ProfileResponse)


# --- shared plumbing ------------------------------------------------------------

class Context:
    def __init__(self, config_path: Optional[str], server: Optional[str], workers: Optional[int], batch_size: Optional[int]):
        self.config = load_config(config_path)
        if workers is not None:
            self.config.workers = workers
        if batch_size is not None:
            self.config.batch_size = batch_size
        self.server = server
        self._backend = None

    @property
    def workers(self) -> int:
        return self.config.workers or os.cpu_count() or 1

    @property
    def batch_size(self) -> int:
        return self.config.batch_size

    def backend(self, ontology: Optional[str] = None, embed_overrides: Optional[dict] = None):
        if self.server:
            if ontology is not None:
                raise _fail_validation("--ontology cannot be combined with --server (the server owns its ontology)")
            if embed_overrides:
                raise _fail_validation("embedding flags cannot be combined with --server")
            return HttpBackend(self.server)
        config = self.config.model_copy(deep=True)
        if ontology is not None:
            config.ontology_path = ontology
        for key, value in (embed_overrides or {}).items():
            setattr(config.embedding, key, value)
        return LocalBackend(config)

    def resolve_io(self, inp: Optional[str], out: Optional[str]) -> tuple[str, str]:
        return (
            inp or self.config.io.input or "-",
            out or self.config.io.output or "-",
        )


def _map_batches(
    fn: Callable[[list[T]], R],
    batches: Iterator[list[T]],
    workers: int,
) -> Iterator[R]:
    """Apply fn to each batch with bounded parallelism, preserving order."""
    if workers <= 1:
        for batch in batches:
            yield fn(batch)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for window in chunked(batches, workers):
            yield from pool.map(fn, window)


def _run_guarded(fn: Callable[[], int]) -> int:
    try:
        return fn()
    except CliError:
        raise
    except (ConfigError, OntologyError, ValidationError, ValueError) as e:
        raise _fail_validation(str(e))
    except (EmbeddingError, DetectorError) as e:
        raise _fail_io(str(e))
    except OSError as e:
        raise _fail_io(str(e))


def _log(msg: str) -> None:
    click.echo(msg, err=True)


def _write_json(path: str, payload) -> None:
    with open_out(path) as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
        fh.write("\n")


def _as_clean_model(rec: dict) -> m.CleanPostModel:
    """Read a post record, tolerating keys added by later pipeline stages."""
    base = {k: v for k, v in rec.items() if k not in ("filter", "sampling")}
    return m.CleanPostModel.model_validate(base)


# --- the command group ------------------------------------------------------------

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=str, default=None, help="Pipeline config JSON file.")
@click.option("--server", type=str, default=None, help="URL of a running epipulse service; default is in-process.")
@click.option("--workers", type=int, default=None, help="Parallel workers (default: CPU count). Output order is unaffected.")
@click.option("--batch-size", type=int, default=None, help="Records per request batch.")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], server: Optional[str], workers: Optional[int], batch_size: Optional[int]) -> None:
    """Epidemic event extraction and early-warning analytics over post streams."""
    try:
        ctx.obj = Context(config_path, server, workers, batch_size)
    except ConfigError as e:
        raise _fail_validation(str(e))


@cli.command()
@click.option("--in", "inp", type=str, default=None, help="Raw posts JSONL ('-' for stdin).")
@click.option("--out", type=str, default=None, help="Clean posts JSONL ('-' for stdout).")
@click.pass_obj
def preprocess(ctx: Context, inp: Optional[str], out: Optional[str]) -> None:
    """Normalize raw posts (anonymize, strip emoji, split hashtags, tokenize)."""

    def run() -> int:
        backend = ctx.backend()
        inp_path, out_path = ctx.resolve_io(inp, out)
        seen: set[str] = set()
        total = dropped = 0
        with open_in(inp_path) as fin, open_out(out_path) as fout:
            records = iter_jsonl(fin, source=inp_path)

            def one(batch: list[dict]) -> m.PreprocessResponse:
                req = m.PreprocessRequest(posts=[m.RawPostModel.model_validate(r) for r in batch])
                return backend.preprocess(req)

            for resp in _map_batches(one, chunked(records, ctx.batch_size), ctx.workers):
                for post in resp.posts:
                    if post.id in seen:
                        raise _fail_validation(f"duplicate post id {post.id!r}")
                    seen.add(post.id)
                    total += 1
                    dropped += post.dropped is not None
                    fout.write(dump_line(post.model_dump(mode="json", exclude_none=True)))
                    fout.write("\n")
        _log(f"preprocess: {total} posts ({dropped} marked dropped)")
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command(name="filter")
@click.option("--in", "inp", type=str, default=None, help="Clean posts JSONL.")
@click.option("--out", type=str, default=None, help="Retained posts JSONL with filter tags.")
@click.option("--ontology", type=str, default=None, help="Ontology JSON (default: bundled).")
@click.option("--threshold", type=float, default=None, help="Similarity cut; default depends on provider kind.")
@click.option("--provider", "provider_kind", type=click.Choice(["builtin-hash", "remote"]), default=None)
@click.option("--endpoint", type=str, default=None, help="Remote embedding service URL.")
@click.option("--dimension", type=int, default=None, help="Builtin embedder dimension.")
@click.option("--frequency-out", type=str, default=None, help="Also write a keyword-frequency JSON report.")
@click.option("--frequency-csv", type=str, default=None, help="Also write the frequency report as CSV.")
@click.pass_obj
def filter_cmd(
    ctx: Context,
    inp: Optional[str],
    out: Optional[str],
    ontology: Optional[str],
    threshold: Optional[float],
    provider_kind: Optional[str],
    endpoint: Optional[str],
    dimension: Optional[int],
    frequency_out: Optional[str],
    frequency_csv: Optional[str],
) -> None:
    """Keep posts whose embedding similarity to any event seed clears the threshold."""

    def run() -> int:
        overrides: dict = {}
        if provider_kind is not None:
            overrides["kind"] = provider_kind
        if endpoint is not None:
            overrides["endpoint"] = endpoint
        if dimension is not None:
            overrides["dimension"] = dimension
        backend = ctx.backend(ontology=ontology, embed_overrides=overrides)
        inp_path, out_path = ctx.resolve_io(inp, out)
        retained = rejected = 0
        freq_counts = {e.value: 0 for e in EventType}
        freq_total = 0
        want_freq = frequency_out is not None or frequency_csv is not None
        with open_in(inp_path) as fin, open_out(out_path) as fout:
            records = iter_jsonl(fin, source=inp_path)

            def one(batch: list[dict]):
                posts = [m.CleanPostModel.model_validate(r) for r in batch]
                resp = backend.filter(m.FilterRequest(posts=posts, threshold=threshold))
                freq = backend.frequency(m.FrequencyRequest(posts=posts)) if want_freq else None
                return resp, freq

            for resp, freq in _map_batches(one, chunked(records, ctx.batch_size), ctx.workers):
                retained += len(resp.retained)
                rejected += resp.rejected_count
                for post in resp.retained:
                    fout.write(dump_line(post.model_dump(mode="json", exclude_none=True)))
                    fout.write("\n")
                if freq is not None:
                    freq_total += freq.total_posts
                    for k, v in freq.counts.items():
                        freq_counts[k] += v
        if frequency_out is not None:
            _write_json(frequency_out, {"total_posts": freq_total, "counts": freq_counts})
        if frequency_csv is not None:
            with open_out(frequency_csv) as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["event", "count"])
                for e in EventType:
                    writer.writerow([e.value, freq_counts[e.value]])
        _log(f"filter: retained {retained}, rejected {rejected}")
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.option("--in", "inp", type=str, default=None, help="Tagged posts JSONL (filter output).")
@click.option("--out", type=str, default=None, help="Sampled posts JSONL.")
@click.option("--mode", type=click.Choice(["uniform", "random"]), default=None)
@click.option("--n", type=int, default=None, help="Sample size.")
@click.option("--seed", type=int, default=None, help="RNG seed (PCG64).")
@click.pass_obj
def sample(ctx: Context, inp: Optional[str], out: Optional[str], mode: Optional[str], n: Optional[int], seed: Optional[int]) -> None:
    """Draw an event-balanced (or plain random) sample from a tagged pool."""

    def run() -> int:
        backend = ctx.backend()
        inp_path, out_path = ctx.resolve_io(inp, out)
        effective_n = n if n is not None else ctx.config.sampling.n
        if effective_n is None:
            raise _fail_validation("sample size required (--n or config sampling.n)")
        effective_mode = mode or ctx.config.sampling.mode
        effective_seed = seed if seed is not None else ctx.config.sampling.seed
        records = read_jsonl(inp_path)
        pool = []
        for rec in records:
            if "filter" not in rec:
                raise _fail_validation(
                    f"post {rec.get('id')!r} has no filter tag; run `epipulse filter` first"
                )
            pool.append(m.FilteredPostModel.model_validate(rec))
        plan = m.SamplePlanModel(n=effective_n, mode=effective_mode, seed=effective_seed)
        resp = backend.sample(m.SampleRequest(pool=pool, plan=plan))
        plan_rec = {"mode": resp.plan.mode, "n": resp.plan.n, "seed": resp.plan.seed}
        with open_out(out_path) as fout:
            for post in resp.posts:
                rec = post.model_dump(mode="json", exclude_none=True)
                rec["sampling"] = plan_rec
                fout.write(dump_line(rec))
                fout.write("\n")
        _log(f"sample: drew {len(resp.posts)} of {len(pool)} (mode={effective_mode}, seed={effective_seed})")
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.option("--in", "inp", type=str, default=None, help="Clean posts JSONL.")
@click.option("--out", type=str, default=None, help="Predictions JSONL.")
@click.option("--ontology", type=str, default=None, help="Ontology JSON (default: bundled).")
@click.option("--min-tier", type=click.Choice(["high", "medium", "low"]), default="low")
@click.option("--detector", type=click.Choice(["keyword", "external"]), default="keyword")
@click.option("--endpoint", type=str, default=None, help="External detector URL (detector=external).")
@click.option("--name", "detector_name", type=str, default=None, help="Detector name recorded in the output.")
@click.pass_obj
def detect(
    ctx: Context,
    inp: Optional[str],
    out: Optional[str],
    ontology: Optional[str],
    min_tier: str,
    detector: str,
    endpoint: Optional[str],
    detector_name: Optional[str],
) -> None:
    """Emit trigger-level event predictions for each post."""

    def run() -> int:
        inp_path, out_path = ctx.resolve_io(inp, out)
        total = mentions = 0
        with open_in(inp_path) as fin, open_out(out_path) as fout:
            records = iter_jsonl(fin, source=inp_path)

            if detector == "external":
                if not endpoint:
                    raise _fail_validation("--endpoint is required with --detector external")
                name = detector_name or "external"
                client = ExternalDetector(endpoint, detector_name=name)

                def one(batch: list[dict]) -> list[dict]:
                    posts = [_as_clean_model(r).to_core() for r in batch]
                    kept = [p for p in posts if p.dropped is None]
                    return [ps.to_record() for ps in client.detect(kept)]

            else:
                backend = ctx.backend(ontology=ontology)
                name = detector_name or "keyword"

                def one(batch: list[dict]) -> list[dict]:
                    posts = [_as_clean_model(r) for r in batch]
                    kept = [p for p in posts if p.dropped is None]
                    req = m.DetectRequest(
                        posts=[m.DetectInPostModel(id=p.id, text=p.text) for p in kept]
                    )
                    resp = backend.detect(req, min_tier=min_tier)
                    out_recs = []
                    for pred in resp.predictions:
                        rec = pred.model_dump(mode="json")
                        rec["detector"] = name
                        out_recs.append(rec)
                    return out_recs

            for out_recs in _map_batches(one, chunked(records, ctx.batch_size), ctx.workers):
                for rec in out_recs:
                    total += 1
                    mentions += len(rec.get("mentions", []))
                    fout.write(dump_line(rec))
                    fout.write("\n")
        _log(f"detect: {mentions} mentions over {total} posts")
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.option("--gold", "gold_path", type=str, required=True, help="Gold annotations JSONL.")
@click.option("--pred", "pred_path", type=str, required=True, help="Predictions JSONL.")
@click.option("--match", type=click.Choice(["span", "text"]), default="span", help="Exact-span (default) or trigger-text matching.")
@click.option("--posts", "posts_path", type=str, default=None, help="Posts JSONL for span validation.")
@click.option("--offset-base", type=click.Choice(["normalized", "raw"]), default="normalized", help="Which text the gold offsets index (with --posts).")
@click.option("--out", type=str, default="-", help="Report JSON output.")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json")
@click.pass_obj
def score(
    ctx: Context,
    gold_path: str,
    pred_path: str,
    match: str,
    posts_path: Optional[str],
    offset_base: str,
    out: str,
    fmt: str,
) -> None:
    """Score predictions against gold: Tri-I and Tri-C precision/recall/F1."""

    def run() -> int:
        backend = ctx.backend()
        gold_records = read_jsonl(gold_path)
        pred_records = read_jsonl(pred_path)
        if posts_path is not None:
            from .evaluate import GoldCorpus

            texts = {r["id"]: r["text"] for r in read_jsonl(posts_path)}
            problems = GoldCorpus.from_records(gold_records).validate_spans(texts)
            if problems:
                head = "; ".join(problems[:5])
                raise _fail_validation(
                    f"gold spans do not match the {offset_base} post text ({len(problems)} problems): {head}"
                )
        req = m.ScoreRequest(
            gold=[m.GoldEntryModel.model_validate(r) for r in gold_records],
            predictions=[m.PredictionModel.model_validate(r) for r in pred_records],
            match=match,
        )
        resp = backend.score(req)
        if fmt == "table":
            with open_out(out) as fh:
                fh.write(_report_table(resp))
        else:
            _write_json(out, resp.model_dump(mode="json"))
        return EXIT_OK

    sys.exit(_run_guarded(run))


def _report_table(resp: m.ScoreResponse) -> str:
    lines = [
        f"{'metric':<10}{'precision':>12}{'recall':>12}{'f1':>12}",
        f"{'tri-i':<10}{resp.tri_i.precision:>12.4f}{resp.tri_i.recall:>12.4f}{resp.tri_i.f1:>12.4f}",
        f"{'tri-c':<10}{resp.tri_c.precision:>12.4f}{resp.tri_c.recall:>12.4f}{resp.tri_c.f1:>12.4f}",
        "",
        f"{'event':<10}{'recall':>12}",
    ]
    for e in EventType:
        lines.append(f"{e.value:<10}{resp.per_event_recall.get(e.value, 0.0):>12.4f}")
    counts = resp.counts
    lines.append("")
    lines.append(
        f"gold={counts['gold']} predicted={counts['predicted']} "
        f"matched_i={counts['matched_i']} matched_c={counts['matched_c']}"
    )
    return "\n".join(lines) + "\n"


@cli.command()
@click.option("--table", "table_path", type=str, default=None, help="CSV of item x category rating counts.")
@click.option("--n-raters", type=int, default=None, help="Raters per item (default: inferred from row sums).")
@click.option("--categories", type=str, default=None, help="Comma-separated category names.")
@click.option("--annotations", "annotation_paths", type=str, multiple=True, help="Two or more per-annotator gold JSONL files.")
@click.option("--out", type=str, default="-")
@click.pass_obj
def kappa(
    ctx: Context,
    table_path: Optional[str],
    n_raters: Optional[int],
    categories: Optional[str],
    annotation_paths: tuple[str, ...],
    out: str,
) -> None:
    """Fleiss' kappa from a rating table or from per-annotator files."""

    def run() -> int:
        backend = ctx.backend()
        if (table_path is None) == (not annotation_paths):
            raise _fail_validation("provide exactly one of --table or --annotations")
        if table_path is not None:
            with open_in(table_path) as fh:
                rows = [row for row in csv.reader(fh) if row]
            try:
                table = [[int(x) for x in row] for row in rows]
            except ValueError:
                raise _fail_validation(f"{table_path}: table must be all integers")
            raters = n_raters
            if raters is None:
                sums = {sum(r) for r in table}
                if len(sums) != 1:
                    raise _fail_validation(
                        f"{table_path}: row sums differ ({sorted(sums)}); pass --n-raters"
                    )
                raters = sums.pop()
            cats = categories.split(",") if categories else None
            resp = backend.kappa_table(
                m.KappaTableRequest(table=table, n_raters=raters, categories=cats)
            )
        else:
            if len(annotation_paths) < 2:
                raise _fail_validation("--annotations needs at least two files")
            raters_entries = [
                [m.GoldEntryModel.model_validate(r) for r in read_jsonl(p)]
                for p in annotation_paths
            ]
            resp = backend.kappa_annotations(m.KappaAnnotationsRequest(annotations=raters_entries))
        _write_json(out, resp.model_dump(mode="json"))
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.option("--gold", "gold_path", type=str, required=True, help="Gold annotations JSONL.")
@click.option("--universe", "universe_path", type=str, default=None, help="Post id list, one per line.")
@click.option("--posts", "posts_path", type=str, default=None, help="Posts JSONL defining the universe.")
@click.option("--out", type=str, default="-")
@click.pass_obj
def coverage(ctx: Context, gold_path: str, universe_path: Optional[str], posts_path: Optional[str], out: str) -> None:
    """Fraction of universe posts that carry at least one gold mention."""

    def run() -> int:
        backend = ctx.backend()
        if (universe_path is None) == (posts_path is None):
            raise _fail_validation("provide exactly one of --universe or --posts")
        if universe_path is not None:
            with open_in(universe_path) as fh:
                universe = [line.strip() for line in fh if line.strip()]
        else:
            universe = [r["id"] for r in read_jsonl(posts_path)]
        req = m.CoverageRequest(
            gold=[m.GoldEntryModel.model_validate(r) for r in read_jsonl(gold_path)],
            universe=universe,
        )
        resp = backend.coverage(req)
        _write_json(out, resp.model_dump(mode="json"))
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.option("--pred", "pred_path", type=str, required=True, help="Predictions JSONL.")
@click.option("--posts", "posts_path", type=str, required=True, help="Posts JSONL supplying timestamps.")
@click.option("--out", type=str, default="-", help="Daily series CSV.")
@click.option("--rolling", "rolling_w", type=int, default=None, help="Also write a rolling-mean CSV with this window.")
@click.option("--rolling-out", type=str, default=None)
@click.option("--cases", "cases_path", type=str, default=None, help="Reported-cases CSV (date,cases) merged for plotting.")
@click.pass_obj
def aggregate(
    ctx: Context,
    pred_path: str,
    posts_path: str,
    out: str,
    rolling_w: Optional[int],
    rolling_out: Optional[str],
    cases_path: Optional[str],
) -> None:
    """Aggregate predicted mentions into per-event daily counts."""

    def run() -> int:
        backend = ctx.backend()
        preds = [m.PredictionModel.model_validate(r) for r in read_jsonl(pred_path)]
        timestamps = {r["id"]: r["created_at"] for r in read_jsonl(posts_path)}
        resp = backend.aggregate(m.AggregateRequest(predictions=preds, timestamps=timestamps))
        series = resp.series.to_core()
        text = series_to_csv(series)
        if cases_path is not None:
            text = _merge_cases(text, cases_path)
        with open_out(out) as fh:
            fh.write(text)
        if rolling_w is not None:
            from .monitor import rolling_mean

            if series.empty:
                raise _fail_validation("cannot compute a rolling mean of an empty series")
            values = rolling_mean(list(series.overall), rolling_w)
            dates = series.dates()[rolling_w - 1 :]
            with open_out(rolling_out or "-") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["date", "rolling_mean"])
                for d, v in zip(dates, values):
                    writer.writerow([d.isoformat(), f"{v:.6f}"])
        if series.empty:
            _log("aggregate: no mentions; empty series")
        else:
            _log(f"aggregate: {sum(series.overall)} mentions over {len(series)} days from {series.start_date}")
        return EXIT_OK

    sys.exit(_run_guarded(run))


def _merge_cases(series_csv: str, cases_path: str) -> str:
    with open_in(cases_path) as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows or [c.strip().lower() for c in rows[0]] != ["date", "cases"]:
        raise _fail_validation(f"{cases_path}: expected a CSV with header 'date,cases'")
    by_date = {}
    for row in rows[1:]:
        by_date[date.fromisoformat(row[0]).isoformat()] = row[1]
    out_rows = []
    reader = csv.reader(io.StringIO(series_csv))
    header = next(reader)
    out_rows.append(header + ["reported_cases"])
    for row in reader:
        if row:
            out_rows.append(row + [by_date.get(row[0], "")])
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(out_rows)
    return buf.getvalue()


@cli.command()
@click.option("--series", "series_path", type=str, required=True, help="Daily series CSV (aggregate output).")
@click.option("--out", type=str, default="-", help="Warnings JSON array.")
@click.option("--w", type=int, default=None, help="Rolling window days.")
@click.option("--b", type=int, default=None, help="Baseline window days.")
@click.option("--k", type=float, default=None, help="Baseline standard deviations to clear.")
@click.option("--min-events", type=float, default=None, help="Absolute rolling-mean floor.")
@click.option("--cooldown", type=int, default=None, help="Days merging consecutive firings into one episode.")
@click.pass_obj
def warn(
    ctx: Context,
    series_path: str,
    out: str,
    w: Optional[int],
    b: Optional[int],
    k: Optional[float],
    min_events: Optional[float],
    cooldown: Optional[int],
) -> None:
    """Scan a daily series and report early-warning episodes."""

    def run() -> int:
        backend = ctx.backend()
        defaults = ctx.config.warning
        rule = m.RuleModel(
            w=w if w is not None else defaults.w,
            b=b if b is not None else defaults.b,
            k=k if k is not None else defaults.k,
            min_events=min_events if min_events is not None else defaults.min_events,
            cooldown=cooldown if cooldown is not None else defaults.cooldown,
        )
        with open_in(series_path) as fh:
            series = series_from_csv(fh.read())
        resp = backend.warnings(
            m.WarningsRequest(series=m.SeriesModel.from_core(series), rule=rule)
        )
        _write_json(out, [wm.model_dump(mode="json") for wm in resp.warnings])
        _log(f"warn: {len(resp.warnings)} episode(s)")
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.option("--pred", "pred_path", type=str, required=True, help="Predictions JSONL.")
@click.option("--out", type=str, default="-", help="Profile JSON.")
@click.option("--csv", "csv_path", type=str, default=None, help="Also write the profile as CSV.")
@click.pass_obj
def profile(ctx: Context, pred_path: str, out: str, csv_path: Optional[str]) -> None:
    """Percentage of extracted mentions per event type."""

    def run() -> int:
        backend = ctx.backend()
        preds = [m.PredictionModel.model_validate(r) for r in read_jsonl(pred_path)]
        resp = backend.profile(m.ProfileRequest(predictions=preds))
        _write_json(out, resp.model_dump(mode="json"))
        if csv_path is not None:
            with open_out(csv_path) as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["event", "share_pct"])
                for e in EventType:
                    writer.writerow([e.value, f"{resp.shares.get(e.value, 0.0):.6f}"])
        return EXIT_OK

    sys.exit(_run_guarded(run))


@cli.command()
@click.pass_obj
def selfcheck(ctx: Context) -> None:
    """Run the bundled worked-example suite and report pass/fail per check."""

    def run() -> int:
        ok = run_selfcheck(report=lambda line: click.echo(line))
        if not ok:
            raise _fail_validation("selfcheck failed")
        return EXIT_OK

    sys.exit(_run_guarded(run))


def main(argv: Optional[list[str]] = None) -> None:
    """Console entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        sys.exit(e.exit_code)
    except click.UsageError as e:
        e.show()
        sys.exit(EXIT_VALIDATION)
    except click.ClickException as e:
        e.show()
        sys.exit(e.exit_code)
    except click.exceptions.Abort:
        sys.exit(EXIT_VALIDATION)


if __name__ == "__main__":
    main()
