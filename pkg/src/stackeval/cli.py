"""Command-line pipeline: build-corpus, generate, eval, report, stats.

Option precedence is flags > config file > built-in defaults. Every command
that writes a directory of outputs also writes a manifest.json capturing the
effective config, input checksums, and a deterministic run id.
"""

from __future__ import annotations

import codecs
import json
import os
import sys

import click
import requests

from stackeval import corpus as so
from stackeval import metrics, tasks
from stackeval.manifest import build_manifest
from stackeval.sandbox import (
    ExecLimits,
    SandboxJob,
    load_results,
    run_batch,
    write_results,
)

DEFAULT_GATEWAY = "http://127.0.0.1:8763"

DEFAULT_KS = {"humaneval": (1, 10, 100), "mbpp": (1, 10, 80)}

VARIANTS = {v.value: v for v in so.ModalityVariant}


class Settings:
    """Global options plus the parsed config file, shared via ctx.obj."""

    def __init__(self, config: dict, workers: int | None, seed: int | None):
        self.config = config
        self.workers = workers
        self.seed = seed

    def resolve(self, section: str, name: str, flag_value, default):
        if flag_value is not None:
            return flag_value
        sect = self.config.get(section, {})
        if isinstance(sect, dict) and name in sect:
            return sect[name]
        return default

    def resolve_workers(self, flag_value) -> int:
        if flag_value is not None:
            return flag_value
        if self.workers is not None:
            return self.workers
        return int(self.config.get("workers", 1))

    def resolve_seed(self) -> int | None:
        if self.seed is not None:
            return self.seed
        seed = self.config.get("seed")
        return int(seed) if seed is not None else None


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith((".yaml", ".yml")):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise click.ClickException(f"config file {path} must hold a mapping")
    return data


def _unescape(text: str) -> str:
    # Lets shells pass "\n" / "\t" literally in separator flags.
    if "\\" in text:
        return codecs.decode(text, "unicode_escape")
    return text


def _parse_float_list(raw) -> tuple[float, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(float(part) for part in raw)
    return tuple(float(part) for part in str(raw).split(",") if part.strip())


def _parse_int_list(raw) -> tuple[int, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(int(part) for part in raw)
    return tuple(int(part) for part in str(raw).split(",") if part.strip())


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML or JSON config file; flags override it.")
@click.option("--workers", type=int, default=None, help="Worker pool size.")
@click.option("--seed", type=int, default=None,
              help="Sampling seed forwarded to the generation gateway.")
@click.pass_context
def main(ctx, config_path, workers, seed):
    """Bimodal corpus construction and code-generation evaluation."""
    ctx.obj = Settings(_load_config(config_path), workers, seed)


# -- build-corpus -------------------------------------------------------------


@main.command("build-corpus")
@click.argument("dump", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", default=None, help="Output directory [corpus_out].")
@click.option("--variants", default=None,
              help="Comma list of full,no_code,no_nl [all three].")
@click.option("--tag", "exact_tags", multiple=True,
              help="Exact tag to keep (repeatable).")
@click.option("--tag-prefix", "tag_prefixes", multiple=True,
              help="Tag prefix to keep (repeatable) [python].")
@click.option("--separator", default=None,
              help=r"Separator between title/body/answers [\n].")
@click.option("--min-answers", type=int, default=None,
              help="Minimum answers per kept question [1].")
@click.option("--inline-code-as-code", is_flag=True, default=False,
              help="Treat inline <code> spans as the code modality.")
@click.option("--pack/--no-pack", "do_pack", default=True,
              help="Also emit fixed-window packed files [pack].")
@click.option("--window-size", type=int, default=None, help="Tokens per window [1024].")
@click.option("--min-fill", type=int, default=None,
              help="Minimum fill for the final partial window [window/2].")
@click.option("--record-separator", default=None,
              help="Document separator token for packing [<|endoftext|>].")
@click.pass_obj
def cmd_build_corpus(settings: Settings, dump, out_dir, variants, exact_tags,
                     tag_prefixes, separator, min_answers, inline_code_as_code,
                     do_pack, window_size, min_fill, record_separator):
    """Build training corpora (and packed windows) from a posts dump."""
    out_dir = settings.resolve("build_corpus", "out_dir", out_dir, "corpus_out")
    variants = settings.resolve("build_corpus", "variants", variants,
                                "full,no_code,no_nl")
    separator = _unescape(
        settings.resolve("build_corpus", "separator", separator, "\n"))
    min_answers = settings.resolve("build_corpus", "min_answers", min_answers, 1)
    window_size = settings.resolve("build_corpus", "window_size", window_size,
                                   so.DEFAULT_WINDOW_SIZE)
    min_fill = settings.resolve("build_corpus", "min_fill", min_fill, None)
    record_separator = settings.resolve("build_corpus", "record_separator",
                                        record_separator, so.DEFAULT_SEPARATOR)

    try:
        chosen = [VARIANTS[name.strip()] for name in variants.split(",") if name.strip()]
    except KeyError as exc:
        raise click.ClickException(f"unknown variant {exc}; choose from full,no_code,no_nl")
    if not chosen:
        raise click.ClickException("no variants selected")

    rule = so.TagRule(exact=tuple(exact_tags),
                      prefixes=tuple(tag_prefixes) or ("python",))
    os.makedirs(out_dir, exist_ok=True)

    dump_counters = so.DumpCounters()
    align_counters = so.AlignCounters()
    threads = list(so.filter_and_align(
        so.parse_dump(dump, dump_counters), rule, align_counters,
        min_answers=min_answers))

    all_records: list[so.TrainingRecord] = []
    for variant in chosen:
        records = [
            so.build_record(thread, variant, separator, inline_code_as_code)
            for thread in threads
        ]
        all_records.extend(records)
        corpus_path = os.path.join(out_dir, f"corpus_{variant.value}.jsonl")
        with open(corpus_path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record.as_dict()) + "\n")
        click.echo(f"wrote {len(records)} records to {corpus_path}")

        if do_pack:
            pack_stats = so.PackStats()
            windows_path = os.path.join(out_dir, f"windows_{variant.value}.jsonl")
            with open(windows_path, "w", encoding="utf-8") as fh:
                for window in so.pack_windows(records, window_size, min_fill,
                                              record_separator, pack_stats):
                    fh.write(json.dumps(window.as_dict()) + "\n")
            click.echo(f"wrote {pack_stats.windows} windows to {windows_path} "
                       f"({pack_stats.tokens_dropped_tail} tail tokens dropped)")

    stats = so.corpus_stats(all_records,
                            answer_count=align_counters.answers_kept,
                            skipped_rows=dump_counters.skipped_rows)
    stats_path = os.path.join(out_dir, "stats.json")
    payload = stats.as_dict()
    payload["parse_counters"] = dump_counters.as_dict()
    payload["align_counters"] = align_counters.as_dict()
    with open(stats_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

    config = {
        "command": "build-corpus",
        "variants": [v.value for v in chosen],
        "separator": separator,
        "tag_exact": list(exact_tags),
        "tag_prefixes": list(rule.prefixes),
        "min_answers": min_answers,
        "inline_code_as_code": inline_code_as_code,
        "pack": do_pack,
        "window_size": window_size,
        "min_fill": min_fill if min_fill is not None else window_size // 2,
        "record_separator": record_separator,
    }
    build_manifest(config, [dump], sys.executable).save(
        os.path.join(out_dir, "manifest.json"))
    click.echo(f"stats: {stats.as_dict()}")


# -- generate -----------------------------------------------------------------


def _existing_triples(path: str) -> set[tuple[str, float, int]]:
    if not os.path.exists(path):
        return set()
    present = set()
    for comp in tasks.load_completions(path):
        present.add((comp.task_id, comp.temperature, comp.sample_index))
    return present


@main.command("generate")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--suite-kind", type=click.Choice(["humaneval", "mbpp"]),
              required=True)
@click.option("--gateway", default=None, help=f"Gateway base URL [{DEFAULT_GATEWAY}].")
@click.option("--temperatures", default=None, help="Comma list [0.2,0.6,0.8].")
@click.option("--top-p", type=float, default=None, help="Nucleus threshold [0.95].")
@click.option("--n", "num_samples", type=int, default=None,
              help="Samples per task per temperature [200].")
@click.option("--max-new-tokens", type=int, default=None, help="[256]")
@click.option("--preamble", default=None,
              help="NL preamble prepended to every prompt [empty].")
@click.option("--out", "out_path", default=None,
              help="Completions JSONL (appended for resume) [completions.jsonl].")
@click.option("--retries", type=int, default=None, help="Retries per request [3].")
@click.option("--request-timeout", type=float, default=None,
              help="Seconds per gateway request [120].")
@click.pass_obj
def cmd_generate(settings: Settings, suite_path, suite_kind, gateway,
                 temperatures, top_p, num_samples, max_new_tokens, preamble,
                 out_path, retries, request_timeout):
    """Sample completions for every task from the generation gateway."""
    gateway = settings.resolve("generate", "gateway", gateway, DEFAULT_GATEWAY)
    temperatures = settings.resolve("generate", "temperatures", temperatures,
                                    "0.2,0.6,0.8")
    top_p = settings.resolve("generate", "top_p", top_p, tasks.DEFAULT_TOP_P)
    num_samples = settings.resolve("generate", "n", num_samples,
                                   tasks.DEFAULT_NUM_SAMPLES)
    max_new_tokens = settings.resolve("generate", "max_new_tokens",
                                      max_new_tokens, 256)
    preamble = settings.resolve("generate", "preamble", preamble, "")
    out_path = settings.resolve("generate", "out", out_path, "completions.jsonl")
    retries = settings.resolve("generate", "retries", retries, 3)
    request_timeout = settings.resolve("generate", "request_timeout",
                                       request_timeout, 120.0)
    temps = _parse_float_list(temperatures)
    seed = settings.resolve_seed()

    suite = tasks.Suite(suite_kind)
    task_list = tasks.load_suite(suite_path, suite)
    gateway = gateway.rstrip("/")

    try:
        health = requests.get(gateway + "/health", timeout=10)
        health.raise_for_status()
    except requests.RequestException as exc:
        raise click.ClickException(f"gateway {gateway} unreachable: {exc}")

    present = _existing_triples(out_path)
    stops = tasks.default_stop_sequences(suite)
    issued = 0
    with open(out_path, "a", encoding="utf-8") as fh:
        for task in task_list:
            prompt = tasks.build_prompt(task, preamble)
            for temp in temps:
                needed = [i for i in range(num_samples)
                          if (task.task_id, temp, i) not in present]
                if not needed:
                    continue
                payload = {
                    "prompt": prompt,
                    "n": len(needed),
                    "temperature": temp,
                    "top_p": top_p,
                    "max_new_tokens": max_new_tokens,
                    "stop_sequences": list(stops),
                }
                if seed is not None:
                    payload["seed"] = seed
                texts, error = _request_completions(
                    gateway, payload, retries, request_timeout)
                issued += 1
                for idx, text in zip(needed, texts):
                    record = tasks.Completion(
                        task_id=task.task_id, sample_index=idx,
                        temperature=temp, text=text, top_p=top_p).as_dict()
                    if error:
                        record["error"] = error
                    fh.write(json.dumps(record) + "\n")
                fh.flush()
    click.echo(f"issued {issued} gateway requests; completions in {out_path}")


def _request_completions(gateway: str, payload: dict, retries: int,
                         timeout: float) -> tuple[list[str], str | None]:
    """Returns (texts, error). On unrecoverable failure the texts are empty
    strings so every (task, T, index) triple still gets a line."""
    last_error = "unknown"
    for _ in range(max(1, retries)):
        try:
            resp = requests.post(gateway + "/generate", json=payload,
                                 timeout=timeout)
        except requests.RequestException as exc:
            last_error = f"request failed: {exc}"
            continue
        if resp.status_code == 200:
            body = resp.json()
            return [c["text"] for c in body["completions"]], None
        try:
            code = resp.json().get("error", {}).get("code", "")
        except ValueError:
            code = ""
        last_error = f"http {resp.status_code}" + (f" ({code})" if code else "")
        if 400 <= resp.status_code < 500:
            break  # client errors are not retryable
    return [""] * payload["n"], last_error


# -- eval ---------------------------------------------------------------------


def _auto_ks(suite_kind: str, n: int) -> tuple[int, ...]:
    usable = tuple(k for k in DEFAULT_KS[suite_kind] if k <= n)
    return usable or (1,)


@main.command("eval")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("completions_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--suite-kind", type=click.Choice(["humaneval", "mbpp"]),
              required=True)
@click.option("--out-dir", default=None, help="Output directory [eval_out].")
@click.option("--model-label", default=None, help="Label in reports [model].")
@click.option("--ks", default=None,
              help="Comma list of k; defaults to the suite's set capped at n.")
@click.option("--timeout", type=float, default=None,
              help="Wall seconds per program [10].")
@click.option("--memory-cap-mb", type=int, default=None,
              help="Address-space cap per program in MiB [512].")
@click.option("--workers", "eval_workers", type=int, default=None,
              help="Concurrent sandboxes [global --workers].")
@click.option("--interpreter", envvar="STACKEVAL_PYTHON", default=None,
              help="Python binary for sandboxes [current interpreter].")
@click.option("--allow-partial", is_flag=True, default=False,
              help="Evaluate only tasks that have completions.")
@click.option("--figures/--no-figures", "render_figs", default=True,
              help="Render report figures into the output directory [on].")
@click.pass_obj
def cmd_eval(settings: Settings, suite_path, completions_path, suite_kind,
             out_dir, model_label, ks, timeout, memory_cap_mb, eval_workers,
             interpreter, allow_partial, render_figs):
    """Execute completions against their tests and write results + report."""
    out_dir = settings.resolve("eval", "out_dir", out_dir, "eval_out")
    model_label = settings.resolve("eval", "model_label", model_label, "model")
    ks = settings.resolve("eval", "ks", ks, None)
    timeout = settings.resolve("eval", "timeout", timeout, 10.0)
    memory_cap_mb = settings.resolve("eval", "memory_cap_mb", memory_cap_mb, 512)
    interpreter = settings.resolve("eval", "interpreter", interpreter,
                                   sys.executable)
    workers = settings.resolve_workers(eval_workers)

    suite = tasks.Suite(suite_kind)
    task_list = tasks.load_suite(suite_path, suite)
    completions = tasks.load_completions(completions_path)

    by_task: dict[str, list[tasks.Completion]] = {}
    for comp in completions:
        by_task.setdefault(comp.task_id, []).append(comp)
    task_ids = {t.task_id for t in task_list}
    unknown = sorted(set(by_task) - task_ids)
    if unknown:
        raise click.ClickException(
            f"completions reference unknown tasks: {', '.join(unknown[:10])}")
    missing = sorted(task_ids - set(by_task))
    if missing:
        if not allow_partial:
            raise click.ClickException(
                "no completions for tasks: " + ", ".join(missing[:20])
                + ("" if len(missing) <= 20 else f" (+{len(missing) - 20} more)")
                + "; pass --allow-partial to evaluate the covered subset")
        task_list = [t for t in task_list if t.task_id in by_task]

    jobs = []
    for task in task_list:
        for comp in by_task[task.task_id]:
            jobs.append(SandboxJob(
                task_id=task.task_id,
                sample_index=comp.sample_index,
                temperature=comp.temperature,
                source=tasks.assemble_program(task, comp.text),
            ))

    limits = ExecLimits(wall_timeout=timeout,
                        memory_cap=memory_cap_mb * 1024 * 1024,
                        interpreter=interpreter)
    failures = []
    results = run_batch(jobs, limits, workers=workers,
                        harness_failures=failures)
    for failure in failures:
        click.echo(f"harness failure: {failure}", err=True)

    os.makedirs(out_dir, exist_ok=True)
    results_path = os.path.join(out_dir, "results.jsonl")
    write_results(results_path, results)

    n = max((len(v) for v in by_task.values()), default=0)
    k_list = _auto_ks(suite_kind, n) if ks is None else _parse_int_list(ks)
    try:
        report = metrics.build_suite_report(suite_kind, model_label, results,
                                            k_list)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    report_path = os.path.join(out_dir, "report.json")
    metrics.write_report(report_path, report)

    config = {
        "command": "eval",
        "suite_kind": suite_kind,
        "model_label": model_label,
        "ks": list(k_list),
        "timeout": timeout,
        "memory_cap_mb": memory_cap_mb,
        "workers": workers,
        "allow_partial": allow_partial,
    }
    build_manifest(config, [suite_path, completions_path], interpreter).save(
        os.path.join(out_dir, "manifest.json"))

    if render_figs:
        from stackeval.figures import render_figures

        for fig_path in render_figures(report, out_dir, prefix=model_label):
            click.echo(f"figure: {fig_path}")

    click.echo(f"results: {results_path}")
    click.echo(f"report: {report_path}")
    for k in k_list:
        best = report.best_per_k[k]
        click.echo(f"pass@{k} = {best.value * 100:.2f} (best, T={best.temperature})")


# -- report -------------------------------------------------------------------


def _load_any_report(path: str, suite_kind: str | None, ks, model_label: str):
    if path.endswith(".jsonl"):
        if suite_kind is None:
            raise click.ClickException(
                f"{path} is raw results; pass --suite-kind (and optionally --ks)")
        results = load_results(path)
        counts: dict[tuple[str, float], int] = {}
        for r in results:
            counts[(r.task_id, r.temperature)] = counts.get(
                (r.task_id, r.temperature), 0) + 1
        n = max(counts.values(), default=0)
        k_list = ks or _auto_ks(suite_kind, n)
        try:
            return metrics.build_suite_report(suite_kind, model_label, results,
                                              k_list)
        except ValueError as exc:
            raise click.ClickException(str(exc))
    return metrics.load_report(path)


@main.command("report")
@click.argument("paths", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["markdown", "csv", "json"]),
              default="markdown")
@click.option("--out", "out_path", default=None,
              help="Write rendered report here instead of stdout.")
@click.option("--figures-dir", default=None,
              help="Directory for figures [alongside --out when given].")
@click.option("--compare", nargs=2, type=click.Path(exists=True, dir_okay=False),
              default=None, metavar="BASELINE TREATMENT",
              help="Two report JSONs; print mean percent change of pass@k.")
@click.option("--ks", default=None, help="k subset for --compare or raw results.")
@click.option("--suite-kind", type=click.Choice(["humaneval", "mbpp"]),
              default=None, help="Needed when a path is raw results JSONL.")
@click.option("--model-label", default="model")
@click.pass_obj
def cmd_report(settings: Settings, paths, fmt, out_path, figures_dir, compare,
               ks, suite_kind, model_label):
    """Render saved reports; merge per-temperature runs; compare runs."""
    k_list = _parse_int_list(str(ks)) if ks else None

    if compare:
        baseline = metrics.load_report(compare[0])
        treatment = metrics.load_report(compare[1])
        use_ks = list(k_list) if k_list else sorted(
            set(baseline.best_per_k) & set(treatment.best_per_k))
        base_table = {k: baseline.best_per_k[k].value for k in use_ks}
        treat_table = {k: treatment.best_per_k[k].value for k in use_ks}
        change = metrics.percent_change(base_table, treat_table, use_ks)
        click.echo(
            f"mean percent change of pass@k over k={use_ks}: {change:+.2f}%")
        if not paths:
            return

    if not paths:
        raise click.ClickException("no report paths given")

    reports = [_load_any_report(p, suite_kind, k_list, model_label) for p in paths]
    try:
        report = reports[0] if len(reports) == 1 else metrics.merge_reports(reports)
    except ValueError as exc:
        raise click.ClickException(str(exc))

    rendered = metrics.render_report(report, fmt)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(rendered)
            if not rendered.endswith("\n"):
                fh.write("\n")
        click.echo(f"wrote {fmt} report to {out_path}")
        if figures_dir is None:
            figures_dir = os.path.dirname(os.path.abspath(out_path))
    else:
        click.echo(rendered)

    if figures_dir:
        from stackeval.figures import render_figures

        for fig_path in render_figures(report, figures_dir,
                                       prefix=report.model_label):
            click.echo(f"figure: {fig_path}")


# -- stats --------------------------------------------------------------------


@main.command("stats")
@click.argument("corpus_paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--counts-file", type=click.Path(exists=True, dir_okay=False),
              default=None,
              help="JSONL of {question_id, variant, tokens} for exact counts.")
@click.option("--out", "out_path", default=None, help="Write JSON here.")
def cmd_stats(corpus_paths, counts_file, out_path):
    """Token and record accounting for corpus JSONL files."""
    token_counts = None
    if counts_file:
        token_counts = {}
        with open(counts_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                token_counts[(int(obj["question_id"]), obj["variant"])] = int(
                    obj["tokens"])

    def iter_records():
        for path in corpus_paths:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    obj = json.loads(line)
                    yield so.TrainingRecord(
                        question_id=int(obj["question_id"]),
                        variant=so.ModalityVariant(obj["variant"]),
                        text=obj["text"],
                        approx_tokens=int(obj["approx_tokens"]),
                    )

    stats = so.corpus_stats(iter_records(), token_counts=token_counts)
    payload = json.dumps(stats.as_dict(), indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(payload)


if __name__ == "__main__":
    main()
