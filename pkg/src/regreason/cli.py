"""Batch front-end.

Subcommands:
  parse      corpus JSONL -> one REG JSON per record + summary (JSON and TSV)
  score      REG JSON files -> score matrix, referring distribution, QA trace
  gradcheck  verify the analytic backward pass against finite differences
  demo       a few gradient-descent steps on one synthetic instance

Exit codes: 0 success, 1 verification failure, 2 input error. Outputs are
deterministic functions of the inputs and flags, including all seeds.
The REG_LOG environment variable (debug|info|warning|quiet) sets verbosity.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from dataclasses import replace as dc_replace
from pathlib import Path

import click
import numpy as np

from . import __version__
from .corpus import CorpusError, parse_record
from .gradcheck import DEFAULT_TOLERANCE, GROUPS, loss_and_grads, run_gradcheck
from .losses import LossWeights, match_referent
from .pipeline import RunConfig, build_record, format_scores, score_reg
from .reg import reg_from_json, reg_to_json, validate
from .synth import random_instance, random_predictions, rng_for
from .tcrr import trace_to_json

log = logging.getLogger("regreason")

_LOG_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "quiet": logging.CRITICAL,
}


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("REG_LOG", "warning").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _config_options(fn):
    opts = [
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--dim", type=int, default=256, show_default=True,
                     help="Model dimension d."),
        click.option("--num-queries", type=int, default=20, show_default=True,
                     help="Temporal queries."),
        click.option("--frame-queries", type=int, default=20, show_default=True,
                     help="Frame queries per frame."),
        click.option("--frames", type=int, default=12, show_default=True),
        click.option("--window", type=int, default=6, show_default=True,
                     help="Sliding window length in frames."),
        click.option("--layers", type=int, default=3, show_default=True,
                     help="Encoder/decoder layer count."),
        click.option("--embeddings", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="Optional token<TAB>vector table."),
        click.option("--lambda-reason", type=float, default=2.0, show_default=True),
        click.option("--lambda-mask", type=float, default=2.0, show_default=True),
        click.option("--lambda-dice", type=float, default=5.0, show_default=True),
        click.option("--lambda-giou", type=float, default=2.0, show_default=True),
        click.option("--lambda-l1", type=float, default=2.0, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _make_config(kw) -> RunConfig:
    return RunConfig(
        seed=kw["seed"],
        d=kw["dim"],
        num_queries=kw["num_queries"],
        num_frame_queries=kw["frame_queries"],
        frames=kw["frames"],
        window=kw["window"],
        layers=kw["layers"],
        weights=LossWeights(
            reason=kw["lambda_reason"],
            mask=kw["lambda_mask"],
            dice=kw["lambda_dice"],
            giou=kw["lambda_giou"],
            l1=kw["lambda_l1"],
        ),
        embeddings_path=kw["embeddings"],
    )


@click.group()
@click.version_option(version=__version__, prog_name="regreason")
def main():
    _setup_logging()


@main.command("parse")
@click.option("--corpus", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@_config_options
def cmd_parse(corpus, out, **kw):
    """Build one REG JSON per corpus record, plus a selection summary."""
    _make_config(kw)  # validates flag ranges; parsing itself needs no params
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        with open(corpus, encoding="utf-8") as fh:
            lines = [(n, line) for n, line in enumerate(fh, start=1) if line.strip()]
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    entries = []
    failed = 0
    for lineno, line in lines:
        try:
            record = parse_record(line, lineno)
        except CorpusError as exc:
            failed += 1
            entries.append(
                {"id": f"line-{lineno}", "rule": None, "referent_token": None,
                 "referent_concept": None, "nodes": None, "edges": None,
                 "ok": False, "error": str(exc)}
            )
            log.warning("%s", exc)
            continue
        try:
            build = build_record(record)
            problems = validate(build.reg)
            if problems:
                raise ValueError("REG validation failed: " + "; ".join(problems))
            reg_path = out_dir / f"{record.id}.reg.json"
            reg_path.write_text(reg_to_json(build.reg, build.schedule), encoding="utf-8")
            entries.append(
                {
                    "id": record.id,
                    "rule": build.choice.rule,
                    "referent_token": build.choice.token_index,
                    "referent_concept": build.reg.concepts[build.reg.root].label,
                    "nodes": len(build.reg.concepts),
                    "edges": len(build.reg.edges),
                    "ok": True,
                    "error": None,
                }
            )
            log.info("parsed %s via %s", record.id, build.choice.rule)
        except (ValueError, KeyError) as exc:
            failed += 1
            entries.append(
                {"id": record.id, "rule": None, "referent_token": None,
                 "referent_concept": None, "nodes": None, "edges": None,
                 "ok": False, "error": str(exc)}
            )
            log.warning("record %s failed: %s", record.id, exc)

    summary = {
        "records": entries,
        "total": len(entries),
        "failed": failed,
        "rules": {
            rule: sum(1 for e in entries if e["rule"] == rule)
            for rule in ("POS-rule", "compound-rule", "fallback")
        },
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    tsv_lines = ["id\trule\tstatus\treferent_concept"]
    tsv_lines += [
        f"{e['id']}\t{e['rule'] or '-'}\t{'ok' if e['ok'] else 'error'}\t"
        f"{e['referent_concept'] or '-'}"
        for e in entries
    ]
    (out_dir / "summary.tsv").write_text("\n".join(tsv_lines) + "\n", encoding="utf-8")
    click.echo(f"{len(entries) - failed}/{len(entries)} records parsed -> {out_dir}")
    sys.exit(2 if failed else 0)


@main.command("score")
@click.argument("reg_files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--figures/--no-figures", default=False, show_default=True,
              help="Render score heatmaps and distribution bars.")
@_config_options
def cmd_score(reg_files, out, figures, **kw):
    """Score REG files with a seeded synthetic visual stream."""
    config = _make_config(kw)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for reg_file in reg_files:
        name = Path(reg_file).name.removesuffix(".reg.json").removesuffix(".json")
        try:
            reg, schedule = reg_from_json(Path(reg_file).read_text(encoding="utf-8"))
            result = score_reg(reg, schedule, config, key=name)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            click.echo(f"error: {reg_file}: {exc}", err=True)
            sys.exit(2)
        scores = result.forward.table.scores
        (out_dir / f"{name}.scores.txt").write_text(format_scores(scores), encoding="utf-8")
        dist = {
            "referent": result.referent,
            "probs": [float(p) for p in result.probs],
        }
        (out_dir / f"{name}.dist.json").write_text(
            json.dumps(dist, indent=2) + "\n", encoding="utf-8"
        )
        (out_dir / f"{name}.trace.json").write_text(
            trace_to_json(result.forward.trace), encoding="utf-8"
        )
        if figures:
            from .figures import save_distribution_bar, save_score_heatmap

            labels = [c.label for c in reg.concepts]
            save_score_heatmap(out_dir / f"{name}.scores.png", scores, labels, name)
            save_distribution_bar(out_dir / f"{name}.dist.png", result.probs,
                                  result.referent, name)
        log.info("scored %s: referent query %d", name, result.referent)
    click.echo(f"scored {len(reg_files)} REG file(s) -> {out_dir}")
    sys.exit(0)


@main.command("gradcheck")
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tolerance", type=float, default=DEFAULT_TOLERANCE, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for the report files.")
@click.option("--figures/--no-figures", default=False, show_default=True)
@click.option("--corrupt", is_flag=True, hidden=True,
              help="Testing hook: corrupt one gradient to prove the check bites.")
def cmd_gradcheck(trials, seed, tolerance, out, figures, corrupt):
    """Check analytic gradients of the training loss against finite differences."""
    if trials < 0:
        click.echo("error: --trials must be >= 0", err=True)
        sys.exit(2)
    result = run_gradcheck(trials=trials, seed=seed, tolerance=tolerance, corrupt=corrupt)
    for group in GROUPS:
        status = "ok" if result.max_rel_err[group] <= tolerance else "FAIL"
        click.echo(f"{group:<8} max rel err {result.max_rel_err[group]:.3e}  {status}")
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        report = {
            "trials": result.trials,
            "tolerance": result.tolerance,
            "max_rel_err": result.max_rel_err,
            "ok": result.ok,
        }
        (out_dir / "gradcheck.json").write_text(
            json.dumps(report, indent=2) + "\n", encoding="utf-8"
        )
        (out_dir / "losses.json").write_text(
            json.dumps(result.loss_reports, indent=2) + "\n", encoding="utf-8"
        )
        tsv = ["group\tmax_rel_err"] + [
            f"{g}\t{result.max_rel_err[g]!r}" for g in GROUPS
        ]
        (out_dir / "gradcheck.tsv").write_text("\n".join(tsv) + "\n", encoding="utf-8")
        if figures:
            from .figures import save_gradcheck_bars

            save_gradcheck_bars(out_dir / "gradcheck.png", result.max_rel_err, tolerance)
    sys.exit(0 if result.ok else 1)


@main.command("demo")
@click.option("--steps", type=int, default=20, show_default=True)
@click.option("--lr", type=float, default=5.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def cmd_demo(steps, lr, seed):
    """Gradient-descent smoke test: the reasoning loss should fall."""
    inst = random_instance(seed=seed, max_nodes=8, num_queries=4, per_frame=3, frames=3, d=8)
    rng = rng_for(seed, 0xDE30)
    preds, gt = random_predictions(rng, num_queries=4, frames=3, hw=8)
    weights = LossWeights()
    matched, breakdowns = match_referent(preds, gt, weights)
    components = breakdowns[matched]
    first = last = None
    for step in range(steps):
        loss, grads = loss_and_grads(inst, matched, weights, components)
        if first is None:
            first = loss
        last = loss
        click.echo(f"step {step:3d}  loss {loss:.6f}")
        params = inst.params
        inst = dc_replace(
            inst,
            params=dc_replace(
                params,
                w_r=params.w_r - lr * grads["w_r"],
                omega_r=params.omega_r - lr * grads["omega_r"],
                w_e=params.w_e - lr * grads["w_e"],
                omega_e=params.omega_e - lr * grads["omega_e"],
            ),
        )
    if first is not None and last is not None and last < first:
        click.echo(f"loss fell {first:.6f} -> {last:.6f}")
        sys.exit(0)
    click.echo("loss did not decrease", err=True)
    sys.exit(1)


if __name__ == "__main__":
    main()
