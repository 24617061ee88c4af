import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from regreason.corpus import mini_corpus_path, parse_record
from regreason.numerics import softmax_stable
from regreason.pipeline import RunConfig, build_record, score_reg
from regreason.reg import reg_from_json

GOLDEN_DIR = Path(__file__).parent / "golden"

SMALL_FLAGS = [
    "--dim", "32", "--frames", "4", "--num-queries", "6", "--frame-queries", "5",
    "--window", "2", "--layers", "2",
]


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "regreason", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="module")
def parsed_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("parsed")
    result = run_cli("parse", "--corpus", str(mini_corpus_path()), "--out", str(out))
    assert result.returncode == 0, result.stderr
    return out


class TestParseCommand:
    def test_all_records_emitted(self, parsed_dir, corpus):
        files = sorted(parsed_dir.glob("*.reg.json"))
        assert len(files) == len(corpus) == 30

    def test_outputs_match_goldens(self, parsed_dir, corpus):
        for record in corpus:
            produced = (parsed_dir / f"{record.id}.reg.json").read_bytes()
            golden = (GOLDEN_DIR / f"{record.id}.reg.json").read_bytes()
            assert produced == golden, record.id

    def test_summary_rules(self, parsed_dir, corpus):
        summary = json.loads((parsed_dir / "summary.json").read_text())
        assert summary["total"] == 30
        assert summary["failed"] == 0
        by_id = {e["id"]: e for e in summary["records"]}
        for record in corpus:
            assert by_id[record.id]["rule"] == record.oracle["rule"], record.id

    def test_summary_tsv_is_delimited(self, parsed_dir):
        lines = (parsed_dir / "summary.tsv").read_text().splitlines()
        assert lines[0] == "id\trule\tstatus\treferent_concept"
        assert len(lines) == 31
        assert all(line.count("\t") == 3 for line in lines)

    def test_empty_corpus(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        result = run_cli("parse", "--corpus", str(empty), "--out", str(tmp_path / "out"))
        assert result.returncode == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["total"] == 0

    def test_bad_record_exits_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        record = {
            "id": "broken",
            "expression": "x",
            "tokens": [{"index": 0, "surface": "x", "lemma": "x"}],
            "pos": ["NN"],
            "deps": [],
            "penman": "(a / alpha :mod",  # unbalanced
        }
        bad.write_text(json.dumps(record) + "\n")
        result = run_cli("parse", "--corpus", str(bad), "--out", str(tmp_path / "out"))
        assert result.returncode == 2
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["failed"] == 1
        assert summary["records"][0]["error"]

    def test_unreadable_record_gets_error_entry(self, tmp_path):
        good = {
            "id": "good",
            "expression": "cat",
            "tokens": [{"index": 0, "surface": "cat", "lemma": "cat"}],
            "pos": ["NN"],
            "deps": [],
            "penman": "(c~0 / cat)",
        }
        garbled = tmp_path / "garbled.jsonl"
        garbled.write_text("{not json\n" + json.dumps(good) + "\n")
        result = run_cli("parse", "--corpus", str(garbled), "--out", str(tmp_path / "out"))
        assert result.returncode == 2
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["failed"] == 1
        assert summary["total"] == 2
        statuses = {e["id"]: e["ok"] for e in summary["records"]}
        assert statuses == {"line-1": False, "good": True}


class TestScoreCommand:
    def test_outputs_and_trace_counts(self, parsed_dir, tmp_path):
        reg_files = [str(parsed_dir / "c1c_cat_cage.reg.json"),
                     str(parsed_dir / "walk_then_run_man.reg.json")]
        out = tmp_path / "scores"
        result = run_cli("score", "--out", str(out), *SMALL_FLAGS, *reg_files)
        assert result.returncode == 0, result.stderr
        for reg_file in reg_files:
            name = Path(reg_file).name.removesuffix(".reg.json")
            reg, _ = reg_from_json(Path(reg_file).read_text())
            trace = json.loads((out / f"{name}.trace.json").read_text())
            assert len(trace) == len(reg.concepts) + len(reg.edges)
            scores = np.loadtxt(out / f"{name}.scores.txt", ndmin=2)
            assert scores.shape == (len(reg.concepts), 6)
            dist = json.loads((out / f"{name}.dist.json").read_text())
            assert len(dist["probs"]) == 6
            assert dist["referent"] == int(np.argmax(dist["probs"]))

    def test_rerun_byte_identical(self, parsed_dir, tmp_path):
        reg_file = str(parsed_dir / "c1a_bird_branch.reg.json")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            result = run_cli("score", "--out", str(out), "--figures", *SMALL_FLAGS, reg_file)
            assert result.returncode == 0, result.stderr
        for file_a in sorted(out_a.iterdir()):
            file_b = out_b / file_a.name
            assert file_a.read_bytes() == file_b.read_bytes(), file_a.name

    def test_single_node_reg_distribution_is_oca_softmax(self, tmp_path):
        record = {
            "id": "solo",
            "expression": "cat",
            "tokens": [{"index": 0, "surface": "cat", "lemma": "cat"}],
            "pos": ["NN"],
            "deps": [],
            "penman": "(c~0 / cat)",
        }
        corpus = tmp_path / "solo.jsonl"
        corpus.write_text(json.dumps(record) + "\n")
        parse_out = tmp_path / "parsed"
        assert run_cli("parse", "--corpus", str(corpus), "--out", str(parse_out)).returncode == 0
        score_out = tmp_path / "scored"
        result = run_cli(
            "score", "--out", str(score_out), *SMALL_FLAGS,
            str(parse_out / "solo.reg.json"),
        )
        assert result.returncode == 0, result.stderr
        scores = np.loadtxt(score_out / "solo.scores.txt", ndmin=2)
        dist = json.loads((score_out / "solo.dist.json").read_text())
        np.testing.assert_allclose(dist["probs"], softmax_stable(scores[0]), atol=1e-12)

    def test_invalid_reg_exits_2(self, tmp_path):
        bad = tmp_path / "bad.reg.json"
        bad.write_text(json.dumps({
            "root": 0,
            "concepts": [{"label": "a", "align": [], "depth": 0},
                         {"label": "b", "align": [], "depth": 1}],
            "edges": [{"src": 0, "role": ":x", "dst": 1}, {"src": 1, "role": ":y", "dst": 0}],
            "schedule": [[0], [1]],
        }))
        result = run_cli("score", "--out", str(tmp_path / "out"), str(bad))
        assert result.returncode == 2
        assert "bad.reg.json" in result.stderr

    def test_figures_rendered(self, parsed_dir, tmp_path):
        out = tmp_path / "figs"
        result = run_cli(
            "score", "--out", str(out), "--figures", *SMALL_FLAGS,
            str(parsed_dir / "c1c_cat_cage.reg.json"),
        )
        assert result.returncode == 0, result.stderr
        png = out / "c1c_cat_cage.scores.png"
        assert png.exists() and png.stat().st_size > 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert (out / "c1c_cat_cage.dist.png").exists()


class TestGradcheckCommand:
    def test_passes_and_reports(self, tmp_path):
        out = tmp_path / "gc"
        result = run_cli("gradcheck", "--trials", "3", "--out", str(out), "--figures")
        assert result.returncode == 0, result.stderr
        report = json.loads((out / "gradcheck.json").read_text())
        assert report["ok"] is True
        assert all(v <= 1e-4 for v in report["max_rel_err"].values())
        losses = json.loads((out / "losses.json").read_text())
        assert len(losses) == 3
        assert {"matched", "bce", "dice", "giou", "l1", "reason", "total"} <= set(losses[0])
        assert (out / "gradcheck.png").exists()
        assert (out / "gradcheck.tsv").read_text().startswith("group\tmax_rel_err")

    def test_corrupted_gradient_fails(self):
        result = run_cli("gradcheck", "--trials", "2", "--corrupt")
        assert result.returncode == 1

    def test_zero_trials(self):
        result = run_cli("gradcheck", "--trials", "0")
        assert result.returncode == 0


class TestEnvAndEmbeddings:
    def test_reg_log_verbosity(self, parsed_dir, tmp_path):
        import os
        import subprocess as sp

        env = dict(os.environ, REG_LOG="debug")
        result = sp.run(
            [sys.executable, "-m", "regreason", "score", "--out", str(tmp_path / "o"),
             *SMALL_FLAGS, str(parsed_dir / "c1c_cat_cage.reg.json")],
            capture_output=True, text=True, env=env,
        )
        assert result.returncode == 0
        assert "scored c1c_cat_cage" in result.stderr  # info log enabled

    def test_embeddings_file_changes_scores(self, parsed_dir, tmp_path):
        lines = []
        rng = np.random.default_rng(4)
        for token in ("cat", "stand-01", "near-02", "cage", ":ARG1", ":ARG2-of"):
            values = " ".join(repr(float(v)) for v in rng.standard_normal(32))
            lines.append(f"{token}\t{values}")
        emb = tmp_path / "table.tsv"
        emb.write_text("\n".join(lines) + "\n", encoding="utf-8")

        reg_file = str(parsed_dir / "c1c_cat_cage.reg.json")
        plain_out, table_out = tmp_path / "plain", tmp_path / "table"
        assert run_cli("score", "--out", str(plain_out), *SMALL_FLAGS, reg_file).returncode == 0
        result = run_cli(
            "score", "--out", str(table_out), "--embeddings", str(emb), *SMALL_FLAGS, reg_file
        )
        assert result.returncode == 0, result.stderr
        a = (plain_out / "c1c_cat_cage.scores.txt").read_text()
        b = (table_out / "c1c_cat_cage.scores.txt").read_text()
        assert a != b


class TestParseRerunDeterminism:
    def test_parse_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            assert run_cli(
                "parse", "--corpus", str(mini_corpus_path()), "--out", str(out)
            ).returncode == 0
        for file_a in sorted(out_a.iterdir()):
            assert file_a.read_bytes() == (out_b / file_a.name).read_bytes()


class TestRunConfig:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            RunConfig(d=0)
        with pytest.raises(ValueError):
            RunConfig(frames=-1)

    def test_score_reg_validates(self, tmp_path):
        from regreason.reg import Reg, RegConcept, RegEdge, ReasoningSchedule

        bad = Reg(
            concepts=(RegConcept("a"), RegConcept("b")),
            edges=(RegEdge(0, ":x", 1), RegEdge(1, ":y", 0)),
            root=0,
            depths=(0, 1),
        )
        with pytest.raises(ValueError, match="invalid REG"):
            score_reg(bad, ReasoningSchedule(layers=((0,), (1,))), RunConfig(d=8))


def test_parse_record_round_trip(corpus):
    line = json.dumps(
        {
            "id": "x",
            "expression": "cat",
            "tokens": [{"index": 0, "surface": "cat", "lemma": "cat"}],
            "pos": ["NN"],
            "deps": [],
            "penman": "(c~0 / cat)",
        }
    )
    record = parse_record(line)
    assert record.id == "x"
    assert record.annotation.pos == ("NN",)
    build = build_record(record)
    assert build.choice.rule == "POS-rule"
