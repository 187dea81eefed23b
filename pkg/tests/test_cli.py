"""Command-line behavior and exit codes."""

import json
import subprocess
import sys

import pytest

from opinionstream.cli import main
from opinionstream.corpus import load_corpus, write_stream
from opinionstream.synth import DriftScript, SegmentSpec, synthesize_drift_stream

SCRIPT = {
    "vocab_size": 30,
    "seed": 9,
    "segments": [
        {"length": 60, "class_priors": [0.6, 0.4]},
        {"length": 60, "class_priors": [0.4, 0.6], "flip_fraction": 0.1},
    ],
}


def write_config(path, stream, output_dir, strategy_lines, extra=""):
    path.write_text(
        f'stream = "{stream}"\n'
        f"seed_size = 10\n"
        f'output_dir = "{output_dir}"\n'
        f"{extra}"
        f"[strategy]\n" + strategy_lines
    )


@pytest.fixture()
def stream(tmp_path):
    docs, _ = synthesize_drift_stream(
        DriftScript(
            vocab_size=30,
            segments=(SegmentSpec(100, (0.6, 0.4)),),
            seed=4,
            affinity_strength=0.85,
        )
    )
    path = tmp_path / "stream.tsv"
    write_stream(docs, path)
    return path


class TestPrepare:
    def test_original(self, tmp_path, stream, capsys):
        out = tmp_path / "copy.tsv"
        assert main(["prepare", "--input", str(stream), "--variant", "original",
                     "--output", str(out)]) == 0
        assert "wrote 100 documents" in capsys.readouterr().out
        manifest = json.loads((tmp_path / "copy.tsv.manifest.json").read_text())
        assert manifest["variant"] == "original"
        assert out.read_bytes() == stream.read_bytes()

    def test_variant_defaults_to_original(self, tmp_path, stream):
        out = tmp_path / "copy.tsv"
        assert main(["prepare", "--input", str(stream),
                     "--output", str(out)]) == 0
        assert out.read_bytes() == stream.read_bytes()

    def test_reordered_manifest_has_fractions(self, tmp_path, stream):
        out = tmp_path / "reordered.tsv"
        assert main(["prepare", "--input", str(stream), "--variant", "reordered",
                     "--seed-size", "10", "--output", str(out)]) == 0
        manifest = json.loads((tmp_path / "reordered.tsv.manifest.json").read_text())
        fractions = manifest["known_word_fractions"]
        assert len(fractions) == 100
        assert all(a >= b for a, b in zip(fractions, fractions[1:]))

    def test_fixed_vocab(self, tmp_path, stream):
        out = tmp_path / "fixed.tsv"
        assert main(["prepare", "--input", str(stream), "--variant", "fixed-vocab",
                     "--seed-size", "10", "--output", str(out)]) == 0
        corpus = load_corpus(out)
        assert len(corpus) <= 100

    def test_seed_size_required_for_variants(self, tmp_path, stream, capsys):
        code = main(["prepare", "--input", str(stream), "--variant", "reordered",
                     "--output", str(tmp_path / "x.tsv")])
        assert code == 2
        assert "--seed-size" in capsys.readouterr().err

    def test_invalid_variant_is_usage_error(self, tmp_path, stream):
        with pytest.raises(SystemExit) as exit_info:
            main(["prepare", "--input", str(stream), "--variant", "shuffled",
                  "--output", str(tmp_path / "x.tsv")])
        assert exit_info.value.code == 2

    def test_missing_input_fails_cleanly(self, tmp_path, capsys):
        code = main(["prepare", "--input", str(tmp_path / "absent.tsv"),
                     "--variant", "original", "--output", str(tmp_path / "x.tsv")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestSynthRunReport:
    def test_pipeline(self, tmp_path, capsys):
        script_path = tmp_path / "drift.json"
        script_path.write_text(json.dumps(SCRIPT))
        stream_path = tmp_path / "synth.tsv"
        assert main(["synth", "--script", str(script_path),
                     "--output", str(stream_path)]) == 0
        assert load_corpus(stream_path).documents

        config = tmp_path / "run.conf"
        write_config(config, stream_path, tmp_path / "run_ig", 'kind = "ig"\n')
        assert main(["run", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        assert "records:" in out and "spend" in out

        config2 = tmp_path / "run2.conf"
        write_config(config2, stream_path, tmp_path / "run_never", 'kind = "never"\n')
        assert main(["run", "--config", str(config2)]) == 0

        report_dir = tmp_path / "report"
        assert main([
            "report",
            "--runs", f"ig={tmp_path / 'run_ig'}", f"never={tmp_path / 'run_never'}",
            "--output", str(report_dir),
            "--stream", str(stream_path), "--seed-size", "10", "--batch", "30",
        ]) == 0
        assert (report_dir / "spend_table.csv").exists()
        assert (report_dir / "summary.md").exists()
        assert (report_dir / "diagnostics.csv").exists()

    def test_run_config_error_names_key(self, tmp_path, stream, capsys):
        config = tmp_path / "bad.conf"
        write_config(config, stream, tmp_path / "o", 'kind = "ig"\nalpha = 0.5\n')
        assert main(["run", "--config", str(config)]) == 1
        assert "alpha" in capsys.readouterr().err

    def test_synth_bad_script(self, tmp_path, capsys):
        script_path = tmp_path / "bad.json"
        script_path.write_text(json.dumps({"vocab_size": 1}))
        assert main(["synth", "--script", str(script_path),
                     "--output", str(tmp_path / "x.tsv")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_report_missing_run_dir(self, tmp_path, capsys):
        code = main(["report", "--runs", f"gone={tmp_path / 'gone'}",
                     "--output", str(tmp_path / "r")])
        assert code == 1
        assert "missing" in capsys.readouterr().err

    def test_report_duplicate_names(self, tmp_path, capsys):
        code = main(["report", "--runs", "a=x", "a=y",
                     "--output", str(tmp_path / "r")])
        assert code == 1
        assert "unique" in capsys.readouterr().err

    def test_report_bad_pair_syntax(self, tmp_path, capsys):
        code = main(["report", "--runs", "just-a-dir",
                     "--output", str(tmp_path / "r")])
        assert code == 1
        assert "NAME=DIR" in capsys.readouterr().err


def test_serve_completes_without_answers(tmp_path, stream, capsys):
    # NEVER strategy asks nothing, so serve runs the stream to the end
    # and exits on its own.
    config = tmp_path / "serve.conf"
    write_config(config, stream, tmp_path / "served", 'kind = "never"\n',
                 extra="query_timeout = 0.2\n")
    assert main(["serve", "--config", str(config), "--port", "0"]) == 0
    out = capsys.readouterr().out
    assert "label service on" in out
    assert (tmp_path / "served" / "records.csv").exists()
    summary = json.loads((tmp_path / "served" / "summary.json").read_text())
    assert summary["documents_processed"] == 90
    assert summary["queries_made"] == 0


def test_console_script_installed(tmp_path):
    result = subprocess.run(
        ["opinionstream", "--help"], capture_output=True, text=True, timeout=60
    )
    assert result.returncode == 0
    assert "prepare" in result.stdout and "serve" in result.stdout


def test_module_invocation(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "opinionstream.cli", "--help"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 0
