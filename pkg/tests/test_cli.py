"""CLI: ingestion formats, flag handling, output shape, exit codes."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from relset import GRAMS, TokenDictionary, WORDS
from relset.cli import IngestError, ingest, run

GOLDEN_ROW = "R\tS4\t2.228571\t0.742857\tcontainment\n"


def _run(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIngestLines:
    def test_explicit_ids(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tx y\tz\nB\tw\n")
        sets = ingest(str(f), "lines", "\t", 0, WORDS, None, TokenDictionary())
        assert [(s.sid, s.size) for s in sets] == [("A", 2), ("B", 1)]

    def test_whitespace_mode_line_numbers(self, tmp_path):
        f = tmp_path / "in.txt"
        f.write_text("alpha beta gamma\n\ndelta epsilon\n")
        sets = ingest(str(f), "lines", "\t", 0, WORDS, None, TokenDictionary())
        assert [(s.sid, s.size) for s in sets] == [("0", 3), ("2", 2)]
        assert sets[0].elements[0].raw == "alpha"

    def test_duplicate_ids_rejected(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tx\nA\ty\n")
        with pytest.raises(IngestError):
            ingest(str(f), "lines", "\t", 0, WORDS, None, TokenDictionary())

    def test_sentinel_rejected(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tx\x01y\n")
        with pytest.raises(IngestError):
            ingest(str(f), "lines", "\t", 0, WORDS, None, TokenDictionary())

    def test_duplicate_elements_deduped(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tx y\tx y\tz\n")
        sets = ingest(str(f), "lines", "\t", 0, WORDS, None, TokenDictionary())
        assert sets[0].size == 2

    def test_min_distinct_drops_small_sets(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tx\ty\tz\nB\tw\n")
        sets = ingest(str(f), "lines", "\t", 2, WORDS, None, TokenDictionary())
        assert [s.sid for s in sets] == ["A"]

    def test_custom_delimiter(self, tmp_path):
        f = tmp_path / "in.txt"
        f.write_text("A|x y|z\n")
        sets = ingest(str(f), "lines", "|", 0, WORDS, None, TokenDictionary())
        assert sets[0].size == 2

    def test_empty_elements_dropped(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tx\t\t  \ty\n")
        sets = ingest(str(f), "lines", "\t", 0, WORDS, None, TokenDictionary())
        assert sets[0].size == 2

    def test_gram_view_tokenization(self, tmp_path):
        f = tmp_path / "in.tsv"
        f.write_text("A\tabcd\n")
        sets = ingest(str(f), "lines", "\t", 0, GRAMS, 2, TokenDictionary())
        assert sets[0].elements[0].chunks is not None


class TestIngestCsv:
    def test_columns_become_sets(self, tmp_path):
        f = tmp_path / "data.csv"
        f.write_text("city,team\nBoston,Sox\nNYC,Mets\n,Jets\n")
        sets = ingest(str(f), "csv-columns", "\t", 0, WORDS, None, TokenDictionary())
        assert [(s.sid, s.size) for s in sets] == [
            ("data.csv:city", 2),
            ("data.csv:team", 3),
        ]

    def test_quoted_cells_and_dedupe(self, tmp_path):
        f = tmp_path / "data.csv"
        f.write_text('a\n"x, y"\n"x, y"\nz\n')
        sets = ingest(str(f), "csv-columns", "\t", 0, WORDS, None, TokenDictionary())
        assert sets[0].size == 2
        assert sets[0].elements[0].raw == "x, y"

    def test_ragged_row_rejected(self, tmp_path):
        f = tmp_path / "data.csv"
        f.write_text("a,b\n1,2,3\n")
        with pytest.raises(IngestError):
            ingest(str(f), "csv-columns", "\t", 0, WORDS, None, TokenDictionary())

    def test_duplicate_headers_rejected(self, tmp_path):
        f = tmp_path / "data.csv"
        f.write_text("a,a\n1,2\n")
        with pytest.raises(IngestError):
            ingest(str(f), "csv-columns", "\t", 0, WORDS, None, TokenDictionary())


class TestSearchCommand:
    def test_golden_row(self, capsys, data_dir):
        code, out, err = _run(
            capsys,
            [
                "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-file", str(data_dir / "golden_ref.tsv"),
                "--metric", "containment",
                "--phi", "jac",
                "--delta", "0.7",
            ],
        )
        assert code == 0
        assert out == GOLDEN_ROW

    def test_ref_id_within_collection(self, capsys, data_dir):
        code, out, _ = _run(
            capsys,
            [
                "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-id", "S4",
                "--delta", "1.0",
            ],
        )
        assert code == 0
        assert out == "S4\tS4\t3.000000\t1.000000\tcontainment\n"

    def test_missing_ref_id_is_input_error(self, capsys, data_dir):
        code, _, err = _run(
            capsys,
            ["search", "--input", str(data_dir / "golden_collection.tsv"), "--ref-id", "ZZ", "--delta", "0.7"],
        )
        assert code == 1
        assert "not found" in err

    def test_both_ref_flags_rejected(self, capsys, data_dir):
        code, _, _ = _run(
            capsys,
            [
                "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-id", "S1",
                "--ref-file", str(data_dir / "golden_ref.tsv"),
                "--delta", "0.7",
            ],
        )
        assert code == 2

    def test_neither_ref_flag_rejected(self, capsys, data_dir):
        code, _, _ = _run(
            capsys,
            ["search", "--input", str(data_dir / "golden_collection.tsv"), "--delta", "0.7"],
        )
        assert code == 2

    def test_multi_set_ref_file_rejected(self, capsys, data_dir):
        code, _, err = _run(
            capsys,
            [
                "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-file", str(data_dir / "golden_collection.tsv"),
                "--delta", "0.7",
            ],
        )
        assert code == 1
        assert "exactly one" in err

    def test_stats_json(self, capsys, data_dir, tmp_path):
        stats_file = tmp_path / "stats.json"
        code, out, _ = _run(
            capsys,
            [
                "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-file", str(data_dir / "golden_ref.tsv"),
                "--delta", "0.7",
                "--stats", str(stats_file),
            ],
        )
        assert code == 0
        stats = json.loads(stats_file.read_text())
        assert stats["candidates_initial"] == 3
        assert stats["after_check"] == 2
        assert stats["after_nn"] == 1
        assert stats["verified"] == 1
        assert "timings" in stats

    def test_output_file(self, capsys, data_dir, tmp_path):
        out_file = tmp_path / "pairs.tsv"
        code, out, _ = _run(
            capsys,
            [
                "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-file", str(data_dir / "golden_ref.tsv"),
                "--delta", "0.7",
                "--output", str(out_file),
            ],
        )
        assert code == 0
        assert out == ""
        assert out_file.read_text() == GOLDEN_ROW


class TestDiscoverCommand:
    def test_self_join_similarity(self, capsys, data_dir):
        code, out, _ = _run(
            capsys,
            [
                "discover",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--metric", "similarity",
                "--delta", "0.3",
            ],
        )
        assert code == 0
        rows = [line.split("\t") for line in out.strip().splitlines()]
        assert all(len(r) == 5 for r in rows)
        ids = [(r[0], r[1]) for r in rows]
        assert ids == sorted(ids)
        assert all(a != b for a, b in ids)

    def test_two_collections(self, capsys, data_dir):
        code, out, _ = _run(
            capsys,
            [
                "discover",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--input2", str(data_dir / "golden_ref.tsv"),
                "--delta", "0.7",
            ],
        )
        assert code == 0
        assert out == GOLDEN_ROW


    def test_filter_toggles_preserve_output(self, capsys, data_dir):
        base = [
            "discover",
            "--input", str(data_dir / "golden_collection.tsv"),
            "--input2", str(data_dir / "golden_ref.tsv"),
            "--delta", "0.7",
        ]
        toggles = ["--no-size-filter", "--no-check-filter", "--no-nn-filter", "--no-reduction"]
        code, out, _ = _run(capsys, base + toggles)
        assert code == 0
        assert out == GOLDEN_ROW

    def test_neds_phi_matches_oracle(self, capsys, tmp_path):
        f = tmp_path / "strings.tsv"
        f.write_text(
            "A\tabcdef\tkitten\nB\tabcdxf\tsitten\nC\tqqqqq\nD\tkitten\tabcdef\n"
        )
        flags = ["--input", str(f), "--phi", "neds", "--q", "1", "--delta", "0.6"]
        code_e, fast, _ = _run(capsys, ["discover"] + flags)
        code_o, slow, _ = _run(capsys, ["oracle"] + flags)
        assert code_e == code_o == 0
        assert fast == slow
        assert "A\tD\t" in fast

    def test_csv_columns_end_to_end(self, capsys, tmp_path):
        f = tmp_path / "cities.csv"
        f.write_text("east,west\nBoston,Boston\nNYC,LA\nMiami,NYC\n")
        code, out, _ = _run(
            capsys,
            [
                "discover",
                "--input", str(f),
                "--format", "csv-columns",
                "--metric", "similarity",
                "--delta", "0.3",
            ],
        )
        assert code == 0
        assert out.startswith("cities.csv:east\tcities.csv:west\t")


class TestOracleParity:
    def _pair_columns(self, text):
        return [tuple(line.split("\t")[:2]) for line in text.strip().splitlines() if line]

    @pytest.mark.parametrize("metric", ["similarity", "containment"])
    @pytest.mark.parametrize("delta", ["0.3", "0.55", "0.7"])
    def test_discover_matches_oracle(self, capsys, data_dir, metric, delta):
        base = [
            "--input", str(data_dir / "golden_collection.tsv"),
            "--metric", metric,
            "--delta", delta,
        ]
        code1, got, _ = _run(capsys, ["discover"] + base)
        code2, want, _ = _run(capsys, ["oracle"] + base)
        assert code1 == code2 == 0
        assert got == want

    def test_search_shape_oracle(self, capsys, data_dir):
        base = [
            "--input", str(data_dir / "golden_collection.tsv"),
            "--ref-file", str(data_dir / "golden_ref.tsv"),
            "--delta", "0.7",
        ]
        _, got, _ = _run(capsys, ["search"] + base)
        _, want, _ = _run(capsys, ["oracle"] + base)
        assert got == want == GOLDEN_ROW


class TestExitCodes:
    def test_delta_zero_is_config_error(self, capsys, data_dir):
        code, _, err = _run(
            capsys,
            ["discover", "--input", str(data_dir / "golden_collection.tsv"), "--delta", "0"],
        )
        assert code == 2
        assert "configuration error" in err

    def test_eds_without_legal_q(self, capsys, data_dir):
        code, _, _ = _run(
            capsys,
            [
                "discover",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--phi", "eds",
                "--delta", "0.5",
                "--alpha", "0",
            ],
        )
        assert code == 2

    def test_missing_file(self, capsys):
        code, _, err = _run(
            capsys, ["discover", "--input", "no-such-file.tsv", "--delta", "0.7"]
        )
        assert code == 1
        assert "input error" in err

    def test_unknown_flag(self, capsys, data_dir):
        code, _, _ = _run(
            capsys,
            ["discover", "--input", str(data_dir / "golden_collection.tsv"), "--delta", "0.7", "--bogus"],
        )
        assert code == 2

    def test_alpha_out_of_range(self, capsys, data_dir):
        code, _, _ = _run(
            capsys,
            ["discover", "--input", str(data_dir / "golden_collection.tsv"), "--delta", "0.7", "--alpha", "1.0"],
        )
        assert code == 2


class TestDeterminism:
    def test_byte_identical_runs(self, capsys, data_dir):
        argv = [
            "discover",
            "--input", str(data_dir / "golden_collection.tsv"),
            "--metric", "similarity",
            "--delta", "0.3",
            "--workers", "3",
        ]
        _, first, _ = _run(capsys, argv)
        _, second, _ = _run(capsys, argv)
        assert first == second

    def test_stdin_ingestion(self, capsys, data_dir, monkeypatch):
        import io

        text = (data_dir / "golden_collection.tsv").read_text()
        monkeypatch.setattr(sys, "stdin", io.StringIO(text))
        code, out, _ = _run(
            capsys,
            ["discover", "--input", "-", "--metric", "similarity", "--delta", "0.3"],
        )
        assert code == 0
        assert out


class TestModuleEntry:
    def test_python_dash_m(self, data_dir):
        proc = subprocess.run(
            [
                sys.executable, "-m", "relset", "search",
                "--input", str(data_dir / "golden_collection.tsv"),
                "--ref-file", str(data_dir / "golden_ref.tsv"),
                "--delta", "0.7",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == GOLDEN_ROW
