import json

from macdyn.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGroup:
    def test_order_three(self, capsys):
        code, out, _ = run(capsys, "group", "--N", "3")
        assert code == 0 and out.strip() == "72"

    def test_limit(self, capsys):
        code, _, err = run(capsys, "group", "--N", "6")
        assert code == 2 and "refused" in err


class TestRsk:
    def test_f_map(self, capsys):
        code, out, _ = run(capsys, "rsk", "--word", "123", "--h", "1,1,2", "--f-map")
        assert code == 0 and out.strip() == "1 3 2"

    def test_forward_pair(self, capsys):
        code, out, _ = run(capsys, "rsk", "--word", "11", "--h", "1")
        record = json.loads(out)
        assert record == {"P": [[1, 1]], "Q": [[1, 2]], "shape": [2]}

    def test_inverse(self, capsys):
        code, out, _ = run(
            capsys, "rsk", "--inverse", "--p", "1,1", "--q-tab", "1,2", "--h", "1"
        )
        assert code == 0 and out.strip() == "11"

    def test_table_deterministic(self, capsys):
        code, out1, _ = run(capsys, "rsk", "--table", "--N", "3")
        assert code == 0
        code, out2, _ = run(capsys, "rsk", "--table", "--N", "3")
        assert out1 == out2
        lines = out1.strip().splitlines()
        assert lines[0].startswith("word,h=111")
        assert len(lines) == 7
        # the published column for h = (1,2,3)
        col = lines[0].split(",").index("h=123")
        assert [line.split(",")[col] for line in lines[1:]] == [
            "321", "213", "132", "312", "231", "123",
        ]

    def test_missing_flags(self, capsys):
        code, _, err = run(capsys, "rsk", "--word", "123")
        assert code == 1 and "error" in err


class TestSimulate:
    def test_trivial_run(self, capsys):
        code, out, _ = run(
            capsys,
            "simulate", "--dynamics", "pb", "--N", "1", "--q", "0", "--t", "0",
            "--a", "1", "--tau", "0", "--samples", "1", "--seed", "7",
        )
        assert code == 0
        record = json.loads(out)
        assert record == {"trajectory": 0, "final": "0", "events": []}

    def test_reproducible_bytes(self, capsys):
        argv = [
            "simulate", "--dynamics", "qrow", "--N", "3", "--q", "0.5", "--t", "0",
            "--a", "1,1,1", "--tau", "1.0", "--samples", "4", "--seed", "11",
        ]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2
        records = [json.loads(line) for line in out1.strip().splitlines()]
        assert [r["trajectory"] for r in records] == [0, 1, 2, 3]
        for r in records:
            for ev in r["events"]:
                assert set(ev) == {"time", "cascade"}
                for move in ev["cascade"]:
                    assert set(move) == {"level", "index", "cause"}

    def test_h_length_validation(self, capsys):
        code, _, err = run(
            capsys,
            "simulate", "--dynamics", "rsk", "--N", "3", "--q", "0", "--t", "0",
            "--a", "1,1,1", "--h", "1,1", "--tau", "1", "--seed", "1",
        )
        assert code == 1 and "length 3" in err

    def test_unknown_dynamics(self, capsys):
        code, _, err = run(
            capsys,
            "simulate", "--dynamics", "bogus", "--N", "1", "--a", "1", "--tau", "1",
        )
        assert code == 1

    def test_parallel_matches_serial(self, capsys):
        argv = [
            "simulate", "--dynamics", "pb", "--N", "2", "--q", "0", "--t", "0",
            "--a", "1,1", "--tau", "1.0", "--samples", "6", "--seed", "3", "--no-events",
        ]
        _, serial, _ = run(capsys, *argv)
        _, threaded, _ = run(capsys, *argv, "--parallel", "3")
        assert serial == threaded


class TestClassify:
    def test_slice_record(self, capsys):
        code, out, _ = run(
            capsys,
            "classify", "--nu-bar", "1", "--lam", "0,3", "--q", "1/2", "--t", "0",
            "--basis", "r-l-pb",
        )
        assert code == 0
        record = json.loads(out)
        assert record["free_indices"] == [1, 2]
        assert record["T"]["1"] == "4/7"
        assert record["S"]["1"] == "15/14"
        pbsol = record["solutions"]["pb"]
        assert pbsol["honest"] is True
        assert pbsol["decomposition"]["pb"] == "1"
        assert record["solutions"]["rsk(2)"]["honest"] is False

    def test_bad_signature(self, capsys):
        code, _, err = run(
            capsys, "classify", "--nu-bar", "3,1", "--lam", "0,2", "--q", "0", "--t", "0"
        )
        assert code == 1


class TestVerify:
    def test_identities_quick(self, capsys, tmp_path):
        report_file = tmp_path / "rep.json"
        code, out, _ = run(
            capsys, "verify", "--suite", "identities", "--quick", "--report", str(report_file)
        )
        assert code == 0
        saved = json.loads(report_file.read_text())
        assert saved["ok"] is True and saved["checks"]["one_T_S"] > 0

    def test_positivity_quick(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "positivity", "--quick")
        assert code == 0
        record = json.loads(out)
        assert sorted(record["clean"]) == ["pb", "r(1)", "rsk(1)"]
        assert record["schur_violations"] == []

    def test_gibbs_small(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "gibbs", "--samples", "4000", "--seed", "5"
        )
        assert code == 0
        assert json.loads(out)["stats"]["pvalue"] > 0.001

    def test_transient_small(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "transient", "--samples", "4000", "--seed", "9"
        )
        assert code == 0
        assert json.loads(out)["stats"]["pvalue"] > 0.001

    def test_tasep_marginal_small(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "tasep-marginal", "--samples", "2500", "--seed", "9"
        )
        assert code == 0
        record = json.loads(out)
        assert record["qtasep"]["pvalue"] > 0.001
        assert record["qpushtasep"]["pvalue"] > 0.001
