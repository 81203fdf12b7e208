import json
import math

import pytest
from pytest import approx

from cubeharmonic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == 1
    return doc["result"]


@pytest.fixture
def spike(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"schema": 1, "ell": 2, "values": [4, 0, 0, 0]}))
    return str(path)


@pytest.fixture
def chsh(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"schema": 1, "rows": [[1, 1], [1, -1]]}))
    return str(path)


class TestOutputs:
    def test_walsh_analyze(self, capsys, spike):
        res = run_json(capsys, "walsh", "analyze", "--input", spike)
        assert res["coeffs"] == [1.0, 1.0, 1.0, 1.0]
        assert res["parseval_sum"] == approx(res["l2_norm_squared"])

    def test_walsh_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"schema": 1, "ell": 2, "coeffs": [1, 1, 1, 1]}))
        res = run_json(capsys, "walsh", "synthesize", "--input", str(path))
        assert res["values"] == [4.0, 0.0, 0.0, 0.0]

    def test_maximal_and_square(self, capsys, spike):
        assert run_json(capsys, "maximal", "--input", spike)["values"] == [4.0, 1.0, 2.0, 1.0]
        sq = run_json(capsys, "square", "--input", spike)
        assert sq["values"] == approx([math.sqrt(6), math.sqrt(2), math.sqrt(6), math.sqrt(2)])
        assert sq["l2_identity_dev"] < 1e-10

    def test_czdecomp(self, capsys, spike):
        res = run_json(capsys, "czdecomp", "--lambda", "1.5", "--input", spike)
        assert res["superlevel_members"] == [0, 2]
        assert res["weak_type_holds"]
        assert sum(b["measure"] for b in res["blocks"]) == approx(res["superlevel_measure"])

    def test_khintchine_p4(self, capsys):
        res = run_json(capsys, "khintchine", "--ell", "10", "--p", "4", "--restarts", "4")
        assert res["constant"] == approx(1.293569, abs=1e-6)
        assert res["closed_form"] == approx(res["constant"], abs=1e-9)

    def test_khintchine_csv_sweep(self, capsys):
        code, out, _ = run(capsys, "khintchine", "--ell", "2", "--ell-max", "4", "--p", "4",
                           "--restarts", "2", "--format", "csv", "--seed", "5")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "ell,constant,method,seed"
        assert len(lines) == 4 and all(line.endswith(",5") for line in lines[1:])
        assert float(lines[1].split(",")[1]) == approx(2**0.25, abs=1e-9)

    def test_khintchine_reverse(self, capsys):
        res = run_json(capsys, "khintchine", "--ell", "2", "--q", "1")
        assert res["constant"] == approx(math.sqrt(2), abs=1e-8)
        assert res["constant"] <= res["holder_constant"]

    def test_gaussian_moment(self, capsys):
        res = run_json(capsys, "gaussian-moment", "--p", "2", "--vector", "3,4",
                       "--check-quadrature")
        assert res["value"] == approx(1 / (2 * math.pi), rel=1e-14)
        assert res["linear_functional_moment"] == approx(5 / math.sqrt(2 * math.pi), rel=1e-14)
        assert res["quadrature_rel_dev"] < 1e-9

    def test_lacunary(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"schema": 1, "coeffs": [[1, 0], [0, 1]]}))
        res = run_json(capsys, "lacunary", "--input", str(path))
        assert res["l4_closed"] == approx(6**0.25, rel=1e-14)
        assert res["l4_quadrature"] == approx(res["l4_closed"], rel=1e-12)

    def test_opnorm_csv_input(self, capsys, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("1,1\n1,-1\n")
        res = run_json(capsys, "opnorm", "--input", str(path))
        assert res["norm"] == 2.0
        assert res["w_star"] == [1.0, 1.0]

    def test_grothendieck_chsh(self, capsys, chsh):
        res = run_json(capsys, "grothendieck", "--restrict", "--input", chsh)
        assert res["ratio"] >= 1.414213 - 1e-6
        assert res["ratio"] <= res["k"]

    def test_stdin(self, capsys, monkeypatch):
        import io
        monkeypatch.setattr("sys.stdin", io.StringIO('{"schema": 1, "rows": [[2, 3]]}'))
        assert run_json(capsys, "opnorm")["norm"] == 5.0


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [("grothendieck", "--restarts", "4"), ("opnorm",)],
    )
    def test_byte_identical(self, capsys, chsh, argv):
        first = run(capsys, *argv, "--input", chsh, "--seed", "3")
        second = run(capsys, *argv, "--input", chsh, "--seed", "3")
        assert first == second

    def test_khintchine_repeat(self, capsys):
        argv = ("khintchine", "--ell", "5", "--p", "6", "--restarts", "3", "--seed", "2")
        assert run(capsys, *argv) == run(capsys, *argv)


class TestErrors:
    def assert_field(self, capsys, field, *argv):
        code, out, err = run(capsys, *argv)
        assert code == 2
        assert out == ""
        assert field in err

    def test_wrong_length(self, capsys, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"schema": 1, "ell": 2, "values": [1, 2, 3]}))
        self.assert_field(capsys, "values", "maximal", "--input", str(path))

    def test_missing_field(self, capsys, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"schema": 1, "values": [1, 2]}))
        self.assert_field(capsys, "ell", "square", "--input", str(path))

    def test_bad_json(self, capsys, tmp_path):
        path = tmp_path / "f.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "maximal", "--input", str(path))
        assert code == 2 and "error" in err

    def test_nonfinite(self, capsys, tmp_path):
        path = tmp_path / "a.json"
        path.write_text('{"schema": 1, "rows": [[1, NaN]]}')
        self.assert_field(capsys, "rows", "opnorm", "--input", str(path))

    def test_missing_file(self, capsys, tmp_path):
        self.assert_field(capsys, "--input", "opnorm", "--input", str(tmp_path / "nope.json"))

    def test_lambda(self, capsys, spike):
        self.assert_field(capsys, "--lambda", "czdecomp", "--lambda", "0", "--input", spike)

    def test_odd_p(self, capsys):
        self.assert_field(capsys, "--p", "khintchine", "--ell", "3", "--p", "5")

    def test_q_out_of_range(self, capsys):
        self.assert_field(capsys, "--q", "khintchine", "--ell", "3", "--q", "2.5")

    def test_both_exponents(self, capsys):
        self.assert_field(capsys, "--p/--q", "khintchine", "--ell", "3", "--p", "4", "--q", "1")

    def test_csv_unsupported(self, capsys, chsh):
        self.assert_field(capsys, "--format", "opnorm", "--format", "csv", "--input", chsh)

    def test_zero_matrix(self, capsys, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("0,0\n0,0\n")
        self.assert_field(capsys, "rows", "grothendieck", "--input", str(path))

    def test_ragged_csv(self, capsys, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("1,2\n3\n")
        self.assert_field(capsys, "input", "opnorm", "--input", str(path))


class TestVerifyAll:
    def test_exit_codes(self, capsys, monkeypatch):
        from cubeharmonic import verify

        checks = [verify.Check(1, "a", True), verify.Check(2, "b", True)]
        monkeypatch.setattr(verify, "run_all", lambda seed: checks)
        code, out, err = run(capsys, "verify-all", "--format", "csv", "--seed", "4")
        assert code == 0
        assert out.splitlines()[0] == "criterion,status,title,seed"
        assert "[PASS] criterion  1: a" in err
        checks.append(verify.Check(3, "c", False))
        code, out, _ = run(capsys, "verify-all")
        assert code == 1
        assert json.loads(out)["result"]["all_passed"] is False
