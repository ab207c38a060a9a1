import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from actcheck import cli, core
from actcheck.core import Activation


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestTable:
    def test_logistic_centre(self, capsys):
        code, out, _ = run(capsys, "table", "--fn", "logistic", "--lo", "-4", "--hi", "4", "--n", "9")
        rows = parse(out)
        assert code == 0 and len(rows) == 9
        mid = rows[4]
        assert float(mid["z"]) == 0.0 and float(mid["f"]) == 0.5 and float(mid["f1"]) == 0.25

    def test_relu_kink_is_blank(self, capsys):
        _, out, _ = run(capsys, "table", "--fn", "relu", "--lo", "-1", "--hi", "1", "--n", "3")
        mid = parse(out)[1]
        assert mid["f1"] == "" and mid["f1_defined"] == "0"
        assert mid["f2"] == "" and mid["f2_defined"] == "0"

    def test_tanh_joins_logistic(self, capsys):
        _, tanh_out, _ = run(capsys, "table", "--fn", "tanh", "--lo", "-3", "--hi", "3", "--n", "61")
        _, lg_out, _ = run(capsys, "table", "--fn", "logistic", "--lo", "-6", "--hi", "6", "--n", "61")
        t = np.array([float(r["f"]) for r in parse(tanh_out)])
        s = np.array([float(r["f"]) for r in parse(lg_out)])
        assert np.max(np.abs(t - (2.0 * s - 1.0))) <= 1e-15

    def test_layout(self, capsys):
        _, out, _ = run(capsys, "table", "--fn", "swish", "--param", "2", "--n", "5")
        lines = out.split("\n")
        assert lines[0] == "z,f,f1,f2,f1_defined,f2_defined"
        assert lines[-1] == "" and "\r" not in out and '"' not in out
        assert lines[1].split(",")[0] == "-5.0" and lines[5].split(",")[0] == "5.0"

    @pytest.mark.parametrize("kind", core.KINDS)
    def test_round_trip(self, capsys, kind):
        _, out, _ = run(capsys, "table", "--fn", kind, "--lo", "-7.3", "--hi", "9.1", "--n", "57")
        desc = Activation(kind)
        for row in parse(out):
            f = float(row["f"])
            assert abs(f - float(core.evaluate(desc, float(row["z"])))) <= 1e-15 * max(1.0, abs(f))

    def test_selu_and_binary_kinks(self, capsys):
        for kind in ("selu", "binary"):
            _, out, _ = run(capsys, "table", "--fn", kind, "--lo", "-2", "--hi", "2", "--n", "5")
            mid = parse(out)[2]
            assert (mid["f1_defined"], mid["f1"]) == ("0", "")

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "t.csv"
        code, out, _ = run(capsys, "table", "--fn", "softsign", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_bytes().startswith(b"z,f,f1,f2")

    @pytest.mark.parametrize(
        "argv",
        [
            ("table", "--fn", "relu", "--lo", "1", "--hi", "0"),
            ("table", "--fn", "relu", "--n", "1"),
            ("table", "--fn", "elu", "--param", "-1"),
            ("table", "--fn", "relu", "--lo", "nan"),
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 2 and out == "" and "error" in err

    def test_unknown_function(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["table", "--fn", "gelu"])
        assert exc.value.code == 2


class TestConstants:
    def test_contents(self, capsys):
        code, out, _ = run(capsys, "constants")
        assert code == 0
        rows = {line.split()[0]: line.split() for line in out.splitlines()[1:]}
        assert rows["z1"][1].startswith("-1.2784645")
        assert rows["selu_a0"][1] == "1.05070098"
        assert float(rows["tanh_d2_bound"][1]) == pytest.approx(4.0 / math.sqrt(27.0), abs=1e-14)

    def test_mismatch_flagged(self, capsys):
        _, out, _ = run(capsys, "constants")
        flagged = {line.split()[0] for line in out.splitlines() if line.endswith("MISMATCH")}
        assert {"z1_prime", "c_prime"} <= flagged and "z1" not in flagged


class TestVerify:
    def test_clean_build_passes(self, capsys):
        code, out, _ = run(capsys, "verify")
        suites = [line for line in out.splitlines() if line.startswith(("PASS ", "FAIL "))]
        assert code == 0 and len(suites) >= 12
        assert all(line.startswith("PASS") for line in suites)
        assert "selu-contraction" in out

    def test_wrong_logistic_derivative_fails(self, capsys, monkeypatch):
        f, d1, d2 = core.KERNELS["logistic"]
        monkeypatch.setitem(core.KERNELS, "logistic", (f, lambda z, a: 1.01 * d1(z, a), d2))
        code, out, _ = run(capsys, "verify")
        assert code == 1
        assert any(line.startswith("FAIL  first-derivative") for line in out.splitlines())


class TestSeluScan:
    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "selu-scan")
        rows = parse(out)
        assert code == 0 and len(rows) == 16
        assert list(rows[0]) == ["mu", "nu", "mu_out", "m2_out", "ratio"]
        assert all((float(r["mu"]), float(r["nu"])) != (0.0, 1.0) for r in rows)

    def test_order_override(self, capsys):
        _, a, _ = run(capsys, "selu-scan", "--order", "60")
        _, b, _ = run(capsys, "selu-scan", "--order", "120")
        for ra, rb in zip(parse(a), parse(b)):
            for key in ("mu_out", "m2_out"):
                assert abs(float(ra[key]) - float(rb[key])) <= 1e-9

    def test_user_grid(self, capsys, tmp_path):
        grid = tmp_path / "grid.csv"
        grid.write_text("mu,nu\n# comment\n0.5,1.5\n-1,0.25\n")
        code, out, _ = run(capsys, "selu-scan", "--grid", str(grid))
        assert code == 0 and len(parse(out)) == 2

    @pytest.mark.parametrize("content", ["mu,nu\n0,1\n", "mu,nu\n0.5,-1\n", "mu,nu\n", "1,2,3\n"])
    def test_bad_grid(self, capsys, tmp_path, content):
        grid = tmp_path / "grid.csv"
        grid.write_text(content)
        code, _, err = run(capsys, "selu-scan", "--grid", str(grid))
        assert code == 2 and err

    def test_low_order_rejected(self, capsys):
        assert run(capsys, "selu-scan", "--order", "5")[0] == 2


class TestSimulate:
    def test_needs_seed_or_samples(self, capsys):
        code, out, err = run(capsys, "simulate")
        assert code == 2 and out == "" and "--seed" in err

    def test_summary_on_stderr(self, capsys):
        code, out, err = run(capsys, "simulate", "--seed", "42", "--n", "100")
        assert code == 0 and len(parse(out)) == 100
        assert "inactive=47" in err and "revitalized=22" in err

    def test_all_negative_file(self, capsys, tmp_path):
        samples = tmp_path / "neg.csv"
        samples.write_text("x,y\n" + "".join(f"{-0.01 - i / 50},{i / 40}\n" for i in range(40)))
        code, out, err = run(capsys, "simulate", "--samples", str(samples), "--gamma0", "0.8", "--theta0", "1.3")
        rows = parse(out)
        assert code == 0 and "(100.0%)" in err
        assert all(r["active"] == "0" and (r["gamma"], r["theta"]) == ("0.8", "1.3") for r in rows)

    def test_zero_step_size(self, capsys):
        _, out, _ = run(capsys, "simulate", "--seed", "5", "--step-size", "0", "--gamma0", "0.3", "--theta0", "-2")
        assert {(r["gamma"], r["theta"]) for r in parse(out)} == {("0.3", "-2.0")}

    def test_negative_step_size(self, capsys):
        assert run(capsys, "simulate", "--seed", "1", "--step-size", "-0.1")[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "simulate", "--samples", str(tmp_path / "absent.csv"))[0] == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("table", "--fn", "elu", "--param", "0.7", "--lo", "-3", "--hi", "2", "--n", "41"),
            ("simulate", "--seed", "42", "--n", "100"),
        ],
    )
    def test_byte_identical_across_processes(self, tmp_path, argv):
        outputs = []
        for i in range(2):
            target = tmp_path / f"run{i}.csv"
            subprocess.run([sys.executable, "-m", "actcheck.cli", *argv, "--out", str(target)], check=True, capture_output=True)
            outputs.append(target.read_bytes())
        assert outputs[0] == outputs[1] and outputs[0]
