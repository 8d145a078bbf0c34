import io
import json
import subprocess
import sys

import pytest

from qn_workbench.cli import main

REPORT_KEYS = {"command", "config", "verdict", "data", "elapsed_ms"}


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    return code, json.loads(text)


def test_gb_gr3_passes_and_lists_rules():
    code, text = run("gb", "--n", "3", "--algebra", "gr", "--max-degree", "5")
    assert code == 0
    assert "6 elements" in text and "PASS" in text
    assert "r{1,2,3}*r{1,3} - r{1,2,3}*r{2,3}" in text


def test_gb_q2_has_no_closed_form_comparison():
    code, report = run_json("gb", "--n", "2", "--algebra", "q", "--max-degree", "5")
    assert code == 0
    assert report["verdict"] == "COMPUTED"
    assert report["data"]["count"] == 1
    assert "closed_form" not in report["data"]


@pytest.mark.parametrize("argv", [
    ["gb", "--n", "0"],
    ["gb", "--n", "2", "--max-degree", "1"],
    ["gb", "--n", "2", "--field", "fp:10"],
    ["hilbert"],
    ["verify-all", "--n", "1"],
    ["gb", "--n", "2", "--presentation", "/nonexistent/file.txt"],
])
def test_usage_errors_exit_1(argv):
    code, _ = run(*argv)
    assert code == 1


def test_argparse_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"], io.StringIO())
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["gb", "--algebra", "x", "--n", "2"], io.StringIO())
    assert exc.value.code == 1


def test_froberg_n2():
    code, text = run("froberg", "--n", "2", "--max-degree", "5")
    assert code == 0
    assert "1 + 3t + 8t^2 + 21t^3 + 55t^4 + 144t^5" in text
    assert "verdict: PASS" in text


def test_froberg_failure_exits_2(tmp_path):
    # the non-Koszul control presentation violates the Froberg relation
    path = tmp_path / "control.txt"
    path.write_text("generators: x, y, z\n-x*y + x*x\n-z*y + x*x\ny*y\n")
    code, report = run_json("froberg", "--presentation", str(path), "--max-degree", "5")
    assert code == 2
    assert report["verdict"] == "FAIL"
    assert report["data"]["first_failure"] is not None


def test_hilbert_and_dual_reports():
    code, report = run_json("hilbert", "--n", "3", "--algebra", "q", "--max-degree", "4")
    assert code == 0 and report["verdict"] == "PASS"
    assert report["data"]["series"] == [1, 7, 44, 274, 1705]
    code, report = run_json("dual", "--n", "3", "--algebra", "q", "--max-degree", "5")
    assert code == 0 and report["verdict"] == "PASS"
    assert report["data"]["dual_series"] == [1, 7, 5, 1, 0, 0]
    assert report["data"]["n_relations"] == 44


def test_complex_command(tmp_path):
    dump = tmp_path / "k3.txt"
    code, report = run_json("complex", "--n", "3", "--max-degree", "5", "--dump", str(dump))
    assert code == 0 and report["verdict"] == "PASS"
    assert report["data"]["ranks"] == [7, 5, 1]
    assert report["data"]["d_squared_ok"] and report["data"]["acyclic"]
    assert all(row["dim"] == 0 for row in report["data"]["homology"])
    assert "K_3: S({1,2,3}:{2,3})" in dump.read_text()


def test_complex_requires_n():
    code, _ = run("complex", "--presentation", "x.txt")
    assert code == 1


def test_tor_command_text():
    code, text = run("tor", "--n", "3", "--i-max", "4", "--j-max", "6")
    assert code == 0
    assert "diagonal [1, 7, 5, 1, 0]; off-diagonal nonzero: 0" in text
    assert "Koszul to bound: PASS" in text


def test_tor_command_fails_on_control(tmp_path):
    path = tmp_path / "control.txt"
    path.write_text("generators: x, y, z\n-x*y + x*x\n-z*y + x*x\ny*y\n")
    code, report = run_json("tor", "--presentation", str(path), "--i-max", "3", "--j-max", "5")
    assert code == 2
    assert {"i": 3, "j": 4, "dim": 1} in report["data"]["off_diagonal"]


def test_truncation_exit_3(tmp_path):
    # a cache entry completed to a lower degree than its name claims
    from qn_workbench import family
    from qn_workbench.groebner import complete, save_system
    rs = complete(family.relations_gr(2), 3)
    save_system(rs, str(tmp_path / "gr2_d5_rational.gb"), family.alphabet(2))
    code, _ = run("complex", "--n", "2", "--max-degree", "5", "--cache-dir", str(tmp_path))
    assert code == 3


def test_json_schema_is_stable():
    for argv in (["gb", "--n", "2"], ["hilbert", "--n", "2"], ["dual", "--n", "2"],
                 ["froberg", "--n", "2"], ["complex", "--n", "2", "--max-degree", "4"],
                 ["tor", "--n", "2", "--i-max", "3", "--j-max", "4"], ["export", "--n", "2"]):
        code, report = run_json(*argv)
        assert code == 0
        assert set(report) == REPORT_KEYS
        assert report["command"] == argv[0]
        assert isinstance(report["elapsed_ms"], int)
        assert report["config"]["n"] == 2


def test_export_then_presentation_round_trip(tmp_path):
    path = tmp_path / "gr3.txt"
    code, _ = run("export", "--n", "3", "--algebra", "gr", "--output", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("generators: r{3}, r{2}, r{1}, r{2,3}, r{1,3}, r{1,2}, r{1,2,3}\n")
    assert len(text.strip().splitlines()) == 7
    code, a = run_json("hilbert", "--presentation", str(path), "--max-degree", "4")
    code2, b = run_json("hilbert", "--n", "3", "--algebra", "gr", "--max-degree", "4")
    assert code == code2 == 0
    assert a["data"]["series"] == b["data"]["series"]
    code, t = run_json("tor", "--presentation", str(path), "--i-max", "3", "--j-max", "4")
    assert code == 0 and t["data"]["diagonal"] == [1, 7, 5, 1]


def _tables(report):
    data = report["data"]
    return {k: v for k, v in data.items()
            if k in ("series", "dual_series", "filtration_partner", "table", "ranks", "homology",
                     "slice_dims", "tor", "diagonal", "off_diagonal", "count", "n_relations")}


FIELD_CASES = [(cmd, algebra) for cmd in (["gb"], ["hilbert"], ["dual"], ["froberg"], ["complex"],
                                          ["tor", "--i-max", "3", "--j-max", "4"])
               for algebra in ("q", "gr") if not (cmd == ["complex"] and algebra == "q")]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("cmd,algebra", FIELD_CASES)
def test_prime_field_matches_rationals(n, cmd, algebra):
    # the complex is built over gr Q_n only, so it has no q variant
    args = cmd + ["--n", str(n), "--algebra", algebra, "--max-degree", "4"]
    code_q, rq = run_json(*args)
    code_p, rp = run_json(*args, "--field", "fp:32003")
    assert code_q == code_p
    assert rq["verdict"] == rp["verdict"]
    assert _tables(rq) == _tables(rp)


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("QN_WORKBENCH_CACHE", str(tmp_path))
    code1, first = run_json("gb", "--n", "3", "--algebra", "q", "--cache-dir", str(tmp_path))
    files = list(tmp_path.iterdir())
    assert [f.name for f in files] == ["q3_d5_rational.gb"]
    stamp = files[0].stat().st_mtime_ns
    # second run picks the directory up from the environment
    code2, second = run_json("gb", "--n", "3", "--algebra", "q")
    assert code1 == code2 == 0
    assert first["data"]["rules"] == second["data"]["rules"]
    assert files[0].stat().st_mtime_ns == stamp


def test_verify_all_n2():
    code, report = run_json("verify-all", "--n", "2")
    assert code == 0 and report["verdict"] == "PASS"
    assert [c["criterion"] for c in report["data"]["criteria"]] == [f"A{i}" for i in range(1, 10)]
    assert all(c["passed"] for c in report["data"]["criteria"])


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "qn_workbench.cli", "hilbert", "--n", "2",
                           "--max-degree", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "1 + 3t + 8t^2 + 21t^3" in proc.stdout
