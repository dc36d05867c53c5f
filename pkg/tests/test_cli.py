"""Command-line interface:每 subcommand smoke test with exit codes and
output shape."""

import json
from fractions import Fraction

from mitlgta.automata import gta_to_json
from mitlgta.cli import main
from mitlgta.formula import word_to_json


def test_compile_reports_sizes_and_state_count_note(capsys):
    rc = main(["compile", "T U[1,2] p"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "transducer:" in out and "acceptor:" in out
    assert "k=2" in out
    assert "2k-1=3 undercounts" in out and "2k+1=5" in out


def test_compile_writes_json(tmp_path, capsys):
    out = tmp_path / "c"
    rc = main(["compile", "X[1,2] p", "--out", str(out)])
    capsys.readouterr()
    assert rc == 0
    data = json.loads((str(out) + ".gta.json") and open(str(out) + ".gta.json").read())
    assert data["states"]


def test_check_sat_exit_codes(capsys):
    rc = main(["check-sat", "T U[1,2] p", "--budget", "20000"])
    out = capsys.readouterr().out
    assert rc == 1 and "verdict: SAT" in out and "lasso" in out

    rc = main(["check-sat", "(T U[1,2] p) & !(T U p)", "--budget", "20000"])
    out = capsys.readouterr().out
    assert rc == 0 and "verdict: UNSAT" in out


def test_check_sat_writes_witness(tmp_path, capsys):
    w = tmp_path / "w.json"
    rc = main(["check-sat", "T U[1,2] p", "--budget", "20000", "--witness", str(w)])
    capsys.readouterr()
    assert rc == 1
    data = json.loads(w.read_text())
    assert data["cycle"]


def test_model_check_cli(tmp_path, capsys):
    from test_explore import _always_p_system

    sys_file = tmp_path / "sys.json"
    sys_file.write_text(gta_to_json(_always_p_system()))
    rc = main(["model-check", "G p", "--system", str(sys_file), "--budget", "20000"])
    out = capsys.readouterr().out
    assert rc == 0 and "verdict: HOLDS" in out
    rc = main(["model-check", "G !p", "--system", str(sys_file), "--budget", "20000"])
    out = capsys.readouterr().out
    assert rc == 1 and "verdict: VIOLATED" in out


def test_simulate_cli(tmp_path, capsys):
    from test_explore import _always_p_system, _finite_prediction_gta

    gta = _always_p_system()
    auto = tmp_path / "a.json"
    auto.write_text(gta_to_json(gta))
    word = [(frozenset(["p"]), Fraction(1)), (frozenset(["p"]), Fraction(2))]
    wf = tmp_path / "w.json"
    wf.write_text(json.dumps(word_to_json(word)))
    pf = tmp_path / "p.json"
    pf.write_text(json.dumps([{"transition": 0}, {"transition": 0}]))
    rc = main(
        ["simulate", "--automaton", str(auto), "--word", str(wf), "--steps", str(pf)]
    )
    out = capsys.readouterr().out
    assert rc == 0 and "run complete" in out

    # a clocked automaton without an explicit start valuation blocks on its
    # own initial guard (the default seeds future clocks at 0, not -1)
    auto.write_text(gta_to_json(_finite_prediction_gta(release=True)))
    word = [(frozenset(["a"]), Fraction(1))]
    wf.write_text(json.dumps(word_to_json(word)))
    pf.write_text(json.dumps([{"transition": 0, "choices": {"x": "-1"}}]))
    rc = main(
        ["simulate", "--automaton", str(auto), "--word", str(wf), "--steps", str(pf)]
    )
    out = capsys.readouterr().out
    assert rc == 1 and "blocked" in out


def test_zonegraph_cli(tmp_path, capsys):
    rc = main(["zonegraph", "--formula", "X[0,1] p", "--budget", "5000"])
    out = capsys.readouterr().out
    assert rc in (0, 2) and "zone graph:" in out

    dot = tmp_path / "g.dot"
    rc = main(
        ["zonegraph", "--formula", "X[0,1] p", "--budget", "5000", "--dot", str(dot)]
    )
    capsys.readouterr()
    assert "digraph zones" in dot.read_text()
