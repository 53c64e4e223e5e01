import io
import json
import random

import pytest

from flute.cli import main
from flute.code import parse_code
from flute.family import canonical, family_shift
from flute.shift import format_shift_record

from goldens import ALPHA1_N1
from strategies import random_code

A0 = "Ps 0o 0u Ps"


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_apply_g_gives_alpha1(capsys):
    code, out, _ = run(capsys, "apply", "--shift", "g:1", A0)
    assert code == 0 and out.strip() == ALPHA1_N1


def test_reduce_example(capsys):
    code, out, _ = run(capsys, "reduce", "Ps 0o 1o 1o 1u 2u 2o 1o 0o Ps")
    assert out.strip() == "Ps 0o 1u 2u 2o 1o 0o Ps"


def test_matrix_eigenvalue(capsys):
    code, out, _ = run(capsys, "matrix", "--n", "1", "--eigenvalue")
    lines = out.splitlines()
    assert lines[0].split() == ["5", "6", "0", "2"]
    assert lines[-1].startswith("eigenvalue 15.3379")


def test_matrix_json(capsys):
    code, out, _ = run(capsys, "matrix", "--n", "3", "--json")
    rec = json.loads(out)
    assert len(rec["rows"]) == 5 and rec["perron_frobenius"] is True


def test_exit_codes(capsys):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2
    assert run(capsys, "reduce", "Ps 0x Ps")[0] == 2
    assert run(capsys, "reduce", "Ps 0o 2o Ps")[0] == 2
    code, _, err = run(capsys, "iterate", "--n", "1", "--steps", "5", "--max-tokens", "100")
    assert code == 1 and "flute:" in err
    assert run(capsys, "loop-check", "--shift", "h1", "0o 1o 2o")[0] == 1
    assert run(capsys, "apply", "--shift", "h9", A0)[0] == 2
    assert run(capsys, "apply", A0)[0] == 2


def test_json_and_plain_agree(capsys):
    for argv in (["apply", "--shift", "g:2", A0], ["iterate", "--n", "1", "--steps", "2"],
                 ["reduce", "Ps 0o 1o 1o 1u 2u 2o 1o 0o Ps", A0]):
        _, plain, _ = run(capsys, *argv)
        _, js, _ = run(capsys, *argv, "--json")
        recs = json.loads(js)
        recs = recs if isinstance(recs, list) else [recs]
        texts = [ln.split(": ", 1)[-1] for ln in plain.splitlines()]
        assert [" ".join(r["tokens"]) for r in recs] == texts


def test_piped_round_trip(capsys, monkeypatch):
    rng = random.Random(7)
    arcs = [str(random_code(rng, rng.randint(1, 20), arc=True)) for _ in range(30)]
    for sh in ("h1", "h2:2", "h3:3", "g:1"):
        _, fwd, _ = run(capsys, "apply", "--shift", sh, stdin="\n".join(arcs),
                        monkeypatch=monkeypatch)
        _, back, _ = run(capsys, "apply", "--shift", sh, "--power", "-1", stdin=fwd,
                         monkeypatch=monkeypatch)
        want = arcs if sh != "g:1" else [str(canonical(parse_code(a))) for a in arcs]
        assert back.splitlines() == want


def test_shift_file(capsys, tmp_path):
    f = tmp_path / "h.txt"
    f.write_text(format_shift_record(family_shift("h2", 1)) + "\n")
    a = run(capsys, "apply", "--shift-file", str(f), A0)[1]
    b = run(capsys, "apply", "--shift", "h2:1", A0)[1]
    assert a == b
    f.write_text("sideways 1\n")
    assert run(capsys, "apply", "--shift-file", str(f), A0)[0] == 2


def test_loop_check(capsys):
    code, out, _ = run(capsys, "loop-check", "--shift", "h1", "0u Pu (-1)o (-1)u Pu 0u")
    assert out.strip() == "direct=True closed_form=True"
    assert run(capsys, "loop-check", "--shift", "g:1", "0o 0u")[0] == 1


def test_small_commands(capsys):
    assert run(capsys, "pairing", A0, "Ps 0o 1o 2o 2u 1o 0o 0u 1o 2u 2o 1o 0o Ps")[1].strip() == "0 0"
    assert run(capsys, "phi", "--n", "1", ALPHA1_N1)[1].strip() == "1"
    assert run(capsys, "highway", "--n", "1", "--i", "2")[1].strip() == "True"
    assert run(capsys, "intersect", A0, "Ps (-1)o (-1)u Ps")[1].strip() == "0"
    out = run(capsys, "intersect", "--strands", A0, ALPHA1_N1)[1]
    assert out.splitlines()[0] == "2" and "P*" in out
    theta = run(capsys, "theta", "--n", "1", "--i", "0")[1].strip()
    assert theta == "Po (-1)R (-1)RR 0L 0o 0u 0L (-1)RR (-1)R Pu"
    assert run(capsys, "theta", A0)[1].strip() == theta
    out = run(capsys, "beta", "--n", "1", "--steps", "1")[1]
    assert out.splitlines()[0] == "beta_0: Ps (-1)o (-2)o (-2)u (-1)o Ps"
    out = run(capsys, "lanes", "--json", ALPHA1_N1)[1]
    assert "lanes" in json.loads(out)
