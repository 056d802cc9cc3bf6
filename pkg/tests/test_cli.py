import json

import pytest

from markedrot import cli
from markedrot.config import emit_spec, parse_config
from markedrot.errors import ConfigError

VEECH = """\
alpha.period = [1]
point b1 = tail=pattern([1,0,0])
perm = [2,1]
perm = [1,2]
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_analyze_veech(tmp_path, capsys):
    cfg = write(tmp_path, "v.cfg", VEECH)
    out = tmp_path / "r.json"
    assert cli.main(["analyze", cfg, "--out", str(out)]) == 0
    assert "NON_RIGID" in capsys.readouterr().out
    report = json.loads(out.read_text())
    assert report["verdict"] == "NON_RIGID" and report["linear_recurrence"]["status"] == "consistent_LR"


def test_identity_perms_not_minimal(tmp_path):
    cfg = write(tmp_path, "i.cfg", VEECH.replace("perm = [2,1]", "perm = [1,2]"))
    assert cli.main(["analyze", cfg]) == cli.EXIT_NOT_MINIMAL


def test_malformed_rule_names_field(tmp_path, capsys):
    cfg = write(tmp_path, "b.cfg", VEECH.replace("pattern([1,0,0])", "pattern([1,0,0]"))
    assert cli.main(["analyze", cfg]) == cli.EXIT_PARSE
    err = capsys.readouterr().err
    assert "point b1" in err and "line 2" in err


def test_parse_errors_carry_location():
    with pytest.raises(ConfigError) as exc:
        parse_config("alpha.period = [1]\nbogus = 3\n")
    assert exc.value.line == 2
    with pytest.raises(ConfigError):
        parse_config("alpha.period = 1\n")


def test_series_headers_and_determinism(tmp_path):
    cfg = write(tmp_path, "v.cfg", VEECH)
    ne = tmp_path / "ne.csv"
    assert cli.main(["series", cfg, "--what", "ne", "--range", "1:20", "--out", str(ne)]) == 0
    lines = ne.read_text().splitlines()
    assert lines[0] == "n,ne_lo,ne_hi" and len(lines) == 21
    runs = []
    for i in range(2):
        p = tmp_path / f"p{i}.csv"
        assert cli.main(["series", cfg, "--what", "probe", "--range", "3:5", "--samples", "10",
                         "--N", "400", "--seed", "7", "--out", str(p)]) == 0
        runs.append(p.read_bytes())
    assert runs[0] == runs[1]
    assert runs[0].decode().splitlines()[0] == "q,mean,max,resamples"
    psi = tmp_path / "psi.csv"
    assert cli.main(["series", cfg, "--what", "psi", "--range", "2:6", "--out", str(psi)]) == 0
    assert psi.read_text().splitlines()[0].startswith("n,q,theta,zeta,dev_lo,dev_hi")


@pytest.mark.parametrize("which,verdict,tag", [
    ("rigid3", "RIGID", "3r"),
    ("nrnlr", "NON_RIGID", "nrig"),
    ("d2r4", "NON_RIGID", "d2r4"),
])
def test_construct_then_analyze(tmp_path, which, verdict, tag):
    cfg = tmp_path / f"{which}.cfg"
    assert cli.main(["construct", which, "--out", str(cfg)]) == 0
    text = cfg.read_text()
    spec = parse_config(text).to_spec()
    assert emit_spec(spec) == text
    out = tmp_path / "r.json"
    assert cli.main(["analyze", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert (report["verdict"], report["tag"]) == (verdict, tag)
    if which == "nrnlr":
        assert report["linear_recurrence"]["status"] == "inconsistent_LR"


def test_round_trip_rational_alpha():
    text = "alpha.rational = 987/1597\nalpha.trust_depth = 12\npoint b1 = prefix=[1,0]; tail=const(0)\npoint t = one_minus_alpha\nperm = [2,1]\nperm = [1,2]\nperm = [2,1]\noption depth = 10\n"
    doc = parse_config(text)
    spec = doc.to_spec()
    again = parse_config(emit_spec(spec))
    assert again == parse_config(emit_spec(again.to_spec()))
    assert again.rational == doc.rational and again.trust_depth == 12 and again.options == {"depth": "10"}
