import json

import pytest

from toricmmp.cli import main
from toricmmp import io as tio
from toricmmp.fan import Fan


P2 = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]],
      "cones": [[0, 1], [1, 2], [0, 2]]}
F1 = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, 1], [0, -1]],
      "cones": [[0, 1], [1, 2], [2, 3], [0, 3]]}
QUADRIC = {"rank": 3,
           "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]],
           "cones": [[0, 1, 2, 3]]}
BLOWUP = {"rank": 2, "rays": [[1, 0], [0, 1], [1, 1]],
          "cones": [[0, 2], [1, 2]]}
ORTHANT = {"rank": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]]}


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_fan_validate_ok(tmp_path, capsys):
    f = _write(tmp_path, "p2.json", P2)
    code, out = _run(capsys, ["fan", "validate", "--fan", f])
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_fan_validate_bad(tmp_path, capsys):
    bad = {"rank": 2, "rays": [[1, 0], [-1, 0]], "cones": [[0, 1]]}
    f = _write(tmp_path, "bad.json", bad)
    code, out = _run(capsys, ["fan", "validate", "--fan", f])
    assert code == 1
    assert json.loads(out)["valid"] is False


def test_fan_malformed_json(tmp_path, capsys):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    code, _ = _run(capsys, ["fan", "validate", "--fan", str(p)])
    assert code == 1


def test_fan_qfactorialize(tmp_path, capsys):
    f = _write(tmp_path, "q.json", QUADRIC)
    code, out = _run(capsys, ["fan", "qfactorialize", "--fan", f])
    assert code == 0
    data = json.loads(out)
    assert data["simplicial"] is True
    assert len(data["fan"]["cones"]) == 2


def test_ne_cone_f1(tmp_path, capsys):
    f = _write(tmp_path, "f1.json", F1)
    code, out = _run(capsys, ["ne-cone", "--fan", f])
    assert code == 0
    data = json.loads(out)
    assert data["rho"] == 2
    assert sorted(map(tuple, data["extremal_rays"])) == \
        [(0, 1, 0, 1), (1, -1, 1, 0)]


def test_mmp_trace(tmp_path, capsys):
    f = _write(tmp_path, "f1.json", F1)
    trace_file = tmp_path / "trace.json"
    code, out = _run(capsys, ["mmp", "--fan", f, "--trace", str(trace_file)])
    assert code == 0
    data = json.loads(out)
    assert data["outcome"] == "fano"
    assert [s["kind"] for s in data["steps"]] == ["divisorial", "fano"]
    assert json.loads(trace_file.read_text()) == data


def test_mmp_divisor_file(tmp_path, capsys):
    _write(tmp_path, "tri.json",
           {"rank": 3,
            "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]],
            "cones": [[0, 1, 3], [0, 2, 3]]})
    _write(tmp_path, "cone.json", QUADRIC)
    mp = _write(tmp_path, "small.json",
                {"matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                 "source": "tri.json", "target": "cone.json"})
    div = _write(tmp_path, "d.json", {"coeffs": ["1", "0", "0", "0"]})
    code, out = _run(capsys, ["mmp", "--map", mp, "--divisor", div])
    assert code == 0
    data = json.loads(out)
    assert data["outcome"] == "minimal"
    assert [s["kind"] for s in data["steps"]] == ["flipping"]


def test_map_file(tmp_path, capsys):
    src = _write(tmp_path, "blowup.json", BLOWUP)
    tgt = _write(tmp_path, "orthant.json", ORTHANT)
    mp = _write(tmp_path, "map.json",
                {"matrix": [[1, 0], [0, 1]],
                 "source": "blowup.json", "target": "orthant.json"})
    code, out = _run(capsys, ["ne-cone", "--map", mp])
    assert code == 0
    data = json.loads(out)
    assert data["extremal_rays"] == [[1, 1, -1]]


def test_zariski(tmp_path, capsys):
    src = _write(tmp_path, "blowup.json", BLOWUP)
    tgt = _write(tmp_path, "orthant.json", ORTHANT)
    mp = _write(tmp_path, "map.json",
                {"matrix": [[1, 0], [0, 1]],
                 "source": "blowup.json", "target": "orthant.json"})
    div = _write(tmp_path, "e.json", {"coeffs": ["0", "0", "1"]})
    code, out = _run(capsys, ["zariski", "--map", mp, "--divisor", div,
                              "--m-max", "12"])
    assert code == 0
    data = json.loads(out)
    assert data["ckm_ok"] is True
    assert data["P"]["coeffs"] == ["0", "0", "0"]
    # N = E in the model fan's ray order
    rays = [tuple(r) for r in data["model_fan"]["rays"]]
    n = dict(zip(rays, data["N"]["coeffs"]))
    assert n == {(1, 0): "0", (0, 1): "0", (1, 1): "1"}


def test_sections_and_box(tmp_path, capsys):
    f = _write(tmp_path, "p2.json", P2)
    div = _write(tmp_path, "h.json", {"coeffs": ["0", "0", "1"]})
    code, out = _run(capsys, ["sections", "--fan", f, "--divisor", div])
    assert code == 0
    pts = json.loads(out)["lattice_points"]
    assert sorted(map(tuple, pts)) == [(0, 0), (0, 1), (1, 0)]
    # unbounded without a box: reported, still exit 0
    f2 = _write(tmp_path, "orthant.json", ORTHANT)
    code, out = _run(capsys, ["sections", "--fan", f2])
    assert code == 0
    assert json.loads(out)["lattice_points"] is None


def test_hilbert(tmp_path, capsys):
    f = _write(tmp_path, "a1.json",
               {"rank": 2, "rays": [[1, 0], [1, 2]], "cones": [[0, 1]]})
    div = _write(tmp_path, "d.json", {"coeffs": ["1", "0"]})
    code, out = _run(capsys, ["hilbert", "--fan", f, "--divisor", div])
    assert code == 0
    assert json.loads(out)["count"] == 6


def test_sing_classify(tmp_path, capsys):
    f = _write(tmp_path, "a1.json",
               {"rank": 2, "rays": [[1, 0], [1, 2]], "cones": [[0, 1]]})
    code, out = _run(capsys, ["sing", "classify", "--fan", f,
                              "--point", "1,1"])
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "canonical"
    assert data["discrepancy_at_point"] == "0"


def test_sing_precondition_exit_code(tmp_path, capsys):
    f = _write(tmp_path, "q.json", QUADRIC)
    div = _write(tmp_path, "d.json", {"coeffs": ["1", "0", "0", "0"]})
    code, out = _run(capsys, ["zariski",
                              "--fan", f, "--divisor", div])
    assert code == 2  # non-simplicial source is a precondition failure


def test_newton(tmp_path, capsys):
    exp = _write(tmp_path, "cusp.json", {"exponents": [[2, 0], [0, 3]]})
    code, out = _run(capsys, ["newton", "--exponents", exp,
                              "--model", "canonical"])
    assert code == 0
    data = json.loads(out)
    assert data["model_type"] == "canonical"
    assert data["nef"] is True


def test_corpus_smoke(capsys):
    code, out = _run(capsys, ["corpus", "--seed", "3", "--count", "4"])
    assert code == 0
    data = json.loads(out)
    assert len(data["instances"]) == 4


def test_byte_determinism(tmp_path, capsys):
    f = _write(tmp_path, "f1.json", F1)
    _, out1 = _run(capsys, ["mmp", "--fan", f])
    _, out2 = _run(capsys, ["mmp", "--fan", f])
    assert out1.encode() == out2.encode()


def test_fan_roundtrip(tmp_path):
    F = Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2), (0, 2)))
    p = tmp_path / "out.json"
    tio.save_fan(F, str(p))
    assert tio.load_fan(str(p)).canonical() == F.canonical()


def test_divisor_rational_roundtrip():
    from fractions import Fraction
    assert tio.parse_rational("-3/7") == Fraction(-3, 7)
    assert tio.format_rational(Fraction(-3, 7)) == "-3/7"
    assert tio.format_rational(Fraction(4, 2)) == "2"
