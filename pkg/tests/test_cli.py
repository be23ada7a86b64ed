import json
import math

import pytest

from splab.cli import fmt, main


def run(tmp_path, *argv):
    out = tmp_path / "out"
    rc = main([*argv, "--out", str(out)])
    return rc, out


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_fmt():
    assert fmt(12) == "12"
    assert fmt(True) == "1"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(4.41021155692809) == "4.41021155693"
    assert fmt(math.inf) == "inf"


def test_density(tmp_path):
    rc, out = run(tmp_path, "density", "--x", "30,1000", "--alpha", "0")
    assert rc == 0
    header, rows = read_csv(out / "density.csv")
    assert header == ["x", "count_N_alpha", "pi_x", "ratio_to_x_over_logx", "ratio_to_pi", "theorem1_bound"]
    assert rows[0][:3] == ["30", "5", "10"]
    assert float(rows[0][5]) == pytest.approx(4.410, abs=1e-3)
    manifest = json.loads((out / "density.manifest.json").read_text())
    assert manifest["kappa_estimate"] == pytest.approx(min(float(r[4]) for r in rows))
    assert manifest["parameters"]["alpha"] == "0/1"
    assert manifest["command"] == "density"
    assert str(out / "density.csv") in manifest["output_paths"]


def test_density_x2(tmp_path):
    rc, out = run(tmp_path, "density", "--x", "2", "--alpha", "0")
    assert rc == 0
    assert read_csv(out / "density.csv")[1][0][:2] == ["2", "0"]


def test_sums(tmp_path):
    rc, out = run(tmp_path, "sums", "--x", "30,10000", "--c", "1/2", "--plot")
    assert rc == 0
    header, rows = read_csv(out / "sums.csv")
    assert header == ["x", "M_c", "L_full", "L_low", "L_mid", "L_high", "L_full_over_x"]
    r30 = dict(zip(header, map(float, rows[0])))
    assert r30["M_c"] == pytest.approx(4.3438, abs=1e-4)
    assert r30["L_high"] == pytest.approx(6.8287, abs=1e-4)
    assert r30["L_full"] == pytest.approx(math.log(1021870080), rel=1e-11)
    for row in rows:
        v = dict(zip(header, map(float, row)))
        assert v["L_low"] + v["L_mid"] + v["L_high"] == pytest.approx(v["L_full"], rel=1e-9)
    plot = (out / "sums.plot.dat").read_text().splitlines()
    assert len(plot) == 2 and len(plot[0].split()) == 2


@pytest.mark.parametrize("mode,want", [("multiplicity", "3"), ("distinct", "1")])
def test_products(tmp_path, mode, want):
    rc, out = run(tmp_path, "products", "--x", "100,1000", "--k", "2", "--a", "1/4",
                  "--mode", mode, "--engine", "both", "--records")
    assert rc == 0
    header, rows = read_csv(out / "products.csv")
    assert header == ["x", "count", "envelope_lower", "envelope_upper", "count_over_x_pow"]
    assert rows[0][1] == want
    manifest = json.loads((out / "products.manifest.json").read_text())
    assert manifest["parameters"]["mode"] == mode
    assert manifest["fit"]["points_used"] == 2
    assert (out / "products_records_x100.csv").exists()


def test_products_requires_mode(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["products", "--x", "100", "--a", "1/4"])
    assert exc.value.code == 2


def test_products_engine_disagreement(tmp_path, monkeypatch):
    import splab.cli as cli
    from splab.products import EnumResult

    real = cli.progression_enumerate

    def off_by_one(*args, **kwargs):
        res = real(*args, **kwargs)
        return EnumResult(res.count + 1, res.records[1:] if res.records else res.records)

    off_by_one.__name__ = "progression_enumerate"
    monkeypatch.setattr(cli, "progression_enumerate", off_by_one)
    rc, _ = run(tmp_path, "products", "--x", "100", "--a", "1/4", "--mode", "distinct",
                "--engine", "both", "--records")
    assert rc == 3


def test_cost_guard_exit_codes(tmp_path):
    rc, _ = run(tmp_path, "products", "--x", "20000000", "--a", "1/4", "--mode", "distinct")
    assert rc == 4
    rc, _ = run(tmp_path, "products", "--x", "1000", "--a", "1/4", "--mode", "distinct", "--max-x", "20000000")
    assert rc == 4
    rc, _ = run(tmp_path, "products", "--x", "1000", "--a", "1/4", "--mode", "distinct",
                "--max-x", "20000000", "--i-accept-long-run")
    assert rc == 0
    rc, _ = run(tmp_path, "products", "--x", "1000", "--a", "1/4", "--mode", "distinct", "--max-x", "500")
    assert rc == 4


@pytest.mark.parametrize("argv", [
    ["density", "--x", "100", "--alpha", "0.25"],
    ["density", "--x", "100", "--alpha", "1/2"],
    ["sums", "--x", "100,50"],
    ["products", "--x", "100", "--a", "1/3", "--mode", "distinct"],
    ["btscan", "--y", "100", "--c1", "2", "--c2", "1"],
])
def test_domain_errors_exit_2(tmp_path, argv):
    rc, _ = run(tmp_path, *argv)
    assert rc == 2


def test_unsafe_exponent(tmp_path):
    rc, _ = run(tmp_path, "products", "--x", "1000", "--a", "1/3", "--mode", "distinct", "--unsafe-exponent")
    assert rc == 0


def test_btscan(tmp_path, capsys):
    rc, out = run(tmp_path, "btscan", "--y", "100", "--nu", "0.5", "--c1", "0.5", "--c2", "1.5")
    assert rc == 0
    header, rows = read_csv(out / "btscan.csv")
    assert header == ["p", "pi_y_p_u", "window_low", "window_high", "is_exception"]
    assert [r[0] for r in rows if r[4] == "1"] == ["2", "3"]
    _, summary = read_csv(out / "btscan_summary.csv")
    assert summary == [["2", "4", "0.5"]]
    assert "2 exceptions of 4 scanned" in capsys.readouterr().out
    rc, out = run(tmp_path, "btscan", "--y", "100", "--c1", "0", "--c2", "huge")
    _, summary = read_csv(out / "btscan_summary.csv")
    assert summary[0][0] == "0"


def test_x_grid(tmp_path):
    rc, out = run(tmp_path, "density", "--x-grid", "100:10:3")
    assert rc == 0
    _, rows = read_csv(out / "density.csv")
    assert [r[0] for r in rows] == ["100", "1000", "10000"]


def test_stdout_mode(capsys):
    assert main(["sums", "--x", "30"]) == 0
    assert capsys.readouterr().out.startswith("x,M_c,L_full")


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and text.count("PASS") >= 10


COMMANDS = [
    ["density", "--x-grid", "1000:10:3", "--alpha", "1/8"],
    ["sums", "--x-grid", "10000:10:3", "--c", "1/4"],
    ["products", "--x-grid", "1000:10:3", "--a", "1/4", "--mode", "multiplicity", "--engine", "both"],
    ["btscan", "--y", "100000", "--nu", "1/2", "--c1", "0.5", "--c2", "1.5"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_determinism(tmp_path, argv):
    outputs = []
    for workers, block in [(1, 2**22), (8, 2**12), (8, 2**22), (1, 2**12)]:
        out = tmp_path / f"w{workers}b{block}"
        assert main([*argv, "--workers", str(workers), "--block-size", str(block), "--out", str(out)]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    assert all(o == outputs[0] for o in outputs[1:])
