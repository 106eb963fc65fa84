import copy
import json
import math

import numpy as np
import pytest

from qflicker.errors import InputError, UnitError
from qflicker.geometry import Box
from qflicker.quantities import from_unit, to_unit
from qflicker.workbench import cli, emit, from_dict, ingest
from qflicker.workbench.descriptor import schema
from qflicker.workbench.records import RunRecord

BUNDLED = "voss1981_gold"


@pytest.fixture
def voss_dict():
    return json.loads(emit(ingest(BUNDLED)))


def write_desc(tmp_path, data, name="sample.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *argv):
    status = cli.main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def parse_csv(text):
    meta, rows = {}, []
    for line in text.splitlines():
        if line.startswith("# ") and ": " in line:
            k, v = line[2:].split(": ", 1)
            meta.setdefault(k, v)
        elif line and not line.startswith("#"):
            rows.append(line.split(","))
    return meta, rows


# -- descriptors ------------------------------------------------------------------


def test_ingest_bundled():
    d = ingest(BUNDLED)
    assert isinstance(d.region, Box)
    assert to_unit(from_unit(d.region.l, "cm"), "um") == pytest.approx(625)
    assert to_unit(from_unit(d.region.w, "cm"), "um") == pytest.approx(8)
    assert to_unit(from_unit(d.region.h, "cm"), "nm") == pytest.approx(25)
    assert d.U0 == pytest.approx(0.81 / 299.792458, rel=1e-15)
    assert d.T == 330.0
    assert d.material.n == 5.9e22
    assert d.material.mobility.mu == pytest.approx(1.3 * 299.792458, rel=1e-15)
    f, c = d.references[0]
    assert f == 1.0
    assert c * 299.792458**2 == pytest.approx(1e-15, rel=1e-12)


def test_missing_sigma_and_mobility_rejected(voss_dict):
    del voss_dict["material"]["sigma"]
    del voss_dict["material"]["mobility"]
    with pytest.raises(InputError, match="material"):
        from_dict(voss_dict)


def test_wrong_dimension_names_field(voss_dict):
    voss_dict["temperature"]["units"] = "V"
    with pytest.raises(UnitError, match="temperature"):
        from_dict(voss_dict)
    voss_dict["temperature"]["units"] = "K"
    voss_dict["material"]["n"]["units"] = "parsecs"
    with pytest.raises(UnitError, match="material.n"):
        from_dict(voss_dict)


def test_schema_violation_names_field(voss_dict):
    del voss_dict["bias"]["U0"]["units"]
    with pytest.raises(InputError, match="bias"):
        from_dict(voss_dict)
    bad = copy.deepcopy(voss_dict)
    bad["schema_version"] = 2
    with pytest.raises(InputError, match="schema_version"):
        from_dict(bad)


def test_round_trip(voss_dict, tmp_path):
    a = ingest(BUNDLED)
    b = ingest(write_desc(tmp_path, json.loads(emit(a))))
    assert b.resolved() == a.resolved()
    assert emit(b) == emit(a)


def test_schema_is_valid_json_schema():
    import jsonschema

    jsonschema.Draft202012Validator.check_schema(schema())


def test_voxel_descriptor(tmp_path, voss_dict, capsys):
    np.save(tmp_path / "mask.npy", np.ones((4, 2, 1), dtype=bool))
    voss_dict["geometry"] = {"type": "voxel", "spacing": 0.5, "mask_file": "mask.npy", "units": "cm"}
    voss_dict["leads"] = {"x": [0.1, 0.5, 0.25], "xp": [1.9, 0.5, 0.25], "units": "cm"}
    path = write_desc(tmp_path, voss_dict)
    d = ingest(path)
    assert d.region.volume == pytest.approx(2.0 * 1.0 * 0.5)
    status, out, _ = run(capsys, "gfactor", path, "--method", "numeric")
    assert status == 0


def test_run_record_round_trip(tmp_path):
    rec = RunRecord("predict", ["predict", BUNDLED], {"rows": [[1.0, 2.0]]}, seed=4)
    rec.save(tmp_path / "r.json")
    back = RunRecord.load(tmp_path / "r.json")
    assert back == rec
    (tmp_path / "bad.json").write_text(json.dumps({"record_version": 99}))
    with pytest.raises(InputError):
        RunRecord.load(tmp_path / "bad.json")


# -- CLI --------------------------------------------------------------------------


def test_predict_csv_format(capsys):
    status, out, err = run(capsys, "predict", BUNDLED, "--f", "1", "10", "100")
    assert status == 0
    meta, rows = parse_csv(out)
    assert rows[0] == ["f_hz", "c_u_v2_per_hz"]
    f = [float(r[0]) for r in rows[1:]]
    c = [float(r[1]) for r in rows[1:]]
    assert f == [1.0, 10.0, 100.0]
    assert c[0] == pytest.approx(6.375e-16, rel=1e-3)
    assert c[1] == pytest.approx(c[0] / 10, rel=1e-12)
    assert float(meta["eta"]) == pytest.approx(6.105e-15, rel=1e-3)
    assert float(meta["g"]) == pytest.approx(13946.6, rel=1e-4)
    assert meta["g_unit"] == "1/m"
    assert float(meta["mu"]) == 1.3
    assert float(meta["ratio_to_reference_at_1_hz"]) == pytest.approx(0.6375, rel=1e-3)
    assert "strong-field" in err
    assert "strong-field" in out


def test_predict_cgs_and_json(capsys):
    status, out, _ = run(capsys, "predict", BUNDLED, "--f", "1", "--units", "cgs", "--output", "json")
    assert status == 0
    data = json.loads(out)
    assert data["columns"][1].endswith("statv2_s")
    assert data["rows"][0][1] == pytest.approx(6.375e-16 / 299.792458**2, rel=1e-3)


def test_predict_zero_bias(tmp_path, voss_dict, capsys):
    voss_dict["bias"]["U0"]["value"] = 0.0
    status, out, _ = run(capsys, "predict", write_desc(tmp_path, voss_dict), "--f-log", "1", "1000", "7")
    assert status == 0
    _, rows = parse_csv(out)
    assert len(rows) == 8
    assert all(float(r[1]) == 0.0 for r in rows[1:])


def test_predict_zero_frequency_rejected(capsys):
    status, _, err = run(capsys, "predict", BUNDLED, "--f", "0", "1")
    assert status == 2
    assert "pole" in err
    assert run(capsys, "predict", BUNDLED, "--f-log", "0", "10", "3")[0] == 2


def test_bad_descriptor_exit_code(tmp_path, capsys):
    (tmp_path / "x.json").write_text("{not json")
    assert run(capsys, "predict", str(tmp_path / "x.json"))[0] == 2
    assert run(capsys, "predict", str(tmp_path / "missing.json"))[0] == 2


def test_numeric_vs_analytic_eta(capsys):
    # cross-backend comparison: the numeric kernel integral over the film
    # exceeds the slab estimate by about 55 %, beyond the 25 % allowance
    _, out_a, _ = run(capsys, "predict", BUNDLED, "--gfactor", "analytic")
    _, out_n, _ = run(capsys, "predict", BUNDLED, "--gfactor", "numeric")
    eta_a = float(parse_csv(out_a)[0]["eta"])
    eta_n = float(parse_csv(out_n)[0]["eta"])
    assert abs(eta_n / eta_a - 1) <= 0.25, f"eta numeric {eta_n:.4g} vs analytic {eta_a:.4g}"


def test_gfactor_both(capsys):
    status, out, _ = run(capsys, "gfactor", BUNDLED, "--units", "cgs")
    assert status == 0
    meta, rows = parse_csv(out)
    assert meta["g_unit"] == "1/cm"
    methods = {r[0]: float(r[1]) for r in rows[1:]}
    assert methods["analytic"] == pytest.approx(139.47, rel=1e-4)
    assert methods["deterministic-adaptive"] == pytest.approx(215.75, rel=1e-3)


def test_gfactor_not_converged_exit_code(capsys):
    status, _, _ = run(capsys, "gfactor", BUNDLED, "--method", "numeric",
                       "--quadrature", "monte-carlo", "--budget", "1000", "--tolerance", "1e-4")
    assert status == 3


def test_sweep_long_format(capsys):
    status, out, _ = run(capsys, "sweep", BUNDLED, "--param", "U0", "--values", "0.405", "0.81", "--f", "1")
    assert status == 0
    _, rows = parse_csv(out)
    assert rows[0][:5] == ["param", "value", "value_units", "f_hz", "c_u_v2_per_hz"]
    vals = [float(r[4]) for r in rows[1:]]
    assert vals[1] == pytest.approx(4 * vals[0], rel=1e-12)


def test_validity_and_compare(capsys):
    status, out, _ = run(capsys, "validity", BUNDLED, "--constants", "paper-rounded")
    assert status == 0
    assert "fail" in out and "soft_bound" in out
    status, out, _ = run(capsys, "compare", BUNDLED)
    assert status == 0
    _, rows = parse_csv(out)
    assert float(rows[1][-1]) == pytest.approx(0.6375, rel=1e-3)


def test_fourier_and_identities_and_bose(capsys, tmp_path):
    status, out, _ = run(capsys, "fourier", "correlation", "--tau", "1", "-1", "--F", "0.5")
    assert status == 0
    _, rows = parse_csv(out)
    assert float(rows[1][1]) == pytest.approx(1.8519370519824665 / math.pi, rel=1e-12)
    assert float(rows[2][1]) == -float(rows[1][1])
    status, out, _ = run(capsys, "fourier", "convergence", "--gamma", "1", "--F", "1", "10", "1000")
    assert status == 0 and "convergent" in out
    assert run(capsys, "fourier", "convergence", "--gamma", "2.5", "--F", "1", "10")[0] == 2
    grid = np.concatenate([-np.logspace(0, 2, 5)[::-1], np.logspace(0, 2, 5)])
    lines = ["f_hz,re,im"] + [f"{float(f)!r},0.0,{-1 / float(f)!r}" for f in grid]
    (tmp_path / "s.csv").write_text("\n".join(lines) + "\n")
    assert run(capsys, "fourier", "parity", str(tmp_path / "s.csv"))[0] == 0
    status, out, _ = run(capsys, "verify-identities", "--vector", "0", "0", "2")
    assert status == 0
    status, out, _ = run(capsys, "bose", "--f", "1e6", "--T", "1", "--angular", "--constants", "paper-rounded")
    assert status == 0
    _, rows = parse_csv(out)
    assert float(rows[1][2]) == pytest.approx(1e-5, rel=1e-12)


@pytest.mark.parametrize("extra", [[], ["--gfactor", "numeric", "--quadrature", "monte-carlo", "--seed", "7",
                                            "--tolerance", "0.02"]])
def test_replay_reproduces_outputs(tmp_path, capsys, extra):
    rec = tmp_path / "run.json"
    status, _, _ = run(capsys, "predict", BUNDLED, "--f", "1", "10", *extra, "--record", str(rec))
    assert status == 0
    status, out, _ = run(capsys, "replay", str(rec))
    assert status == 0
    assert "identical" in out
    data = json.loads(rec.read_text())
    data["outputs"]["rows"][0][1] *= 2
    rec.write_text(json.dumps(data))
    assert run(capsys, "replay", str(rec))[0] == 1


def test_plot_data_export(tmp_path, capsys):
    prefix = tmp_path / "spec"
    status, _, _ = run(capsys, "predict", BUNDLED, "--f-log", "1", "100", "3", "--plot-data", str(prefix))
    assert status == 0
    assert (tmp_path / "spec.csv").read_text().startswith("f_hz,c_u_v2_per_hz\n")
    side = json.loads((tmp_path / "spec.json").read_text())
    assert side["command"] == "predict"


def test_global_flags_after_subcommand(capsys):
    a = run(capsys, "--units", "cgs", "predict", BUNDLED)[1]
    b = run(capsys, "predict", BUNDLED, "--units", "cgs")[1]
    assert parse_csv(a)[1] == parse_csv(b)[1]
