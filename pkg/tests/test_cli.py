import hashlib
import subprocess
import sys

import pytest

from sgpsr.auth import compute_tag
from sgpsr.cli import format_fields, main, parse_fields
from sgpsr.crypto import SigningKey
from sgpsr.sim import apply_overrides, load_scenario, metrics_csv, run
from sgpsr.wire import decode, encode

from .conftest import SCENARIOS, golden_packets, golden_signed


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---- simulate

def test_simulate_two_node(capsys):
    code, out, _ = cli(capsys, "simulate", str(SCENARIOS / "two_node.scn"), "--set", "dh_group=safe64")
    assert code == 0
    header, row = out.splitlines()
    assert dict(zip(header.split(","), row.split(",")))["delivery_ratio"] == "1.000000"


def test_simulate_matches_library(capsys, tmp_path):
    path = SCENARIOS / "two_node.scn"
    out_file = tmp_path / "m.csv"
    assert main(["simulate", str(path), "--set", "dh_group=safe64", "--output", str(out_file)]) == 0
    direct = run(apply_overrides(load_scenario(path), ["dh_group=safe64"]))
    assert out_file.read_text() == metrics_csv([direct])


def test_simulate_sweep_tamper(capsys):
    code, out, _ = cli(capsys, "simulate", str(SCENARIOS / "tamper.scn"),
                       "--set", "dh_group=safe64", "--sweep", "security_on=true,false")
    assert code == 0
    header, *rows = out.splitlines()
    cols = header.split(",")
    rows = [dict(zip(cols, r.split(","))) for r in rows]
    assert [r["security_on"] for r in rows] == ["true", "false"]
    assert rows[0]["corrupted_delivered"] == "0"
    assert int(rows[1]["corrupted_delivered"]) > 0


def test_simulate_sweep_product_and_jobs(capsys):
    args = ["simulate", str(SCENARIOS / "two_node.scn"), "--set", "dh_group=safe64",
            "--sweep", "security_on=true,false", "--sweep", "seed=1,2"]
    code, serial, _ = cli(capsys, *args)
    code2, parallel, _ = cli(capsys, *args, "--jobs", "2")
    assert code == code2 == 0
    assert len(serial.splitlines()) == 5
    assert serial == parallel


def test_simulate_seed_and_trace(capsys, tmp_path):
    trace = tmp_path / "trace.log"
    code, out, _ = cli(capsys, "simulate", str(SCENARIOS / "two_node.scn"), "--set", "dh_group=safe64",
                       "--seed", "77", "--trace", str(trace))
    assert code == 0
    assert out.splitlines()[1].split(",")[1] == "77"
    assert "deliver" in trace.read_text()


def test_simulate_unknown_key(capsys, tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("seed = 1\nwarp_factor = 9\n")
    code, _, err = cli(capsys, "simulate", str(bad))
    assert code == 2
    assert "warp_factor" in err and "bad.scn:2" in err


def test_simulate_unknown_override(capsys):
    code, _, err = cli(capsys, "simulate", str(SCENARIOS / "two_node.scn"), "--set", "nope=1")
    assert code == 2 and "nope" in err


def test_simulate_missing_file(capsys, tmp_path):
    code, _, err = cli(capsys, "simulate", str(tmp_path / "missing.scn"))
    assert code == 2


# ---- bench

def test_bench_single_size(capsys):
    code, out, err = cli(capsys, "bench", "--sizes", "128", "--iterations", "1000")
    assert code == 0
    assert len(out.splitlines()) == 1 + 4
    assert "Blowfish" in err


@pytest.mark.parametrize("argv", [["--iterations", "0"], ["--iterations", "999"], ["--sizes", "12"]])
def test_bench_usage_errors(capsys, argv):
    code, _, _ = cli(capsys, "bench", *argv)
    assert code == 2


def test_bench_non_numeric(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--iterations", "many"])
    assert exc.value.code == 2


# ---- packet

def test_packet_encode_decode_roundtrip(capsys, tmp_path):
    spec = tmp_path / "pkt.txt"
    spec.write_text("command = perimeter-data\nsource = 1.5,2\ndest = 100,-3.25\n"
                    "perimeter = 10,10\nedge = 10,10,20,5\nport = 99\ndata = 0102ff\n")
    code, hexed, _ = cli(capsys, "packet", "encode", str(spec))
    assert code == 0
    raw = tmp_path / "pkt.hex"
    raw.write_text(hexed)
    code, fields, _ = cli(capsys, "packet", "decode", str(raw))
    assert code == 0
    again = tmp_path / "again.txt"
    again.write_text(fields)
    code, hexed2, _ = cli(capsys, "packet", "encode", str(again))
    assert hexed2 == hexed
    assert decode(bytes.fromhex(hexed)) == parse_fields(spec.read_text())


@pytest.mark.parametrize("name", ["beacon_request", "beacon_response", "greedy_data", "perimeter_data"])
def test_packet_golden_fields_roundtrip(name):
    pkt = decode(golden_packets()[name])
    assert encode(parse_fields(format_fields(pkt))) == golden_packets()[name]


def _write_golden(tmp_path, flip=None):
    key, raw = golden_signed()
    hx = raw.hex()
    if flip is not None:
        hx = hx[:flip] + format(int(hx[flip], 16) ^ 1, "x") + hx[flip + 1:]
    path = tmp_path / "signed.hex"
    path.write_text(hx + "\n")
    return key.hex(), path


def test_packet_verify_golden(capsys, tmp_path):
    key, path = _write_golden(tmp_path)
    code, out, _ = cli(capsys, "packet", "verify", str(path), "--key", key)
    assert (code, out.strip()) == (0, "true")


def test_packet_verify_tampered_data(capsys, tmp_path):
    key, path = _write_golden(tmp_path, flip=2 * 48 + 7)
    code, out, _ = cli(capsys, "packet", "verify", str(path), "--key", key)
    assert (code, out.strip()) == (1, "false")


def test_packet_sign_matches_library(capsys, tmp_path):
    key, path = _write_golden(tmp_path)
    code, out, _ = cli(capsys, "packet", "sign", str(path), "--key", key)
    assert code == 0
    pkt = decode(bytes.fromhex(path.read_text()))
    assert out.strip() == compute_tag(SigningKey.from_hex(key), pkt).hex()
    code, out, _ = cli(capsys, "packet", "sign", str(path), "--key", key, "--emit-packet")
    assert out.strip() == path.read_text().strip()


@pytest.mark.parametrize("argv", [
    ["--key", "abc"],
    ["--key", "zz" * 16],
    [],
])
def test_packet_bad_key(capsys, tmp_path, argv):
    _, path = _write_golden(tmp_path)
    code, _, _ = cli(capsys, "packet", "verify", str(path), *argv)
    assert code == 2


def test_packet_malformed_hex(capsys, tmp_path):
    path = tmp_path / "x.hex"
    path.write_text("not hex")
    code, _, err = cli(capsys, "packet", "decode", str(path))
    assert code == 2


def test_packet_decode_error_names_field(capsys, tmp_path):
    raw = bytearray(golden_packets()["greedy_data"])
    raw[1] = 7
    path = tmp_path / "x.hex"
    path.write_text(raw.hex())
    code, _, err = cli(capsys, "packet", "decode", str(path))
    assert code == 2 and "reserved1" in err


def test_packet_encode_unknown_field(capsys, tmp_path):
    spec = tmp_path / "pkt.txt"
    spec.write_text("command = greedy-data\nttl = 3\n")
    code, _, err = cli(capsys, "packet", "encode", str(spec))
    assert code == 2 and "ttl" in err


# ---- keygen

def test_keygen_worked_example(capsys):
    code, out, _ = cli(capsys, "keygen", "--p", "23", "--w", "5", "--secret", "6")
    assert code == 0
    assert "public = 8" in out.splitlines()
    code, out, _ = cli(capsys, "keygen", "--p", "23", "--w", "5", "--secret", "6", "--peer", "19")
    lines = out.splitlines()
    assert "shared = 2" in lines
    assert f"key = {hashlib.md5(bytes([2])).hexdigest()}" in lines


@pytest.mark.parametrize("argv", [
    ["--p", "23", "--w", "5", "--secret", "0"],
    ["--p", "23", "--w", "5", "--secret", "22"],
    ["--p", "23", "--w", "5", "--secret", "6", "--peer", "1"],
    ["--p", "21", "--w", "5"],
    ["--p", "23"],
])
def test_keygen_usage_errors(capsys, argv):
    code, _, _ = cli(capsys, "keygen", *argv)
    assert code == 2


def test_keygen_named_group_seeded(capsys):
    a = cli(capsys, "keygen", "--group", "safe64", "--seed", "4")
    b = cli(capsys, "keygen", "--group", "safe64", "--seed", "4")
    assert a == b and a[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sgpsr", "keygen", "--p", "23", "--w", "5", "--secret", "15"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "public = 19" in proc.stdout


def test_help_lists_scenario_keys(capsys):
    with pytest.raises(SystemExit):
        main(["simulate", "--help"])
    out, _ = capsys.readouterr()
    assert "radio_range" in out and "adversaries[i].kind" in out
