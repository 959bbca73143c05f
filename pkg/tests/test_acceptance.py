"""Acceptance criteria 1-11. Each test records one PASS/FAIL line, printed
in the "acceptance criteria" section at the end of the pytest run."""

import hashlib
import os
import random
import subprocess
import sys
from collections import deque
from contextlib import contextmanager
from dataclasses import replace
from time import perf_counter

from sgpsr.auth import sign_packet, verify_packet
from sgpsr.bench import DEFAULT_SIZES, emit_table, run_bench
from sgpsr.crypto import (
    AES128,
    Blowfish,
    DhParams,
    SigningKey,
    dh_generate,
    dh_shared,
    get_group,
    md5_digest,
)
from sgpsr.geo import Position
from sgpsr.routing import DropReason
from sgpsr.sim import apply_overrides, load_scenario, metrics_csv, parse_scenario, run
from sgpsr.sim.engine import _Simulator
from sgpsr.wire import HEADER_SIZE, MAX_PACKET, Command, GpsrPacket, decode, encode

from .conftest import ACCEPTANCE, SCENARIOS, golden_packets, golden_signed, random_packet, read_rows


@contextmanager
def criterion(n, limit=None):
    note = {"detail": ""}
    t0 = perf_counter()
    try:
        yield note
        elapsed = perf_counter() - t0
        assert limit is None or elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as exc:
        msg = str(exc).splitlines()[0] if str(exc) else ""
        ACCEPTANCE[n] = (False, f"{type(exc).__name__}: {msg}"[:160])
        raise
    ACCEPTANCE[n] = (True, f"{note['detail']} [{elapsed:.1f}s]".strip())


# ---- 1

GOLDEN_FIELDS = {
    "beacon_request": GpsrPacket(Command.BEACON_REQUEST, source_pos=Position(12345, -678),
                                 data=bytes.fromhex("00041f2e3d4c")),
    "beacon_response": GpsrPacket(Command.BEACON_RESPONSE, source_pos=Position(250000, 10050),
                                  data=bytes.fromhex("00020100")),
    "greedy_data": GpsrPacket(Command.GREEDY_DATA, source_pos=Position(100, 200),
                              dest_pos=Position(99900, 50025), port=8080, data=b"hello, gpsr"),
}


def test_criterion_01_wire_fidelity():
    with criterion(1, limit=5) as note:
        rng = random.Random(1)
        n = 10_000
        for _ in range(n):
            pkt = random_packet(rng)
            raw = encode(pkt)
            assert len(raw) == pkt.packet_length
            assert decode(raw) == pkt
        assert HEADER_SIZE == 1 + 1 + 2 + 5 * 8 + 2 + 2 == 48
        assert MAX_PACKET == 314
        assert len(encode(GpsrPacket(Command.GREEDY_DATA, data=bytes(250)))) == 314

        golden = golden_packets()
        for name, pkt in GOLDEN_FIELDS.items():
            assert encode(pkt) == golden[name], name
        perim = decode(golden["perimeter_data"])
        assert encode(perim) == golden["perimeter_data"]
        assert perim.perimeter_pos == Position(70000, 70100)
        assert perim.edge == (Position(70000, 70100), Position(-(2**31), 1))
        codes = {name: raw[0] & 0x0F for name, raw in golden.items()}
        assert codes == {"beacon_request": 0b0001, "beacon_response": 0b0010,
                         "greedy_data": 0b0011, "perimeter_data": 0b0100}
        note["detail"] = f"{n} random round-trips, 4 golden packets byte-exact"


# ---- 2

def _repeated_multiplication(base, exp, mod):
    acc = 1
    for _ in range(exp):
        acc = acc * base % mod
    return acc


def test_criterion_02_dh_correctness():
    with criterion(2, limit=30) as note:
        toy = DhParams(23, 5)
        a, b = dh_generate(toy, None, 6), dh_generate(toy, None, 15)
        assert (a.public, b.public) == (8, 19)
        assert (_repeated_multiplication(5, 6, 23), _repeated_multiplication(5, 15, 23)) == (8, 19)
        assert dh_shared(toy, a, 19).s == dh_shared(toy, b, 8).s == 2
        assert _repeated_multiplication(19, 6, 23) == _repeated_multiplication(8, 15, 23) == 2

        groups = [toy, DhParams(47, 5), DhParams(59, 2), DhParams(83, 2), get_group("modp2048")]
        rng = random.Random(2)
        for params in groups:
            for _ in range(1000):
                x = dh_generate(params, rng)
                y = dh_generate(params, rng)
                sx = dh_shared(params, x, y.public).s
                assert sx == dh_shared(params, y, x.public).s
                if params.p < 100:
                    assert sx == _repeated_multiplication(params.w, x.secret * y.secret, params.p)
        note["detail"] = "worked example S=2; 1000 pairs each for P=23,47,59,83 and 2048-bit MODP"


# ---- 3

def test_criterion_03_primitive_vectors():
    with criterion(3, limit=1) as note:
        md5 = read_rows("md5_vectors.txt")
        for msg, digest in md5:
            assert md5_digest(b"" if msg == "-" else bytes.fromhex(msg)).hex() == digest
        aes = read_rows("aes128_vectors.txt")
        for key, pt, ct in aes:
            c = AES128(bytes.fromhex(key))
            assert c.encrypt_block(bytes.fromhex(pt)).hex() == ct
            assert c.decrypt_block(bytes.fromhex(ct)).hex() == pt
        bf = read_rows("blowfish_vectors.txt")
        for key, pt, ct in bf:
            c = Blowfish(bytes.fromhex(key))
            assert c.encrypt_block(bytes.fromhex(pt)).hex() == ct
            assert c.decrypt_block(bytes.fromhex(ct)).hex() == pt
        note["detail"] = f"MD5 {len(md5)}, AES-128 {len(aes)}, Blowfish {len(bf)} vectors"


# ---- 4

def test_criterion_04_signature_laws():
    with criterion(4, limit=10) as note:
        rng = random.Random(4)
        for _ in range(1000):
            key = SigningKey(rng.randbytes(16))
            assert verify_packet(key, sign_packet(key, random_packet(rng)))

        key_bytes, raw = golden_signed()
        key = SigningKey(key_bytes)
        assert verify_packet(key, decode(raw))
        region_bits = 8 * (len(raw) - 16)
        structural = 0
        for bit in range(region_bits):
            bad = bytearray(raw)
            bad[bit // 8] ^= 0x80 >> (bit % 8)
            try:
                pkt = decode(bytes(bad))
            except ValueError:
                structural += 1  # rejected by the codec before verification
                continue
            assert not verify_packet(key, pkt), f"bit {bit} flip accepted"

        wrong = 0
        for _ in range(1000):
            k1, k2 = rng.randbytes(16), rng.randbytes(16)
            if k1 == k2:
                continue
            signed = sign_packet(SigningKey(k1), random_packet(rng))
            assert not verify_packet(SigningKey(k2), signed)
            wrong += 1
        note["detail"] = (f"1000 sign/verify; {region_bits} single-bit flips rejected "
                          f"({structural} by the codec); {wrong} wrong-key rejections")


# ---- 5

def test_criterion_05_key_count():
    with criterion(5) as note:
        scn = load_scenario(SCENARIOS / "clique10.scn")
        assert scn.node_count == 10 and scn.mobility == "static"
        sim = _Simulator(scn, None)
        metrics = sim.run()
        keys = set()
        for u in sim.nodes:
            assert len(u.table) == 9
            for v in sim.nodes:
                if u.id < v.id:
                    kuv, kvu = u.table.key_for(v.id), v.table.key_for(u.id)
                    assert kuv is not None and kuv == kvu
                    keys.add(kuv)
        assert len(keys) == 10 * 9 // 2 == 45
        assert metrics.keys_established == 45
        note["detail"] = "10-node clique: 45 distinct keys, key(u,v) = key(v,u)"


# ---- 6

def _udg_connected(pts, radio_range):
    seen, todo = {0}, deque([0])
    while todo:
        u = todo.popleft()
        for v, q in enumerate(pts):
            if v not in seen and (pts[u][0] - q[0]) ** 2 + (pts[u][1] - q[1]) ** 2 <= radio_range**2:
                seen.add(v)
                todo.append(v)
    return len(seen) == len(pts)


def _instance_text(seed, pts, flows):
    lines = [f"seed = {seed}", f"node_count = {len(pts)}", "placement = explicit",
             "area_width = 1100", "area_height = 1100", "security_on = false", "duration = 9"]
    for i, (x, y) in enumerate(pts):
        lines += [f"nodes[{i}].x = {x!r}", f"nodes[{i}].y = {y!r}"]
    for i, (s, d) in enumerate(flows):
        lines += [f"traffic[{i}].source = {s}", f"traffic[{i}].dest = {d}",
                  f"traffic[{i}].count = 2", f"traffic[{i}].size = 16"]
    return "\n".join(lines)


def test_criterion_06_delivery_guarantee():
    with criterion(6, limit=120) as note:
        rng = random.Random(6)
        instances = flows_total = packets = hops = 0
        while instances < 100:
            pts = [(round(rng.uniform(0, 1100), 2), round(rng.uniform(0, 1100), 2)) for _ in range(50)]
            if len(set(pts)) < 50 or not _udg_connected(pts, 250.0):
                continue
            flows = [tuple(rng.sample(range(50), 2)) for _ in range(5)]
            m = run(parse_scenario(_instance_text(instances, pts, flows)))  # greedy progress asserted per hop
            for fid, stats in m.per_flow.items():
                assert stats.delivery_ratio == 1.0, f"instance {instances} flow {flows[fid]}: {stats}"
            instances += 1
            flows_total += len(flows)
            packets += m.delivered
            hops += m.hops_delivered
        note["detail"] = (f"{instances} connected 50-node instances, {flows_total} flows, "
                          f"{packets} packets delivered, mean {hops / packets:.2f} hops")


# ---- 7

NO_ADVERSARY_MATRIX = {
    "two_node": [],
    "mobile": [],
    "spoof-baseline": ["adversaries[0].spoof_offset=0"],
    "clique10+traffic": ["traffic[0].source=0", "traffic[0].dest=9", "traffic[1].source=3", "traffic[1].dest=4"],
}

_SCENARIO_FILE = {"spoof-baseline": "spoof", "clique10+traffic": "clique10"}


def _comparable(m):
    row = m.row()
    for col in ("security_on", "keys_established", "channel_busy_fraction"):
        row.pop(col)
    return row, {f: (s.generated, s.delivered, s.corrupted) for f, s in m.per_flow.items()}


def test_criterion_07_security_transparency():
    with criterion(7) as note:
        for name, overrides in NO_ADVERSARY_MATRIX.items():
            scn = apply_overrides(load_scenario(SCENARIOS / f"{_SCENARIO_FILE.get(name, name)}.scn"), overrides)
            if name == "spoof-baseline":
                # the zero-offset spoofer behaves honestly; drop the label entirely
                scn = replace(scn, adversaries=())
            assert not scn.adversaries
            on = run(apply_overrides(scn, ["security_on=true"]))
            off = run(apply_overrides(scn, ["security_on=false"]))
            assert _comparable(on) == _comparable(off), name
            assert off.keys_established == 0
            assert on.keys_established > 0
        note["detail"] = f"{len(NO_ADVERSARY_MATRIX)} scenarios equal on/off apart from keys and airtime"


# ---- 8

def test_criterion_08_tamper_defense():
    with criterion(8) as note:
        scn = load_scenario(SCENARIOS / "tamper.scn")
        off = run(apply_overrides(scn, ["security_on=false"]))
        on = run(apply_overrides(scn, ["security_on=true"]))
        assert off.seed == on.seed
        assert off.corrupted_delivered > 0
        assert on.corrupted_delivered == 0
        assert on.drops[DropReason.AUTH_FAILURE] > 0
        note["detail"] = (f"security off: {off.corrupted_delivered} corrupted delivered; "
                          f"on: 0 corrupted, {on.drops[DropReason.AUTH_FAILURE]} auth-failure drops")


# ---- 9

def test_criterion_09_attack_characterization():
    with criterion(9) as note:
        scn = load_scenario(SCENARIOS / "blackhole.scn")
        # node 4 is a cut vertex separating {0..3} from {5..8}
        pts = [p for i, p in enumerate(scn.positions) if i != 4]
        assert _udg_connected(list(scn.positions), scn.radio_range)
        assert not _udg_connected(pts, scn.radio_range)
        for sec in ("true", "false"):
            m = run(apply_overrides(scn, [f"security_on={sec}"]))
            assert m.per_flow[0].generated > 0 and m.per_flow[0].delivered == 0
            assert m.per_flow[1].delivery_ratio == 1.0
            assert m.drops[DropReason.BLACKHOLE] == m.per_flow[0].generated

        spoof = load_scenario(SCENARIOS / "spoof.scn")
        honest = run(apply_overrides(spoof, ["adversaries[0].spoof_offset=0"]))
        attack = run(spoof)
        assert honest.seed == attack.seed
        assert attack.adversary_share > 2 * honest.adversary_share
        assert attack.adversary_share - honest.adversary_share > 0.05
        note["detail"] = (f"blackhole cut-vertex flow delivery 0 with security on and off; "
                          f"spoof relay share {honest.adversary_share:.3f} -> {attack.adversary_share:.3f}")


# ---- 10

def test_criterion_10_benchmark_shape():
    with criterion(10) as note:
        first = run_bench(DEFAULT_SIZES, iterations=10_000, seed=0)
        second = run_bench(DEFAULT_SIZES, iterations=10_000, seed=0)
        _, csv_text = emit_table(first)
        assert len(csv_text.splitlines()) == 1 + 12
        cells = {(r.algorithm, r.operation, r.message_size) for r in first}
        assert cells == {(a, o, s) for a in ("AES", "Blowfish") for o in ("encrypt", "decrypt") for s in (128, 256, 512)}
        assert all(r.iterations >= 10_000 for r in first)
        worst = 0.0
        for a, b in zip(first, second):
            assert (a.algorithm, a.operation, a.message_size) == (b.algorithm, b.operation, b.message_size)
            drift = abs(b.median_ns - a.median_ns) / a.median_ns
            worst = max(worst, drift)
            assert drift <= 0.20, f"{a.algorithm} {a.operation} {a.message_size}: {a.median_ns} vs {b.median_ns}"
        note["detail"] = f"12-cell grid x 10^4 iterations, worst run-to-run median drift {worst:.1%}"


# ---- 11

def _cli_run(scenario, tmp_path, tag, hashseed):
    out, trace = tmp_path / f"{tag}.csv", tmp_path / f"{tag}.trace"
    env = {**os.environ, "PYTHONHASHSEED": str(hashseed)}
    subprocess.run([sys.executable, "-m", "sgpsr", "simulate", str(scenario), "--output", str(out),
                    "--trace", str(trace), "--sweep", "security_on=true,false"],
                   check=True, env=env, capture_output=True)
    return out.read_bytes(), trace.read_bytes()


def test_criterion_11_determinism(tmp_path):
    with criterion(11) as note:
        names = ["mobile", "spoof", "tamper", "blackhole", "flood"]
        for name in names:
            scn = load_scenario(SCENARIOS / f"{name}.scn")
            t1, t2 = [], []
            assert metrics_csv([run(scn, t1)]) == metrics_csv([run(scn, t2)])
            assert t1 == t2
        digests = []
        for name in ("mobile", "spoof"):
            a = _cli_run(SCENARIOS / f"{name}.scn", tmp_path, f"{name}-a", 1)
            b = _cli_run(SCENARIOS / f"{name}.scn", tmp_path, f"{name}-b", 2)
            assert a == b, name
            assert len(a[1]) > 0
            digests.append(hashlib.sha256(a[0] + a[1]).hexdigest()[:12])
        note["detail"] = (f"{len(names)} scenarios repeat in-process; CLI CSV+trace byte-identical "
                          f"across processes and hash seeds ({', '.join(digests)})")
