"""Command line: ``sgpsr simulate | bench | packet | keygen``.

Exit status is 0 on success (or a verified signature), 1 when verification
fails, 2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from . import bench as bench_mod
from .auth import compute_tag, sign_packet, verify_packet
from .crypto.dh import (
    GROUPS,
    DhParams,
    HandshakeRejected,
    SigningKey,
    derive_key,
    dh_generate,
    dh_shared,
    get_group,
)
from .geo import Position
from .sim import metrics_csv, run
from .sim.scenario import ScenarioError, apply_overrides, load_scenario, schema_help
from .wire import Command, GpsrPacket, WireError, decode, encode

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

_COMMAND_NAMES = {
    "beacon-request": Command.BEACON_REQUEST,
    "beacon-response": Command.BEACON_RESPONSE,
    "greedy-data": Command.GREEDY_DATA,
    "perimeter-data": Command.PERIMETER_DATA,
}


class UsageError(Exception):
    pass


def _out(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_input(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------- simulate

def _run_one(job):
    scn, label, want_trace = job
    trace = [] if want_trace else None
    metrics = run(scn, trace)
    metrics.label = label
    return metrics, trace


def _sweep_grid(specs):
    axes = []
    for spec in specs:
        if "=" not in spec:
            raise UsageError(f"--sweep {spec!r}: expected key=v1,v2,...")
        key, values = spec.split("=", 1)
        vals = [v.strip() for v in values.split(",") if v.strip()]
        if not vals:
            raise UsageError(f"--sweep {spec!r}: no values")
        axes.append([f"{key.strip()}={v}" for v in vals])
    return list(itertools.product(*axes)) if axes else [()]


def cmd_simulate(args) -> int:
    try:
        scn = load_scenario(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    scn = apply_overrides(scn, overrides)

    jobs = []
    for combo in _sweep_grid(args.sweep or []):
        jobs.append((apply_overrides(scn, combo), ";".join(combo), args.trace is not None))

    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]

    _out(args.output, metrics_csv([m for m, _ in results]))
    if args.trace is not None:
        chunks = []
        for (m, trace), (_, label, _) in zip(results, jobs):
            if len(jobs) > 1:
                chunks.append(f"# run {label}")
            chunks.extend(trace)
        Path(args.trace).write_text("\n".join(chunks) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- bench

def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args) -> int:
    if args.iterations < bench_mod.MIN_ITERATIONS:
        raise UsageError(f"--iterations must be >= {bench_mod.MIN_ITERATIONS}")
    if not args.sizes or any(s <= 0 or s % 8 for s in args.sizes):
        raise UsageError("--sizes must be positive multiples of 8")
    results = bench_mod.run_bench(args.sizes, args.iterations, seed=args.seed or 0)
    text, csv_text = bench_mod.emit_table(results)
    if args.output in (None, "-"):
        sys.stdout.write(csv_text)
        sys.stderr.write(text)
    else:
        Path(args.output).write_text(csv_text)
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- packet

def _centimeters(text: str) -> int:
    return int((Decimal(text.strip()) * 100).to_integral_value(ROUND_HALF_EVEN))


def _parse_point(text, name):
    try:
        x, y = (_centimeters(v) for v in text.split(","))
        return Position(x, y)
    except (ValueError, ArithmeticError):
        raise UsageError(f"{name}: expected 'x,y' in meters, got {text!r}") from None


def _meters(v: int) -> str:
    sign = "-" if v < 0 else ""
    whole, cents = divmod(abs(v), 100)
    return f"{sign}{whole}.{cents:02d}"


def parse_fields(text: str) -> GpsrPacket:
    """Packet from ``key = value`` lines (positions in meters, bytes in hex).

    Accepts the table ``format_fields`` prints, so decode output feeds
    straight back into encode.
    """
    vals = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        vals[k] = v
    known = {"version", "command", "length", "source", "dest", "perimeter", "edge", "port", "data", "auth"}
    unknown = sorted(set(vals) - known)
    if unknown:
        raise UsageError(f"unknown packet field(s): {', '.join(unknown)}")
    if "command" not in vals:
        raise UsageError("packet description needs a command")
    cmd = vals["command"]
    if cmd in _COMMAND_NAMES:
        command = _COMMAND_NAMES[cmd]
    else:
        try:
            command = Command(int(cmd, 0))
        except ValueError:
            raise UsageError(f"unknown command {cmd!r}; use one of {', '.join(_COMMAND_NAMES)}") from None
    kw = {"command": command}
    if "source" in vals:
        kw["source_pos"] = _parse_point(vals["source"], "source")
    if "dest" in vals:
        kw["dest_pos"] = _parse_point(vals["dest"], "dest")
    if "perimeter" in vals:
        kw["perimeter_pos"] = _parse_point(vals["perimeter"], "perimeter")
    if "edge" in vals:
        parts = vals["edge"].split(",")
        if len(parts) != 4:
            raise UsageError("edge: expected 'x1,y1,x2,y2'")
        kw["edge"] = (_parse_point(",".join(parts[:2]), "edge"), _parse_point(",".join(parts[2:]), "edge"))
    try:
        if "version" in vals:
            kw["version"] = int(vals["version"], 0)
        if "port" in vals:
            kw["port"] = int(vals["port"], 0)
        if "data" in vals:
            kw["data"] = bytes.fromhex(vals["data"])
        if "auth" in vals:
            kw["auth"] = bytes.fromhex(vals["auth"])
    except ValueError as exc:
        raise UsageError(f"bad field value: {exc}") from None
    pkt = GpsrPacket(**kw)
    if "length" in vals and vals["length"] != str(pkt.packet_length):
        raise UsageError(f"length = {vals['length']} disagrees with the fields ({pkt.packet_length} bytes)")
    return pkt


def format_fields(pkt: GpsrPacket) -> str:
    name = {v: k for k, v in _COMMAND_NAMES.items()}[pkt.command]

    def pt(p):
        return f"{_meters(p.x)},{_meters(p.y)}"

    lines = [
        f"version = {pkt.version}",
        f"command = {name}",
        f"length = {pkt.packet_length}",
        f"source = {pt(pkt.source_pos)}",
        f"perimeter = {pt(pkt.perimeter_pos)}",
        f"dest = {pt(pkt.dest_pos)}",
        f"edge = {pt(pkt.edge[0])},{pt(pkt.edge[1])}",
        f"port = {pkt.port}",
        f"data = {pkt.data.hex()}",
        f"auth = {pkt.auth.hex()}",
    ]
    return "\n".join(lines) + "\n"


def _read_hex_packet(path) -> GpsrPacket:
    text = "".join(_read_input(path).split())
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise UsageError("input is not valid hex") from None
    return decode(raw)


def _key(text) -> SigningKey:
    try:
        key = bytes.fromhex(text)
    except ValueError:
        raise UsageError("--key must be 32 hex characters") from None
    if len(key) != 16:
        raise UsageError("--key must be 32 hex characters")
    return SigningKey(key)


def cmd_packet(args) -> int:
    if args.action == "encode":
        _out(args.output, encode(parse_fields(_read_input(args.input))).hex() + "\n")
        return EXIT_OK
    if args.action == "decode":
        _out(args.output, format_fields(_read_hex_packet(args.input)))
        return EXIT_OK
    if args.key is None:
        raise UsageError(f"packet {args.action} needs --key")
    key = _key(args.key)
    pkt = _read_hex_packet(args.input)
    if args.action == "sign":
        if args.emit_packet:
            _out(args.output, encode(sign_packet(key, pkt)).hex() + "\n")
        else:
            _out(args.output, compute_tag(key, pkt).hex() + "\n")
        return EXIT_OK
    ok = verify_packet(key, pkt)
    _out(args.output, ("true" if ok else "false") + "\n")
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------- keygen

def _int(text):
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def cmd_keygen(args) -> int:
    if args.p is not None or args.w is not None:
        if args.p is None or args.w is None:
            raise UsageError("--p and --w go together")
        try:
            params = DhParams(args.p, args.w)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        params = get_group(args.group)
    if args.secret is not None and not 2 <= args.secret <= params.p - 2:
        raise UsageError(f"--secret must lie in [2, P-2] = [2, {params.p - 2}]")
    rng = random.Random(args.seed) if args.seed is not None else random.SystemRandom()
    kp = dh_generate(params, rng, args.secret)
    lines = [f"secret = {kp.secret}", f"public = {kp.public}"]
    if args.peer is not None:
        try:
            shared = dh_shared(params, kp, args.peer)
        except HandshakeRejected as exc:
            raise UsageError(str(exc)) from None
        lines.append(f"shared = {shared.s}")
        lines.append(f"key = {derive_key(shared).hex()}")
    _out(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the scenario / RNG seed")
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    common.add_argument("--trace", default=None, help="write the per-event trace log to this file")

    parser = argparse.ArgumentParser(prog="sgpsr", description="Secured GPSR: simulator, benchmark and packet tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario file, or a sweep over it",
                       description="Run a scenario and write the metrics CSV.",
                       epilog=schema_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config", help="scenario file (key = value lines)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one scenario key")
    p.add_argument("--sweep", action="append", metavar="KEY=V1,V2", help="sweep a key; repeat for a cartesian product")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes for sweeps")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", parents=[common], help="time AES and Blowfish encryption/decryption")
    p.add_argument("--sizes", type=_int_list, default=list(bench_mod.DEFAULT_SIZES), help="comma-separated message sizes")
    p.add_argument("--iterations", type=int, default=10000, help=f"timed iterations per cell (>= {bench_mod.MIN_ITERATIONS})")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("packet", parents=[common], help="encode, decode, sign or verify a packet")
    p.add_argument("action", choices=["encode", "decode", "sign", "verify"])
    p.add_argument("input", nargs="?", default="-", help="input file (default: stdin)")
    p.add_argument("--key", help="signing key, 32 hex characters")
    p.add_argument("--emit-packet", action="store_true", help="sign: print the signed packet instead of the tag")
    p.set_defaults(func=cmd_packet)

    p = sub.add_parser("keygen", parents=[common], help="Diffie-Hellman key generation and agreement")
    p.add_argument("--group", default="modp1536", choices=sorted(GROUPS), help="named DH group")
    p.add_argument("--p", type=_int, help="explicit prime modulus (decimal or 0x hex)")
    p.add_argument("--w", type=_int, help="explicit generator")
    p.add_argument("--secret", type=_int, help="own secret in [2, P-2] (random when omitted)")
    p.add_argument("--peer", type=_int, help="peer public value; completes the exchange")
    p.set_defaults(func=cmd_keygen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError) as exc:
        print(f"sgpsr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WireError as exc:
        print(f"sgpsr {args.command}: packet error in field '{exc.field}': {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
