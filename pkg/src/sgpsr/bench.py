"""AES vs. Blowfish execution-time harness.

Times the same cipher objects the protocol uses, one message per timed
iteration, and reports median/min/max nanoseconds per message. The
published reference timings are carried alongside for comparison only;
they come from an unknown machine and runtime and are not targets.
"""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
import warnings
from dataclasses import dataclass

from .crypto.aes import AES128
from .crypto.blowfish import Blowfish

__all__ = [
    "BenchResult",
    "PUBLISHED_NS",
    "BENCH_COLUMNS",
    "run_bench",
    "emit_table",
    "clock_warning",
]

MIN_ITERATIONS = 1000
DEFAULT_SIZES = (128, 256, 512)
ROUNDS = 100
BENCH_COLUMNS = ["algorithm", "operation", "size", "iterations", "median_ns", "min_ns", "max_ns"]

# reference timings (ns) as published for 128/256/512-byte messages
PUBLISHED_NS = {
    ("AES", "encrypt"): {128: 6383481, 256: 7166724, 512: 8684963},
    ("AES", "decrypt"): {128: 2032531, 256: 2975913, 512: 5500665},
    ("Blowfish", "encrypt"): {128: 16396774, 256: 18365661, 512: 15570931},
    ("Blowfish", "decrypt"): {128: 954160, 256: 1023451, 512: 1124051},
}

_CIPHERS = {
    "AES": (AES128, 16, 16),  # class, key bytes, block bytes
    "Blowfish": (Blowfish, 16, 8),
}


@dataclass(frozen=True)
class BenchResult:
    algorithm: str
    operation: str
    message_size: int
    iterations: int
    median_ns: float
    min_ns: int
    max_ns: int
    setup_median_ns: float = 0.0

    def row(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "operation": self.operation,
            "size": self.message_size,
            "iterations": self.iterations,
            "median_ns": f"{self.median_ns:.1f}",
            "min_ns": self.min_ns,
            "max_ns": self.max_ns,
        }


def clock_warning() -> str | None:
    res = time.get_clock_info("perf_counter").resolution
    if res > 1e-6:
        return f"perf_counter resolution {res:g} s is coarser than 1 us; short timings are quantized"
    return None


def _time_calls(fn, arg, iterations, clock=time.perf_counter_ns):
    samples = []
    append = samples.append
    for _ in range(iterations):
        t0 = clock()
        fn(arg)
        append(clock() - t0)
    return samples


def run_bench(sizes=DEFAULT_SIZES, iterations: int = 10000, seed: int = 0,
              setup_iterations: int = 20, algorithms=("AES", "Blowfish")) -> list[BenchResult]:
    sizes = list(sizes)
    if not sizes:
        raise ValueError("need at least one message size")
    for s in sizes:
        if s <= 0 or s % 8:
            raise ValueError(f"message size {s} must be a positive multiple of 8")
    if iterations < MIN_ITERATIONS:
        raise ValueError(f"iterations must be >= {MIN_ITERATIONS}")
    note = clock_warning()
    if note:
        warnings.warn(note, RuntimeWarning, stacklevel=2)

    rng = random.Random(seed)
    cells, setups = [], {}
    for name in algorithms:
        cls, key_len, block = _CIPHERS[name]
        key = bytes(rng.getrandbits(8) for _ in range(key_len))
        setups[name] = float(statistics.median(_time_calls(cls, key, setup_iterations)))
        cipher = cls(key)
        for size in sizes:
            padded = size + (-size) % block
            msg = bytes(rng.getrandbits(8) for _ in range(padded))
            ct = cipher.encrypt_ecb(msg)
            cells.append((name, "encrypt", size, cipher.encrypt_ecb, msg))
            cells.append((name, "decrypt", size, cipher.decrypt_ecb, ct))

    # Cells are sampled round-robin in small batches so that slow spells on a
    # shared host land on every cell alike instead of skewing whichever cell
    # happened to be running.
    for _, _, _, fn, arg in cells:
        _time_calls(fn, arg, max(10, iterations // 20))  # warm-up
    samples = [[] for _ in cells]
    batch = max(1, iterations // ROUNDS)
    done = 0
    while done < iterations:
        n = min(batch, iterations - done)
        for acc, (_, _, _, fn, arg) in zip(samples, cells):
            acc.extend(_time_calls(fn, arg, n))
        done += n

    return [
        BenchResult(name, op, size, iterations,
                    float(statistics.median(s)), min(s), max(s), setups[name])
        for (name, op, size, _, _), s in zip(cells, samples)
    ]


def _csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.row())
    return buf.getvalue()


def emit_table(results) -> tuple[str, str]:
    """Render results as (text table, CSV)."""
    results = list(results)
    lines = []
    note = clock_warning()
    if note:
        lines.append(f"warning: {note}")
    by_algo: dict[str, list[BenchResult]] = {}
    for r in results:
        by_algo.setdefault(r.algorithm, []).append(r)
    for algo, rows in by_algo.items():
        sizes = sorted({r.message_size for r in rows})
        lines.append(algo)
        lines.append(f"  {'message size (bytes)':<34}" + "".join(f"{s:>14}" for s in sizes))
        for op in ("encrypt", "decrypt"):
            cells = {r.message_size: r for r in rows if r.operation == op}
            if not cells:
                continue
            lines.append(f"  {op + ' median ns (measured)':<34}"
                         + "".join(f"{cells[s].median_ns:>14.0f}" if s in cells else f"{'-':>14}" for s in sizes))
            ref = PUBLISHED_NS.get((algo, op), {})
            lines.append(f"  {op + ' ns (published reference)':<34}"
                         + "".join(f"{ref[s]:>14}" if s in ref else f"{'-':>14}" for s in sizes))
        lines.append(f"  {'key setup median ns':<34}{rows[0].setup_median_ns:>14.0f}")
    return "\n".join(lines) + ("\n" if lines else ""), _csv(results)
