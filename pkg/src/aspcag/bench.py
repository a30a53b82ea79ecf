"""Benchmark harness over {plain, cag} x {one-shot, incremental} x engines."""
from __future__ import annotations

import csv
import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Iterator, Optional

from .cag import cag_rewrite
from .errors import ConfigError, EngineTimeout, ExternalEngineError, IterationUnsat
from .external import run_external_engine  # noqa: F401  re-exported for callers
from .hcp import InstanceSpec, batch_facts, gen_instance, load_encoding
from .incremental import FactBatch, engine_from_spec, incremental_solve

try:
    import resource
except ImportError:  # not on every platform
    resource = None

MODES = ("one-shot", "incremental")
REWRITES = ("plain", "cag")


@dataclass
class BenchConfig:
    sizes: list
    ppi: int = 5
    mode: str = "incremental"
    rewrite: str = "plain"
    engine: str = "internal"
    timeout: float = 60.0
    output: Optional[str] = None
    parallel: int = 1
    backend: Optional[str] = None

    def validate(self):
        if not self.sizes:
            raise ConfigError("no instance sizes given")
        if any(s < 1 for s in self.sizes):
            raise ConfigError("instance sizes must be positive")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigError("instance sizes must be strictly increasing")
        if self.ppi < 1:
            raise ConfigError("ppi must be >= 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.rewrite not in REWRITES:
            raise ConfigError(f"rewrite must be one of {REWRITES}")
        if self.timeout < 0:
            raise ConfigError("timeout must be >= 0")
        if self.parallel < 1:
            raise ConfigError("parallel must be >= 1")
        try:
            engine_from_spec(self.engine)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class BenchRecord:
    persons: int
    things: int
    ppi: int
    mode: str
    rewrite: str
    engine: str
    status: str
    total_time: float = 0.0
    ground_time: float = 0.0
    solve_time: float = 0.0
    driver_time: float = 0.0
    final_ground_rules: Optional[int] = None
    final_ground_bytes: Optional[int] = None
    max_rss_kb: Optional[int] = field(default=None, compare=False)


FIELDS = [f.name for f in dataclasses.fields(BenchRecord)]
_INT_FIELDS = {"persons", "things", "ppi", "final_ground_rules", "final_ground_bytes", "max_rss_kb"}
_FLOAT_FIELDS = {"total_time", "ground_time", "solve_time", "driver_time"}


def _rss_kb() -> Optional[int]:
    if resource is None:
        return None
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss


def run_size(cfg: BenchConfig, persons: int) -> BenchRecord:
    """One benchmark run; never raises for solver outcomes."""
    spec = InstanceSpec(persons)
    start = time.perf_counter()
    deadline = start + cfg.timeout
    rec = BenchRecord(persons, spec.things, cfg.ppi, cfg.mode, cfg.rewrite, cfg.engine, "timeout")
    traces = []
    if time.perf_counter() < deadline:
        encoding = load_encoding("hcp")
        if cfg.rewrite == "cag":
            encoding = cag_rewrite(encoding)
        instance = gen_instance(spec)
        if cfg.mode == "incremental":
            batches = batch_facts(instance, cfg.ppi)
        else:
            batches = [FactBatch(1, tuple(instance))]
        engine = engine_from_spec(cfg.engine, cfg.backend)
        try:
            _, traces = incremental_solve(encoding, batches, engine, verify_final=False,
                                          deadline=deadline)
            rec.status = "sat"
        except EngineTimeout as exc:
            traces = exc.traces
            rec.status = "timeout"
        except IterationUnsat as exc:
            traces = exc.traces
            rec.status = "unsat"
        except ExternalEngineError:
            rec.status = "error"
    rec.total_time = time.perf_counter() - start
    rec.ground_time = sum(t.ground_time for t in traces)
    rec.solve_time = sum(t.solve_time for t in traces)
    rec.driver_time = rec.total_time - rec.ground_time - rec.solve_time
    if traces and traces[-1].stats is not None:
        rec.final_ground_rules = traces[-1].stats.rule_count
        rec.final_ground_bytes = traces[-1].stats.bytes
    rec.max_rss_kb = _rss_kb()
    return rec


def _format(rec: BenchRecord) -> dict:
    row = dataclasses.asdict(rec)
    for k in _FLOAT_FIELDS:
        row[k] = f"{row[k]:.6f}"
    return {k: ("" if v is None else v) for k, v in row.items()}


def write_header(fh) -> csv.DictWriter:
    w = csv.DictWriter(fh, fieldnames=FIELDS)
    w.writeheader()
    return w


def read_records(fh) -> list[BenchRecord]:
    out = []
    for row in csv.DictReader(fh):
        if list(row) != FIELDS:
            raise ValueError(f"unexpected CSV header {list(row)}")
        vals = {}
        for k, v in row.items():
            if k in _INT_FIELDS:
                vals[k] = int(v) if v != "" else None
            elif k in _FLOAT_FIELDS:
                vals[k] = float(v)
            else:
                vals[k] = v
        out.append(BenchRecord(**vals))
    return out


def _records(cfg: BenchConfig) -> Iterator[BenchRecord]:
    if cfg.parallel > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            yield from pool.map(partial(run_size, cfg), cfg.sizes)
    else:
        for n in cfg.sizes:
            yield run_size(cfg, n)


def run_bench(cfg: BenchConfig) -> list[BenchRecord]:
    """One record per size, in increasing order.  With ``cfg.output`` set,
    each row is flushed to the CSV as soon as it is available."""
    cfg.validate()
    records = []
    fh = open(cfg.output, "w", newline="") if cfg.output else None
    try:
        writer = write_header(fh) if fh else None
        for rec in _records(cfg):
            records.append(rec)
            if writer:
                writer.writerow(_format(rec))
                fh.flush()
    finally:
        if fh:
            fh.close()
    return records


def reduction_ratio(plain: Iterable[BenchRecord], cag: Iterable[BenchRecord]) -> dict:
    """1 - cag/plain final ground rule counts, keyed by persons."""
    base = {r.persons: r.final_ground_rules for r in plain if r.final_ground_rules}
    return {r.persons: 1 - r.final_ground_rules / base[r.persons]
            for r in cag if r.final_ground_rules is not None and r.persons in base}
