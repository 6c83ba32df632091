"""Enumerate generator classes for (q, k) and compare all of them.

Choices are taken up to multiplication by units (u * S gives an isometric
lens space).  Each class is represented by the lexicographically smallest
sorted +/-S in its orbit.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .chartables import GeneratorChoice
from .numtheory import QShape, classify_shape, unit_residues
from .spectra import MatchReport, build_profile, runs_of

__all__ = [
    "FILTERS",
    "CheckpointError",
    "SearchTask",
    "SearchResult",
    "canonicalize",
    "canonical_s",
    "enumerate_choices",
    "candidate_count",
    "passes_filter",
    "run_search",
]

log = logging.getLogger(__name__)

FILTERS = ("any-equality", "nontrivial", "forms-not-functions", "all")
CHECKPOINT_FORMAT = "lensiso-checkpoint"
CHECKPOINT_VERSION = 1
# bump when the H construction changes so stale caches are refused
FORMULA_VERSION = 1


class CheckpointError(RuntimeError):
    """Checkpoint file is unreadable, corrupt or belongs to another task."""


def canonical_s(q: int, s_pm) -> tuple[int, ...]:
    """Lexicographically least sorted u * s_pm (mod q) over all units u."""
    best = None
    for u in unit_residues(q).half():
        for v in (u, q - u):
            img = tuple(sorted((v * s) % q for s in s_pm))
            if best is None or img < best:
                best = img
    return best


def canonicalize(choice: GeneratorChoice) -> GeneratorChoice:
    return GeneratorChoice.from_s(choice.q, canonical_s(choice.q, choice.s_pm))


def _check_feasible(q: int, k: int, shape: QShape) -> None:
    if not shape.supported:
        raise ValueError(f"unsupported q-shape: {shape}")
    half = len(unit_residues(q)) // 2
    if not 1 <= k < half:
        raise ValueError(f"k = {k} is infeasible for q = {q}: need 1 <= k < {half}")


def candidate_count(q: int, k: int) -> int:
    from math import comb
    return comb(len(unit_residues(q).half()) - 1, k - 1)


def enumerate_choices(q: int, k: int, shape: QShape | None = None,
                      allow_even: bool = False) -> list[GeneratorChoice]:
    """One canonical choice per unit-multiplication orbit, sorted.

    Candidates are +/-({1} u T) for (k-1)-subsets T of the unit
    representatives in 2..q/2; every orbit contains such a set.
    """
    if shape is None:
        shape = classify_shape(q, allow_even=allow_even)
    _check_feasible(q, k, shape)
    units = unit_residues(q)
    reps = [t for t in units.half() if t != 1]
    halves = units.half()
    seen: set[tuple[int, ...]] = set()
    canon: list[tuple[int, ...]] = []
    for T in combinations(reps, k - 1):
        s = tuple(sorted({1, q - 1, *T, *(q - t for t in T)}))
        if s in seen:
            continue
        orbit = set()
        for u in halves:
            orbit.add(tuple(sorted((u * x) % q for x in s)))
        seen.update(o for o in orbit if o[0] == 1)
        canon.append(min(orbit))
    canon.sort()
    return [GeneratorChoice.from_s(q, s) for s in canon]


def passes_filter(equal, name: str) -> bool:
    equal = list(equal)
    if name == "all":
        return True
    if name == "any-equality":
        return any(equal)
    if name == "forms-not-functions":
        return not equal[0] and any(equal[1:])
    if name == "nontrivial":
        # print condition of the original search program: more than one run
        # spanning two or more degrees, or exactly one such run while the
        # first run starts above degree 0
        runs = runs_of(equal)
        long_runs = sum(1 for s, e in runs if e > s)
        return long_runs > 1 or (long_runs == 1 and runs[0][0] > 0)
    raise ValueError(f"unknown filter {name!r}; choose from {', '.join(FILTERS)}")


@dataclass
class SearchTask:
    q: int
    k: int
    shape: QShape | None = None
    filter: str = "nontrivial"
    chunk: tuple[int, int] | None = None
    jobs: int = 1
    checkpoint: str | None = None
    batch_size: int = 64
    allow_even: bool = False

    def __post_init__(self):
        if self.shape is None:
            self.shape = classify_shape(self.q, allow_even=self.allow_even)
        if self.filter not in FILTERS:
            raise ValueError(f"unknown filter {self.filter!r}; choose from {', '.join(FILTERS)}")
        _check_feasible(self.q, self.k, self.shape)
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass
class SearchResult:
    """Pairs passing the filter, held as index pairs plus an equality matrix.

    ``pairs[m] = (i, j)`` indexes ``classes`` with i < j and ``equal[m, p]``
    says whether H^p agrees.  Reports are built on demand, since the
    permissive filters can match millions of pairs.
    """

    task: SearchTask
    classes: list[GeneratorChoice]
    classes_covered: int
    pairs: np.ndarray
    equal: np.ndarray
    _reports: list[MatchReport] | None = field(default=None, repr=False)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def complete(self) -> bool:
        return self.classes_covered == self.class_count

    def __len__(self) -> int:
        return len(self.pairs)

    def iter_reports(self):
        q, k = self.task.q, self.task.k
        for (i, j), eq in zip(self.pairs.tolist(), self.equal.tolist()):
            yield MatchReport(q, k, self.classes[i].s_pm, self.classes[j].s_pm, tuple(eq))

    @property
    def reports(self) -> list[MatchReport]:
        if self._reports is None:
            self._reports = list(self.iter_reports())
        return self._reports


def _param_hash(task: SearchTask, classes: list[GeneratorChoice]) -> str:
    h = hashlib.sha256()
    h.update(f"{task.q}|{task.k}|{task.shape}|{FORMULA_VERSION}|".encode())
    for c in classes:
        h.update((",".join(map(str, c.s_pm)) + ";").encode())
    return h.hexdigest()


def _header(task: SearchTask, classes) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "q": task.q,
        "k": task.k,
        "shape": str(task.shape),
        "param_hash": _param_hash(task, classes),
    }


def _load_checkpoint(path: str, header: dict, classes) -> dict[int, list[str]]:
    """Read cached digests; a torn final line (interrupted append) is dropped."""
    cached: dict[int, list[str]] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    lines = raw.split("\n")
    if not lines or not lines[0].strip():
        raise CheckpointError(f"checkpoint {path} has no header")
    try:
        got = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"checkpoint {path} has a corrupt header") from exc
    if got != header:
        diff = sorted(k for k in set(got) | set(header) if got.get(k) != header.get(k))
        raise CheckpointError(
            f"checkpoint {path} does not match this task (differs in: {', '.join(diff)})")
    body = lines[1:]
    complete_lines = body[:-1] if not raw.endswith("\n") else body
    for ln in complete_lines:
        if not ln.strip():
            continue
        try:
            rec = json.loads(ln)
            for item in rec["records"]:
                i = int(item["index"])
                if tuple(item["s"]) != classes[i].s_pm or len(item["digests"]) != classes[i].n + 1:
                    raise CheckpointError(f"checkpoint record {i} does not match class list")
                cached[i] = list(item["digests"])
        except (json.JSONDecodeError, KeyError, TypeError, IndexError, ValueError) as exc:
            raise CheckpointError(f"corrupt checkpoint record in {path}: {exc}") from exc
    return cached


def _open_checkpoint(path: str, header: dict, classes) -> dict[int, list[str]]:
    if os.path.exists(path) and os.path.getsize(path) > 0:
        cached = _load_checkpoint(path, header, classes)
        with open(path, "rb+") as fh:
            data = fh.read()
            if not data.endswith(b"\n"):
                # cut a torn trailing record so new records start on a fresh line
                fh.seek(data.rfind(b"\n") + 1)
                fh.truncate()
        return cached
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
    except OSError as exc:
        raise CheckpointError(f"cannot create checkpoint {path}: {exc}") from exc
    return {}


def _append_records(path: str, start: int, end: int, records: list[dict]) -> None:
    line = json.dumps({"chunk": [start, end], "records": records}, sort_keys=True) + "\n"
    try:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())
    except OSError as exc:
        raise CheckpointError(f"cannot append to checkpoint {path}: {exc}") from exc


def _digest_batch(args) -> list[list[str]]:
    shape, items = args
    return [build_profile(GeneratorChoice.from_s(q, s), shape).digests() for q, s in items]


def _poly_batch(args) -> list[tuple]:
    shape, items = args
    out = []
    for q, s, degrees in items:
        prof = build_profile(GeneratorChoice.from_s(q, s), shape, degrees)
        out.append(prof.polys)
    return out


def _mapper(task: SearchTask, pool):
    def run(fn, payloads):
        if pool is not None and len(payloads) > 1:
            return pool.map(fn, payloads)
        return map(fn, payloads)
    return run


def run_search(task: SearchTask) -> SearchResult:
    """Build every class profile, then keep the pairs that pass the filter.

    Pairs are matched on per-degree digests; every digest match that feeds
    a kept pair is then confirmed by exact polynomial comparison.
    """
    classes = enumerate_choices(task.q, task.k, task.shape)
    total = len(classes)
    lo, hi = task.chunk if task.chunk is not None else (0, total)
    lo, hi = max(0, lo), min(total, hi)
    log.info("q=%d k=%d: %d classes, processing %d..%d", task.q, task.k, total, lo, hi)

    header = _header(task, classes)
    digests: dict[int, list[str]] = {}
    if task.checkpoint:
        digests = _open_checkpoint(task.checkpoint, header, classes)

    todo = [i for i in range(lo, hi) if i not in digests]
    batches = [todo[i:i + task.batch_size] for i in range(0, len(todo), task.batch_size)]
    payloads = [(task.shape, [(task.q, classes[i].s_pm) for i in b]) for b in batches]

    pool = ProcessPoolExecutor(max_workers=task.jobs) if task.jobs > 1 else None
    try:
        run = _mapper(task, pool)
        for batch, result in zip(batches, run(_digest_batch, payloads)):
            for i, d in zip(batch, result):
                digests[i] = d
            if task.checkpoint:
                _append_records(task.checkpoint, batch[0], batch[-1] + 1,
                                [{"index": i, "s": list(classes[i].s_pm), "digests": digests[i]}
                                 for i in batch])
        known = sorted(digests)
        pairs, equal = _match(task, classes, known, digests, run)
    finally:
        if pool is not None:
            pool.shutdown()
    log.info("%d pair(s) pass filter %s", len(pairs), task.filter)
    return SearchResult(task, classes, len(known), pairs, equal)


def _filter_mask(E: np.ndarray, name: str) -> np.ndarray:
    """Vectorized passes_filter over the rows of a boolean matrix."""
    if name == "all":
        return np.ones(len(E), dtype=bool)
    if name == "any-equality":
        return E.any(axis=1)
    if name == "forms-not-functions":
        return ~E[:, 0] & E[:, 1:].any(axis=1)
    # nontrivial: count runs of length >= 2 by their first two positions
    starts = E[:, :-1] & E[:, 1:]
    starts[:, 1:] &= ~E[:, :-2]
    long_runs = starts.sum(axis=1)
    return (long_runs > 1) | ((long_runs == 1) & ~E[:, 0])


def _scan(ids: np.ndarray, name: str):
    rows_i, rows_j, eqs = [], [], []
    n = len(ids)
    for i in range(n - 1):
        E = ids[i + 1:] == ids[i]
        keep = np.flatnonzero(_filter_mask(E, name))
        if len(keep):
            rows_i.append(np.full(len(keep), i, dtype=np.int64))
            rows_j.append(keep + i + 1)
            eqs.append(E[keep])
    if not rows_i:
        return np.zeros((0, 2), dtype=np.int64), np.zeros((0, ids.shape[1]), dtype=bool)
    return np.column_stack([np.concatenate(rows_i), np.concatenate(rows_j)]), np.concatenate(eqs)


def _match(task: SearchTask, classes, known: list[int], digests, run):
    degrees = classes[0].n + 1
    m = len(known)
    ids = np.zeros((m, degrees), dtype=np.int64)
    for p in range(degrees):
        seen: dict[str, int] = {}
        for row, i in enumerate(known):
            ids[row, p] = seen.setdefault(digests[i][p], len(seen))

    confirmed: set[tuple[int, int]] = set()
    while True:
        pairs, equal = _scan(ids, task.filter)
        # (degree, bucket) groups that some kept pair relies on
        need = set()
        for p in range(degrees):
            rows = pairs[equal[:, p], 0]
            need.update((p, int(b)) for b in np.unique(ids[rows, p]))
        need -= confirmed
        if not need:
            break
        _confirm(task, classes, known, ids, need, run)
        confirmed |= need
    rows = np.asarray(known, dtype=np.int64)
    return (rows[pairs] if len(pairs) else pairs), equal


def _confirm(task, classes, known, ids, need, run) -> None:
    """Exact check of the digest buckets in ``need``; splits any bucket whose
    members turn out to differ (a digest collision) into fresh ids."""
    by_row: dict[int, list[int]] = {}
    for p, b in need:
        for row in np.flatnonzero(ids[:, p] == b):
            by_row.setdefault(int(row), []).append(p)
    rows = sorted(by_row)
    log.info("confirming %d bucket(s) over %d class(es)", len(need), len(rows))
    items = [(task.q, classes[known[r]].s_pm, sorted(by_row[r])) for r in rows]
    size = task.batch_size
    payloads = [(task.shape, items[x:x + size]) for x in range(0, len(items), size)]
    seen: dict[tuple[int, int], dict] = {}
    next_id = int(ids.max()) + 1 if ids.size else 0
    row_iter = iter(rows)
    for result in run(_poly_batch, payloads):
        for polys in result:
            row = next(row_iter)
            for p, h in zip(sorted(by_row[row]), polys):
                group = seen.setdefault((p, int(ids[row, p])), {})
                if not group:
                    group[h] = int(ids[row, p])
                elif h not in group:
                    log.warning("digest collision at degree %d; splitting bucket", p)
                    group[h] = next_id
                    next_id += 1
                ids[row, p] = group[h]
