"""Batch runner: a job file of checks in, one JSONL result record per job out.

Job files are JSONL, one object per line:

    {"id": "j1", "matroid": "named:vamos", "check": "ak", "params": {"pairs": "2345,01"}}

Records are written in job order whatever order the workers finish in, so
a rerun produces the same bytes.  Wall times go to ``<out>.times`` to keep
the record stream deterministic.  Jobs whose id already appears in the
output are skipped, which makes an interrupted run resumable.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .io import FormatError

RECORD_FORMAT = "matext-result/1"


def read_jobs(path) -> list[dict]:
    jobs = []
    ids = set()
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            job = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON: {e.msg}", no) from None
        for key in ("matroid", "check"):
            if key not in job:
                raise FormatError(f"job lacks {key!r}", no)
        job.setdefault("id", f"job{len(jobs) + 1}")
        job.setdefault("params", {})
        if job["id"] in ids:
            raise FormatError(f"duplicate job id {job['id']!r}", no)
        ids.add(job["id"])
        jobs.append(job)
    return jobs


def run_job(job: dict) -> tuple[dict, float]:
    from .catalog.canon import canonical_string
    from .cli import UsageError, load_source, run_check

    t0 = time.perf_counter()
    rec = {"format": RECORD_FORMAT, "job": job["id"], "check": job["check"], "matroid": job["matroid"],
           "params": job["params"]}
    try:
        m = load_source(job["matroid"])
        rec["canonical"] = canonical_string(m)
        out = run_check(m, job["check"], dict(job["params"]))
        rec.update(verdict=out.verdict, exit=out.code, digest=out.digest)
    except UsageError as e:
        rec.update(verdict="error", exit=64, error=str(e))
    except Exception as e:  # recorded, the batch goes on
        rec.update(verdict="error", exit=70, error=f"{type(e).__name__}: {e}")
    return rec, time.perf_counter() - t0


def done_ids(out_path) -> set:
    p = Path(out_path)
    if not p.exists():
        return set()
    ids = set()
    for line in p.read_text().splitlines():
        try:
            ids.add(json.loads(line)["job"])
        except (json.JSONDecodeError, KeyError):
            break  # a torn last line from an interrupted run
    return ids


def _trim_torn_tail(out_path):
    p = Path(out_path)
    if not p.exists():
        return
    good = []
    for line in p.read_text().splitlines():
        try:
            json.loads(line)
        except json.JSONDecodeError:
            break
        good.append(line + "\n")
    p.write_text("".join(good))


def run_batch(jobfile, out_path, threads: int = 1) -> int:
    """Run every job not yet in ``out_path``; returns the number of new records."""
    jobs = read_jobs(jobfile)
    _trim_torn_tail(out_path)
    skip = done_ids(out_path)
    todo = [j for j in jobs if j["id"] not in skip]
    lock = threading.Lock()
    pending: dict = {}
    next_idx = [0]
    written = [0]
    with open(out_path, "a") as out, open(str(out_path) + ".times", "a") as times:

        def deliver(idx, rec, secs):
            with lock:
                pending[idx] = (rec, secs)
                while next_idx[0] in pending:
                    r, s = pending.pop(next_idx[0])
                    out.write(json.dumps(r, sort_keys=True) + "\n")
                    out.flush()
                    times.write(f"{r['job']}\t{s:.3f}\n")
                    next_idx[0] += 1
                    written[0] += 1

        def work(idx_job):
            idx, job = idx_job
            rec, secs = run_job(job)
            deliver(idx, rec, secs)

        if threads > 1:
            with ThreadPoolExecutor(threads) as ex:
                list(ex.map(work, enumerate(todo)))
        else:
            for item in enumerate(todo):
                work(item)
    return written[0]
