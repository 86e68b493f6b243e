"""Chain persistence: one CSV per chain plus a JSON metadata sidecar.

The CSV schema is ``chain_id,iteration,<param names...>,log_posterior,gof,
accepted``, one row per recorded state. Floats are serialized with repr(),
which round-trips IEEE doubles exactly, so read(write(chain)) reproduces the
stored arrays bit for bit.
"""

from __future__ import annotations

import csv
import json
import os
import shutil
from pathlib import Path

import numpy as np

from .errors import InsufficientChainsError, ParseError
from .sampler import Chain, ChainSet

META_FILENAME = "run_meta.json"
FORMAT = "epicalib-run/1"

_FIXED_LEAD = ("chain_id", "iteration")
_FIXED_TAIL = ("log_posterior", "gof", "accepted")


def chain_filename(chain_id: int) -> str:
    return f"chain_{chain_id}.csv"


def write_chain_csv(chain: Chain, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(_FIXED_LEAD) + list(chain.names) + list(_FIXED_TAIL))
        for k in range(len(chain)):
            row = [chain.chain_id, int(chain.iterations[k])]
            row += [repr(float(v)) for v in chain.params[k]]
            row += [repr(float(chain.log_post[k])), repr(float(chain.gof[k])),
                    int(chain.accepted[k])]
            w.writerow(row)


def read_chain_csv(path) -> Chain:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty chain file")
    header = rows[0]
    if tuple(header[:2]) != _FIXED_LEAD or tuple(header[-3:]) != _FIXED_TAIL:
        raise ParseError(f"{path}: unexpected chain header {header}")
    names = tuple(header[2:-3])
    if not names:
        raise ParseError(f"{path}: no parameter columns")
    n_cols = len(header)
    records = rows[1:]
    n = len(records)
    iterations = np.empty(n, dtype=np.int64)
    params = np.empty((n, len(names)))
    log_post = np.empty(n)
    gof = np.empty(n)
    accepted = np.empty(n, dtype=bool)
    chain_id = 0
    for k, row in enumerate(records):
        lineno = k + 2
        if len(row) != n_cols:
            raise ParseError(f"{path}: expected {n_cols} columns, got {len(row)}", line=lineno)
        try:
            chain_id = int(row[0])
            iterations[k] = int(row[1])
            params[k] = [float(v) for v in row[2:-3]]
            log_post[k] = float(row[-3])
            gof[k] = float(row[-2])
            accepted[k] = bool(int(row[-1]))
        except ValueError:
            raise ParseError(f"{path}: malformed value", line=lineno) from None
    return Chain(
        names=names,
        iterations=iterations,
        params=params,
        log_post=log_post,
        gof=gof,
        accepted=accepted,
        chain_id=chain_id,
    )


def write_run(directory, chains: ChainSet, meta: dict) -> Path:
    """Persist a whole run atomically: write to a scratch dir, then rename.

    An existing run directory is replaced only after the new one is complete;
    a failure leaves no partial output behind.
    """
    directory = Path(directory)
    directory.parent.mkdir(parents=True, exist_ok=True)
    scratch = directory.parent / f".{directory.name}.partial-{os.getpid()}"
    if scratch.exists():
        shutil.rmtree(scratch)
    scratch.mkdir()
    try:
        meta = dict(meta)
        meta["format"] = FORMAT
        meta["chains"] = [
            {
                "chain_id": c.chain_id,
                "seed": c.seed,
                "acceptance_rate": c.acceptance_rate,
                "file": chain_filename(c.chain_id),
            }
            for c in chains.chains
        ]
        for c in chains.chains:
            write_chain_csv(c, scratch / chain_filename(c.chain_id))
        with open(scratch / META_FILENAME, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
        if directory.exists():
            shutil.rmtree(directory)
        os.replace(scratch, directory)
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        raise
    return directory


def read_run(directory) -> tuple[ChainSet, dict]:
    """Load every chain CSV in a run directory plus its metadata sidecar."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"{directory} is not a run directory")
    meta_path = directory / META_FILENAME
    meta = {}
    if meta_path.exists():
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    chain_files = sorted(directory.glob("chain_*.csv"))
    if not chain_files:
        raise InsufficientChainsError(f"no chain files found in {directory}")
    chains = []
    for f in chain_files:
        c = read_chain_csv(f)
        info = next((m for m in meta.get("chains", []) if m.get("file") == f.name), None)
        if info is not None:
            c = Chain(
                names=c.names, iterations=c.iterations, params=c.params,
                log_post=c.log_post, gof=c.gof, accepted=c.accepted,
                seed=info.get("seed"), acceptance_rate=info.get("acceptance_rate"),
                chain_id=c.chain_id,
            )
        chains.append(c)
    names = chains[0].names
    for c, f in zip(chains[1:], chain_files[1:]):
        if c.names != names:
            raise ParseError(f"{f}: parameter columns {c.names} do not match {names}")
    lengths = {len(c) for c in chains}
    if len(lengths) != 1:
        raise ParseError(f"{directory}: chains have unequal recorded lengths {sorted(lengths)}")
    return ChainSet(chains=tuple(chains)), meta
