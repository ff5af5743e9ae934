"""Chain CSV persistence.

Format: leading ``#`` comment lines carrying the tool version, the
canonicalized run configuration and chain metadata, then a header row
``iteration,accepted,theta_<name>...,eps_<name>...`` and one data row per
retained state.  Floats are written with 17 significant digits so files
round-trip losslessly and determinism checks can be bit-exact.
"""

from __future__ import annotations

import json
import os
import tempfile
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .errors import InputError
from .samplers import Chain, RunConfig

try:
    TOOL_VERSION = version("abcmu")
except PackageNotFoundError:  # pragma: no cover - running from a checkout
    TOOL_VERSION = "0+unknown"


def canonical_json(obj) -> str:
    """Stable, locale-independent JSON encoding (sorted keys, no spaces)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path: str, text: str) -> None:
    """Write a file atomically within its directory."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_chain(path: str, chain: Chain, config: dict | None = None) -> None:
    """Serialize a chain to the CSV chain format."""
    theta_dim = chain.thetas.shape[1]
    if chain.theta_names and len(chain.theta_names) == theta_dim:
        theta_names = [f"theta_{n}" for n in chain.theta_names]
    else:
        theta_names = [f"theta{i}" for i in range(theta_dim)]
    eps_names = [f"eps_{n}" for n in chain.summary_names]

    lines = [
        f"# abcmu-version: {TOOL_VERSION}",
        f"# config: {canonical_json(config or {})}",
        f"# model: {chain.model_label}",
        f"# kernel: {chain.kernel_desc}",
        f"# acceptance_rate: {_fmt(chain.acceptance_rate)}",
        "# run: "
        + canonical_json(
            {
                "iterations": chain.config.iterations,
                "seed": chain.config.seed,
                "burn_in_fraction": chain.config.burn_in_fraction,
                "thin": chain.config.thin,
            }
        ),
        "iteration,accepted," + ",".join(theta_names + eps_names),
    ]
    for i in range(len(chain)):
        row = [str(i), "1" if chain.accepted[i] else "0"]
        row += [_fmt(v) for v in chain.thetas[i]]
        row += [_fmt(v) for v in chain.eps[i]]
        lines.append(",".join(row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_chain(path: str) -> tuple[Chain, dict]:
    """Parse a chain file back into a Chain plus its embedded config."""
    meta: dict = {}
    header = None
    rows = []
    with open(path, "r") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, value = body.partition(":")
                meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))

    if header is None or header[:2] != ["iteration", "accepted"]:
        raise InputError(f"{path}: not a chain file (bad header)")
    theta_cols = [i for i, h in enumerate(header) if h.startswith("theta")]
    eps_cols = [i for i, h in enumerate(header) if h.startswith("eps_")]
    if not theta_cols or not eps_cols:
        raise InputError(f"{path}: header lacks theta/eps columns")
    summary_names = tuple(header[i][len("eps_") :] for i in eps_cols)
    theta_names = tuple(
        header[i][len("theta_") :] for i in theta_cols if header[i].startswith("theta_")
    )
    if len(theta_names) != len(theta_cols):
        theta_names = ()

    n = len(rows)
    thetas = np.empty((n, len(theta_cols)))
    eps = np.empty((n, len(eps_cols)))
    accepted = np.empty(n, dtype=bool)
    for r, parts in enumerate(rows):
        accepted[r] = parts[1] == "1"
        thetas[r] = [float(parts[i]) for i in theta_cols]
        eps[r] = [float(parts[i]) for i in eps_cols]

    run_meta = json.loads(meta.get("run", "{}"))
    config = RunConfig(
        iterations=int(run_meta.get("iterations", max(n, 1))),
        seed=int(run_meta.get("seed", 0)),
        burn_in_fraction=float(run_meta.get("burn_in_fraction", 0.2)),
        thin=int(run_meta.get("thin", 1)),
    )
    chain = Chain(
        thetas,
        eps,
        accepted,
        float(meta.get("acceptance_rate", "nan")),
        config,
        meta.get("model", "unknown"),
        meta.get("kernel", "unknown"),
        summary_names,
        theta_names,
    )
    embedded = json.loads(meta.get("config", "{}"))
    return chain, embedded
