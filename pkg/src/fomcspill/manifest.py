"""Run manifests: a machine-readable record of every pipeline run.

Each subcommand writes a JSON manifest next to its outputs carrying the
resolved configuration, a hash of that configuration, SHA-256 digests
of every input and output file, the seed, and the package version.
The wall-clock fields are informational; everything else is a pure
function of the inputs, so two runs with the same configuration hash
and input digests must produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .errors import InputError
from .ioutil import sha256_file, sha256_text

_TIME_FIELDS = ("started_utc", "wall_seconds")


def config_digest(config: dict) -> str:
    """Hash of the canonical JSON form of a configuration mapping."""
    return sha256_text(json.dumps(config, sort_keys=True, separators=(",", ":")))


@dataclass
class RunManifest:
    """What ran, with which inputs, producing which outputs."""

    command: str
    version: str
    config: dict
    seed: int | None = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    started_utc: str = ""
    wall_seconds: float = 0.0

    def add_input(self, path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "config_sha256": config_digest(self.config),
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "started_utc": self.started_utc,
            "wall_seconds": self.wall_seconds,
        }

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def start_manifest(command: str, version: str, config: dict, seed=None) -> RunManifest:
    return RunManifest(
        command=command,
        version=version,
        config=config,
        seed=seed,
        started_utc=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    )


def read_manifest(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    for key in ("command", "config", "config_sha256", "inputs", "outputs"):
        if key not in data:
            raise InputError(f"manifest {path} is missing field {key!r}")
    return data


def verify_manifest(path) -> list[str]:
    """Recompute every digest in a manifest; return mismatch descriptions."""
    data = read_manifest(path)
    problems = []
    if config_digest(data["config"]) != data["config_sha256"]:
        problems.append("config hash mismatch")
    for kind in ("inputs", "outputs"):
        for fname, digest in data[kind].items():
            try:
                actual = sha256_file(fname)
            except OSError:
                problems.append(f"{kind[:-1]} {fname}: file missing")
                continue
            if actual != digest:
                problems.append(f"{kind[:-1]} {fname}: hash mismatch")
    return problems


def equal_ignoring_time(a: dict, b: dict) -> bool:
    """Compare two manifest dictionaries modulo the wall-clock fields."""
    strip = lambda d: {k: v for k, v in d.items() if k not in _TIME_FIELDS}  # noqa: E731
    return strip(a) == strip(b)
