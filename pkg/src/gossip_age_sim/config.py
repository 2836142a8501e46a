"""JSON config file handling for the CLI.

Layout:

    {
      "network": {"n": 100, "lambda_e": 1.0, "lambda_s": 1.0, "lambda": 1.0},
      "ctmc":    {"states": [{"kind": "ring"}, ...],
                  "q": ["sqrt(n)", ...],
                  "p": [[0, 1], [1, 0]]},
      "run":     {"horizon": 2000.0, "burn_in": 200.0, "seed": 0,
                  "replicates": 20, "mode": "full_gossip"}
    }

Custom topologies may reference an edge-list file ("edge_file", resolved
relative to the config file) instead of inline "edges".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .ctmc import CtmcSpec
from .engine import SimConfig, SimMode
from .errors import ConfigurationError
from .topology import load_edge_list

DEFAULT_BURN_IN_FRACTION = 0.1


@dataclass(frozen=True)
class ConfigFile:
    sim: SimConfig
    replicates: int


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    """Apply repeatable --set key=value entries with dotted paths."""
    for entry in overrides:
        if "=" not in entry:
            raise ConfigurationError(f"--set expects key=value, got {entry!r}")
        key, raw = entry.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"--set path {key!r} crosses a non-object value")
        node[parts[-1]] = value
    return doc


def _resolve_edge_files(ctmc_doc: dict, base_dir: Path) -> dict:
    for state in ctmc_doc.get("states", []):
        if isinstance(state, dict) and "edge_file" in state:
            path = Path(state.pop("edge_file"))
            if not path.is_absolute():
                path = base_dir / path
            if not path.exists():
                raise ConfigurationError(f"edge-list file not found: {path}")
            state["edges"] = [list(e) for e in load_edge_list(str(path))]
    return ctmc_doc


def parse_config(doc: dict, base_dir: Path | None = None) -> ConfigFile:
    base_dir = base_dir or Path.cwd()
    try:
        network = doc["network"]
        run_section = doc.get("run", {})
        ctmc_doc = _resolve_edge_files(dict(doc["ctmc"]), base_dir)
        ctmc = CtmcSpec.from_dict(ctmc_doc)
        n = int(network["n"])
        horizon = float(run_section.get("horizon", 2.0e3))
        burn_in = float(run_section.get("burn_in", horizon * DEFAULT_BURN_IN_FRACTION))
        mode = SimMode(str(run_section.get("mode", "full_gossip")).lower())
        sim = SimConfig(
            n=n,
            lam_e=float(network.get("lambda_e", 1.0)),
            lam_s=float(network.get("lambda_s", 1.0)),
            lam=float(network.get("lambda", 1.0)),
            ctmc=ctmc,
            horizon=horizon,
            burn_in=burn_in,
            seed=int(run_section.get("seed", 0)),
            mode=mode,
        )
        replicates = int(run_section.get("replicates", 20))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"invalid config: {e!r}") from e
    if replicates < 1:
        raise ConfigurationError(f"replicates must be >= 1, got {replicates}")
    return ConfigFile(sim=sim, replicates=replicates)


def load_config(path: str, overrides: list[str] | None = None) -> ConfigFile:
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config file {path} is not valid JSON: {e}") from e
    if overrides:
        doc = apply_overrides(doc, overrides)
    return parse_config(doc, base_dir=p.parent)
