"""Run configuration: JSON loading, schema validation and construction of the model objects."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .geometry import EllipticFrame, build_frame, normalize_arcs
from .weights import SPLITS, WeightSpec, check_admissible, weight_from_split

SCHEMA_VERSION = "1.0"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def load_schema() -> dict:
    text = resources.files("arczeros").joinpath("data/config.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class RunConfig:
    arcs: tuple                       # radians, original orientation
    factors: tuple = ()               # (xi radians original, m, lam)
    c_A: float = 1.0
    split: str = "mixed"
    W_endpoints: tuple | None = None
    n_values: tuple = (12,)
    nodes: int = 128
    dps: int | str | None = "auto"
    tolerances: dict = field(default_factory=dict)
    epsilon: float | None = None
    out_dir: str = "out"
    formats: tuple = ("csv", "json")
    perturb: tuple | None = None
    name: str = ""
    source: dict = field(default_factory=dict)

    def tol(self, key: str) -> float:
        defaults = {"theta_vs_levinson": 1e-6, "quadratic_identity": 1e-7, "pell": 1e-7}
        return float(self.tolerances.get(key, defaults[key]))

    def build(self):
        """(ArcConfiguration, EllipticFrame, WeightSpec) in the normalized orientation."""
        cfg = normalize_arcs(self.arcs)
        frame: EllipticFrame = build_frame(cfg)
        facs = [(x - cfg.rotation_psi, m, lam) for x, m, lam in self.factors]
        spec: WeightSpec = weight_from_split(cfg, factors=facs, c_A=self.c_A, split=self.split,
                                             W_endpoints=self.W_endpoints)
        check_admissible(spec)
        return cfg, frame, spec

    def resolved(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "arcs": {"unit": "rad", "angles": list(self.arcs)},
            "weight": {"c_A": self.c_A,
                       "factors": [{"xi": x, "m": m, "lambda": lam} for x, m, lam in self.factors]},
            "split": self.split,
            "W_endpoints": list(self.W_endpoints) if self.W_endpoints is not None else None,
            "n_values": list(self.n_values),
            "quadrature": {"nodes": self.nodes, "dps": self.dps},
            "tolerances": {k: self.tol(k) for k in ("theta_vs_levinson", "quadratic_identity", "pell")},
            "strips": {"epsilon": self.epsilon},
            "output": {"dir": self.out_dir, "formats": list(self.formats)},
            "perturb_moment": ({"index": self.perturb[0], "delta": self.perturb[1]}
                               if self.perturb else None),
        }


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def parse_config(data: dict) -> RunConfig:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = "; ".join(f"field '{_path(e)}': {e.message}" for e in errors)
        raise ConfigError(f"schema validation failed: {msgs}")
    ver = data.get("schema_version", SCHEMA_VERSION)
    if ver.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ConfigError(f"field 'schema_version': unsupported version {ver}")
    to_rad = math.radians if data["arcs"]["unit"] == "deg" else float
    arcs = tuple(to_rad(a) for a in data["arcs"]["angles"])
    w = data.get("weight", {})
    factors = tuple((to_rad(f["xi"]), int(f.get("m", 1)), int(f.get("lambda", 1)))
                    for f in w.get("factors", []))
    split = data.get("split", "mixed")
    W_end = data.get("W_endpoints")
    if split == "custom":
        if W_end is None:
            raise ConfigError("field 'W_endpoints': required when split is 'custom'")
        W_end = tuple(sorted(int(i) for i in W_end))
    elif W_end is not None:
        raise ConfigError(f"field 'W_endpoints': only allowed with split 'custom' (split is '{split}')")
    else:
        W_end = None
    if "n" in data and "n_range" in data:
        raise ConfigError("fields 'n' and 'n_range' are mutually exclusive")
    if "n_range" in data:
        a, b = data["n_range"]
        if b < a:
            raise ConfigError(f"field 'n_range': empty range {a}:{b}")
        n_values = tuple(range(a, b + 1))
    else:
        n_values = (int(data.get("n", 12)),)
    q = data.get("quadrature", {})
    out = data.get("output", {})
    pert = data.get("perturb_moment")
    return RunConfig(
        arcs=arcs, factors=factors, c_A=float(w.get("c_A", 1.0)), split=split, W_endpoints=W_end,
        n_values=n_values, nodes=int(q.get("nodes", 128)), dps=q.get("dps", "auto"),
        tolerances=dict(data.get("tolerances", {})),
        epsilon=data.get("strips", {}).get("epsilon"),
        out_dir=out.get("dir", "out"), formats=tuple(out.get("formats", ["csv", "json"])),
        perturb=(int(pert["index"]), float(pert["delta"])) if pert else None,
        name=data.get("name", ""), source=data,
    )


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    return parse_config(data)


__all__ = ["ConfigError", "RunConfig", "SCHEMA_VERSION", "SPLITS", "load_config", "load_schema",
           "parse_config"]
