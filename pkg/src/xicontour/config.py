"""Job configuration files.

A config is a YAML mapping::

    case: pentagon                 # output subdirectory name
    spectrum:                      # row-major exponent matrix, n rows of t entries
      - [0, 1, 0, 4, 1]
      - [0, 0, 1, 1, 4]
    sign_classes: attained         # "attained", "all", or a list like ["+--++", "++--+"]
    window: 8.0                    # half-width of the clipping square
    grid: 2048                     # flood-fill resolution
    zeroset_grid: 1024             # zero-set oracle resolution
    tolerances: {svd: 1.0e-10, hyperplane: 1.0e-8, gauss: 1.0e-5}
    sampling: {max_step: 0.01, max_turn: 0.15}
    commands: [contour, chambers, verify]
    output: out
    points:                        # optional named coefficient vectors to locate
      g1: [13/4, 1, -4, 1, 1]
    constancy: {sigma: "+--++", samples: 5}   # optional zero-set constancy check
    expect:                        # optional golden values checked by `verify`
      attained: 5
      chambers: {"++--+": 2}
      inner: {"+--++": 1}
      signatures: {g1: [1, 0]}
      separated: [[g1, g2, "++-++"]]
      facet_lines: 2               # non-simplicial face lines over all signs
      total_inner: 1
      discriminant: {p: true}      # circuit spectra: on the discriminant or not

Matrix entries and point coordinates accept numbers, ``p/q`` fractions
and ``sqrt(k)`` terms.  Sign strings are normalized so the first entry is
``+``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .exceptions import ConfigError, SpectrumError
from .parametrization import parse_sign
from .spectrum import Spectrum, parse_entry

COMMANDS = ("contour", "chambers", "verify", "bounds")
_KNOWN = {
    "case", "spectrum", "sign_classes", "window", "grid", "zeroset_grid", "tolerances",
    "sampling", "commands", "output", "points", "constancy", "expect", "description",
}


@dataclass
class JobConfig:
    case: str
    spectrum: Spectrum
    sign_classes: object = "attained"
    window: float = 8.0
    grid: int = 2048
    zeroset_grid: int = 1024
    tolerances: dict = field(default_factory=lambda: {"svd": 1e-10, "hyperplane": 1e-8, "gauss": 1e-5})
    sampling: dict = field(default_factory=lambda: {"max_step": 0.01, "max_turn": 0.15})
    commands: tuple = ("contour", "chambers")
    output: str = "out"
    points: dict = field(default_factory=dict)
    constancy: dict | None = None
    expect: dict = field(default_factory=dict)
    source: str | None = None


def _lines(node, prefix=""):
    """Map dotted field names to 1-based line numbers using the composed YAML tree."""
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            name = f"{prefix}{k.value}"
            out[name] = k.start_mark.line + 1
            out.update(_lines(v, name + "."))
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            name = f"{prefix[:-1]}[{i}]" if prefix else f"[{i}]"
            out[name] = v.start_mark.line + 1
            out.update(_lines(v, name + "."))
    return out


def _number(value, name, line, kind=float):
    try:
        x = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}", field=name, line=line) from None
    if x <= 0:
        raise ConfigError(f"must be positive, got {value!r}", field=name, line=line)
    return x


def _vector(values, name, line):
    if not isinstance(values, list):
        raise ConfigError("expected a list of numbers", field=name, line=line)
    try:
        return [parse_entry(v) for v in values]
    except (SpectrumError, ValueError) as exc:
        raise ConfigError(str(exc), field=name, line=line) from None


def parse_config(text: str, source: str | None = None) -> JobConfig:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ConfigError(f"YAML syntax error: {exc.problem}", line=line) from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of fields")
    lines = _lines(node)

    def where(name):
        return lines.get(name)

    unknown = sorted(set(data) - _KNOWN)
    if unknown:
        raise ConfigError(f"unknown field (allowed: {', '.join(sorted(_KNOWN))})", field=unknown[0], line=where(unknown[0]))
    if "spectrum" not in data:
        raise ConfigError("missing required field", field="spectrum")
    rows = data["spectrum"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError("expected a list of matrix rows", field="spectrum", line=where("spectrum"))
    try:
        spec = Spectrum.from_rows(rows)
    except (SpectrumError, ValueError) as exc:
        raise ConfigError(str(exc), field="spectrum", line=where("spectrum")) from None

    cfg = JobConfig(case=str(data.get("case", Path(source).stem if source else "case")), spectrum=spec, source=source)

    sc = data.get("sign_classes", "attained")
    if isinstance(sc, str) and sc in ("attained", "all"):
        cfg.sign_classes = sc
    elif isinstance(sc, list):
        out = []
        for i, s in enumerate(sc):
            name = f"sign_classes[{i}]"
            if not isinstance(s, str):
                raise ConfigError("sign class must be a string like '+--++'", field=name, line=where(name))
            try:
                sig = parse_sign(s)
            except ValueError as exc:
                raise ConfigError(str(exc), field=name, line=where(name)) from None
            if len(sig) != spec.t:
                raise ConfigError(f"sign class has {len(sig)} entries, spectrum has {spec.t} columns", field=name, line=where(name))
            if sig not in out:
                out.append(sig)
        cfg.sign_classes = out
    else:
        raise ConfigError("expected 'attained', 'all' or a list of sign strings", field="sign_classes", line=where("sign_classes"))

    if "window" in data:
        cfg.window = _number(data["window"], "window", where("window"))
    for key in ("grid", "zeroset_grid"):
        if key in data:
            setattr(cfg, key, _number(data[key], key, where(key), int))
    for key in ("tolerances", "sampling"):
        if key in data:
            block = data[key]
            if not isinstance(block, dict):
                raise ConfigError("expected a mapping", field=key, line=where(key))
            merged = dict(getattr(cfg, key))
            for k, v in block.items():
                name = f"{key}.{k}"
                if k not in merged:
                    raise ConfigError(f"unknown entry (allowed: {', '.join(sorted(merged))})", field=name, line=where(name))
                merged[k] = _number(v, name, where(name))
            setattr(cfg, key, merged)
    if "commands" in data:
        cmds = data["commands"]
        if isinstance(cmds, str):
            cmds = [cmds]
        if not isinstance(cmds, list) or any(c not in COMMANDS for c in cmds):
            raise ConfigError(f"commands must be a list drawn from {', '.join(COMMANDS)}", field="commands", line=where("commands"))
        cfg.commands = tuple(cmds)
    if "output" in data:
        cfg.output = str(data["output"])
    pts = data.get("points") or {}
    if not isinstance(pts, dict):
        raise ConfigError("expected a mapping of name -> coefficient list", field="points", line=where("points"))
    for name, vec in pts.items():
        fname = f"points.{name}"
        v = _vector(vec, fname, where(fname))
        if len(v) != spec.t:
            raise ConfigError(f"expected {spec.t} coefficients, got {len(v)}", field=fname, line=where(fname))
        if any(x == 0 for x in v):
            raise ConfigError("coefficients must be nonzero", field=fname, line=where(fname))
        cfg.points[str(name)] = v
    if "constancy" in data:
        block = data["constancy"]
        if not isinstance(block, dict) or "sigma" not in block:
            raise ConfigError("expected a mapping with a 'sigma' entry", field="constancy", line=where("constancy"))
        try:
            sig = parse_sign(str(block["sigma"]))
        except ValueError as exc:
            raise ConfigError(str(exc), field="constancy.sigma", line=where("constancy.sigma")) from None
        cfg.constancy = {"sigma": sig, "samples": int(block.get("samples", 5)), "fiber_moves": int(block.get("fiber_moves", 0))}
    exp = data.get("expect") or {}
    if not isinstance(exp, dict):
        raise ConfigError("expected a mapping", field="expect", line=where("expect"))
    cfg.expect = _parse_expect(exp, cfg, where)
    return cfg


def _parse_expect(exp, cfg, where):
    out = {}
    for key, val in exp.items():
        name = f"expect.{key}"
        if key == "attained":
            out[key] = int(val)
        elif key in ("chambers", "inner"):
            if not isinstance(val, dict):
                raise ConfigError("expected a mapping of sign string -> integer", field=name, line=where(name))
            try:
                out[key] = {parse_sign(str(k)): int(v) for k, v in val.items()}
            except ValueError as exc:
                raise ConfigError(str(exc), field=name, line=where(name)) from None
        elif key == "total_inner":
            out[key] = int(val)
        elif key == "signatures":
            if not isinstance(val, dict) or any(k not in cfg.points for k in val):
                raise ConfigError("expected a mapping from point names to [components, compact]", field=name, line=where(name))
            out[key] = {k: tuple(int(x) for x in v) for k, v in val.items()}
        elif key == "separated":
            triples = []
            for i, item in enumerate(val or []):
                if not (isinstance(item, list) and len(item) == 3 and item[0] in cfg.points and item[1] in cfg.points):
                    raise ConfigError("expected [point, point, sign]", field=f"{name}[{i}]", line=where(f"{name}[{i}]"))
                triples.append((item[0], item[1], parse_sign(str(item[2]))))
            out[key] = triples
        elif key == "facet_lines":
            out[key] = int(val)
        elif key == "discriminant":
            if not isinstance(val, dict) or any(k not in cfg.points for k in val):
                raise ConfigError("expected a mapping from point names to true/false", field=name, line=where(name))
            out[key] = {k: bool(v) for k, v in val.items()}
        else:
            raise ConfigError("unknown expectation", field=name, line=where(name))
    return out


def load_config(path) -> JobConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def packaged_config(name: str) -> Path:
    """Path of a config shipped with the package (``pentagon``, ``inf``, ``sqrt2``...)."""
    here = Path(__file__).parent / "configs"
    p = here / (name if name.endswith((".yaml", ".yml")) else f"{name}.yaml")
    if not p.exists():
        raise ConfigError(f"no packaged config named {name!r}")
    return p
