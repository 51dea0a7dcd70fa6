"""Plain sectioned ``key = value`` experiment configs and the text grammars
for points, clopen sets and function descriptions.

Function grammar:
  const <elt>
  table <depth> <file.csv>         rows/cols = cylinder index, cells = elements
  diag ones <v1>,<v2>,...          infinite [1^n 0] schema, values cycling
  diag ones-finite <v1>,...        identity past the listed values
  diag cyl <prefix>:<elt>,...      finite disjoint cylinder family
  prod(<fn>, <fn>)   inv(<fn>)   quant(<fn>, <n>)
"""

from __future__ import annotations

import configparser
import csv
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from sepcont.cantor import CantorPoint, ClopenSet, Cylinder
from sepcont.errors import ConfigError
from sepcont.functions import (
    Constant,
    DiagonalIndicator,
    PointwiseInverse,
    PointwiseProduct,
    SepFunction,
    SubbasicNbhd,
    TableFunction,
)
from sepcont.groups import GroupSpec, get_group
from sepcont.reports import parse_dyadic

MAX_N = 12


def depth_cap() -> int:
    return int(os.environ.get("SEPCONT_MAX_DEPTH", 16))


def _split_args(text: str) -> list[str]:
    """Split on top-level commas (respecting parentheses)."""
    parts: list[str] = []
    buf: list[str] = []
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    if buf:
        parts.append("".join(buf).strip())
    return parts


def parse_function(text: str, group: GroupSpec, base_dir: Path) -> SepFunction:
    s = text.strip()
    try:
        return _parse_function(s, group, base_dir)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"bad function description {text!r}: {exc}") from exc


def _parse_function(s: str, group: GroupSpec, base_dir: Path) -> SepFunction:
    if s.startswith("prod(") and s.endswith(")"):
        args = _split_args(s[len("prod(") : -1])
        if len(args) != 2:
            raise ConfigError(f"prod takes two functions: {s!r}")
        return PointwiseProduct(
            _parse_function(args[0], group, base_dir),
            _parse_function(args[1], group, base_dir),
        )
    if s.startswith("inv(") and s.endswith(")"):
        return PointwiseInverse(_parse_function(s[len("inv(") : -1], group, base_dir))
    if s.startswith("quant(") and s.endswith(")"):
        args = _split_args(s[len("quant(") : -1])
        if len(args) != 2:
            raise ConfigError(f"quant takes a function and a level: {s!r}")
        from sepcont.zerodim import ZerodimPipeline

        inner = _parse_function(args[0], group, base_dir)
        n = int(args[1])
        return ZerodimPipeline(inner, n_max=n, grid_depth=4).quantized(n)
    head, _, rest = s.partition(" ")
    rest = rest.strip()
    if head == "const":
        return Constant(group.parse_element(rest))
    if head == "table":
        depth_text, _, file_text = rest.partition(" ")
        return load_table(base_dir / file_text.strip(), int(depth_text), group)
    if head == "diag":
        kind, _, vals = rest.partition(" ")
        vals = vals.strip()
        if kind == "ones":
            values = [group.parse_element(v) for v in vals.split(",")]
            return DiagonalIndicator.ones_schema(values, cycle=True)
        if kind == "ones-finite":
            values = [group.parse_element(v) for v in vals.split(",")]
            return DiagonalIndicator.ones_schema(values, cycle=False)
        if kind == "cyl":
            pairs = []
            for item in vals.split(","):
                prefix, _, lit = item.partition(":")
                pairs.append((Cylinder(prefix.strip()), group.parse_element(lit.strip())))
            return DiagonalIndicator.from_pairs(pairs)
        raise ConfigError(f"unknown diag family {kind!r}")
    raise ConfigError(f"unknown function head {head!r}")


def load_table(path: Path, depth: int, group: GroupSpec) -> TableFunction:
    n = 2**depth
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[group.parse_element(cell) for cell in row] for row in csv.reader(fh)]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ConfigError(f"table {path} must be {n} x {n}")
    return TableFunction(depth, tuple(tuple(r) for r in rows))


def parse_side(text: str) -> CantorPoint | ClopenSet:
    s = text.strip()
    if s.startswith("{") or s.startswith("!"):
        return ClopenSet.parse(s)
    return CantorPoint.parse(s)


def parse_probe(name: str, text: str) -> SubbasicNbhd:
    parts = [p.strip() for p in text.split(";")]
    if len(parts) != 2:
        raise ConfigError(f"probe {name!r} must be '<x side> ; <y side>'")
    try:
        return SubbasicNbhd(parse_side(parts[0]), parse_side(parts[1]), frozenset(), name)
    except ValueError as exc:
        raise ConfigError(f"probe {name!r}: {exc}") from exc


@dataclass
class Experiment:
    group: GroupSpec
    function: SepFunction
    function_text: str
    grid_depth: int
    n_max: int
    levels: list[int]
    out: Path
    probes: list[SubbasicNbhd]
    raw: configparser.ConfigParser
    text: str
    base_dir: Path
    seed: int = 0

    def section(self, name: str) -> dict[str, str]:
        if self.raw.has_section(name):
            return dict(self.raw.items(name))
        return {}


def _random_probes(count: int, seed: int) -> list[SubbasicNbhd]:
    import random

    rng = random.Random(seed)
    probes = []
    for i in range(count):
        prefix = "".join(rng.choice("01") for _ in range(rng.randint(0, 3)))
        point = CantorPoint(prefix, rng.choice(["0", "1"]))
        region = ClopenSet.from_prefixes(
            ["".join(rng.choice("01") for _ in range(rng.randint(1, 2)))]
        )
        if rng.random() < 0.5:
            probes.append(SubbasicNbhd(point, region, frozenset(), f"rnd{i}"))
        else:
            probes.append(SubbasicNbhd(region, point, frozenset(), f"rnd{i}"))
    return probes


def load_experiment(
    path: str | Path,
    out_override: str | None = None,
    grid_depth_override: int | None = None,
    seed: int = 0,
) -> Experiment:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep keys case-sensitive
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    if not parser.has_section("experiment"):
        raise ConfigError(f"{path}: missing [experiment] section")
    exp = dict(parser.items("experiment"))
    try:
        group = get_group(exp["group"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    grid_depth = grid_depth_override if grid_depth_override is not None else int(exp.get("grid_depth", 6))
    n_max = int(exp.get("n_max", 3))
    if grid_depth < 0 or grid_depth > depth_cap():
        raise ConfigError(f"grid_depth must be in [0, {depth_cap()}]")
    if n_max < 0 or n_max > MAX_N:
        raise ConfigError(f"n_max must be in [0, {MAX_N}]")
    levels_text = exp.get("levels", "1,2")
    try:
        levels = [int(v) for v in levels_text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad levels list {levels_text!r}") from None
    if "function" not in exp:
        raise ConfigError(f"{path}: [experiment] needs a function")
    function = parse_function(exp["function"], group, path.parent)
    probes = []
    if parser.has_section("probes"):
        for name, value in parser.items("probes"):
            if name == "random":
                probes.extend(_random_probes(int(value), seed))
            else:
                probes.append(parse_probe(name, value))
    for p in probes:
        for side in (p.kx, p.ky):
            if isinstance(side, ClopenSet) and side.depth() > grid_depth:
                raise ConfigError(
                    f"probe {p.probe_id!r} uses cylinders deeper than grid_depth {grid_depth}"
                )
    out = Path(out_override) if out_override else path.parent / exp.get("out", "reports")
    return Experiment(
        group=group,
        function=function,
        function_text=exp["function"],
        grid_depth=grid_depth,
        n_max=n_max,
        levels=levels,
        out=out,
        probes=probes,
        raw=parser,
        text=text,
        base_dir=path.parent,
        seed=seed,
    )


def parse_eps(text: str) -> Fraction:
    eps = parse_dyadic(text)
    if eps <= 0:
        raise ConfigError(f"radius must be positive: {text!r}")
    return eps
