"""Run configuration and its flat ``key = value`` file format.

Grammar, one entry per line::

    # comment
    key = value
    eps = 0.5, 0.3          # lists are comma separated

Blank lines and ``#`` comments are ignored.  Unknown keys are rejected.
``format_config`` writes every key in a fixed order with ``repr`` floats,
so ``parse_config(format_config(c)) == c``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .deformation import DEFAULT_H, QUADRATURES
from .generators import KINDS, GeneratorSpec

#: every check the ``verify-all`` driver knows about, in run order
CHECKS = (
    "delta", "harnack", "diameter", "bilipschitz", "boundary-lower", "cauchy",
    "uniformity", "gehring-hayman", "roads", "product-distance", "sandwich",
    "quasi-isometry", "gromov-cauchy",
)
REGIONS = ("inner", "all")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    kind: str = "regular-tree"
    branching: int = 2
    radius: int = 8
    p: int = 7
    q: int = 3
    n: int = 6
    prob: float = 0.1
    edge_length: float = 1.0
    subdivision: int = 1
    eps: tuple[float, ...] = (0.5,)
    h: float = DEFAULT_H
    seed: int = 0
    pairs: int = 5000
    region: str = "inner"
    quadrature: str = "trapezoid"
    threads: int = 1
    origin: int = -1  # -1: use the density base point
    out: str = "reports"
    checks: tuple[str, ...] = CHECKS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not self.eps:
            raise ConfigError("eps list is empty")
        if any(not e > 0 for e in self.eps):
            raise ConfigError("every eps must be positive")
        if self.h < 0:
            raise ConfigError("h must be nonnegative")
        if self.quadrature not in QUADRATURES:
            raise ConfigError(f"quadrature must be one of {', '.join(QUADRATURES)}")
        if self.region not in REGIONS:
            raise ConfigError(f"region must be one of {', '.join(REGIONS)}")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ConfigError(f"unknown checks: {', '.join(bad)}")
        if self.pairs < 1 or self.threads < 1 or self.subdivision < 1:
            raise ConfigError("pairs, threads and subdivision must be >= 1")

    def generator_spec(self) -> GeneratorSpec:
        return GeneratorSpec(
            kind=self.kind, branching=self.branching, radius=self.radius, p=self.p, q=self.q,
            n=self.n, prob=self.prob, seed=self.seed, edge_length=self.edge_length,
            subdivision=self.subdivision,
        )

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        try:
            return replace(self, **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return {f.name: list(v) if isinstance(v := getattr(self, f.name), tuple) else v
                for f in fields(self)}


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "str":
            return raw
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if kind == "tuple[float, ...]":
            return tuple(float(s) for s in items)
        return tuple(items)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, value)
    return (base or RunConfig()).with_overrides(**values)


def format_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            text = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            text = repr(v)
        else:
            text = str(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
