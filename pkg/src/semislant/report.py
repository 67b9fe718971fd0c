"""Run configuration, point sampling, suite orchestration and report emission."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from . import __version__
from .characterizations import (
    check_characterizations,
    check_integrability_direct,
    check_totally_geodesic_map,
    check_totally_umbilical,
)
from .checks import FAIL, CheckEntry, all_specs
from .contact import VARIANTS, check_almost_contact, check_contact_metric, check_duality, check_normality, check_sasakian
from .diffgeo import FDConfig
from .examples import CODOMAIN_METRICS, EXAMPLES, QUARTER, affine_setup, registry_example
from .semislant import NOT_SEMI_SLANT, check_structure_lemmas, detect_semi_slant
from .submersion import (
    SubmersionSetup,
    check_fundamental_equations,
    check_oneill,
    check_rank,
    check_riemannian_submersion,
    check_second_fundamental_form_symmetry,
    check_xi_horizontal,
)

SLICE, BOX = "slice_y0", "box"
SAMPLE_MODES = (SLICE, BOX)
FORMATS = ("json", "text")


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# --- configuration -----------------------------------------------------------------------

@dataclass(frozen=True)
class SampleConfig:
    mode: str = SLICE
    count: int = 100
    seed: int = 42
    box_halfwidth: float = 0.5


@dataclass(frozen=True)
class CustomMap:
    matrix: tuple
    offset: Optional[tuple] = None


@dataclass(frozen=True)
class RunConfig:
    example_id: Optional[str] = None
    custom: Optional[CustomMap] = None
    n: Optional[int] = None
    alpha: Optional[float] = None
    variant: str = "corrected"
    codomain: str = QUARTER
    sample: SampleConfig = field(default_factory=SampleConfig)
    tolerances: dict = field(default_factory=dict)
    checks: Union[str, tuple] = "all"

    def __post_init__(self):
        _validate(self)

    @property
    def fd_config(self) -> FDConfig:
        return FDConfig(**self.tolerances)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.custom is not None:
            d["custom"] = {"matrix": [list(r) for r in self.custom.matrix],
                           "offset": None if self.custom.offset is None else list(self.custom.offset)}
        d["checks"] = self.checks if isinstance(self.checks, str) else list(self.checks)
        return d

    @classmethod
    def from_dict(cls, d: Any) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        for k in d:
            if k not in known:
                raise ConfigError(k, f"unknown field; expected one of {sorted(known)}")
        kw = dict(d)
        if kw.get("custom") is not None:
            c = kw["custom"]
            if not isinstance(c, dict) or "matrix" not in c:
                raise ConfigError("custom", "expected an object with 'matrix' and optional 'offset'")
            for k in c:
                if k not in ("matrix", "offset"):
                    raise ConfigError(f"custom.{k}", "unknown field")
            try:
                rows = tuple(tuple(float(x) for x in r) for r in c["matrix"])
                off = None if c.get("offset") is None else tuple(float(x) for x in c["offset"])
            except (TypeError, ValueError):
                raise ConfigError("custom.matrix", "matrix rows and offset must be lists of numbers") from None
            kw["custom"] = CustomMap(rows, off)
        if "sample" in kw:
            s = kw["sample"]
            if not isinstance(s, dict):
                raise ConfigError("sample", "expected an object")
            sk = {f.name for f in fields(SampleConfig)}
            for k in s:
                if k not in sk:
                    raise ConfigError(f"sample.{k}", f"unknown field; expected one of {sorted(sk)}")
            kw["sample"] = SampleConfig(**s)
        if "tolerances" in kw and kw["tolerances"] is None:
            kw["tolerances"] = {}
        if isinstance(kw.get("checks"), list):
            kw["checks"] = tuple(kw["checks"])
        return cls(**kw)


def _validate(c: RunConfig) -> None:
    if (c.example_id is None) == (c.custom is None):
        raise ConfigError("example_id", "give exactly one of example_id or custom")
    if c.example_id is not None:
        if c.example_id not in EXAMPLES:
            raise ConfigError("example_id", f"unknown example; valid ids: {', '.join(EXAMPLES)}")
        info = EXAMPLES[c.example_id]
        if info.needs_alpha and c.alpha is None:
            raise ConfigError("alpha", f"{c.example_id} requires alpha in (0, π/2)")
        if c.n is not None and c.n != info.n:
            raise ConfigError("n", f"{c.example_id} lives on n={info.n}")
    else:
        rows = c.custom.matrix
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ConfigError("custom.matrix", "matrix must be a non-empty rectangular list of rows")
        if c.n is None or not isinstance(c.n, int) or c.n < 1:
            raise ConfigError("n", "a custom map needs a positive integer n")
        if len(rows[0]) != 2 * c.n + 1:
            raise ConfigError("custom.matrix", f"rows must have 2n+1 = {2 * c.n + 1} entries")
        if not len(rows) < len(rows[0]):
            raise ConfigError("custom.matrix", "need fewer rows than columns")
        if c.custom.offset is not None and len(c.custom.offset) != len(rows):
            raise ConfigError("custom.offset", "offset length must equal the number of rows")
        if not all(math.isfinite(x) for r in rows for x in r):
            raise ConfigError("custom.matrix", "entries must be finite")
    if c.alpha is not None:
        if isinstance(c.alpha, bool) or not isinstance(c.alpha, (int, float)) or not 0 < c.alpha < math.pi / 2:
            raise ConfigError("alpha", "alpha must be a number in (0, π/2)")
    if c.variant not in VARIANTS:
        raise ConfigError("variant", f"expected one of {VARIANTS}")
    if c.codomain not in CODOMAIN_METRICS:
        raise ConfigError("codomain", f"expected one of {CODOMAIN_METRICS}")
    s = c.sample
    if s.mode not in SAMPLE_MODES:
        raise ConfigError("sample.mode", f"expected one of {SAMPLE_MODES}")
    if isinstance(s.count, bool) or not isinstance(s.count, int) or s.count < 1:
        raise ConfigError("sample.count", "count must be an integer >= 1")
    if isinstance(s.seed, bool) or not isinstance(s.seed, int) or s.seed < 0:
        raise ConfigError("sample.seed", "seed must be a non-negative integer")
    if not isinstance(s.box_halfwidth, (int, float)) or not s.box_halfwidth > 0:
        raise ConfigError("sample.box_halfwidth", "box_halfwidth must be positive")
    if not isinstance(c.tolerances, dict):
        raise ConfigError("tolerances", "expected an object")
    known = {f.name for f in fields(FDConfig)}
    for k, v in c.tolerances.items():
        if k not in known:
            raise ConfigError(f"tolerances.{k}", f"unknown tolerance; expected one of {sorted(known)}")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"tolerances.{k}", "must be a number")
    try:
        FDConfig(**c.tolerances)
    except ValueError as e:
        raise ConfigError("tolerances", str(e)) from None
    if isinstance(c.checks, str):
        if c.checks != "all":
            raise ConfigError("checks", "use \"all\" or a list of check ids or groups")
    else:
        valid = set(check_ids()) | set(GROUPS)
        for cid in c.checks:
            if cid not in valid:
                raise ConfigError("checks", f"unknown check id or group {cid!r}")


def load_config(path: str) -> RunConfig:
    """Read a JSON config file; parse errors report line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError("<file>", f"cannot read {path}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno}, column {e.colno}", e.msg) from None
    return RunConfig.from_dict(data)


# --- sampling and setup ------------------------------------------------------------------

def build_setup(config: RunConfig) -> SubmersionSetup:
    if config.example_id is not None:
        return registry_example(config.example_id, config.alpha, config.variant, config.codomain)
    return affine_setup(np.array(config.custom.matrix), config.n,
                        None if config.custom.offset is None else np.array(config.custom.offset),
                        config.variant, config.codomain)


def sample_points(setup: SubmersionSetup, sample: SampleConfig) -> list[np.ndarray]:
    """Uniform points in the box; slice mode then zeroes the y coordinates."""
    rng = np.random.default_rng(sample.seed)
    m = setup.map.m1
    pts = rng.uniform(-sample.box_halfwidth, sample.box_halfwidth, size=(sample.count, m))
    if sample.mode == SLICE:
        pts[:, list(setup.domain_structure.y_indices)] = 0.0
    return [p for p in pts]


# --- orchestration -----------------------------------------------------------------------

Runner = Callable[[SubmersionSetup, list, FDConfig, int], list]


def _one(f):
    return lambda s, pts, cfg, seed: [f(s, pts, cfg)]


def _structure(f):
    return lambda s, pts, cfg, seed: _as_list(f(s.domain_structure, pts, cfg))


def _as_list(x):
    return x if isinstance(x, list) else [x]


# group name -> runners; each runner returns a list of entries
GROUPS: dict[str, list[Runner]] = {
    "contact": [_structure(check_almost_contact), _structure(check_duality), _structure(check_contact_metric),
                _structure(check_normality), _structure(check_sasakian)],
    "submersion": [_one(check_rank), _one(check_riemannian_submersion), _one(check_xi_horizontal)],
    "oneill": [lambda s, p, c, seed: check_oneill(s, p, c), lambda s, p, c, seed: check_fundamental_equations(s, p, c),
               _one(check_second_fundamental_form_symmetry)],
    "semislant": [lambda s, p, c, seed: check_structure_lemmas(s, p, c, seed)],
    "characterization": [
        lambda s, p, c, seed: check_characterizations(s, p, c),
        lambda s, p, c, seed: [check_integrability_direct(s, w, p, c) for w in ("D1", "D2", "horizontal", "vertical")],
        lambda s, p, c, seed: check_totally_umbilical(s, p, c, seed),
        _one(check_totally_geodesic_map),
    ],
}


def check_ids() -> list[str]:
    return [s.id for s in all_specs()]


def _group_of(check_id: str) -> str:
    for s in all_specs():
        if s.id == check_id:
            return s.group
    raise KeyError(check_id)


@dataclass
class VerificationReport:
    meta: dict
    classification: dict
    checks: list[CheckEntry] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if any(c.status == FAIL for c in self.checks) else 0

    def to_dict(self) -> dict:
        return {"meta": self.meta, "classification": self.classification,
                "checks": [c.to_dict() for c in self.checks]}

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["meta"], d["classification"], [CheckEntry.from_dict(c) for c in d["checks"]])


def classify(setup: SubmersionSetup, points: Sequence[np.ndarray], cfg: FDConfig) -> dict:
    """Summary of the spectral detection over all sampled points."""
    data = [detect_semi_slant(setup, p, cfg) for p in points]
    classes: dict[str, int] = {}
    for d in data:
        classes[d.classification] = classes.get(d.classification, 0) + 1
    majority = max(sorted(classes), key=lambda k: classes[k]) if classes else NOT_SEMI_SLANT
    thetas = [d.theta for d in data if d.theta is not None]
    theta = float(np.mean(thetas)) if thetas else None
    spread = (max(max(abs(t - theta) for t in thetas), max(d.theta_spread for d in data if d.theta is not None))
              if thetas else None)
    ref = data[0] if data else None
    return {
        "dim_ker": ref.dim_vertical if ref else None,
        "dim_D1": ref.dim_d1 if ref else None,
        "dim_D2": ref.dim_d2 if ref else None,
        "theta": theta,
        "theta_spread": spread,
        "class": majority,
        "class_counts": dict(sorted(classes.items())),
        "uniform": len(classes) == 1 and len({(d.dim_d1, d.dim_d2) for d in data}) == 1,
    }


def _selected(config: RunConfig) -> tuple[list[str], Optional[set]]:
    """Groups to run and, for explicit id lists, the ids to keep."""
    if config.checks == "all":
        return list(GROUPS), None
    groups, ids = [], set()
    for item in config.checks:
        if item in GROUPS:
            groups.append(item)
            ids.update(s.id for s in all_specs() if s.group == item)
        else:
            groups.append(_group_of(item))
            ids.add(item)
    return [g for g in GROUPS if g in groups], ids


def run_suite(config: RunConfig) -> VerificationReport:
    setup = build_setup(config)
    cfg = config.fd_config
    points = sample_points(setup, config.sample)
    classification = classify(setup, points, cfg)
    groups, keep = _selected(config)
    entries: list[CheckEntry] = []
    for g in groups:
        for runner in GROUPS[g]:
            entries.extend(runner(setup, points, cfg, config.sample.seed))
    if keep is not None:
        entries = [e for e in entries if e.id in keep]
    meta = {"tool": "semislant", "version": __version__, "config": config.to_dict(),
            "seed": config.sample.seed, "setup": setup.name, "m1": setup.map.m1, "m2": setup.map.m2}
    return VerificationReport(meta, classification, entries)


# --- emission ----------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(_jsonable(report.to_dict()), indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "text":
        return _text(report).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.3e}"


def _text(report: VerificationReport) -> str:
    c = report.classification
    lines = [f"setup {report.meta.get('setup')}  ({report.meta.get('m1')} -> {report.meta.get('m2')})  "
             f"seed {report.meta.get('seed')}",
             f"class {c['class']}  dim ker {c['dim_ker']}  D1 {c['dim_D1']}  D2 {c['dim_D2']}  "
             f"theta {_fmt(c['theta'])} ± {_fmt(c['theta_spread'])}", ""]
    if report.checks:
        w = max(len(e.id) for e in report.checks)
        lines.append(f"{'check':<{w}}  {'status':<7}  {'max residual':>12}  {'tolerance':>10}  points")
        for e in report.checks:
            lines.append(f"{e.id:<{w}}  {e.status:<7}  {e.max_residual:>12.3e}  {e.tolerance:>10.1e}  "
                         f"{e.points_evaluated}")
    counts: dict[str, int] = {}
    for e in report.checks:
        counts[e.status] = counts.get(e.status, 0) + 1
    lines += ["", "summary " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))]
    return "\n".join(lines) + "\n"
