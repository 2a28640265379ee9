"""Run orchestration: resolve a config, build or load the spectrum, compute
the profile and audits, and write deterministic report files."""
from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


from . import action, rates
from .action import ConfigError, ProductGroupSpec
from .calculus import example51_formula
from .spectrum import Binning, FormatError, SlopeSpectrum, load_spectrum, save_spectrum, spectrum_from_histogram

log = logging.getLogger(__name__)

CACHE_ENV = "SLOPEGROWTH_CACHE_DIR"
HALF_PI = math.pi / 2
FORMULA_TOLERANCE = 0.15

# Continuity constants, fitted once as the largest adjacent excess slope over
# the two depths below each preset's default L_max, then frozen.
LIPSCHITZ = {"example31": 0.0, "example41": 6.6, "example51": 7.2}

__all__ = ["RunConfig", "Report", "UsageError", "run", "run_preset", "emit_report", "CACHE_ENV"]


class UsageError(ConfigError):
    pass


def _default_lmax(preset: str | None, N: int) -> int:
    if preset == "example31":
        return 12
    if preset == "example41":
        return 11
    if preset == "example51":
        # largest depth with at most ~4e8 reduced words
        total, L = 0, 0
        while True:
            nxt = total + 2 * N * (2 * N - 1) ** L
            if nxt > 4e8:
                return max(L, 1)
            total, L = nxt, L + 1
    return 8


@dataclass
class RunConfig:
    subcommand: str = "preset"
    preset: str | None = None
    N: int = 4
    spec_file: str | None = None
    lmax: int | None = None
    binning: str = "angular"
    bins: int = 90
    eps_schedule: tuple[float, ...] | None = None
    grid: int = rates.DEFAULT_GRID
    window: tuple[int, int] | None = None
    min_samples: int = rates.MIN_SAMPLES
    out: str = "out"
    cache: str = "use"
    jobs: int = 1
    concavity_slack: float = 0.1
    cos_sin_slack: float = 0.2
    condition_tolerance: float = 0.05
    undefined_boundary: str = "skip"
    lipschitz: float | None = None

    def resolved(self) -> "RunConfig":
        """Copy with every default materialised."""
        if (self.preset is None) == (self.spec_file is None):
            raise UsageError("give exactly one of a preset or a spec file")
        if self.preset is not None and self.preset not in action.PRESETS:
            raise UsageError(f"unknown preset {self.preset!r}; valid presets: {', '.join(action.PRESETS)}")
        if self.preset == "example51" and self.N < 3:
            raise ConfigError(f"example51 needs N >= 3, got {self.N}")
        if self.cache not in ("use", "rebuild"):
            raise UsageError("cache policy must be 'use' or 'rebuild'")
        c = RunConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        if c.lmax is None:
            c.lmax = _default_lmax(c.preset, c.N)
        if c.eps_schedule is None:
            # all example31 slopes coincide, so a sub-grid epsilon is resolvable
            c.eps_schedule = rates.DEFAULT_EPS + ((0.01,) if c.preset == "example31" else ())
        c.eps_schedule = tuple(float(e) for e in c.eps_schedule)
        if c.lipschitz is None:
            c.lipschitz = LIPSCHITZ.get(c.preset or "", 2.0)
        if c.window is not None:
            c.window = tuple(int(x) for x in c.window)
        return c

    def spec(self) -> ProductGroupSpec:
        if self.preset is not None:
            return action.preset(self.preset, self.N)
        return action.load_spec(self.spec_file)

    def make_binning(self) -> Binning:
        if self.binning == "angular":
            return Binning("angular", bins=self.bins)
        return Binning("paper-tan", grid=tuple(float(t) for t in rates.default_grid(self.grid)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eps_schedule"] = list(d["eps_schedule"]) if d["eps_schedule"] is not None else None
        d["window"] = list(d["window"]) if d["window"] is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if d.get("eps_schedule") is not None:
            d["eps_schedule"] = tuple(d["eps_schedule"])
        if d.get("window") is not None:
            d["window"] = tuple(d["window"])
        return cls(**d)


@dataclass
class Report:
    config: dict
    meta: dict
    global_rate: dict
    profile: list[dict]
    theta_star: float | None
    delta_star: float | None
    condition: dict
    audits: list[dict]
    formula: list[dict] = field(default_factory=list)
    low_data: list[float] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if any(not a["passed"] for a in self.audits if a.get("hard", True)):
            return 4
        if self.low_data or self.global_rate.get("low_data"):
            return 3
        return 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(**d)

    def profile_csv(self) -> str:
        lines = ["theta,delta,stderr,neg_inf_flag,eps_used,n_lo,n_hi"]
        for r in self.profile:
            eps = "" if r["eps_used"] is None else repr(r["eps_used"])
            lines.append(
                f"{r['theta']!r},{r['delta']!r},{r['stderr']!r},{r['neg_inf_flag']},{eps},{r['n_lo']},{r['n_hi']}"
            )
        return "\n".join(lines) + "\n"

    def plot_csv(self) -> str:
        formula = {r["theta"]: r["formula"] for r in self.formula}
        lines = ["theta,delta,lower,upper,formula"]
        for r in self.profile:
            d, se = r["delta"], r["stderr"]
            lo, hi = (d - se, d + se) if math.isfinite(d) else (d, d)
            f = formula.get(r["theta"], math.nan)
            lines.append(f"{r['theta']!r},{d!r},{lo!r},{hi!r},{f!r}")
        return "\n".join(lines) + "\n"


def _profile_rows(p: rates.RateProfile) -> list[dict]:
    rows = []
    for t, e in zip(p.thetas, p.estimates):
        rows.append({
            "theta": float(t),
            "delta": math.nan if e.low_data else float(e.value),
            "stderr": float(e.stderr),
            "neg_inf_flag": int(e.neg_inf),
            "eps_used": e.eps,
            "n_lo": int(e.window[0]),
            "n_hi": int(e.window[1]),
            "samples": int(e.samples),
            "max_quotient": float(e.max_quotient),
            "low_data": bool(e.low_data),
        })
    return rows


def _ensure_writable(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc


def _cache_path(cfg: RunConfig, spec: ProductGroupSpec) -> Path:
    base = os.environ.get(CACHE_ENV)
    if not base:
        return Path(cfg.out) / "spectrum.cache"
    tag = f"{spec.fingerprint()}-L{cfg.lmax}-{cfg.binning}{cfg.bins if cfg.binning == 'angular' else cfg.grid}"
    return Path(base) / f"spectrum-{tag}.cache"


def obtain_spectrum(cfg: RunConfig, spec: ProductGroupSpec) -> SlopeSpectrum:
    """Load the cached spectrum for this config, or enumerate and cache it."""
    horizon = action.completeness_horizon(spec, cfg.lmax)
    path = _cache_path(cfg, spec)
    binning = cfg.make_binning()
    if cfg.cache == "use" and path.exists():
        try:
            s = load_spectrum(path, expect_fingerprint=spec.fingerprint())
            if s.binning == binning and s.meta.get("L_max") == cfg.lmax and s.n_max == horizon:
                log.info("loaded cached spectrum %s", path)
                return s
        except FormatError as exc:
            log.warning("ignoring unusable cache %s: %s", path, exc)
    dedup = not spec.injective
    hist = action.displacement_histogram(spec, cfg.lmax, dedup=dedup, jobs=cfg.jobs)
    s = spectrum_from_histogram(
        hist, binning, horizon, spec.fingerprint(), horizon=horizon,
        meta={"L_max": cfg.lmax, "lambda": spec.lam, "dedup": "on" if dedup else "off", "base_point": "identity"},
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    save_spectrum(s, path)
    return s


def _publish_cache(cfg: RunConfig, spec: ProductGroupSpec) -> None:
    src, dst = _cache_path(cfg, spec), Path(cfg.out) / "spectrum.cache"
    if src != dst and src.exists():
        dst.write_bytes(src.read_bytes())


def _preset_bands(cfg: RunConfig):
    """(regular-growth interval, positivity band) known for each preset."""
    if cfg.preset == "example41":
        return (math.pi / 4, math.atan(2)), (math.pi / 4, math.atan(2))
    if cfg.preset == "example51":
        return (math.pi / 4, HALF_PI), (math.pi / 4, HALF_PI)
    if cfg.preset == "example31":
        return (math.pi / 4, math.pi / 4), None
    return None, None


def run(config: RunConfig) -> Report:
    cfg = config.resolved()
    spec = cfg.spec()
    out = Path(cfg.out)
    _ensure_writable(out)
    t0 = time.perf_counter()
    s = obtain_spectrum(cfg, spec)
    _publish_cache(cfg, spec)
    grid = rates.default_grid(cfg.grid)
    win = cfg.window
    prof = rates.build_profile(s, grid, cfg.eps_schedule, win, cfg.min_samples)
    try:
        g = rates.delta_global(s, win)
    except rates.LowDataError as exc:
        g = exc.estimate

    audits = []
    try:
        ts, ds = rates.find_theta_star(prof)
    except ValueError:
        ts, ds = None, None
    cond = rates.check_interior_condition(prof, cfg.condition_tolerance, cfg.undefined_boundary)

    conc = rates.concavity_audit(prof.restricted(), cfg.concavity_slack)
    audits.append({
        "name": "concavity", "passed": not conc, "hard": True,
        "violations": len(conc), "first": [list(v) for v in conc[:5]], "slack": cfg.concavity_slack,
    })
    for res in (
        rates.continuity_audit(prof, cfg.lipschitz),
        rates.sandwich_audit(prof, g) if g.finite else None,
        rates.check_cos_sin_bound(prof, cfg.cos_sin_slack, cfg.undefined_boundary),
    ):
        if res is not None:
            audits.append({**res.to_dict(), "hard": True})

    interval, band = _preset_bands(cfg)
    if interval is not None:
        eps = min(cfg.eps_schedule)
        rg = rates.regular_growth_check(s, interval, eps, win, grid)
        audits.append({**rg.to_dict(), "hard": True})
        if cfg.preset == "example31":
            full = rates.regular_growth_check(s, (0.0, HALF_PI), eps, win, grid)
            # expected to fail: the diagonal group has a single slope
            audits.append({**full.to_dict(), "name": "regular_growth_full_fails", "passed": not full.passed, "hard": True})
    if band is not None:
        audits.append({**rates.positivity_audit(prof, band).to_dict(), "hard": True})

    formula = []
    if cfg.preset == "example51":
        for t, e in zip(prof.thetas, prof.estimates):
            if t < math.pi / 4:
                continue
            f = example51_formula(cfg.N, float(t))
            v = math.nan if e.low_data else e.value
            formula.append({"theta": float(t), "estimate": v, "formula": f, "diff": v - f, "gating": bool(t == HALF_PI)})
        top = formula[-1]
        audits.append({
            "name": "formula_endpoint", "hard": True, "tolerance": FORMULA_TOLERANCE,
            "passed": bool(abs(top["diff"]) <= FORMULA_TOLERANCE), "estimate": top["estimate"], "formula": top["formula"],
        })

    low = [float(t) for t, e in zip(prof.thetas, prof.estimates) if e.low_data]
    meta = {
        "fingerprint": spec.fingerprint(),
        "spec": spec.canonical(),
        "horizon": s.horizon,
        "n_max": s.n_max,
        "window": list(prof.window),
        "base_point": "identity",
        "estimator_order": "epsilon first, then tail regression over n",
        "identity_skipped": s.meta.get("identity_skipped", 0),
        "wall_time": time.perf_counter() - t0,
    }
    return Report(
        config=cfg.to_dict(), meta=meta,
        global_rate={
            "value": g.value, "stderr": g.stderr, "window": list(g.window), "samples": g.samples,
            "max_quotient": g.max_quotient, "low_data": g.low_data,
        },
        profile=_profile_rows(prof), theta_star=ts, delta_star=None if ds is None else float(ds),
        condition={**cond.to_dict(), "text": cond.to_text()}, audits=audits, formula=formula, low_data=low,
    )


def run_preset(name: str, N: int = 4, **overrides) -> Report:
    if name not in action.PRESETS:
        raise UsageError(f"unknown preset {name!r}; valid presets: {', '.join(action.PRESETS)}")
    return run(RunConfig(preset=name, N=N, **overrides))


def emit_report(report: Report, fmt: str = "csv", out_dir=None) -> list[Path]:
    """Write ``profile.csv`` + ``plotdata.csv`` (csv) or ``report.json`` (json).

    Timing goes to the ``run_meta.json`` sidecar so the other files are
    byte-identical across reruns.
    """
    out = Path(out_dir or report.config["out"])
    _ensure_writable(out)
    written = []
    if fmt == "csv":
        for name, body in (("profile.csv", report.profile_csv()), ("plotdata.csv", report.plot_csv())):
            (out / name).write_text(body)
            written.append(out / name)
    elif fmt == "json":
        d = report.to_dict()
        d["meta"] = {k: v for k, v in d["meta"].items() if k != "wall_time"}
        (out / "report.json").write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")
        written.append(out / "report.json")
    else:
        raise UsageError(f"unknown format {fmt!r}")
    side = out / "run_meta.json"
    side.write_text(json.dumps({
        "wall_time": report.meta.get("wall_time"),
        "written": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }, indent=2) + "\n")
    written.append(side)
    return written


def load_report(path) -> Report:
    with open(path) as fh:
        return Report.from_dict(json.load(fh))
