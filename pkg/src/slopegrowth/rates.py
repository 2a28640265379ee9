"""Growth-rate estimators over slope spectra and audits of the rate profile.

Rates are least-squares slopes of ``log(count)`` against the annulus index
over a tail window.  ``NEG_INF`` (IEEE -inf) marks an empty window and is
propagated by every function here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .spectrum import SlopeSpectrum, slope_annulus_counts, slope_hull

NEG_INF = float("-inf")
HALF_PI = math.pi / 2
DEFAULT_EPS = (0.4, 0.2, 0.1, 0.05)
DEFAULT_GRID = 91
MIN_SAMPLES = 4

__all__ = [
    "NEG_INF",
    "DEFAULT_EPS",
    "DEFAULT_GRID",
    "MIN_SAMPLES",
    "LowDataError",
    "RateEstimate",
    "RateProfile",
    "ConditionReport",
    "AuditResult",
    "default_grid",
    "default_window",
    "estimate_rate",
    "delta_global",
    "delta_eps_theta",
    "delta_theta",
    "build_profile",
    "psi",
    "concavity_audit",
    "golden_section_max",
    "find_theta_star",
    "check_interior_condition",
    "check_cos_sin_bound",
    "regular_growth_check",
    "continuity_audit",
    "positivity_audit",
    "sandwich_audit",
]


@dataclass(frozen=True)
class RateEstimate:
    value: float
    stderr: float
    window: tuple[int, int]
    samples: int
    max_quotient: float
    eps: float | None = None
    curve: tuple = ()  # ((eps, value, stderr, samples), ...) for slope estimates
    low_data: bool = False

    @property
    def neg_inf(self) -> bool:
        return self.value == NEG_INF

    @property
    def finite(self) -> bool:
        return not self.low_data and math.isfinite(self.value)


class LowDataError(ValueError):
    """Too few nonzero annuli; ``estimate`` holds whatever could be computed."""

    def __init__(self, message: str, estimate: RateEstimate, curve: tuple = ()):
        super().__init__(message)
        self.estimate = estimate
        self.curve = curve


def default_grid(size: int = DEFAULT_GRID) -> np.ndarray:
    g = np.linspace(0.0, HALF_PI, size)
    g[-1] = HALF_PI
    return g


def default_window(s: SlopeSpectrum) -> tuple[int, int]:
    """Top half of the complete annuli."""
    hi = min(s.n_max, s.horizon)
    return (hi + 1) // 2, hi


def estimate_rate(counts: Sequence[int], window: tuple[int, int]) -> RateEstimate:
    """Regression slope of log(counts[n]) on n over the window.

    ``counts[0]`` is annulus n = 1; the window is inclusive and 1-based.
    """
    lo, hi = window
    if not 1 <= lo < hi <= len(counts):
        raise ValueError(f"window {window} not inside 1..{len(counts)}")
    c = np.asarray(counts[lo - 1:hi], dtype=float)
    n = np.arange(lo, hi + 1, dtype=float)
    mask = c > 0
    k = int(mask.sum())
    if k == 0:
        return RateEstimate(NEG_INF, 0.0, (lo, hi), 0, NEG_INF)
    y = np.log(c[mask])
    x = n[mask]
    mq = float(np.max(y / x))
    if k < 3:
        partial = (y[-1] - y[0]) / (x[-1] - x[0]) if k == 2 else math.nan
        est = RateEstimate(float(partial), math.inf, (lo, hi), k, mq, low_data=True)
        raise LowDataError(f"only {k} nonzero annuli in window {window}", est)
    fit = stats.linregress(x, y)
    return RateEstimate(float(fit.slope), float(fit.stderr), (lo, hi), k, mq)


def _window(s: SlopeSpectrum, window):
    if window is None:
        return default_window(s)
    if window[1] > s.horizon:
        raise ValueError(f"window {window} reaches past the completeness horizon {s.horizon}")
    return tuple(window)


def delta_global(s: SlopeSpectrum, window=None) -> RateEstimate:
    return estimate_rate(s.totals, _window(s, window))


def delta_eps_theta(s: SlopeSpectrum, eps: float, theta: float, window=None) -> RateEstimate:
    est = estimate_rate(slope_annulus_counts(s, eps, theta), _window(s, window))
    return replace(est, eps=eps)


def delta_theta(
    s: SlopeSpectrum,
    theta: float,
    eps_schedule: Sequence[float] = DEFAULT_EPS,
    window=None,
    min_samples: int = MIN_SAMPLES,
) -> RateEstimate:
    """Slope rate as the finest usable epsilon of a decreasing schedule.

    An empty window at the finest epsilon gives ``NEG_INF`` (smaller
    epsilons can only remove elements), unless theta lies strictly inside
    the range of slopes seen in the window: the growth indicator is concave,
    so its finite set is convex and such an empty window only means the
    epsilon is below lattice resolution.  Otherwise the finest epsilon with
    at least ``min_samples`` nonzero annuli wins.  The full epsilon curve is
    attached as ``curve``.
    """
    eps_schedule = tuple(eps_schedule)
    if not eps_schedule or any(e <= 0 for e in eps_schedule) or any(
        a <= b for a, b in zip(eps_schedule, eps_schedule[1:])
    ):
        raise ValueError(f"eps schedule must be positive and strictly decreasing: {eps_schedule}")
    win = _window(s, window)
    per_eps = []
    for eps in reversed(eps_schedule):  # finest first
        try:
            est = delta_eps_theta(s, eps, theta, win)
        except LowDataError as exc:
            est = replace(exc.estimate, eps=eps)
        per_eps.append(est)
    curve = tuple((e.eps, e.value, e.stderr, e.samples) for e in reversed(per_eps))
    if per_eps[0].neg_inf:
        hull = slope_hull(s, win)
        if hull is None or not hull[0] < theta < hull[1]:
            return replace(per_eps[0], curve=curve)
    for est in per_eps:
        if not est.low_data and est.samples >= min_samples:
            return replace(est, curve=curve)
    best = per_eps[-1]
    raise LowDataError(
        f"no epsilon in {eps_schedule} leaves {min_samples} nonzero annuli at theta={theta:.6g}",
        replace(best, curve=curve, low_data=True),
        curve,
    )


# ---------------------------------------------------------------- profile

@dataclass
class RateProfile:
    thetas: np.ndarray
    estimates: list[RateEstimate]
    eps_schedule: tuple[float, ...] = DEFAULT_EPS
    fingerprint: str = ""
    exact: Callable[[float], float] | None = None
    window: tuple[int, int] | None = None

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        if len(self.thetas) != len(self.estimates):
            raise ValueError("estimates must align with the grid")
        if np.any(np.diff(self.thetas) <= 0):
            raise ValueError("grid must be strictly increasing")

    @classmethod
    def from_function(cls, f: Callable[[float], float], grid=None, name: str = "analytic") -> "RateProfile":
        """Profile of a closed-form rate; :func:`psi` then evaluates ``f`` exactly."""
        grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
        ests = [RateEstimate(float(f(t)), 0.0, (0, 0), 0, math.nan) for t in grid]
        return cls(grid, ests, eps_schedule=(), fingerprint=name, exact=f)

    @classmethod
    def from_values(cls, grid, values, stderr=None, name: str = "values") -> "RateProfile":
        stderr = np.zeros(len(values)) if stderr is None else stderr
        ests = [RateEstimate(float(v), float(e), (0, 0), 0, math.nan) for v, e in zip(values, stderr)]
        return cls(np.asarray(grid, dtype=float), ests, eps_schedule=(), fingerprint=name)

    @property
    def values(self) -> np.ndarray:
        return np.array([math.nan if e.low_data else e.value for e in self.estimates])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([e.stderr for e in self.estimates])

    @property
    def finite_mask(self) -> np.ndarray:
        return np.array([e.finite for e in self.estimates], dtype=bool)

    def restricted(self) -> "RateProfile":
        """The finite points only (the profile's finite band)."""
        m = self.finite_mask
        return RateProfile(
            self.thetas[m], [e for e, k in zip(self.estimates, m) if k],
            self.eps_schedule, self.fingerprint, self.exact, self.window,
        )

    def value_at(self, theta: float) -> float:
        """Rate at theta: exact when analytic, else linear interpolation.

        Low-data points are skipped; any ``NEG_INF`` neighbour gives ``NEG_INF``.
        """
        if self.exact is not None:
            return float(self.exact(theta))
        keep = [i for i, e in enumerate(self.estimates) if not e.low_data]
        th = self.thetas[keep]
        vals = [self.estimates[i].value for i in keep]
        if not len(th) or theta < th[0] or theta > th[-1]:
            return math.nan
        j = int(np.searchsorted(th, theta))
        if th[j] == theta:
            return vals[j]
        a, b = vals[j - 1], vals[j]
        if a == NEG_INF or b == NEG_INF:
            return NEG_INF
        w = (theta - th[j - 1]) / (th[j] - th[j - 1])
        return (1 - w) * a + w * b

    def to_csv(self) -> str:
        lines = ["theta,delta,stderr,neg_inf_flag,eps_used,n_lo,n_hi"]
        for t, e in zip(self.thetas, self.estimates):
            val = "nan" if e.low_data else repr(e.value)
            eps = "" if e.eps is None else repr(e.eps)
            lines.append(
                f"{t!r},{val},{e.stderr!r},{int(e.neg_inf)},{eps},{e.window[0]},{e.window[1]}"
            )
        return "\n".join(lines) + "\n"


def build_profile(
    s: SlopeSpectrum,
    grid=None,
    eps_schedule: Sequence[float] = DEFAULT_EPS,
    window=None,
    min_samples: int = MIN_SAMPLES,
) -> RateProfile:
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or grid[-1] != HALF_PI:
        raise ValueError("profile grid must include both endpoints 0 and pi/2")
    win = _window(s, window)
    ests = []
    for theta in grid:
        try:
            ests.append(delta_theta(s, float(theta), eps_schedule, win, min_samples))
        except LowDataError as exc:
            ests.append(exc.estimate)
    return RateProfile(grid, ests, tuple(eps_schedule), s.fingerprint, window=win)


def psi(profile: RateProfile, x) -> float:
    """Homogeneous extension ||x|| * rate(theta(x)) on the positive quadrant."""
    x1, x2 = float(x[0]), float(x[1])
    if x1 < 0 or x2 < 0:
        raise ValueError("psi is defined on the closed positive quadrant")
    if x1 == 0 and x2 == 0:
        raise ValueError("psi is undefined at the origin")
    v = profile.value_at(math.atan2(x2, x1))
    if v == NEG_INF:
        return NEG_INF
    return math.hypot(x1, x2) * v


def _h(theta: float) -> tuple[float, float]:
    return (0.0, 1.0) if theta == HALF_PI else (math.cos(theta), math.sin(theta))


def concavity_audit(profile: RateProfile, slack: float = 0.0, ts=(0.25, 0.5, 0.75)) -> list[tuple]:
    """Triples (alpha, beta, t, psi(mix), chord) where psi dips below its chord by > slack."""
    fin = [(t, e.value) for t, e in zip(profile.thetas, profile.estimates) if e.finite]
    bad = []
    for i, (a, va) in enumerate(fin):
        x = _h(a)
        for b, vb in fin[i + 1:]:
            y = _h(b)
            for t in ts:
                z = (t * x[0] + (1 - t) * y[0], t * x[1] + (1 - t) * y[1])
                lhs = psi(profile, z)
                rhs = t * va + (1 - t) * vb
                if not lhs >= rhs - slack:
                    bad.append((float(a), float(b), t, lhs, rhs))
    return bad


PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Maximise a unimodal f on [a, b]; returns (x, f(x))."""
    x1 = b - PHI * (b - a)
    x2 = a + PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def find_theta_star(profile: RateProfile) -> tuple[float, float]:
    """Grid argmax (smallest theta on ties) refined by golden section between
    its finite neighbours; the refinement is kept only if strictly better."""
    fin = np.flatnonzero(profile.finite_mask)
    if not len(fin):
        raise ValueError("profile has no finite values")
    vals = profile.values[fin]
    k = int(np.argmax(vals))
    best_t, best_v = float(profile.thetas[fin[k]]), float(vals[k])
    lo = float(profile.thetas[fin[k - 1]]) if k > 0 else best_t
    hi = float(profile.thetas[fin[k + 1]]) if k + 1 < len(fin) else best_t
    if hi > lo:
        x, fx = golden_section_max(profile.value_at, lo, hi)
        if fx > best_v:
            best_t, best_v = x, fx
    return best_t, best_v


# ----------------------------------------------------------------- audits

@dataclass
class ConditionReport:
    thetas: np.ndarray
    ratio_top: np.ndarray  # delta_{pi/2} / delta_theta
    bound_top: np.ndarray  # 1 / sin(theta)
    ratio_bottom: np.ndarray  # delta_0 / delta_{pi/2 - beta}, beta = thetas
    bound_bottom: np.ndarray  # 1 / sin(beta)
    status_top: str
    status_bottom: str
    verdict: str
    witness_theta: float | None
    witness_beta: float | None
    tolerance: float
    undefined_boundary: str

    @property
    def max_gap_top(self) -> float:
        g = np.abs(self.ratio_top - self.bound_top)
        g = g[np.isfinite(g)]
        return float(g.max()) if len(g) else math.nan

    def to_text(self) -> str:
        lines = [
            f"verdict: {self.verdict}",
            f"tolerance: {self.tolerance!r}",
            f"undefined_boundary: {self.undefined_boundary}",
            f"top inequality (delta_pi/2 / delta_theta < 1/sin theta): {self.status_top}",
            f"bottom inequality (delta_0 / delta_(pi/2-beta) < 1/sin beta): {self.status_bottom}",
            f"witness_theta: {self.witness_theta!r}",
            f"witness_beta: {self.witness_beta!r}",
            "theta,ratio_top,bound_top,ratio_bottom,bound_bottom",
        ]
        for row in zip(self.thetas, self.ratio_top, self.bound_top, self.ratio_bottom, self.bound_bottom):
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "status_top": self.status_top,
            "status_bottom": self.status_bottom,
            "witness_theta": self.witness_theta,
            "witness_beta": self.witness_beta,
            "tolerance": self.tolerance,
            "undefined_boundary": self.undefined_boundary,
            "max_gap_top": self.max_gap_top,
        }


def _boundary(profile: RateProfile, theta: float, policy: str) -> float | None:
    v = profile.value_at(theta)
    if math.isfinite(v):
        return v
    if policy == "zero":
        return 0.0
    if policy == "neg_inf":
        return NEG_INF if v == NEG_INF else None
    return None  # skip


def _status(gaps: list[float], tol: float) -> tuple[str, int | None]:
    """gaps are bound - ratio; strict beats equal beats fails."""
    if not gaps:
        return "undefined", None
    for i, g in enumerate(gaps):
        if g > tol:
            return "strict", i
    if any(abs(g) <= tol for g in gaps):
        return "equal", None
    return "fails", None


def check_interior_condition(profile: RateProfile, tolerance: float = 1e-9, undefined_boundary: str = "skip") -> ConditionReport:
    """Evaluate both ratio inequalities over the interior grid points.

    ``undefined_boundary`` decides what a non-finite rate at slope 0 or pi/2
    means: ``skip`` drops that inequality, ``zero`` uses 0, ``neg_inf`` uses
    -inf (which satisfies it strictly).
    """
    if undefined_boundary not in ("skip", "zero", "neg_inf"):
        raise ValueError(f"unknown undefined_boundary policy {undefined_boundary!r}")
    d0 = _boundary(profile, 0.0, undefined_boundary)
    dpi = _boundary(profile, HALF_PI, undefined_boundary)
    th = np.array([t for t in profile.thetas if 0 < t < HALF_PI])
    rt, bt, rb, bb = (np.full(len(th), math.nan) for _ in range(4))
    gaps_top, idx_top, gaps_bot, idx_bot = [], [], [], []
    for i, t in enumerate(th):
        bt[i] = bb[i] = 1 / math.sin(t)
        dt = profile.value_at(t)
        if dpi is not None and math.isfinite(dt) and dt > 0:
            rt[i] = dpi / dt
            gaps_top.append(bt[i] - rt[i])
            idx_top.append(i)
        dc = profile.value_at(HALF_PI - t)
        if d0 is not None and math.isfinite(dc) and dc > 0:
            rb[i] = d0 / dc
            gaps_bot.append(bb[i] - rb[i])
            idx_bot.append(i)
    s_top, w_top = _status(gaps_top, tolerance)
    s_bot, w_bot = _status(gaps_bot, tolerance)
    if s_top == "strict" and s_bot == "strict":
        verdict = "interior-guaranteed"
    elif "equal" in (s_top, s_bot) and "fails" not in (s_top, s_bot) and "undefined" not in (s_top, s_bot):
        verdict = "boundary-sharp"
    else:
        verdict = "not-satisfied"
    return ConditionReport(
        th, rt, bt, rb, bb, s_top, s_bot, verdict,
        float(th[idx_top[w_top]]) if w_top is not None else None,
        float(th[idx_bot[w_bot]]) if w_bot is not None else None,
        tolerance, undefined_boundary,
    )


@dataclass
class AuditResult:
    name: str
    passed: bool
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "violations": [list(v) if isinstance(v, tuple) else v for v in self.violations],
            "details": self.details,
        }


def check_cos_sin_bound(profile: RateProfile, slack: float = 0.0, undefined_boundary: str = "skip") -> AuditResult:
    """rate(theta) >= rate(0) cos(theta) + rate(pi/2) sin(theta) - slack on finite points.

    Undefined boundary rates drop their term under ``skip``/``zero`` and make
    the bound vacuous under ``neg_inf``.
    """
    d0 = _boundary(profile, 0.0, undefined_boundary)
    dpi = _boundary(profile, HALF_PI, undefined_boundary)
    if NEG_INF in (d0, dpi):
        return AuditResult("cos_sin_bound", True, details={"slack": slack, "vacuous": True})
    d0 = d0 or 0.0
    dpi = dpi or 0.0
    worst_t, worst_m, bad = None, math.inf, []
    for t, e in zip(profile.thetas, profile.estimates):
        if not e.finite:
            continue
        c, s = _h(float(t))
        m = e.value - (d0 * c + dpi * s)
        if m < worst_m:
            worst_t, worst_m = float(t), m
        if m < -slack:
            bad.append((float(t), e.value, d0 * c + dpi * s))
    return AuditResult(
        "cos_sin_bound", not bad, bad,
        {"slack": slack, "worst_theta": worst_t, "worst_margin": worst_m, "delta_0": d0, "delta_pi_2": dpi},
    )


def regular_growth_check(s: SlopeSpectrum, interval: tuple[float, float], eps: float = 0.05, window=None, grid=None) -> AuditResult:
    """Nonzero slope-annulus counts in the top half of the window for every
    slope of the interval that lies on the grid (endpoints always included)."""
    a1, a2 = interval
    if not 0 <= a1 <= a2 <= HALF_PI:
        raise ValueError(f"interval {interval} not inside [0, pi/2]")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    lo, hi = _window(s, window)
    mid = (lo + hi + 1) // 2
    thetas = sorted({a1, a2, *(float(t) for t in grid if a1 < t < a2)})
    bad = []
    for t in thetas:
        c = slope_annulus_counts(s, eps, t)[mid - 1:hi]
        if not np.any(c > 0):
            bad.append(t)
    return AuditResult(
        "regular_growth", not bad, bad,
        {"interval": [a1, a2], "eps": eps, "annuli": [mid, hi], "checked": len(thetas)},
    )


def continuity_audit(profile: RateProfile, lipschitz: float) -> AuditResult:
    """Adjacent finite grid values differ by at most L * dtheta + 2 * (stderr sum)."""
    bad = []
    th, ests = profile.thetas, profile.estimates
    for i in range(len(th) - 1):
        e, f = ests[i], ests[i + 1]
        if not (e.finite and f.finite):
            continue
        bound = lipschitz * (th[i + 1] - th[i]) + 2 * (e.stderr + f.stderr)
        if abs(f.value - e.value) > bound:
            bad.append((float(th[i]), float(th[i + 1]), e.value, f.value, bound))
    return AuditResult("continuity", not bad, bad, {"lipschitz": lipschitz})


def positivity_audit(profile: RateProfile, band: tuple[float, float]) -> AuditResult:
    """Finite rates on the open band must be positive wherever stderr < |value|.

    ``NEG_INF`` inside the band is a violation; low-data and noise-dominated
    points are listed as unresolved.
    """
    lo, hi = band
    bad, unresolved = [], []
    for t, e in zip(profile.thetas, profile.estimates):
        if not lo < t < hi:
            continue
        if e.low_data:
            unresolved.append(float(t))
        elif e.neg_inf:
            bad.append((float(t), e.value))
        elif e.stderr >= abs(e.value):
            unresolved.append(float(t))
        elif e.value <= 0:
            bad.append((float(t), e.value))
    return AuditResult("positivity", not bad, bad, {"band": [lo, hi], "unresolved": unresolved})


def sandwich_audit(profile: RateProfile, global_rate: RateEstimate, tolerance: float = 0.0) -> AuditResult:
    """rate(theta) <= global rate at every finite grid point, up to two
    standard errors on each side plus ``tolerance``."""
    cap = global_rate.value + 2 * global_rate.stderr + tolerance
    bad = [
        (float(t), e.value)
        for t, e in zip(profile.thetas, profile.estimates)
        if e.finite and e.value - 2 * e.stderr > cap
    ]
    return AuditResult("sandwich", not bad, bad, {"tolerance": tolerance, "global": global_rate.value})
