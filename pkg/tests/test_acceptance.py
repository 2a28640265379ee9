"""Acceptance criteria, one test per criterion.

Each test records its sub-checks and prints a single PASS/FAIL line with
the measured numbers; the lines are repeated in the pytest summary.  Run
``python tests/test_acceptance.py`` to execute just this module.
"""
import math
import random
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import bfs_sphere_sizes
from slopegrowth import action, rates
from slopegrowth.calculus import (
    SlopeVector, mixing_identity_residual, second_coordinate_identity_residual, tau, tau_prime,
)
from slopegrowth.report import CACHE_ENV, LIPSCHITZ, emit_report, run_preset
from slopegrowth.spectrum import free_sphere_size, load_spectrum, save_spectrum

HALF_PI = math.pi / 2
LOG3 = math.log(3)
ATAN2 = math.atan(2)


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.checks = []

    def check(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))

    def finish(self):
        ok = all(c[1] for c in self.checks)
        parts = [f"{label}={'ok' if good else 'FAIL'}" + (f" ({detail})" if detail else "")
                 for label, good, detail in self.checks]
        line = f"criterion {self.number} {'PASS' if ok else 'FAIL'}: {self.title} | " + "; ".join(parts)
        ACCEPTANCE_LINES.append(line)
        print(line)
        failed = [c for c in self.checks if not c[1]]
        assert not failed, "; ".join(f"{label} {detail}" for label, _, detail in failed)


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv(CACHE_ENV, raising=False)


@pytest.fixture(scope="module")
def ex51_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("ex51")
    t0 = time.perf_counter()
    rep = run_preset("example51", N=4, lmax=10, out=str(out))
    return rep, out, time.perf_counter() - t0


def _profile_from_cache(out, rep):
    s = load_spectrum(out / "spectrum.cache")
    cfg = rep.config
    return s, rates.build_profile(s, rates.default_grid(cfg["grid"]), cfg["eps_schedule"], cfg["window"])


def test_criterion_1_free_group_spheres():
    c = Criterion(1, "free-group sphere sizes, BFS against closed form")
    t0 = time.perf_counter()
    f2 = bfs_sphere_sizes(2, 10)
    f4 = bfs_sphere_sizes(4, 6)
    dt = time.perf_counter() - t0
    c.check("F2 k<=10", f2 == [free_sphere_size(2, k) for k in range(11)], f"max k sphere {f2[-1]}")
    c.check("F4 k<=6", f4 == [free_sphere_size(4, k) for k in range(7)], f"max k sphere {f4[-1]}")
    c.check("runtime<10s", dt < 10, f"{dt:.2f}s")
    c.finish()


def test_criterion_2_example31(tmp_path):
    c = Criterion(2, "example31 single slope at L_max=12")
    t0 = time.perf_counter()
    rep = run_preset("example31", lmax=12, out=str(tmp_path))
    dt = time.perf_counter() - t0
    rows = rep.profile
    k = min(range(len(rows)), key=lambda i: abs(rows[i]["theta"] - math.pi / 4))
    d = rows[k]["delta"]
    c.check("delta(pi/4)", abs(d - LOG3 / math.sqrt(2)) <= 0.08, f"{d:.4f} vs {LOG3 / math.sqrt(2):.4f} +-0.08")
    others = [r for i, r in enumerate(rows) if i != k]
    c.check("others -inf", all(r["delta"] == rates.NEG_INF for r in others),
            f"{sum(r['delta'] == rates.NEG_INF for r in others)}/{len(others)}")
    s = load_spectrum(tmp_path / "spectrum.cache")
    eps = min(rep.config["eps_schedule"])
    full = rates.regular_growth_check(s, (0, HALF_PI), eps)
    point = rates.regular_growth_check(s, (math.pi / 4, math.pi / 4), eps)
    c.check("regular growth [0,pi/2] fails", not full.passed, f"{len(full.violations)} empty slopes")
    c.check("regular growth {pi/4} passes", point.passed)
    c.check("runtime<30s", dt < 30, f"{dt:.2f}s")
    c.finish()


def test_criterion_3_example41(tmp_path):
    c = Criterion(3, "example41 slope support at L_max=11")
    t0 = time.perf_counter()
    rep = run_preset("example41", lmax=11, out=str(tmp_path))
    rows = rep.profile
    fin = [r for r in rows if math.isfinite(r["delta"])]
    eps_eff = max(r["eps_used"] for r in fin)
    th = [r["theta"] for r in fin]
    c.check("contained", min(th) >= math.pi / 4 - eps_eff and max(th) <= ATAN2 + eps_eff,
            f"finite on [{min(th):.4f}, {max(th):.4f}], eps_eff={eps_eff}")
    inner = [r for r in rows if math.pi / 4 + eps_eff <= r["theta"] <= ATAN2 - eps_eff]
    c.check("covers", bool(inner) and all(math.isfinite(r["delta"]) for r in inner), f"{len(inner)} inner points")
    tans = {}
    for d1, d2, k in _depth_tans(11):
        lo, hi = tans.get(k, (math.inf, -math.inf))
        tans[k] = (min(lo, d2 / d1), max(hi, d2 / d1))
    c.check("tan 1 and 2 at every depth", all(v == (1.0, 2.0) for v in tans.values()) and len(tans) == 11)
    pos = next(a for a in rep.audits if a["name"] == "positivity")
    c.check("positivity", pos["passed"], f"{len(pos['violations'])} violations, {len(pos['details']['unresolved'])} unresolved")
    dt = time.perf_counter() - t0
    c.check("runtime<60s", dt < 60, f"{dt:.2f}s")
    c.finish()


def _depth_tans(L):
    spec = action.example41()
    for r in action.enumerate_elements(spec, L):
        yield r.disp.d1, r.disp.d2, len(r.word)


def test_criterion_4_example51_endpoint(ex51_run):
    rep, _, dt = ex51_run
    c = Criterion(4, "example51 (N=4, L_max=10) endpoint rate and maximiser")
    top = rep.profile[-1]
    assert top["theta"] == HALF_PI
    c.check("delta(pi/2) in log3+-0.15", abs(top["delta"] - LOG3) <= 0.15,
            f"{top['delta']:.4f} vs {LOG3:.4f}")
    c.check("theta_star>=1.45", rep.theta_star >= 1.45, f"{rep.theta_star:.4f}")
    c.check("runtime<5min", dt < 300, f"{dt:.1f}s, 1 worker")
    c.finish()


def test_criterion_5_sharpness():
    c = Criterion(5, "interior-maximiser condition verdicts")
    sharp = rates.check_interior_condition(rates.RateProfile.from_function(lambda t: LOG3 * math.sin(t)))
    c.check("log3 sin -> boundary-sharp", sharp.verdict == "boundary-sharp", sharp.verdict)
    c.check("max gap<1e-12", sharp.max_gap_top < 1e-12, f"{sharp.max_gap_top:.2e}")
    const = rates.check_interior_condition(rates.RateProfile.from_function(lambda t: 1.0))
    c.check("constant -> interior-guaranteed", const.verdict == "interior-guaranteed", const.verdict)
    c.finish()


def test_criterion_6_calculus():
    c = Criterion(6, "identity and calculus suite")
    t0 = time.perf_counter()
    rng = random.Random(2024)
    worst = 0.0
    for _ in range(1000):
        x = SlopeVector(rng.uniform(0, 10), rng.uniform(0, 10))
        y = SlopeVector(rng.uniform(0, 10), rng.uniform(0, 10))
        worst = max(worst, abs(second_coordinate_identity_residual(x, y, rng.random())))
    c.check("second-coordinate identity", worst < 1e-12, f"max {worst:.2e}")
    res = [mixing_identity_residual(float(t)) for t in rates.default_grid()]
    c.check("boundary mixing identity", max(res) < 1e-12,
            f"max {max(res):.3g} at theta={float(rates.default_grid()[int(np.argmax(res))]):.4f}")
    fd_err, min_d = 0.0, math.inf
    h = 1e-6
    for _ in range(50):
        beta = rng.uniform(0, HALF_PI - 0.05)
        theta = rng.uniform(beta + 0.01, HALF_PI)
        t = rng.uniform(h, 1 - h)
        d = tau_prime(t, beta, theta)
        fd = (tau(t + h, beta, theta) - tau(t - h, beta, theta)) / (2 * h)
        fd_err, min_d = max(fd_err, abs(d - fd)), min(min_d, d)
    c.check("tau' > 0", min_d > 0, f"min {min_d:.3g}")
    c.check("tau' vs finite differences", fd_err < 1e-6, f"max {fd_err:.2e}")
    ends = all(tau(0, b, t) == b and tau(1, b, t) == t for b, t in ((0.3, 1.2), (0.0, HALF_PI), (0.1, 0.2)))
    c.check("tau endpoints exact", ends)
    dt = time.perf_counter() - t0
    c.check("runtime<1s", dt < 1, f"{dt:.3f}s")
    c.finish()


def test_criterion_7_concavity_continuity(ex51_run, tmp_path):
    c = Criterion(7, "concavity and continuity audits")
    for name, f in (("log3 sin", lambda t: LOG3 * math.sin(t)), ("cos+sin", lambda t: math.cos(t) + math.sin(t))):
        bad = rates.concavity_audit(rates.RateProfile.from_function(f), 1e-9)
        c.check(f"concavity {name}", not bad, f"{len(bad)} violations")
    rep51, out51, _ = ex51_run
    _, p51 = _profile_from_cache(out51, rep51)
    bad = rates.concavity_audit(p51.restricted(), 0.1)
    worst = max((b[4] - b[3] for b in bad), default=0.0)
    c.check("concavity example51 slack 0.1", not bad, f"{len(bad)} violations, worst dip {worst:.3f}")
    rep41 = run_preset("example41", lmax=11, out=str(tmp_path))
    _, p41 = _profile_from_cache(tmp_path, rep41)
    for name, prof in (("example41", p41), ("example51", p51)):
        res = rates.continuity_audit(prof, LIPSCHITZ[name])
        detail = f"L={LIPSCHITZ[name]}, {len(res.violations)} violations"
        if res.violations:
            v = max(res.violations, key=lambda r: abs(r[3] - r[2]) - r[4])
            detail += f", worst jump {abs(v[3] - v[2]):.3f} > {v[4]:.3f} at theta={v[0]:.4f}"
        c.check(f"continuity {name}", res.passed, detail)
    c.finish()


def test_criterion_8_determinism(tmp_path):
    c = Criterion(8, "determinism and persistence")
    for name in ("example31", "example41"):
        out = tmp_path / name
        emit_report(run_preset(name, out=str(out)), "csv")
        first = (out / "profile.csv").read_bytes()
        emit_report(run_preset(name, out=str(out)), "csv")
        c.check(f"{name} rerun byte-identical", (out / "profile.csv").read_bytes() == first)
        s = load_spectrum(out / "spectrum.cache")
        save_spectrum(s, tmp_path / f"{name}.copy")
        c.check(f"{name} save/load", load_spectrum(tmp_path / f"{name}.copy") == s)
    c.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
