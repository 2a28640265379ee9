"""Annulus-by-slope count tables and their on-disk cache format."""
from __future__ import annotations

import ast
import hashlib
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .action import Displacement, ElementRecord

__all__ = [
    "Binning",
    "SlopeSpectrum",
    "FormatError",
    "build_spectrum",
    "spectrum_from_histogram",
    "annulus_count",
    "slope_annulus_count",
    "slope_member",
    "slope_hull",
    "free_sphere_size",
    "save_spectrum",
    "load_spectrum",
    "MAGIC",
]

MAGIC = "slopegrowth-spectrum v1"
HALF_PI = math.pi / 2
_INT64_MAX = np.iinfo(np.int64).max


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class Binning:
    """``angular``: B equal bins on [0, pi/2].  ``paper-tan``: a sorted slope
    grid; the epsilon condition is then ``|d2/d1 - tan(theta)| <= eps``."""

    mode: str = "angular"
    bins: int = 90
    grid: tuple[float, ...] = ()

    def __post_init__(self):
        if self.mode == "angular":
            if self.bins < 2:
                raise ValueError("angular binning needs at least 2 bins")
        elif self.mode == "paper-tan":
            object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
            g = self.grid
            if not g or any(not 0 <= x <= HALF_PI for x in g) or list(g) != sorted(g):
                raise ValueError("paper-tan grid must be sorted values in [0, pi/2]")
        else:
            raise ValueError(f"unknown binning mode {self.mode!r}")

    @property
    def size(self) -> int:
        return self.bins if self.mode == "angular" else len(self.grid)

    def index(self, d: Displacement) -> int:
        if self.mode == "angular":
            q = d.theta / (HALF_PI / self.bins)
            # points on a boundary go to the lower bin
            return min(max(math.ceil(q - 1e-9) - 1, 0), self.bins - 1)
        if d.d1 == 0:
            return len(self.grid) - 1
        tan = d.d2 / d.d1
        dist = [abs(tan - math.tan(t)) if t < HALF_PI else math.inf for t in self.grid]
        return int(np.argmin(dist))


def slope_member(d: Displacement, eps: float, theta: float, mode: str = "angular") -> bool:
    """Whether an element with displacement ``d`` is eps-close to slope theta."""
    if mode == "angular":
        return abs(d.theta - theta) <= eps
    if theta >= HALF_PI:
        # tan(pi/2) is infinite: use |d1/d2| <= eps instead
        return d.d1 <= eps * d.d2
    if d.d1 == 0:
        return False
    return abs(d.d2 / d.d1 - math.tan(theta)) <= eps


@dataclass
class SlopeSpectrum:
    fingerprint: str
    binning: Binning
    n_max: int
    counts: np.ndarray  # shape (n_max, bins); row n-1 is annulus n
    displacements: dict[tuple[int, int], int]
    meta: dict = field(default_factory=dict)

    @property
    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def horizon(self) -> int:
        return int(self.meta.get("horizon", self.n_max))

    def annuli(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SlopeSpectrum):
            return NotImplemented
        return (
            self.fingerprint == other.fingerprint
            and self.binning == other.binning
            and self.n_max == other.n_max
            and np.array_equal(self.counts, other.counts)
            and self.displacements == other.displacements
            and self.meta == other.meta
        )


def spectrum_from_histogram(
    hist: Mapping[tuple[int, int], int],
    binning: Binning,
    n_max: int,
    fingerprint: str = "",
    horizon: int | None = None,
    allow_beyond_horizon: bool = False,
    meta: dict | None = None,
) -> SlopeSpectrum:
    """Aggregate a ``{(d1, d2): count}`` histogram into annulus/slope counts.

    Elements outside annuli 1..n_max are dropped; the identity is skipped and
    tallied in ``meta['identity_skipped']``.
    """
    if horizon is not None and n_max > horizon and not allow_beyond_horizon:
        raise ValueError(
            f"n_max={n_max} exceeds the completeness horizon {horizon}; pass allow_beyond_horizon"
        )
    counts = np.zeros((n_max, binning.size), np.int64)
    kept: dict[tuple[int, int], int] = {}
    skipped = 0
    for (d1, d2), c in sorted(hist.items()):
        if c < 0 or c > _INT64_MAX:
            raise OverflowError(f"count {c} does not fit in int64")
        if d1 == 0 and d2 == 0:
            skipped += c
            continue
        d = Displacement(d1, d2)
        n = d.annulus
        if n > n_max:
            continue
        b = binning.index(d)
        if counts[n - 1, b] > _INT64_MAX - c:
            raise OverflowError(f"int64 overflow in annulus {n}, bin {b}")
        counts[n - 1, b] += c
        kept[(d1, d2)] = kept.get((d1, d2), 0) + c
    m = dict(meta or {})
    m.setdefault("horizon", n_max if horizon is None else horizon)
    m["identity_skipped"] = skipped
    m["beyond_horizon"] = n_max > m["horizon"]
    m.setdefault("built", time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
    return SlopeSpectrum(fingerprint, binning, n_max, counts, kept, m)


def build_spectrum(
    records: Iterable[ElementRecord],
    binning: Binning,
    n_max: int,
    **kwargs,
) -> SlopeSpectrum:
    """Aggregate a record stream; see :func:`spectrum_from_histogram`."""
    hist = Counter((r.disp.d1, r.disp.d2) for r in records)
    return spectrum_from_histogram(hist, binning, n_max, **kwargs)


def _check_n(s: SlopeSpectrum, n: int) -> None:
    if not 1 <= n <= s.n_max:
        raise IndexError(f"annulus {n} outside 1..{s.n_max}")


def annulus_count(s: SlopeSpectrum, n: int) -> int:
    _check_n(s, n)
    return int(s.counts[n - 1].sum())


def slope_annulus_counts(s: SlopeSpectrum, eps: float, theta: float) -> np.ndarray:
    """Counts of eps-close-to-theta elements for every annulus 1..n_max."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not 0 <= theta <= HALF_PI:
        raise ValueError(f"theta={theta} outside [0, pi/2]")
    out = np.zeros(s.n_max, np.int64)
    for (d1, d2), c in s.displacements.items():
        d = Displacement(d1, d2)
        if slope_member(d, eps, theta, s.binning.mode):
            out[d.annulus - 1] += c
    return out


def slope_hull(s: SlopeSpectrum, window: tuple[int, int]) -> tuple[float, float] | None:
    """Smallest and largest slope among elements in annuli lo..hi, or None."""
    lo, hi = window
    th = [Displacement(d1, d2).theta for (d1, d2) in s.displacements
          if lo <= Displacement(d1, d2).annulus <= hi]
    return (min(th), max(th)) if th else None


def slope_annulus_count(s: SlopeSpectrum, eps: float, theta: float, n: int) -> int:
    _check_n(s, n)
    return int(slope_annulus_counts(s, eps, theta)[n - 1])


def free_sphere_size(m: int, k: int) -> int:
    """Number of reduced words of length k in F_m."""
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    return 1 if k == 0 else 2 * m * (2 * m - 1) ** (k - 1)


# ------------------------------------------------------------------ cache

def _body(s: SlopeSpectrum) -> str:
    b = s.binning
    lines = [f"fingerprint={s.fingerprint}", f"binning={b.mode}"]
    if b.mode == "angular":
        lines.append(f"bins={b.bins}")
    else:
        lines.append("grid=" + ",".join(repr(x) for x in b.grid))
    lines.append(f"n_max={s.n_max}")
    for k in sorted(s.meta):
        lines.append(f"meta.{k}={s.meta[k]!r}")
    lines.append("[counts]")
    lines.append("n,bin_index,count")
    for (i, j) in zip(*np.nonzero(s.counts)):
        lines.append(f"{i + 1},{j},{s.counts[i, j]}")
    lines.append("[displacements]")
    lines.append("d1,d2,count")
    for (d1, d2), c in sorted(s.displacements.items()):
        lines.append(f"{d1},{d2},{c}")
    return "\n".join(lines) + "\n"


def save_spectrum(s: SlopeSpectrum, path) -> None:
    body = _body(s)
    digest = hashlib.sha256(body.encode()).hexdigest()
    with open(path, "w", newline="\n") as fh:
        fh.write(MAGIC + "\n" + body + f"end sha256={digest}\n")


def load_spectrum(path, expect_fingerprint: str | None = None) -> SlopeSpectrum:
    with open(path, newline="\n") as fh:
        text = fh.read()
    if not text.startswith(MAGIC + "\n"):
        raise FormatError(f"{path}: missing header {MAGIC!r}")
    body, sep, tail = text[len(MAGIC) + 1:].rpartition("end sha256=")
    if not sep or not tail.endswith("\n"):
        raise FormatError(f"{path}: truncated spectrum file")
    if hashlib.sha256(body.encode()).hexdigest() != tail.strip():
        raise FormatError(f"{path}: checksum mismatch")
    try:
        lines = body.splitlines()
        head = {}
        i = 0
        while lines[i] != "[counts]":
            k, _, v = lines[i].partition("=")
            head[k] = v
            i += 1
        i += 2
        rows = []
        while lines[i] != "[displacements]":
            rows.append(tuple(int(x) for x in lines[i].split(",")))
            i += 1
        disp = {}
        for line in lines[i + 2:]:
            d1, d2, c = (int(x) for x in line.split(","))
            disp[(d1, d2)] = c
        if head["binning"] == "angular":
            binning = Binning("angular", bins=int(head["bins"]))
        else:
            binning = Binning("paper-tan", grid=tuple(float(x) for x in head["grid"].split(",")))
        n_max = int(head["n_max"])
        counts = np.zeros((n_max, binning.size), np.int64)
        for n, b, c in rows:
            counts[n - 1, b] = c
        meta = {k[5:]: ast.literal_eval(v) for k, v in head.items() if k.startswith("meta.")}
    except (KeyError, IndexError, ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: malformed spectrum file ({exc})") from exc
    fp = head["fingerprint"]
    if expect_fingerprint is not None and fp != expect_fingerprint:
        raise FormatError(f"{path}: fingerprint {fp} does not match {expect_fingerprint}")
    return SlopeSpectrum(fp, binning, n_max, counts, disp, meta)
