"""Subgroups of F_k x F_m given by generator pairs, acting on the product of
the two Cayley trees with the l2 product metric.
"""
from __future__ import annotations

import configparser
import hashlib
import logging
import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .words import Alphabet, GeneratorMap, Letter, ReducedWord, apply_map, parse_word

log = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "ResourceError",
    "DomainError",
    "ProductGroupSpec",
    "Displacement",
    "ElementRecord",
    "displacement",
    "enumerate_elements",
    "completeness_horizon",
    "displacement_histogram",
    "example31",
    "example41",
    "example51",
    "lattice",
    "preset",
    "PRESETS",
    "load_spec",
    "parse_spec",
]


class ConfigError(ValueError):
    pass


class ResourceError(RuntimeError):
    def __init__(self, message: str, depth: int):
        super().__init__(message)
        self.depth = depth


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ProductGroupSpec:
    first: Alphabet
    second: Alphabet
    abstract: Alphabet
    h1: GeneratorMap
    h2: GeneratorMap
    injective: bool = False
    lam: float | None = None
    name: str = "custom"

    def __post_init__(self):
        for h, tgt in ((self.h1, self.first), (self.h2, self.second)):
            if h.source != self.abstract or h.target != tgt:
                raise ConfigError("generator maps must go from the abstract alphabet to each factor")
        if self.lam is not None and self.lam <= 0:
            raise ConfigError(f"completeness factor must be positive, got {self.lam}")

    @classmethod
    def from_pairs(
        cls,
        first: Alphabet,
        second: Alphabet,
        pairs: dict[str, tuple[str, str]],
        injective: bool = False,
        lam: float | None = None,
        name: str = "custom",
    ) -> "ProductGroupSpec":
        """Build from ``{generator: (first-factor literal, second-factor literal)}``."""
        abstract = Alphabet("G", tuple(pairs))
        img1 = tuple(parse_word(a, first) for a, _ in pairs.values())
        img2 = tuple(parse_word(b, second) for _, b in pairs.values())
        return cls(
            first, second, abstract,
            GeneratorMap(abstract, first, img1),
            GeneratorMap(abstract, second, img2),
            injective=injective, lam=lam, name=name,
        )

    @property
    def rank(self) -> int:
        return self.abstract.rank

    def canonical(self) -> str:
        lines = [
            f"first={self.first.name}:{','.join(self.first.labels)}",
            f"second={self.second.name}:{','.join(self.second.labels)}",
        ]
        for g, u, v in zip(self.abstract.labels, self.h1.images, self.h2.images):
            lines.append(f"{g}={u.to_literal()}|{v.to_literal()}")
        lines.append(f"injective={str(self.injective).lower()}")
        lines.append(f"lambda={self.lam!r}")
        return "\n".join(lines)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def word(self, text: str) -> ReducedWord:
        return parse_word(text, self.abstract)


@dataclass(frozen=True)
class Displacement:
    d1: int
    d2: int

    @property
    def r2(self) -> int:
        return self.d1 * self.d1 + self.d2 * self.d2

    @property
    def r(self) -> float:
        return math.sqrt(self.r2)

    @property
    def annulus(self) -> int:
        """n with n - 1 <= r < n."""
        return math.isqrt(self.r2) + 1

    @property
    def theta(self) -> float:
        if self.d1 == 0 and self.d2 == 0:
            raise DomainError("slope is undefined for the identity")
        if self.d1 == 0:
            return math.pi / 2
        if self.d2 == 0:
            return 0.0
        return math.atan2(self.d2, self.d1)

    @property
    def tan(self) -> float:
        if self.d1 == 0:
            return math.inf if self.d2 else math.nan
        return self.d2 / self.d1


@dataclass(frozen=True)
class ElementRecord:
    word: ReducedWord
    image: tuple[ReducedWord, ReducedWord]
    disp: Displacement


def displacement(spec: ProductGroupSpec, w: ReducedWord) -> Displacement:
    return Displacement(len(apply_map(spec.h1, w)), len(apply_map(spec.h2, w)))


def completeness_horizon(spec: ProductGroupSpec, L_max: int) -> int:
    """floor(lambda * L_max): all elements with r below it have abstract length <= L_max."""
    if spec.lam is None or spec.lam <= 0:
        raise ConfigError(f"spec {spec.name!r} has no positive completeness factor")
    # guard against lam * L landing a hair below an integer
    return int(math.floor(spec.lam * L_max + 1e-9))


def _walk(spec: ProductGroupSpec, L: int, exact_depth: int | None = None) -> Iterator[tuple[tuple[Letter, ...], tuple, tuple]]:
    """Depth-first walk over reduced abstract words with incremental image stacks.

    Yields ``(word, image1, image2)`` as tuples of letters in preorder; with
    ``exact_depth`` only words of that length are yielded.
    """
    letters = spec.abstract.signed_letters()
    imgs = [(spec.h1.image_letters(x), spec.h2.image_letters(x)) for x in letters]
    s1: list[Letter] = []
    s2: list[Letter] = []
    word: list[Letter] = []
    undo: list[tuple[int, tuple, int, tuple]] = []

    def push(stack, img):
        popped = []
        c = 0
        while c < len(img) and stack and stack[-1] == (img[c][0], -img[c][1]):
            popped.append(stack.pop())
            c += 1
        stack.extend(img[c:])
        return len(img) - c, popped

    def pop(stack, pushed, popped):
        del stack[len(stack) - pushed:]
        stack.extend(reversed(popped))

    cursors = [0]
    while cursors:
        depth = len(word)
        k = cursors[-1]
        if depth >= L or k >= len(letters):
            cursors.pop()
            if word:
                p1, q1, p2, q2 = undo.pop()
                pop(s2, p2, q2)
                pop(s1, p1, q1)
                word.pop()
            continue
        cursors[-1] = k + 1
        x = letters[k]
        if word and word[-1] == (x[0], -x[1]):
            continue
        p1, q1 = push(s1, imgs[k][0])
        p2, q2 = push(s2, imgs[k][1])
        undo.append((p1, q1, p2, q2))
        word.append(x)
        if exact_depth is None or len(word) == exact_depth:
            yield tuple(word), tuple(s1), tuple(s2)
        cursors.append(0)


def _record(spec: ProductGroupSpec, word, i1, i2) -> ElementRecord:
    return ElementRecord(
        ReducedWord(spec.abstract, word),
        (ReducedWord(spec.first, i1), ReducedWord(spec.second, i2)),
        Displacement(len(i1), len(i2)),
    )


def enumerate_elements(
    spec: ProductGroupSpec, L_max: int, dedup: bool = False, max_records: int = 5_000_000
) -> Iterator[ElementRecord]:
    """Stream one record per group element reachable within abstract length L_max.

    With ``dedup=False`` (certified-injective specs only) every reduced
    abstract word is its own element.  With ``dedup=True`` elements are keyed
    by their image pair and the shortest, then lexicographically first, word
    is kept; the identity is never emitted.
    """
    if not dedup:
        if not spec.injective:
            raise ConfigError(f"spec {spec.name!r} is not certified injective; use dedup")
        for word, i1, i2 in _walk(spec, L_max):
            yield _record(spec, word, i1, i2)
        return
    seen: set[tuple] = {((), ())}
    for depth in range(1, L_max + 1):
        # iterative deepening: preorder at fixed depth is lexicographic order
        for word, i1, i2 in _walk(spec, depth, exact_depth=depth):
            key = (i1, i2)
            if key in seen:
                continue
            if len(seen) > max_records:
                raise ResourceError(
                    f"dedup set exceeded {max_records} elements at depth {depth}", depth
                )
            seen.add(key)
            yield _record(spec, word, i1, i2)


def _codes(h: GeneratorMap) -> list[tuple[Letter, ...]]:
    return [h.image_letters(x) for x in h.source.signed_letters()]


def _hist_job(args):
    img1, len1, img2, len2, L, shards = args
    return _kernels.displacement_histogram(img1, len1, img2, len2, L, shards)


def displacement_histogram(
    spec: ProductGroupSpec, L_max: int, dedup: bool = False, jobs: int = 1
) -> Counter:
    """Counter ``{(d1, d2): count}`` over non-identity elements within L_max.

    Without dedup this runs the compiled walk, sharded by first letter over
    ``jobs`` processes; with dedup it aggregates :func:`enumerate_elements`.
    """
    if dedup:
        return Counter((r.disp.d1, r.disp.d2) for r in enumerate_elements(spec, L_max, dedup=True))
    if not spec.injective:
        raise ConfigError(f"spec {spec.name!r} is not certified injective; use dedup")
    img1, len1 = _kernels.encode_images(_codes(spec.h1))
    img2, len2 = _kernels.encode_images(_codes(spec.h2))
    n = img1.shape[0]
    if jobs <= 1:
        hist = _kernels.displacement_histogram(img1, len1, img2, len2, L_max)
    else:
        parts = [np.arange(k, n, jobs) for k in range(min(jobs, n))]
        with ProcessPoolExecutor(len(parts)) as ex:
            hist = sum(ex.map(_hist_job, [(img1, len1, img2, len2, L_max, p) for p in parts]))
    out = Counter()
    for d1, d2 in zip(*np.nonzero(hist)):
        out[(int(d1), int(d2))] = int(hist[d1, d2])
    return out


# ---------------------------------------------------------------- presets

def example31() -> ProductGroupSpec:
    """Diagonal F_2 in F_2 x F_2: every element has slope pi/4."""
    return ProductGroupSpec.from_pairs(
        Alphabet.standard("a", 2), Alphabet.standard("b", 2),
        {"s1": ("a1", "b1"), "s2": ("a2", "b2")},
        injective=True, lam=math.sqrt(2), name="example31",
    )


def example41() -> ProductGroupSpec:
    """x = (a1, b1), y = (a2, b2^2); slopes fill [pi/4, arctan 2]."""
    return ProductGroupSpec.from_pairs(
        Alphabet.standard("a", 2), Alphabet.standard("b", 2),
        {"x": ("a1", "b1"), "y": ("a2", "b2 b2")},
        injective=True, lam=math.sqrt(2), name="example41",
    )


def example51(N: int = 4) -> ProductGroupSpec:
    """g1 = (a1, b1), g2 = (a2, b2), g_i = (1, b_i) for 3 <= i <= N in F_2 x F_N."""
    if N < 3:
        raise ConfigError(f"example51 needs N >= 3, got {N}")
    pairs = {"g1": ("a1", "b1"), "g2": ("a2", "b2")}
    pairs.update({f"g{i}": ("", f"b{i}") for i in range(3, N + 1)})
    # second projection sends the basis to a basis: d2 equals abstract length
    return ProductGroupSpec.from_pairs(
        Alphabet.standard("a", 2), Alphabet.standard("b", N), pairs,
        injective=True, lam=1.0, name=f"example51-N{N}",
    )


def lattice() -> ProductGroupSpec:
    """Z^2 = <(a1, 1), (1, b1)>; the abstract F_2 is not injective here."""
    return ProductGroupSpec.from_pairs(
        Alphabet.standard("a", 1), Alphabet.standard("b", 1),
        {"s1": ("a1", ""), "s2": ("", "b1")},
        injective=False, lam=1.0, name="lattice",
    )


PRESETS = ("example31", "example41", "example51")


def preset(name: str, N: int = 4) -> ProductGroupSpec:
    if name == "example31":
        return example31()
    if name == "example41":
        return example41()
    if name == "example51":
        return example51(N)
    raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")


# -------------------------------------------------------------- spec files

def parse_spec(text: str, name: str = "custom") -> ProductGroupSpec:
    """Parse an INI-style group spec::

        [factors]
        first = a 2
        second = b 3

        [generators]
        x = a1 | b1
        y = a2 | b2 b2

        [options]
        injective = true
        lambda = 1.0
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
        alph = []
        for key in ("first", "second"):
            prefix, rank = cp["factors"][key].split()
            alph.append(Alphabet.standard(prefix, int(rank)))
        pairs = {}
        for g, value in cp["generators"].items():
            if value.count("|") != 1:
                raise ConfigError(f"generator {g!r}: expected '<first> | <second>'")
            u, v = value.split("|")
            pairs[g] = (u.strip(), v.strip())
        opts = cp["options"] if cp.has_section("options") else {}
        injective = str(opts.get("injective", "false")).strip().lower() == "true"
        lam = float(opts["lambda"]) if "lambda" in opts else None
    except (KeyError, configparser.Error) as exc:
        raise ConfigError(f"malformed spec file: {exc}") from exc
    if not pairs:
        raise ConfigError("spec declares no generators")
    if lam is None:
        warnings.warn(
            "no lambda given; assuming 1.0 - annulus counts beyond floor(L_max) may be lower bounds",
            stacklevel=2,
        )
        lam = 1.0
    return ProductGroupSpec.from_pairs(alph[0], alph[1], pairs, injective=injective, lam=lam, name=name)


def load_spec(path) -> ProductGroupSpec:
    with open(path) as fh:
        return parse_spec(fh.read(), name=str(path))
