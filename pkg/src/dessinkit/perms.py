"""Exact permutations on {1..n} and permutation groups with a deterministic
base-and-strong-generating-set (BSGS) backend.

Conventions
-----------
* Points are 1-based in every public interface; storage is 0-based tuples.
* Composition is a right action: ``p ^ (a*b) == (p ^ a) ^ b``, written
  ``compose_right(a, b)`` or ``a * b`` (apply ``a`` first).
* Canonical cycle printing sorts cycles by least element, starts each cycle at
  its least element, omits fixed points, and prints the identity as ``()``.
* The BSGS is fully deterministic: base points are the smallest moved points,
  orbits are explored breadth-first in insertion order, so group orders and
  sift results are bit-reproducible across runs.
"""

from __future__ import annotations

import re
import sys
import threading
from collections import deque
from dataclasses import dataclass
from math import lcm
from typing import Iterable, Optional, Sequence

from .errors import (
    Cancelled,
    DegreeMismatch,
    ParseError,
    PointOutOfRange,
    RepeatedPoint,
    ResourceLimit,
)

__all__ = [
    "Permutation",
    "PermGroup",
    "GroupCaps",
    "CancelToken",
    "parse_cycles",
    "compose_right",
    "order_and_cycle_type",
    "group_order",
    "is_member",
    "is_transitive",
]


class CancelToken:
    """Cooperative cancellation flag for long-running group computations.

    The computation polls :meth:`check` periodically and raises
    :class:`~dessinkit.errors.Cancelled` once :meth:`cancel` has been called.
    """

    def __init__(self):
        self._event = threading.Event()

    def cancel(self):
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self):
        if self._event.is_set():
            raise Cancelled("computation cancelled by caller")


@dataclass(frozen=True)
class GroupCaps:
    """Resource caps for BSGS construction.

    ``max_degree`` refuses absurdly large permutation domains outright and
    ``max_transversal_bytes`` bounds the memory the stabilizer-chain
    transversals may occupy (estimated as stored points times 8 bytes).
    """

    max_degree: int = 100_000
    max_transversal_bytes: int = 1 << 30


DEFAULT_CAPS = GroupCaps()

_CYCLE_TOKEN = re.compile(r"\(([^()]*)\)")


class Permutation:
    """A bijection of {1..n}, immutable and hashable."""

    __slots__ = ("_images",)

    def __init__(self, images: Sequence[int]):
        """Build from 1-based images: ``images[i]`` is the image of point i+1."""
        n = len(images)
        seen = [False] * n
        for v in images:
            if not 1 <= v <= n:
                raise PointOutOfRange(f"image {v} outside 1..{n}")
            if seen[v - 1]:
                raise RepeatedPoint(f"image {v} occurs twice")
            seen[v - 1] = True
        object.__setattr__(self, "_images", tuple(v - 1 for v in images))

    # -- construction helpers ------------------------------------------------

    @classmethod
    def _from_zero_based(cls, images: tuple) -> "Permutation":
        p = object.__new__(cls)
        object.__setattr__(p, "_images", images)
        return p

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls._from_zero_based(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> "Permutation":
        return parse_cycles(text, degree)

    # -- basic protocol ------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self._images)

    @property
    def images(self) -> tuple:
        """1-based image tuple."""
        return tuple(v + 1 for v in self._images)

    def apply(self, point: int) -> int:
        """Image of a 1-based point."""
        if not 1 <= point <= len(self._images):
            raise PointOutOfRange(f"point {point} outside 1..{len(self._images)}")
        return self._images[point - 1] + 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._images == other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose_right(self, other)

    def __pow__(self, exponent: int) -> "Permutation":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = tuple(range(len(self._images)))
        square = self._images
        e = exponent
        while e:
            if e & 1:
                result = tuple(square[i] for i in result)
            e >>= 1
            if e:
                square = tuple(square[i] for i in square)
        return Permutation._from_zero_based(result)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self._images)
        for i, v in enumerate(self._images):
            inv[v] = i
        return Permutation._from_zero_based(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self._images))

    # -- cycle structure -----------------------------------------------------

    def cycles(self) -> list:
        """Nontrivial cycles, canonical: sorted by least element, least first."""
        seen = [False] * len(self._images)
        out = []
        for start, img in enumerate(self._images):
            if seen[start] or img == start:
                seen[start] = True
                continue
            cycle = [start + 1]
            seen[start] = True
            j = img
            while j != start:
                seen[j] = True
                cycle.append(j + 1)
                j = self._images[j]
            out.append(tuple(cycle))
        return out

    def cycle_type(self) -> list:
        """Multiset of cycle lengths, fixed points included, sorted descending."""
        lengths = [len(c) for c in self.cycles()]
        fixed = len(self._images) - sum(lengths)
        return sorted(lengths + [1] * fixed, reverse=True)

    def order(self) -> int:
        cycles = self.cycles()
        return lcm(*(len(c) for c in cycles)) if cycles else 1

    def __str__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cycles)

    def __repr__(self) -> str:
        return f"Permutation({self!s}, degree={self.degree})"


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse whitespace-tolerant disjoint-cycle notation with 1-based points.

    Fixed points may be omitted; ``()`` and the empty string denote the
    identity.  Raises :class:`RepeatedPoint` when a point occurs twice,
    :class:`PointOutOfRange` when a point exceeds ``degree``, and
    :class:`ParseError` for anything that is not cycle syntax.
    """
    if degree < 0:
        raise ParseError("degree must be nonnegative")
    stripped = text.strip()
    remainder = _CYCLE_TOKEN.sub("", stripped)
    if remainder.strip():
        raise ParseError(f"unexpected text in cycle notation: {remainder.strip()!r}")
    images = list(range(degree))
    used = [False] * degree
    for match in _CYCLE_TOKEN.finditer(stripped):
        body = match.group(1).strip()
        if not body:
            continue
        points = []
        for token in body.split(","):
            token = token.strip()
            if not re.fullmatch(r"\d+", token):
                raise ParseError(f"bad point {token!r} in cycle notation")
            points.append(int(token))
        for pt in points:
            if not 1 <= pt <= degree:
                raise PointOutOfRange(f"point {pt} outside 1..{degree}")
            if used[pt - 1]:
                raise RepeatedPoint(f"point {pt} occurs twice")
            used[pt - 1] = True
        for a, b in zip(points, points[1:] + points[:1]):
            images[a - 1] = b - 1
    return Permutation._from_zero_based(tuple(images))


def compose_right(a: Permutation, b: Permutation) -> Permutation:
    """Right-action product: apply ``a`` first, then ``b``."""
    if a.degree != b.degree:
        raise DegreeMismatch(f"degrees {a.degree} and {b.degree} differ")
    bi = b._images
    return Permutation._from_zero_based(tuple(bi[i] for i in a._images))


def order_and_cycle_type(a: Permutation):
    """Order (lcm of cycle lengths) and descending cycle type of ``a``."""
    return a.order(), a.cycle_type()


# ---------------------------------------------------------------------------
# BSGS machinery
# ---------------------------------------------------------------------------


def _mul(a: tuple, b: tuple) -> tuple:
    # apply a first, then b (0-based image tuples)
    return tuple(b[i] for i in a)


def _inv(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


class _Level:
    __slots__ = ("point", "gens", "orbit")

    def __init__(self, point: int):
        self.point = point
        self.gens: list = []
        # orbit maps point -> (u, u_inv) with base^u == point
        self.orbit: dict = {}


class _OrderExceeded(Exception):
    pass


class PermGroup:
    """Group generated by permutations, with exact order and membership.

    The stabilizer chain is built once, lazily, under a lock; afterwards all
    queries are read-only and safe for concurrent use.
    """

    def __init__(
        self,
        generators: Iterable[Permutation],
        caps: GroupCaps = DEFAULT_CAPS,
    ):
        gens = list(generators)
        if not gens:
            raise ValueError("at least one generator is required")
        degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatch("generators have mixed degrees")
        if degree > caps.max_degree:
            raise ResourceLimit(
                f"degree {degree} exceeds cap {caps.max_degree}"
            )
        self._degree = degree
        self._gens = tuple(gens)
        self._caps = caps
        self._lock = threading.Lock()
        self._levels: Optional[list] = None
        self._identity = tuple(range(degree))

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def generators(self) -> tuple:
        return self._gens

    # -- public queries ------------------------------------------------------

    def order(self, cancel: Optional[CancelToken] = None) -> int:
        levels = self._ensure_bsgs(cancel=cancel)
        n = 1
        for lvl in levels:
            n *= len(lvl.orbit)
        return n

    def order_exceeds(self, bound: int, cancel: Optional[CancelToken] = None) -> bool:
        """True iff the group order is > ``bound``.

        May finish early, without completing the stabilizer chain, as soon as
        the partial orbit-size product proves the bound is exceeded.
        """
        if self._levels is None:
            try:
                self._ensure_bsgs(order_limit=bound, cancel=cancel)
            except _OrderExceeded:
                return True
        return self.order(cancel=cancel) > bound

    def __contains__(self, p: Permutation) -> bool:
        return self.is_member(p)

    def is_member(self, p: Permutation, cancel: Optional[CancelToken] = None) -> bool:
        """Membership by sifting through the strong generator table."""
        if p.degree != self._degree:
            raise DegreeMismatch(f"degrees {p.degree} and {self._degree} differ")
        levels = self._ensure_bsgs(cancel=cancel)
        residue, _ = self._strip(levels, p._images, 0)
        return residue == self._identity

    def is_transitive(self) -> bool:
        """True iff the orbit of point 1 is the whole domain."""
        return len(self.orbit(1)) == self._degree

    def orbit(self, point: int) -> set:
        """Orbit of a 1-based point under the generators."""
        if not 1 <= point <= self._degree:
            raise PointOutOfRange(f"point {point} outside 1..{self._degree}")
        start = point - 1
        seen = {start}
        queue = [start]
        gens = [g._images for g in self._gens]
        while queue:
            a = queue.pop()
            for g in gens:
                b = g[a]
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return {p + 1 for p in seen}

    def base(self) -> list:
        """The (1-based) base sequence of the stabilizer chain."""
        return [lvl.point + 1 for lvl in self._ensure_bsgs()]

    def strong_generators(self) -> list:
        """Strong generators of the chain's top level, as Permutations."""
        levels = self._ensure_bsgs()
        return [Permutation._from_zero_based(g) for g in levels[0].gens]

    # -- construction ----------------------------------------------------------

    def _ensure_bsgs(self, order_limit=None, cancel=None) -> list:
        if self._levels is not None:
            return self._levels
        with self._lock:
            if self._levels is not None:
                return self._levels
            levels = self._build(order_limit=order_limit, cancel=cancel)
            self._levels = levels
            return levels

    def _build(self, order_limit=None, cancel=None) -> list:
        gens = []
        seen = set()
        for g in self._gens:
            t = g._images
            if t != self._identity and t not in seen:
                seen.add(t)
                gens.append(t)
        if not gens:
            return []
        first = min(next(i for i, v in enumerate(g) if v != i) for g in gens)
        levels = [_Level(first)]
        levels[0].gens = gens
        state = _BuildState(self, order_limit, cancel)
        # completion recursion nests at most once per chain level; long bases
        # (hundreds of points) would brush the default interpreter limit
        floor = 4 * self._degree + 100
        old_limit = sys.getrecursionlimit()
        if old_limit < floor:
            sys.setrecursionlimit(floor)
        try:
            self._complete(levels, 0, state)
        finally:
            if old_limit < floor:
                sys.setrecursionlimit(old_limit)
        return levels

    def _complete(self, levels: list, i: int, state: "_BuildState"):
        """Re-establish the BSGS invariant at level i, assuming deeper levels
        are already complete."""
        level = levels[i]
        self._rebuild_orbit(level, state, levels)
        inv_cache = state.inv_cache
        orbit_pts = list(level.orbit)
        for pt in orbit_pts:
            u = level.orbit[pt][0]
            for g in level.gens:
                state.tick()
                img = g[pt]
                ug = _mul(u, g)
                if ug == levels[i].orbit[img][0]:
                    continue  # tree edge: Schreier generator is trivial
                sg = _mul(ug, level.orbit[img][1])
                residue, j = self._strip(levels, sg, i + 1)
                if residue == self._identity:
                    continue
                if j == len(levels):
                    new_pt = next(
                        k for k, v in enumerate(residue) if v != k
                    )
                    levels.append(_Level(new_pt))
                for l in range(i + 1, j + 1):
                    levels[l].gens.append(residue)
                inv_cache[residue] = _inv(residue)
                for l in range(j, i, -1):
                    self._complete(levels, l, state)

    def _rebuild_orbit(self, level: "_Level", state: "_BuildState", levels: list):
        ident = self._identity
        orbit = {level.point: (ident, ident)}
        queue = deque([level.point])
        inv_cache = state.inv_cache
        while queue:
            a = queue.popleft()
            u, u_inv = orbit[a]
            for g in level.gens:
                b = g[a]
                if b not in orbit:
                    gi = inv_cache.get(g)
                    if gi is None:
                        gi = _inv(g)
                        inv_cache[g] = gi
                    orbit[b] = (_mul(u, g), _mul(gi, u_inv))
                    queue.append(b)
        level.orbit = orbit
        state.note_orbit_change(levels)

    def _strip(self, levels: list, g: tuple, start: int):
        """Sift g through levels[start:]; return (residue, drop-out level)."""
        for idx in range(start, len(levels)):
            lvl = levels[idx]
            img = g[lvl.point]
            if img == lvl.point:
                continue
            entry = lvl.orbit.get(img)
            if entry is None:
                return g, idx
            g = _mul(g, entry[1])
        return g, len(levels)


class _BuildState:
    """Bookkeeping shared across one BSGS construction run."""

    def __init__(self, group: PermGroup, order_limit, cancel):
        self.group = group
        self.order_limit = order_limit
        self.cancel = cancel
        self.inv_cache: dict = {}
        self._ticks = 0

    def tick(self):
        self._ticks += 1
        if self.cancel is not None and (self._ticks & 0x3FF) == 0:
            self.cancel.check()

    def note_orbit_change(self, levels: list):
        stored = sum(len(lvl.orbit) for lvl in levels)
        approx_bytes = 2 * stored * self.group._degree * 8
        if approx_bytes > self.group._caps.max_transversal_bytes:
            raise ResourceLimit(
                f"transversal storage ~{approx_bytes} bytes exceeds cap "
                f"{self.group._caps.max_transversal_bytes}"
            )
        if self.order_limit is not None:
            product = 1
            for lvl in levels:
                product *= max(1, len(lvl.orbit))
            if product > self.order_limit:
                raise _OrderExceeded()


def group_order(g: PermGroup, cancel: Optional[CancelToken] = None) -> int:
    """Exact order of the generated group; deterministic across runs."""
    return g.order(cancel=cancel)


def is_member(g: PermGroup, a: Permutation) -> bool:
    return g.is_member(a)


def is_transitive(g: PermGroup) -> bool:
    return g.is_transitive()
