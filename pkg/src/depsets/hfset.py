"""Hereditarily finite sets with canonical ordering.

All semantic values in this package are HFSets.  Relations and functions
are encoded as sets of value-first Kuratowski pairs <value, argument>,
so that ``r S d`` means ``pair(r, d) in S`` and composition of relations
agrees with composition of functions.
"""

from __future__ import annotations

import threading
from typing import Iterable, Iterator, Optional


class HFSet:
    """An immutable hereditarily finite set.

    Elements are stored deduplicated and sorted under a structural total
    order (rank, then cardinality, then lexicographic on the ordered
    element keys), so structurally equal sets are always represented
    identically and instances are interned.
    """

    __slots__ = ("elements", "_key", "_hash", "_rank")

    _intern: dict = {}
    _intern_lock = threading.Lock()

    def __new__(cls, elements: Iterable["HFSet"] = ()) -> "HFSet":
        elems = sorted(set(elements), key=lambda e: e._key)
        key = tuple(e._key for e in elems)
        with cls._intern_lock:
            cached = cls._intern.get(key)
            if cached is not None:
                return cached
            self = super().__new__(cls)
            self.elements = tuple(elems)
            rank = 1 + max((e._rank for e in elems), default=-1)
            self._rank = rank
            self._key = (rank, len(elems), key)
            self._hash = hash(self._key)
            cls._intern[key] = self
            return self

    @property
    def rank(self) -> int:
        return self._rank

    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, HFSet) and self._key == other._key)

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "HFSet") -> bool:
        return self._key < other._key

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator["HFSet"]:
        return iter(self.elements)

    def __contains__(self, item: object) -> bool:
        return item in self.elements

    def __repr__(self) -> str:
        return f"HFSet[{render(self)}]"


EMPTY = HFSet()


def hf(*elements: HFSet) -> HFSet:
    return HFSet(elements)


def singleton(s: HFSet) -> HFSet:
    return HFSet((s,))


def union(sets: Iterable[HFSet]) -> HFSet:
    out: set = set()
    for s in sets:
        out.update(s.elements)
    return HFSet(out)


def pair(r: HFSet, s: HFSet) -> HFSet:
    """Kuratowski pair <r, s> = {{r}, {r, s}}."""
    return HFSet((HFSet((r,)), HFSet((r, s))))


def unpair(p: HFSet) -> Optional[tuple[HFSet, HFSet]]:
    """Inverse of pair; None if p is not an ordered pair."""
    if len(p) == 1:
        (inner,) = p.elements
        if len(inner) == 1:
            (r,) = inner.elements
            return (r, r)
        return None
    if len(p) == 2:
        a, b = p.elements
        # a precedes b in canonical order, so the singleton is whichever
        # has exactly one element and is contained in the other.
        for single, double in ((a, b), (b, a)):
            if len(single) == 1 and len(double) == 2:
                (r,) = single.elements
                if r in double:
                    (s,) = (e for e in double.elements if e != r)
                    return (r, s)
        return None
    return None


def _pairs(s: HFSet) -> Iterator[tuple[HFSet, HFSet]]:
    """Iterate the ordered-pair elements of s, skipping non-pair garbage."""
    for e in s:
        p = unpair(e)
        if p is not None:
            yield p


def domain(s: HFSet) -> HFSet:
    return HFSet(d for _, d in _pairs(s))


def range_(s: HFSet) -> HFSet:
    return HFSet(r for r, _ in _pairs(s))


def inverse(s: HFSet) -> HFSet:
    return HFSet(pair(d, r) for r, d in _pairs(s))


def image(r: HFSet, s: HFSet) -> HFSet:
    return HFSet(v for v, d in _pairs(r) if d in s)


def apply(r: HFSet, s: HFSet) -> HFSet:
    """R(s) = union of R{s}; empty when s is outside dom(R)."""
    return union(v for v, d in _pairs(r) if d == s)


def compose(r: HFSet, s: HFSet) -> HFSet:
    """r (R o S) s  <=>  exists t with r R t S s."""
    out = set()
    for a, t1 in _pairs(r):
        for t2, b in _pairs(s):
            if t1 == t2:
                out.add(pair(a, b))
    return HFSet(out)


def transitive_closure(r: HFSet) -> HFSet:
    closure = r
    while True:
        step = union((closure, compose(closure, closure)))
        if step == closure:
            return closure
        closure = step


def is_function(f: HFSet) -> bool:
    """True iff F = {<F(x), x> | x in dom(F)} (value-first pairs)."""
    if any(unpair(e) is None for e in f):
        return False
    seen: dict[HFSet, HFSet] = {}
    for v, d in _pairs(f):
        if d in seen and seen[d] != v:
            return False
        seen[d] = v
    return True


def graph(mapping: dict[HFSet, HFSet]) -> HFSet:
    """Build the function {<value, argument>} from a dict argument -> value."""
    return HFSet(pair(v, d) for d, v in mapping.items())


def as_dict(f: HFSet) -> dict[HFSet, HFSet]:
    """Read a function set back into a dict argument -> value."""
    return {d: v for v, d in _pairs(f)}


def dep_product(f: HFSet, size_guard: int = 10**6) -> HFSet:
    """The set of all choice functions g with dom(g) = dom(F), g(x) in F(x).

    Raises ResourceError when the product would exceed size_guard members.
    """
    dom = sorted(domain(f).elements, key=lambda e: e._key)
    choices = [apply(f, d) for d in dom]
    total = 1
    for c in choices:
        total *= len(c)
        if total > size_guard:
            raise ResourceError(
                f"dependent product would have more than {size_guard} members"
            )
    funcs = [()]  # tuples of (value, argument) pairs
    for d, c in zip(dom, choices):
        funcs = [g + ((v, d),) for g in funcs for v in c.elements]
    return HFSet(HFSet(pair(v, d) for v, d in g) for g in funcs)


def function_space(codomain: HFSet, dom: HFSet, size_guard: int = 10**6) -> HFSet:
    """Y^X as an HFSet of function graphs."""
    const = graph({d: codomain for d in dom})
    return dep_product(const, size_guard)


class ResourceError(Exception):
    """A configured size or step budget was exceeded."""


MAX_POOL_RANK = 4


def enumerate_pool(max_rank: int) -> list[HFSet]:
    """All HFSets of rank <= max_rank, in canonical order.

    Counts double-exponentially: 1, 2, 4, 16, 65536 for ranks 0..4.
    """
    if max_rank > MAX_POOL_RANK:
        raise ValueError(f"max_rank {max_rank} exceeds ceiling {MAX_POOL_RANK}")
    pool = [EMPTY]
    for _ in range(max_rank):
        pool = [HFSet(sub) for sub in _subsets(pool)]
    return sorted(pool)


def _subsets(items: list[HFSet]) -> Iterator[tuple[HFSet, ...]]:
    n = len(items)
    for mask in range(1 << n):
        yield tuple(items[i] for i in range(n) if mask >> i & 1)


def render(s: HFSet) -> str:
    """Canonical text form: 0 for the empty set, <a,b> for pairs, {..} else."""
    if len(s) == 0:
        return "0"
    p = unpair(s)
    if p is not None:
        return f"<{render(p[0])},{render(p[1])}>"
    return "{" + ",".join(render(e) for e in s) + "}"


def parse(text: str) -> HFSet:
    """Parse the rendering produced by render (whitespace tolerated)."""
    parser = _SetParser(text)
    result = parser.parse_set()
    parser.skip_ws()
    if parser.pos != len(parser.text):
        raise SetSyntaxError(f"trailing input at position {parser.pos}")
    return result


class SetSyntaxError(ValueError):
    pass


class _SetParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise SetSyntaxError(f"expected {ch!r} at position {self.pos}")
        self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_set(self) -> HFSet:
        c = self.peek()
        if c == "0":
            self.pos += 1
            return EMPTY
        if c == "<":
            self.pos += 1
            a = self.parse_set()
            self.expect(",")
            b = self.parse_set()
            self.expect(">")
            return pair(a, b)
        if c == "{":
            self.pos += 1
            elems = [self.parse_set()]
            while self.peek() == ",":
                self.pos += 1
                elems.append(self.parse_set())
            self.expect("}")
            return HFSet(elems)
        raise SetSyntaxError(f"expected set at position {self.pos}")
