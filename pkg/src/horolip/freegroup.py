"""Free group on a, b: reduced words, eventually periodic boundary words, phi on the boundary.

Words are strings over "aAbB" with A = a^-1 and B = b^-1.  Boundary words
are written "head|cycle" for head followed by cycle repeated forever.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import NoSeparationError, PreconditionError
from .horoboundary import RaySample

LETTERS = "aAbB"
_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def _check_letters(w: str) -> None:
    bad = set(w) - set(LETTERS)
    if bad:
        raise PreconditionError(f"letters {sorted(bad)} not in {LETTERS!r}")


def reduce_word(w: str) -> str:
    """Free reduction by a stack pass."""
    _check_letters(w)
    out: list[str] = []
    for c in w:
        if out and out[-1] == _INV[c]:
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def is_reduced(w: str) -> bool:
    return all(_INV[x] != y for x, y in zip(w, w[1:]))


def multiply(u: str, v: str) -> str:
    return reduce_word(u + v)


def inverse(w: str) -> str:
    return "".join(_INV[c] for c in reversed(w))


def word_length(w: str) -> int:
    return len(reduce_word(w))


class FreeGroupMetric:
    """Word metric d(x, y) = |x^-1 y| for the generators a, b and their inverses."""

    origin = ""
    integer_valued = True

    def distance(self, x: str, y: str) -> int:
        return len(multiply(inverse(x), y))

    def __call__(self, x: str) -> int:
        return word_length(x)


F2 = FreeGroupMetric()


def _primitive_root(w: str) -> str:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


@dataclass(frozen=True)
class BoundaryWord:
    """The infinite reduced word head . cycle . cycle . ... in canonical form.

    The cycle is primitive and the head is as short as possible, so two
    representations describe the same infinite word exactly when they are equal.
    """

    head: str
    cycle: str

    def __post_init__(self):
        _check_letters(self.head + self.cycle)
        if not self.cycle:
            raise PreconditionError("cycle must be nonempty")
        if not is_reduced(self.head) or not is_reduced(self.cycle + self.cycle):
            raise PreconditionError("boundary word is not reduced")
        if self.head and _INV[self.head[-1]] == self.cycle[0]:
            raise PreconditionError("head and cycle cancel at the junction")
        head, cycle = self.head, _primitive_root(self.cycle)
        while head and head[-1] == cycle[-1]:
            head, cycle = head[:-1], cycle[-1] + cycle[:-1]
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def parse(cls, text: str) -> "BoundaryWord":
        if "|" not in text:
            raise PreconditionError("boundary words are written 'head|cycle'")
        head, cycle = text.split("|", 1)
        return cls(head, cycle)

    def __str__(self) -> str:
        return f"{self.head}|{self.cycle}"

    def prefix(self, n: int) -> str:
        if n <= len(self.head):
            return self.head[:n]
        k = n - len(self.head)
        reps = -(-k // len(self.cycle))
        return self.head + (self.cycle * reps)[:k]

    def letter(self, i: int) -> str:
        return self.prefix(i + 1)[i]

    def left_multiply(self, x: str) -> "BoundaryWord":
        """The boundary word x . w."""
        x = reduce_word(x)
        reps = len(x) // len(self.cycle) + 2
        r = multiply(x, self.head + self.cycle * reps)
        # at most |x| letters cancel, so r still ends with a whole cycle
        return BoundaryWord(r, self.cycle)


def random_reduced(rng: random.Random, n: int) -> str:
    out = ""
    while len(out) < n:
        c = rng.choice(LETTERS)
        if not out or out[-1] != _INV[c]:
            out += c
    return out


def random_boundary(rng: random.Random, max_head: int = 5, max_cycle: int = 4) -> BoundaryWord:
    while True:
        cycle = random_reduced(rng, rng.randint(1, max_cycle))
        if _INV[cycle[-1]] == cycle[0]:
            continue
        head = random_reduced(rng, rng.randint(0, max_head))
        if head and _INV[head[-1]] == cycle[0]:
            continue
        return BoundaryWord(head, cycle)


def phi_letter(s: str, w: BoundaryWord) -> int:
    """1 when w begins with the letter s, -1 otherwise."""
    return 1 if w.letter(0) == s else -1


def phi_boundary(x: str, w: BoundaryWord) -> int:
    """phi_x(w) by peeling letters: phi_{ys}(w) = phi_y(w) + phi_s(y^-1 w)."""
    x = reduce_word(x)
    total = 0
    for i, s in enumerate(x):
        total += phi_letter(s, w.left_multiply(inverse(x[:i])))
    return total


def prefix_limit(x: str, w: BoundaryWord, n: int = 50) -> int:
    """l(p_n) - l(x^-1 p_n) for the length-n prefix p_n of w."""
    p = w.prefix(n)
    return len(p) - len(multiply(inverse(x), p))


def common_prefix(v: BoundaryWord, w: BoundaryWord) -> str:
    """Longest common prefix of two distinct boundary words."""
    if v == w:
        raise NoSeparationError("the boundary words are equal")
    # two eventually periodic words agreeing this far agree forever
    bound = max(len(v.head), len(w.head)) + len(v.cycle) + len(w.cycle)
    pv, pw = v.prefix(bound), w.prefix(bound)
    i = 0
    while i < bound and pv[i] == pw[i]:
        i += 1
    if i == bound:
        raise NoSeparationError("the boundary words are equal")
    return pv[:i]


@dataclass(frozen=True)
class Separation:
    prefix: str
    letter: str
    values: tuple[int, int]

    def to_json(self) -> dict:
        return {"x": self.prefix, "s": self.letter, "values": list(self.values)}


def separate(v: BoundaryWord, w: BoundaryWord) -> Separation:
    """x and s with phi_s(x^-1 v) = 1 and phi_s(x^-1 w) = -1."""
    x = common_prefix(v, w)
    s = v.letter(len(x))
    xi = inverse(x)
    vals = (phi_letter(s, v.left_multiply(xi)), phi_letter(s, w.left_multiply(xi)))
    if set(vals) != {1, -1}:
        raise AssertionError("separation values must be 1 and -1")
    return Separation(x, s, vals)


def prefix_ray(w: BoundaryWord, n: int) -> RaySample:
    """e, w_1, w_1 w_2, ... up to the prefix of length n."""
    if n < 1:
        raise PreconditionError("needs n >= 1")
    return RaySample(tuple(range(n + 1)), tuple(w.prefix(k) for k in range(n + 1)), f"prefixes of {w}")


def ball(r: int) -> list[str]:
    """All reduced words of length at most r, shortest first."""
    out, layer = [""], [""]
    for _ in range(r):
        layer = [u + c for u in layer for c in LETTERS if not u or u[-1] != _INV[c]]
        out += layer
    return out

