"""Sidon sets: sets of naturals whose pairwise sums are unique.

Equivalently every nonzero difference appears at most once, which is the
form the rest of the package consumes: a disequality on a pair of set
elements can then be rewritten as a single difference disequality.
"""

from __future__ import annotations

from dataclasses import dataclass


def _is_prime(c: int) -> bool:
    if c < 2:
        return False
    d = 2
    while d * d <= c:
        if c % d == 0:
            return False
        d += 1
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n; trial division, inputs stay desk-sized."""
    if n < 2:
        raise ValueError("primes start at 2")
    c = n
    while not _is_prime(c):
        c += 1
    return c


def is_sidon(s) -> bool:
    """Every difference of two distinct elements occurs exactly once."""
    xs = sorted(s)
    seen: set[int] = set()
    for i, a in enumerate(xs):
        for b in xs[:i]:
            if a - b in seen:
                return False
            seen.add(a - b)
    return True


@dataclass(frozen=True)
class SidonSet:
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        xs = self.elements
        if any(a < 0 for a in xs):
            raise ValueError("elements must be naturals")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("elements must be strictly ascending")
        if not is_sidon(xs):
            raise ValueError("pairwise sums collide")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def length(self) -> int:
        return self.elements[-1] - self.elements[0] if self.elements else 0


def sidon_set(n: int) -> SidonSet:
    """Order-n set with quadratic length: squares shifted modulo a prime.

    Element a gets 2pa + (a^2 mod p) for the smallest odd prime p >= n.
    The stride 2p exceeds the spread of the residues, so a difference of
    two elements determines both, and the largest element stays below
    2pn <= 8n^2.  Stride p would not do: residue carries collide, e.g.
    order 8 over p = 11 repeats the difference 16.
    """
    if n < 1:
        raise ValueError("order must be positive")
    p = next_prime(max(n, 3))
    return SidonSet(tuple(2 * p * a + a * a % p for a in range(n)))
