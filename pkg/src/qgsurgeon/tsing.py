"""Hirzebruch-Jung continued fractions and class T cyclic quotient singularities.

A chain is a tuple of positive weights ``(b_1, ..., b_r)`` with every
``b_i >= 2``, standing for a linear string of smooth rational curves with
self-intersections ``-b_i``.  Its value ``b_1 - 1/(b_2 - 1/(...))`` is the
fraction ``p/q`` of the cyclic quotient singularity ``1/p(1, q)`` it resolves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence

__all__ = [
    "ChainValueError",
    "AmbiguousTypeError",
    "TType",
    "check_chain",
    "hj_expand",
    "hj_value",
    "hj_pair",
    "t_parameters",
    "recognize_T",
    "generate_T",
    "t_moves",
    "discrepancies",
    "k2_correction_via_discrepancies",
    "chain_gram",
    "format_chain",
    "parse_chain",
]

Chain = tuple[int, ...]


class ChainValueError(ValueError):
    pass


class AmbiguousTypeError(ArithmeticError):
    """Two distinct (d, n, a) fit one chain; signals an arithmetic bug."""


def check_chain(weights: Iterable[int]) -> Chain:
    c = tuple(int(b) for b in weights)
    if not c:
        raise ChainValueError("empty chain")
    bad = [b for b in c if b < 2]
    if bad:
        raise ChainValueError(f"chain weights must be >= 2, got {list(c)}")
    return c


def hj_expand(f: Fraction | tuple[int, int]) -> Chain:
    """Expand ``p/q`` (``0 < q < p`` or ``q = 1``, coprime) as ``[b_1, ..., b_r]``."""
    p, q = (f.numerator, f.denominator) if isinstance(f, Fraction) else f
    if not (p > 1 and 0 < q < p and gcd(p, q) == 1):
        raise ChainValueError(f"{p}/{q} is not a valid Hirzebruch-Jung fraction")
    out = []
    while q:
        b = -(-p // q)  # ceiling
        out.append(b)
        p, q = q, b * q - p
    return tuple(out)


def hj_pair(chain: Sequence[int]) -> tuple[int, int]:
    """Numerator and denominator of the chain's value, as integers."""
    c = check_chain(chain)
    p, q = c[-1], 1
    for b in reversed(c[:-1]):
        p, q = b * p - q, p
    return p, q


def hj_value(chain: Sequence[int]) -> Fraction:
    p, q = hj_pair(chain)
    return Fraction(p, q)


@dataclass(frozen=True)
class TType:
    """Recognized type of a chain.

    ``kind`` is ``"T"`` for ``1/(d n^2)(1, d n a - 1)`` and ``"RDP"`` for an
    all-2 chain (the A_r double point, ``d``, ``n``, ``a`` left at 0).
    """

    kind: str
    length: int
    d: int = 0
    n: int = 0
    a: int = 0

    @property
    def mu(self) -> int:
        """Milnor number of the Q-Gorenstein smoothing."""
        return self.length if self.kind == "RDP" else self.d - 1

    @property
    def sigma_milnor(self) -> int:
        return -self.mu

    @property
    def delta_e(self) -> int:
        return self.mu - self.length

    @property
    def delta_sigma(self) -> int:
        return self.sigma_milnor + self.length

    @property
    def delta_k2(self) -> int:
        return 3 * self.delta_sigma + 2 * self.delta_e

    @property
    def order(self) -> int:
        return self.length + 1 if self.kind == "RDP" else self.d * self.n * self.n

    def label(self) -> str:
        if self.kind == "RDP":
            return f"A{self.length}"
        return f"T({self.d},{self.n},{self.a})"

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "d": self.d,
            "n": self.n,
            "a": self.a,
            "length": self.length,
            "mu": self.mu,
            "delta_k2": self.delta_k2,
            "delta_e": self.delta_e,
            "delta_sigma": self.delta_sigma,
        }


def _square_divisors(p: int) -> list[int]:
    """All n >= 2 with n*n dividing p, by trial division."""
    return [n for n in range(2, isqrt(p) + 1) if p % (n * n) == 0]


def t_parameters(p: int, q: int) -> list[tuple[int, int, int]]:
    """Every (d, n, a) with p = d n^2, q = d n a - 1, 1 <= a < n, gcd(a, n) = 1."""
    found = []
    for n in _square_divisors(p):
        d = p // (n * n)
        if (q + 1) % (d * n):
            continue
        a = (q + 1) // (d * n)
        if 1 <= a < n and gcd(a, n) == 1:
            found.append((d, n, a))
    return found


def recognize_T(chain: Sequence[int]) -> Optional[TType]:
    c = check_chain(chain)
    if all(b == 2 for b in c):
        return TType("RDP", len(c))
    p, q = hj_pair(c)
    found = t_parameters(p, q)
    if not found:
        return None
    if len(found) > 1:
        raise AmbiguousTypeError(f"chain {list(c)} ({p}/{q}) fits {found}")
    d, n, a = found[0]
    return TType("T", len(c), d, n, a)


def t_moves(chain: Chain) -> tuple[Chain, Chain]:
    """The two class-T preserving extensions of a chain."""
    left = (2,) + chain[:-1] + (chain[-1] + 1,)
    right = (chain[0] + 1,) + chain[1:] + (2,)
    return left, right


def generate_T(max_len: int, max_weight: int) -> list[Chain]:
    """All non-RDP class T chains within the bounds, grown from the seeds.

    Seeds are ``[4]`` and ``[3, 2, ..., 2, 3]``; both moves lengthen a chain
    and never lower a weight, so pruning out-of-bounds chains loses nothing.
    Returned in (length, weights) order.
    """
    if max_len < 1 or max_weight < 4:
        raise ValueError("need max_len >= 1 and max_weight >= 4")
    seeds = [(4,)] + [(3,) + (2,) * k + (3,) for k in range(max_len - 1)]
    seen: set[Chain] = set()
    queue = deque(s for s in seeds if len(s) <= max_len)
    while queue:
        c = queue.popleft()
        if c in seen:
            continue
        seen.add(c)
        if len(c) == max_len:
            continue
        for nxt in t_moves(c):
            if max(nxt) <= max_weight and nxt not in seen:
                queue.append(nxt)
    return sorted(seen, key=lambda c: (len(c), c))


def chain_gram(chain: Sequence[int]) -> list[list[int]]:
    c = check_chain(chain)
    r = len(c)
    return [
        [-c[i] if i == j else (1 if abs(i - j) == 1 else 0) for j in range(r)]
        for i in range(r)
    ]


def discrepancies(chain: Sequence[int]) -> list[Fraction]:
    """Solve sum_j a_j (E_j . E_k) = b_k - 2 for the chain's Gram matrix.

    The Gram matrix is tridiagonal, so forward elimination plus back
    substitution (Thomas) is exact over the rationals.
    """
    c = check_chain(chain)
    r = len(c)
    diag = [Fraction(-b) for b in c]
    rhs = [Fraction(b - 2) for b in c]
    for i in range(1, r):
        if diag[i - 1] == 0:
            raise ArithmeticError(f"singular Gram matrix for {list(c)}")
        f = Fraction(1) / diag[i - 1]
        diag[i] -= f
        rhs[i] -= f * rhs[i - 1]
    if diag[-1] == 0:
        raise ArithmeticError(f"singular Gram matrix for {list(c)}")
    out = [Fraction(0)] * r
    out[-1] = rhs[-1] / diag[-1]
    for i in range(r - 2, -1, -1):
        out[i] = (rhs[i] - out[i + 1]) / diag[i]
    return out


def k2_correction_via_discrepancies(chain: Sequence[int]) -> Fraction:
    """Amount K^2 rises when the chain is contracted: -sum a_j (b_j - 2)."""
    c = check_chain(chain)
    return -sum((a * (b - 2) for a, b in zip(discrepancies(c), c)), Fraction(0))


def format_chain(chain: Sequence[int]) -> str:
    return "[" + ",".join(str(b) for b in chain) + "]"


def parse_chain(text: str) -> Chain:
    """Read ``3,6,2,3,2`` (also accepts brackets, spaces or negated weights)."""
    body = text.strip().strip("[]")
    parts = [p for p in body.replace(",", " ").split() if p]
    try:
        weights = [abs(int(p)) for p in parts]
    except ValueError:
        raise ChainValueError(f"cannot read a chain from {text!r}") from None
    return check_chain(weights)
