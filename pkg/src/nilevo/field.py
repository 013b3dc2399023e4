"""Exact scalar arithmetic over prime fields GF(p) and the rationals.

Elements are plain Python values: an ``int`` in ``range(p)`` for GF(p) and a
reduced :class:`fractions.Fraction` for the rationals.  Both are canonical, so
element equality is ordinary ``==``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .errors import UnsupportedFieldError

Element = Union[int, Fraction]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class Field:
    """A field descriptor.  ``p`` is the characteristic of GF(p), or None for Q."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def gf(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``gf:<p>`` or ``q``."""
        text = text.strip().lower()
        if text == "q":
            return cls(None)
        if text.startswith("gf:"):
            try:
                p = int(text[3:])
            except ValueError:
                raise ValueError(f"bad field descriptor {text!r}") from None
            return cls(p)
        raise ValueError(f"bad field descriptor {text!r}; expected 'gf:<p>' or 'q'")

    def __str__(self) -> str:
        return "q" if self.p is None else f"gf:{self.p}"

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def order(self) -> Optional[int]:
        return self.p

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def zero(self) -> Element:
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self) -> Element:
        return 1 if self.p is not None else Fraction(1)

    def __call__(self, x) -> Element:
        """Coerce an int, Fraction or canonical string into this field."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def to_str(self, x: Element) -> str:
        return str(x)

    def add(self, a: Element, b: Element) -> Element:
        return (a + b) % self.p if self.p else a + b

    def sub(self, a: Element, b: Element) -> Element:
        return (a - b) % self.p if self.p else a - b

    def neg(self, a: Element) -> Element:
        return -a % self.p if self.p else -a

    def mul(self, a: Element, b: Element) -> Element:
        return a * b % self.p if self.p else a * b

    def inv(self, a: Element) -> Element:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / a

    def div(self, a: Element, b: Element) -> Element:
        return self.mul(a, self.inv(b))

    def power(self, a: Element, k: int) -> Element:
        return pow(a, k, self.p) if self.p else a**k


def elements(F: Field) -> Iterator[Element]:
    """Every element of a finite field, in the order 0, 1, 2, ..."""
    if not F.is_finite:
        raise UnsupportedFieldError("cannot enumerate an infinite field")
    return iter(range(F.p))


def sqrt_if_square(F: Field, x: Element) -> Optional[Element]:
    """Smallest canonical ``r`` with ``r*r == x``, or None when x is a non-square."""
    if x == 0:
        raise ValueError("x must be nonzero")
    if F.is_finite:
        for r in range(1, F.p):
            if r * r % F.p == x:
                return r
        return None
    if x < 0:
        return None
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


def square_classes(F: Field) -> list[Element]:
    """One representative per coset of F*/F*^2, each the smallest in its coset.

    The trivial class comes first and is represented by 1.
    """
    if not F.is_finite:
        raise UnsupportedFieldError("the square-class group of Q is infinite")
    squares = {r * r % F.p for r in range(1, F.p)}
    reps: list[Element] = []
    seen: set[int] = set()
    for x in range(1, F.p):
        if x in seen:
            continue
        reps.append(x)
        seen.update(x * s % F.p for s in squares)
    return reps
