"""Exact core arithmetic: prime fields, monomials, term orders, sparse polynomials.

Everything in this module is immutable and side-effect free, so values can be
shared freely between threads.  Local (power-series) behaviour is obtained
downstream by truncation; here we only do honest polynomial arithmetic over a
prime field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

DEFAULT_PRIME = 32003

INFINITY = float("inf")


class AlgebraError(Exception):
    """Base class for errors raised by this package."""


class StructureError(AlgebraError):
    """Mismatched shapes, variable counts, or ring descriptions."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_p for an odd prime p."""

    modulus: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        if self.modulus <= 2 or not _is_prime(self.modulus):
            raise StructureError(f"modulus must be an odd prime, got {self.modulus}")

    def normalize(self, a: int) -> int:
        return a % self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return pow(a, -1, self.modulus)


def ff_inv(a: int, field: FieldSpec) -> int:
    """Inverse of `a` mod the field prime; raises ZeroDivisionError on 0."""
    return field.inv(a)


class Monomial:
    """An exponent vector together with its cached total degree."""

    __slots__ = ("exponents", "degree")

    def __init__(self, exponents: Iterable[int]):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise StructureError(f"negative exponent in {exps}")
        self.exponents = exps
        self.degree = sum(exps)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __hash__(self) -> int:
        return hash(self.exponents)

    def __repr__(self) -> str:
        return f"Monomial{self.exponents}"

    def mul(self, other: "Monomial") -> "Monomial":
        return Monomial(a + b for a, b in zip(self.exponents, other.exponents))

    def divides(self, other: "Monomial") -> bool:
        return all(a <= b for a, b in zip(self.exponents, other.exponents))


# Term-order keys.  Bigger key = bigger monomial.  For graded orders the key
# starts with the total degree; grevlex breaks ties by the *smallest* trailing
# exponent winning, realized by negating the reversed exponent vector.

def grevlex_key(exps: Sequence[int]):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def grlex_key(exps: Sequence[int]):
    return (sum(exps), tuple(exps))


def lex_key(exps: Sequence[int]):
    return tuple(exps)


ORDER_KEYS = {"grevlex": grevlex_key, "grlex": grlex_key, "lex": lex_key}


def mon_cmp(a: Monomial, b: Monomial, order: str = "grevlex") -> int:
    """Compare two monomials; returns -1, 0, or 1."""
    ea, eb = a.exponents, b.exponents
    if len(ea) != len(eb):
        raise StructureError("monomials live in different variable counts")
    try:
        keyf = ORDER_KEYS[order]
    except KeyError:
        raise StructureError(f"unknown monomial order {order!r}") from None
    ka, kb = keyf(ea), keyf(eb)
    return -1 if ka < kb else (1 if ka > kb else 0)


class Polynomial:
    """Sparse multivariate polynomial over F_p.

    Terms are kept canonically sorted in descending grevlex order with
    coefficients normalized to [1, p).  The zero polynomial has no terms.
    """

    __slots__ = ("nvars", "p", "_terms")

    def __init__(self, nvars: int, p: int, terms, _canonical: bool = False):
        self.nvars = nvars
        self.p = p
        if _canonical:
            self._terms = terms
            return
        acc: dict = {}
        for exps, c in terms:
            exps = tuple(exps)
            if len(exps) != nvars:
                raise StructureError("term has wrong variable count")
            if any(e < 0 for e in exps):
                raise StructureError("negative exponent")
            c = (acc.get(exps, 0) + c) % p
            if c:
                acc[exps] = c
            else:
                acc.pop(exps, None)
        self._terms = tuple(
            sorted(acc.items(), key=lambda t: grevlex_key(t[0]), reverse=True)
        )

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, p: int) -> "Polynomial":
        return cls(nvars, p, (), _canonical=True)

    @classmethod
    def constant(cls, nvars: int, p: int, c: int) -> "Polynomial":
        c %= p
        if not c:
            return cls.zero(nvars, p)
        return cls(nvars, p, (((0,) * nvars, c),), _canonical=True)

    @classmethod
    def variable(cls, nvars: int, p: int, i: int, power: int = 1, coeff: int = 1) -> "Polynomial":
        exps = [0] * nvars
        exps[i] = power
        return cls(nvars, p, [(tuple(exps), coeff)])

    @classmethod
    def monomial(cls, nvars: int, p: int, exps: Sequence[int], coeff: int = 1) -> "Polynomial":
        return cls(nvars, p, [(tuple(exps), coeff)])

    # -- basic structure ---------------------------------------------------

    @property
    def terms(self):
        """Terms as (Monomial, coefficient) pairs, descending grevlex."""
        return tuple((Monomial(e), c) for e, c in self._terms)

    @property
    def items(self):
        """Raw (exponent tuple, coefficient) pairs, descending grevlex."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.p == other.p
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        return hash((self.nvars, self.p, self._terms))

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars or self.p != other.p:
            raise StructureError("polynomials from different rings")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        acc = dict(self._terms)
        p = self.p
        for e, c in other._terms:
            v = (acc.get(e, 0) + c) % p
            if v:
                acc[e] = v
            else:
                acc.pop(e, None)
        return Polynomial(self.nvars, p, acc.items())

    def __neg__(self) -> "Polynomial":
        p = self.p
        return Polynomial(
            self.nvars, p, tuple((e, p - c) for e, c in self._terms), _canonical=True
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        p = self.p
        acc: dict = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (acc.get(e, 0) + c1 * c2) % p
                if v:
                    acc[e] = v
                else:
                    acc.pop(e, None)
        return Polynomial(self.nvars, p, acc.items())

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise StructureError("negative power")
        result = Polynomial.constant(self.nvars, self.p, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scale(self, c: int) -> "Polynomial":
        c %= self.p
        if not c:
            return Polynomial.zero(self.nvars, self.p)
        p = self.p
        return Polynomial(
            self.nvars, p, tuple((e, (c * v) % p) for e, v in self._terms), _canonical=True
        )

    def mul_monomial(self, exps: Sequence[int], coeff: int = 1) -> "Polynomial":
        coeff %= self.p
        if not coeff:
            return Polynomial.zero(self.nvars, self.p)
        p = self.p
        out = tuple(
            (tuple(a + b for a, b in zip(e, exps)), (c * coeff) % p)
            for e, c in self._terms
        )
        return Polynomial(self.nvars, p, out, _canonical=True)

    # -- queries -----------------------------------------------------------

    def valuation(self):
        """Minimal total degree among terms; +inf for the zero polynomial."""
        if not self._terms:
            return INFINITY
        return min(sum(e) for e, _ in self._terms)

    def degree(self) -> int:
        """Maximal total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e, _ in self._terms)

    def truncate(self, bound: int) -> "Polynomial":
        """Drop every term of total degree >= bound."""
        if bound < 0:
            raise StructureError("truncation bound must be >= 0")
        return Polynomial(
            self.nvars,
            self.p,
            tuple(t for t in self._terms if sum(t[0]) < bound),
            _canonical=True,
        )

    def leading(self):
        """(exponent tuple, coefficient) of the grevlex-leading term, or None."""
        return self._terms[0] if self._terms else None

    def is_constant(self) -> bool:
        return not self._terms or (
            len(self._terms) == 1 and not any(self._terms[0][0])
        )

    def constant_value(self) -> int:
        if not self._terms:
            return 0
        if self.is_constant():
            return self._terms[0][1]
        raise StructureError("not a constant polynomial")

    def monic(self) -> "Polynomial":
        lead = self.leading()
        if lead is None or lead[1] == 1:
            return self
        return self.scale(pow(lead[1], -1, self.p))

    # -- formatting --------------------------------------------------------

    def to_string(self, variables: Optional[Sequence[str]] = None) -> str:
        if not self._terms:
            return "0"
        names = list(variables) if variables else [f"x{i}" for i in range(self.nvars)]
        half = self.p // 2
        parts = []
        for idx, (e, c) in enumerate(self._terms):
            neg = c > half
            mag = self.p - c if neg else c
            factors = []
            for name, exp in zip(names, e):
                if exp == 1:
                    factors.append(name)
                elif exp > 1:
                    factors.append(f"{name}^{exp}")
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            if idx == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_string()})"


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact product; quotient relations are never applied here."""
    return f * g


def poly_valuation(f: Polynomial):
    return f.valuation()


def poly_truncate(f: Polynomial, bound: int) -> Polynomial:
    return f.truncate(bound)


@dataclass(frozen=True)
class RingSpec:
    """Description of the ambient ring: prime field, ordered variables, and an
    optional list of quotient relations (the ring S/(relations)).

    `dvr_proxy_variable` marks one variable as standing in for the uniformizer
    of a discrete valuation coefficient ring; length computations treat it as
    an ordinary variable, and reports label the run accordingly.
    """

    field: FieldSpec
    variables: tuple
    quotient_relations: tuple = ()
    dvr_proxy_variable: Optional[str] = None

    def __post_init__(self) -> None:
        names = tuple(self.variables)
        object.__setattr__(self, "variables", names)
        if len(set(names)) != len(names):
            raise StructureError("variable names must be unique")
        if not names:
            raise StructureError("need at least one variable")
        rels = tuple(self.quotient_relations)
        object.__setattr__(self, "quotient_relations", rels)
        for r in rels:
            if not isinstance(r, Polynomial):
                raise StructureError("quotient relations must be Polynomials")
            if r.nvars != len(names) or r.p != self.field.modulus:
                raise StructureError("quotient relation does not match the ring")
            if r.is_zero():
                raise StructureError("zero quotient relation")
            if r.valuation() < 1:
                raise StructureError("quotient relation with a unit term")
        if self.dvr_proxy_variable is not None and self.dvr_proxy_variable not in names:
            raise StructureError(
                f"dvr proxy {self.dvr_proxy_variable!r} is not a declared variable"
            )

    # -- convenience constructors -----------------------------------------

    @classmethod
    def make(cls, variables: Sequence[str], prime: int = DEFAULT_PRIME,
             quotient_relations: Sequence[Polynomial] = (),
             dvr_proxy_variable: Optional[str] = None) -> "RingSpec":
        return cls(FieldSpec(prime), tuple(variables), tuple(quotient_relations),
                   dvr_proxy_variable)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def prime(self) -> int:
        return self.field.modulus

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.nvars, self.prime)

    def one(self) -> Polynomial:
        return Polynomial.constant(self.nvars, self.prime, 1)

    def constant(self, c: int) -> Polynomial:
        return Polynomial.constant(self.nvars, self.prime, c)

    def variable(self, name: str, power: int = 1, coeff: int = 1) -> Polynomial:
        try:
            i = self.variables.index(name)
        except ValueError:
            raise StructureError(f"unknown variable {name!r}") from None
        return Polynomial.variable(self.nvars, self.prime, i, power, coeff)

    def var(self, i: int, power: int = 1, coeff: int = 1) -> Polynomial:
        return Polynomial.variable(self.nvars, self.prime, i, power, coeff)

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> Polynomial:
        return Polynomial.monomial(self.nvars, self.prime, exps, coeff)

    def maximal_ideal(self) -> tuple:
        """Generators of the ideal of all variables."""
        return tuple(self.var(i) for i in range(self.nvars))

    def check_member(self, f: Polynomial) -> None:
        if f.nvars != self.nvars or f.p != self.prime:
            raise StructureError("polynomial does not belong to this ring")

    def monomial_quotient(self):
        """Exponent tuples of the quotient relations if all are single terms,
        else None.  Enables the fast truncated-length path."""
        out = []
        for r in self.quotient_relations:
            if len(r.items) != 1:
                return None
            out.append(r.items[0][0])
        return tuple(out)

    def with_prime(self, prime: int) -> "RingSpec":
        rels = tuple(
            Polynomial(self.nvars, prime, r.items) for r in self.quotient_relations
        )
        return RingSpec(FieldSpec(prime), self.variables, rels, self.dvr_proxy_variable)

    def describe(self) -> dict:
        return {
            "prime": self.prime,
            "variables": list(self.variables),
            "quotient_relations": [r.to_string(self.variables) for r in self.quotient_relations],
            "dvr_proxy_variable": self.dvr_proxy_variable,
        }
