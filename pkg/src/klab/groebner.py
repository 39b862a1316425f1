"""Buchberger's algorithm for submodules of free modules over the polynomial
ring, with division/lifting and syzygy extraction by elimination.

The module order is position-over-term, lower index first, refining grevlex
within a component.  Kernels and syzygies are computed by adjoining tracking
components below the target block and cutting the Groebner basis at the
elements whose target part vanished; quotient rings never appear directly,
callers encode R = S/(q) by augmenting the target with relation columns.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .ring import Polynomial, RingSpec, StructureError, grevlex_key


def _pot_key(comp: int, exps) -> tuple:
    # bigger tuple = bigger term; lower component wins, then grevlex
    return (-comp, sum(exps), tuple(-e for e in reversed(exps)))


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


class FreeModuleElement:
    """Element of a free module S^rank with canonical sorted terms.

    Terms are (component, exponent tuple, coefficient) triples sorted in
    descending position-over-term grevlex order.
    """

    __slots__ = ("rank", "nvars", "p", "terms")

    def __init__(self, rank: int, nvars: int, p: int, terms, _canonical=False):
        self.rank = rank
        self.nvars = nvars
        self.p = p
        if _canonical:
            self.terms = terms
            return
        acc: dict = {}
        for comp, exps, c in terms:
            if not 0 <= comp < rank:
                raise StructureError("component out of range")
            exps = tuple(exps)
            if len(exps) != nvars:
                raise StructureError("wrong variable count")
            key = (comp, exps)
            v = (acc.get(key, 0) + c) % p
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)
        self.terms = tuple(
            sorted(((k[0], k[1], v) for k, v in acc.items()),
                   key=lambda t: _pot_key(t[0], t[1]), reverse=True)
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_polys(cls, polys: Sequence[Polynomial]) -> "FreeModuleElement":
        if not polys:
            raise StructureError("empty component list")
        nvars, p = polys[0].nvars, polys[0].p
        terms = []
        for i, f in enumerate(polys):
            if f.nvars != nvars or f.p != p:
                raise StructureError("components from different rings")
            for e, c in f.items:
                terms.append((i, e, c))
        return cls(len(polys), nvars, p, terms)

    @classmethod
    def zero(cls, rank: int, nvars: int, p: int) -> "FreeModuleElement":
        return cls(rank, nvars, p, (), _canonical=True)

    @classmethod
    def unit(cls, rank: int, nvars: int, p: int, comp: int) -> "FreeModuleElement":
        return cls(rank, nvars, p, ((comp, (0,) * nvars, 1),), _canonical=True)

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FreeModuleElement) and self.rank == other.rank
                and self.nvars == other.nvars and self.p == other.p
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.rank, self.terms))

    def lead(self):
        """(component, exps, coeff) of the leading term, or None."""
        return self.terms[0] if self.terms else None

    def lm(self):
        t = self.terms[0] if self.terms else None
        return (t[0], t[1]) if t else None

    def component(self, i: int) -> Polynomial:
        return Polynomial(self.nvars, self.p,
                          tuple((e, c) for comp, e, c in self.terms if comp == i))

    def components(self) -> tuple:
        return tuple(self.component(i) for i in range(self.rank))

    def max_degree(self) -> int:
        return max((sum(e) for _, e, _ in self.terms), default=-1)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "FreeModuleElement") -> None:
        if (self.rank, self.nvars, self.p) != (other.rank, other.nvars, other.p):
            raise StructureError("free module elements of different shapes")

    def __add__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        self._check(other)
        acc = {(c, e): v for c, e, v in self.terms}
        p = self.p
        for c, e, v in other.terms:
            key = (c, e)
            w = (acc.get(key, 0) + v) % p
            if w:
                acc[key] = w
            else:
                acc.pop(key, None)
        return FreeModuleElement(self.rank, self.nvars, p,
                                 ((c, e, v) for (c, e), v in acc.items()))

    def __neg__(self) -> "FreeModuleElement":
        p = self.p
        return FreeModuleElement(self.rank, self.nvars, p,
                                 tuple((c, e, p - v) for c, e, v in self.terms),
                                 _canonical=True)

    def __sub__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        return self + (-other)

    def scale(self, c: int) -> "FreeModuleElement":
        c %= self.p
        if not c:
            return FreeModuleElement.zero(self.rank, self.nvars, self.p)
        p = self.p
        return FreeModuleElement(self.rank, self.nvars, p,
                                 tuple((cc, e, (v * c) % p) for cc, e, v in self.terms),
                                 _canonical=True)

    def mul_term(self, exps, coeff: int = 1) -> "FreeModuleElement":
        coeff %= self.p
        if not coeff:
            return FreeModuleElement.zero(self.rank, self.nvars, self.p)
        p = self.p
        out = tuple((c, tuple(a + b for a, b in zip(e, exps)), (v * coeff) % p)
                    for c, e, v in self.terms)
        return FreeModuleElement(self.rank, self.nvars, p, out, _canonical=True)

    def mul_poly(self, f: Polynomial) -> "FreeModuleElement":
        if f.nvars != self.nvars or f.p != self.p:
            raise StructureError("polynomial from a different ring")
        acc: dict = {}
        p = self.p
        for c, e, v in self.terms:
            for fe, fc in f.items:
                key = (c, tuple(a + b for a, b in zip(e, fe)))
                w = (acc.get(key, 0) + v * fc) % p
                if w:
                    acc[key] = w
                else:
                    acc.pop(key, None)
        return FreeModuleElement(self.rank, self.nvars, p,
                                 ((c, e, v) for (c, e), v in acc.items()))

    def monic(self) -> "FreeModuleElement":
        lead = self.lead()
        if lead is None or lead[2] == 1:
            return self
        return self.scale(pow(lead[2], -1, self.p))

    # -- reshaping ----------------------------------------------------------

    def embed(self, new_rank: int, offset: int) -> "FreeModuleElement":
        return FreeModuleElement(new_rank, self.nvars, self.p,
                                 tuple((c + offset, e, v) for c, e, v in self.terms),
                                 _canonical=True)

    def restrict(self, lo: int, hi: int) -> "FreeModuleElement":
        """Project to components [lo, hi), re-indexed from 0."""
        return FreeModuleElement(hi - lo, self.nvars, self.p,
                                 tuple((c - lo, e, v) for c, e, v in self.terms
                                       if lo <= c < hi), _canonical=True)

    def drop_component(self, comp: int) -> "FreeModuleElement":
        terms = tuple((c if c < comp else c - 1, e, v)
                      for c, e, v in self.terms if c != comp)
        return FreeModuleElement(self.rank - 1, self.nvars, self.p, terms,
                                 _canonical=True)

    def __repr__(self) -> str:
        if not self.terms:
            return "FME(0)"
        bits = []
        for c, e, v in self.terms[:8]:
            bits.append(f"{v}*x^{e}*e{c}")
        more = "..." if len(self.terms) > 8 else ""
        return f"FME({' + '.join(bits)}{more})"


def element_from_polys(polys: Sequence[Polynomial]) -> FreeModuleElement:
    return FreeModuleElement.from_polys(polys)


# ---------------------------------------------------------------------------
# division


def divide(v: FreeModuleElement, basis: Sequence[FreeModuleElement],
           want_quotients: bool = False):
    """Full division: returns (remainder, quotients).

    No term of the remainder is divisible by any basis leading term; the
    identity v = sum(q_i * basis_i) + remainder holds exactly.  Quotients are
    returned as {exps: coeff} dicts (None when not requested).
    """
    if not v:
        return v, ([{} for _ in basis] if want_quotients else None)
    p = v.p
    work = {(c, e): val for c, e, val in v.terms}
    rem: dict = {}
    quotients = [{} for _ in basis] if want_quotients else None
    by_comp: dict = {}
    for i, b in enumerate(basis):
        lead = b.lead()
        if lead is None:
            continue
        by_comp.setdefault(lead[0], []).append((i, lead[1], b))
    while work:
        key = max(work, key=lambda k: _pot_key(k[0], k[1]))
        comp, exps = key
        c = work.pop(key)
        hit = None
        for i, lexps, b in by_comp.get(comp, ()):
            if _divides(lexps, exps):
                hit = (i, lexps, b)
                break
        if hit is None:
            rem[key] = c
            continue
        i, lexps, b = hit
        u = tuple(a - bb for a, bb in zip(exps, lexps))
        # basis elements are monic, so the multiplier is just c
        if want_quotients:
            quotients[i][u] = (quotients[i].get(u, 0) + c) % p
        work[key] = c  # restore so the subtraction cancels it
        for bc, be, bv in b.terms:
            k2 = (bc, tuple(a + bb for a, bb in zip(be, u)))
            w = (work.get(k2, 0) - c * bv) % p
            if w:
                work[k2] = w
            else:
                work.pop(k2, None)
    remainder = FreeModuleElement(v.rank, v.nvars, p,
                                  ((c, e, val) for (c, e), val in rem.items()))
    return remainder, quotients


# ---------------------------------------------------------------------------
# Groebner bases


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis; deterministic for a fixed input order."""

    ambient_rank: int
    order: str
    elements: tuple
    origin: tuple
    exprs: Optional[tuple] = None  # exprs[i][j]: coefficient of origin[j] in elements[i]

    def reduce(self, v: FreeModuleElement) -> FreeModuleElement:
        rem, _ = divide(v, self.elements)
        return rem

    def contains(self, v: FreeModuleElement) -> bool:
        return self.reduce(v).is_zero()


def _spair(f: FreeModuleElement, g: FreeModuleElement):
    lf, lg = f.lead(), g.lead()
    if lf[0] != lg[0]:
        return None
    lcm = tuple(max(a, b) for a, b in zip(lf[1], lg[1]))
    uf = tuple(a - b for a, b in zip(lcm, lf[1]))
    ug = tuple(a - b for a, b in zip(lcm, lg[1]))
    return f.mul_term(uf) - g.mul_term(ug), lcm, uf, ug


def _single_component(f: FreeModuleElement) -> bool:
    comps = {c for c, _, _ in f.terms}
    return len(comps) == 1


def buchberger(gens: Sequence[FreeModuleElement], ring: Optional[RingSpec] = None,
               *, track: bool = False, use_criteria: bool = True,
               interreduce: bool = True) -> GroebnerBasis:
    """Buchberger's algorithm with the normal (lowest lcm degree) strategy.

    Quotient relations of the ring are NOT applied; callers append them as
    extra generators when they want a quotient-ring computation.  With
    `track=True` every basis element carries its exact expression in terms of
    the input generators.
    """
    gens = list(gens)
    if not gens:
        return GroebnerBasis(0, "pot-grevlex", (), ())
    rank, nvars, p = gens[0].rank, gens[0].nvars, gens[0].p
    for g in gens:
        if (g.rank, g.nvars, g.p) != (rank, nvars, p):
            raise StructureError("generators of mixed shapes")
        if ring is not None and (g.nvars != ring.nvars or g.p != ring.prime):
            raise StructureError("generators do not match the ring")

    basis = []
    exprs = []  # per basis element: list of {exps: coeff} over origin indices

    def expr_sub(e1, e2, u, c):
        # e1 -= c * x^u * e2
        for j, poly in enumerate(e2):
            if not poly:
                continue
            target = e1[j]
            for ee, cc in poly.items():
                k = tuple(a + b for a, b in zip(ee, u))
                w = (target.get(k, 0) - c * cc) % p
                if w:
                    target[k] = w
                else:
                    target.pop(k, None)

    def expr_scale(e1, c):
        for poly in e1:
            for k in list(poly):
                poly[k] = (poly[k] * c) % p

    def reduce_full(v, vexpr):
        # full division against the current basis, updating vexpr in place
        work = {(c, e): val for c, e, val in v.terms}
        rem = {}
        while work:
            key = max(work, key=lambda k: _pot_key(k[0], k[1]))
            comp, exps = key
            c = work[key]
            hit = None
            for bi, b in enumerate(basis):
                lead = b.lead()
                if lead[0] == comp and _divides(lead[1], exps):
                    hit = (bi, b)
                    break
            if hit is None:
                rem[key] = work.pop(key)
                continue
            bi, b = hit
            u = tuple(a - bb for a, bb in zip(exps, b.lead()[1]))
            for bc, be, bv in b.terms:
                k2 = (bc, tuple(a + bb for a, bb in zip(be, u)))
                w = (work.get(k2, 0) - c * bv) % p
                if w:
                    work[k2] = w
                else:
                    work.pop(k2, None)
            if vexpr is not None:
                expr_sub(vexpr, exprs[bi], u, c)
        return FreeModuleElement(rank, nvars, p,
                                 ((ky[0], ky[1], val) for ky, val in rem.items()))

    pairs = []
    counter = itertools.count()
    done = set()

    def push_pairs(new_idx):
        lead = basis[new_idx].lead()
        for i in range(new_idx):
            li = basis[i].lead()
            if li[0] != lead[0]:
                continue
            lcm = tuple(max(a, b) for a, b in zip(li[1], lead[1]))
            heapq.heappush(pairs, (sum(lcm), next(counter), i, new_idx, lcm))

    def add_element(v, vexpr):
        # callers pass v already monic with vexpr scaled to match
        basis.append(v)
        exprs.append(vexpr)
        push_pairs(len(basis) - 1)

    for j, g in enumerate(gens):
        if g.is_zero():
            continue
        gexpr = None
        if track:
            gexpr = [dict() for _ in gens]
            gexpr[j][(0,) * nvars] = 1
        lead = g.lead()
        if lead[2] != 1:
            inv = pow(lead[2], -1, p)
            g = g.scale(inv)
            if track:
                expr_scale(gexpr, inv)
        red = reduce_full(g, gexpr)
        if red.is_zero():
            continue
        lead = red.lead()
        if lead[2] != 1:
            inv = pow(lead[2], -1, p)
            red = red.scale(inv)
            if track:
                expr_scale(gexpr, inv)
        add_element(red, gexpr)

    while pairs:
        _, _, i, j, lcm = heapq.heappop(pairs)
        key = (i, j)
        if key in done:
            continue
        fi, fj = basis[i], basis[j]
        li, lj = fi.lead(), fj.lead()
        if use_criteria:
            # product criterion: only valid when both elements live entirely
            # in one shared component
            if (_single_component(fi) and _single_component(fj)
                    and all(a == 0 or b == 0 for a, b in zip(li[1], lj[1]))):
                done.add(key)
                continue
            # chain criterion
            skip = False
            for k, fk in enumerate(basis):
                if k in (i, j):
                    continue
                lk = fk.lead()
                if lk[0] != li[0] or not _divides(lk[1], lcm):
                    continue
                a = (min(i, k), max(i, k))
                b = (min(j, k), max(j, k))
                if a in done and b in done:
                    skip = True
                    break
            if skip:
                done.add(key)
                continue
        done.add(key)
        sp = _spair(fi, fj)
        if sp is None:
            continue
        s, _, uf, ug = sp
        if s.is_zero():
            continue
        sexpr = None
        if track:
            sexpr = [dict() for _ in gens]
            expr_sub(sexpr, exprs[i], uf, p - 1)   # += x^uf * expr_i
            expr_sub(sexpr, exprs[j], ug, 1)       # -= x^ug * expr_j
        red = reduce_full(s, sexpr)
        if red.is_zero():
            continue
        lead = red.lead()
        if lead[2] != 1:
            inv = pow(lead[2], -1, p)
            red = red.scale(inv)
            if track:
                expr_scale(sexpr, inv)
        add_element(red, sexpr)

    # minimalize: drop elements whose lead is divisible by another lead
    keep = []
    for i, b in enumerate(basis):
        li = b.lead()
        dominated = False
        for j, other in enumerate(basis):
            if i == j:
                continue
            lj = other.lead()
            if lj[0] == li[0] and _divides(lj[1], li[1]):
                if lj[1] != li[1] or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(i)
    basis = [basis[i] for i in keep]
    exprs = [exprs[i] for i in keep]

    if interreduce:
        # tail-reduce each element against the others
        changed = True
        while changed:
            changed = False
            for i in range(len(basis)):
                others = basis[:i] + basis[i + 1:]
                rem, q = divide(basis[i], others, want_quotients=track)
                if rem != basis[i]:
                    changed = True
                    if track:
                        oidx = list(range(i)) + list(range(i + 1, len(basis)))
                        for qi, qd in zip(oidx, q):
                            for u, c in qd.items():
                                expr_sub(exprs[i], exprs[qi], u, c)
                    basis[i] = rem.monic()

    order = sorted(range(len(basis)),
                   key=lambda i: _pot_key(*basis[i].lm()))
    basis = [basis[i] for i in order]
    exprs = [exprs[i] for i in order]

    expr_polys = None
    if track:
        expr_polys = tuple(
            tuple(Polynomial(nvars, p, d.items()) for d in e) for e in exprs
        )
    return GroebnerBasis(rank, "pot-grevlex", tuple(basis), tuple(gens), expr_polys)


def normal_form(v: FreeModuleElement, G: GroebnerBasis) -> FreeModuleElement:
    """Remainder of v on division by G; zero iff v lies in the submodule."""
    if G.elements and (v.rank != G.elements[0].rank or v.nvars != G.elements[0].nvars):
        raise StructureError("element does not match the basis")
    rem, _ = divide(v, G.elements)
    return rem


@dataclass(frozen=True)
class LiftResult:
    ok: bool
    coefficients: Optional[tuple] = None   # Polynomials, one per generator
    remainder: Optional[FreeModuleElement] = None


def lift_through(v: FreeModuleElement, gens: Sequence[FreeModuleElement],
                 G: GroebnerBasis) -> LiftResult:
    """Express v as an exact combination of `gens`, via the tracked basis G."""
    if G.exprs is None:
        raise StructureError("lift_through needs a basis computed with track=True")
    rem, quotients = divide(v, G.elements, want_quotients=True)
    if not rem.is_zero():
        return LiftResult(False, remainder=rem)
    nvars, p = v.nvars, v.p
    coeffs = [dict() for _ in gens]
    for qd, elem_expr in zip(quotients, G.exprs):
        if not qd:
            continue
        for j, poly in enumerate(elem_expr):
            if poly.is_zero():
                continue
            acc = coeffs[j]
            for u, c in qd.items():
                for ee, cc in poly.items:
                    k = tuple(a + b for a, b in zip(ee, u))
                    w = (acc.get(k, 0) + c * cc) % p
                    if w:
                        acc[k] = w
                    else:
                        acc.pop(k, None)
    return LiftResult(True, tuple(Polynomial(nvars, p, d.items()) for d in coeffs))


# ---------------------------------------------------------------------------
# kernels and syzygies by elimination


@dataclass(frozen=True)
class SyzygyMatrix:
    """Columns generating the syzygy module of the input generators."""

    source_rank: int
    columns: tuple

    def __iter__(self):
        return iter(self.columns)


def _as_columns(A, source_rank: Optional[int], target_rank: Optional[int],
                ring: RingSpec):
    """Accept either a list of FreeModuleElement columns or a row-major matrix
    of Polynomial entries (target_rank rows by source_rank columns)."""
    A = list(A)
    if A and isinstance(A[0], FreeModuleElement):
        cols = A
        t = cols[0].rank
        return cols, len(cols), t
    rows = [list(r) for r in A]
    t = len(rows) if target_rank is None else target_rank
    s = len(rows[0]) if rows else (source_rank or 0)
    nvars, p = ring.nvars, ring.prime
    cols = []
    for j in range(s):
        cols.append(FreeModuleElement.from_polys(
            [rows[i][j] if rows else Polynomial.zero(nvars, p) for i in range(t)]))
    return cols, s, t


def kernel_of_map(A, source_rank: Optional[int] = None,
                  target_rank: Optional[int] = None, ring: Optional[RingSpec] = None,
                  target_relations: Sequence[FreeModuleElement] = (),
                  fold_quotient: bool = True) -> tuple:
    """Generators of {v : A v = 0 over the quotient ring}.

    The map goes S^source -> S^target / (target_relations + quotient
    relations); relation columns are adjoined on the target and the syzygies
    are projected back onto the original source coordinates.
    """
    if ring is None:
        raise StructureError("kernel_of_map needs the ring")
    cols, s, t = _as_columns(A, source_rank, target_rank, ring)
    nvars, p = ring.nvars, ring.prime
    rels = list(target_relations)
    if fold_quotient:
        for q in ring.quotient_relations:
            for i in range(t):
                rels.append(FreeModuleElement(
                    t, nvars, p, tuple((i, e, c) for e, c in q.items)))
    ext_rank = t + s + len(rels)
    ext_gens = []
    for j, col in enumerate(cols):
        if col.rank != t:
            raise StructureError("column rank does not match the target")
        ext_gens.append(col.embed(ext_rank, 0) +
                        FreeModuleElement.unit(ext_rank, nvars, p, t + j))
    for k, rel in enumerate(rels):
        ext_gens.append(rel.embed(ext_rank, 0) +
                        FreeModuleElement.unit(ext_rank, nvars, p, t + s + k))
    G = buchberger(ext_gens, ring, use_criteria=True)
    out = []
    seen = set()
    for g in G.elements:
        if g.terms and g.terms[0][0] >= t:  # leading term below the target block
            proj = g.restrict(t, t + s)
            if proj and proj.terms not in seen:
                seen.add(proj.terms)
                out.append(proj.monic())
    out.sort(key=lambda v: _pot_key(*v.lm()), reverse=True)
    return tuple(out)


def syzygies(gens: Sequence[FreeModuleElement], ring: RingSpec,
             fold_quotient: bool = True) -> SyzygyMatrix:
    """Columns generating the full syzygy module of `gens` over the ring
    (over its quotient when it has relations and fold_quotient is set)."""
    gens = list(gens)
    if not gens:
        return SyzygyMatrix(0, ())
    cols = kernel_of_map(gens, ring=ring, fold_quotient=fold_quotient)
    return SyzygyMatrix(len(gens), cols)


def apply_columns(cols: Sequence[FreeModuleElement],
                  vector: FreeModuleElement) -> FreeModuleElement:
    """Evaluate the map with the given columns on a source vector."""
    if not cols:
        raise StructureError("no columns")
    t = cols[0].rank
    nvars, p = cols[0].nvars, cols[0].p
    out = FreeModuleElement.zero(t, nvars, p)
    for j, col in enumerate(cols):
        cj = vector.component(j)
        if cj:
            out = out + col.mul_poly(cj)
    return out
