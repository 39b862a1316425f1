"""Finitely presented modules over the ambient polynomial ring.

A presentation is a free cover S^rank together with relation columns; ring
quotient relations are always folded into the relations so the presentation
is honest over the polynomial ring itself.  Ext groups are taken against the
ambient ring S, which is how finite length of local cohomology is decided
(via local duality over the regular ambient ring).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .ring import Polynomial, RingSpec, StructureError
from .groebner import (FreeModuleElement, GroebnerBasis, SyzygyMatrix,
                       buchberger, divide, kernel_of_map, lift_through,
                       normal_form, syzygies, _pot_key)


class InconsistencyError(Exception):
    """An invariant that should hold by construction failed upstream."""


@dataclass(frozen=True)
class ModulePresentation:
    """coker of the relation columns inside S^ambient_rank.

    `ideal_image`, when nonempty, records that the module is isomorphic to
    the ideal generated by those polynomials via e_i -> ideal_image[i];
    length computations may exploit the isomorphism.
    """

    ring: RingSpec
    ambient_rank: int
    relations: tuple
    label: str = ""
    ideal_image: tuple = ()

    def __post_init__(self) -> None:
        rels = tuple(r for r in self.relations if not r.is_zero())
        object.__setattr__(self, "relations", rels)
        for r in rels:
            if not isinstance(r, FreeModuleElement):
                raise StructureError("relations must be FreeModuleElements")
            if r.rank != self.ambient_rank:
                raise StructureError("relation rank does not match the presentation")
            if r.nvars != self.ring.nvars or r.p != self.ring.prime:
                raise StructureError("relation does not match the ring")
        if self.ideal_image and len(self.ideal_image) != self.ambient_rank:
            raise StructureError("ideal_image must list one polynomial per generator")

    def relation_matrix(self):
        """Rows of polynomials, ambient_rank x len(relations)."""
        return [
            [col.component(i) for col in self.relations]
            for i in range(self.ambient_rank)
        ]

    def describe(self) -> dict:
        return {
            "label": self.label,
            "ambient_rank": self.ambient_rank,
            "relations": len(self.relations),
        }


def _quotient_columns(ring: RingSpec, rank: int):
    cols = []
    for q in ring.quotient_relations:
        for i in range(rank):
            cols.append(FreeModuleElement(
                rank, ring.nvars, ring.prime,
                tuple((i, e, c) for e, c in q.items)))
    return cols


def quotient_presentation(J: Sequence[Polynomial], ring: RingSpec,
                          label: str = "") -> ModulePresentation:
    """Presentation of R/(J) as a rank-1 cokernel over S."""
    rels = []
    for f in J:
        ring.check_member(f)
        if f:
            rels.append(FreeModuleElement.from_polys([f]))
    rels.extend(_quotient_columns(ring, 1))
    return ModulePresentation(ring, 1, tuple(rels), label or "quotient")


def present_ideal_module(gens: Sequence[Polynomial], ring: RingSpec,
                         label: str = "") -> ModulePresentation:
    """The ideal (gens)R as a module: generators with their syzygies over R."""
    gens = [g for g in gens]
    if not gens:
        raise StructureError("present_ideal_module needs at least one generator")
    for g in gens:
        ring.check_member(g)
    cols = [FreeModuleElement.from_polys([g]) for g in gens]
    syz = syzygies(cols, ring, fold_quotient=True)
    rels = list(syz.columns) + _quotient_columns(ring, len(gens))
    return ModulePresentation(ring, len(gens), tuple(rels),
                              label or "ideal-module", ideal_image=tuple(gens))


def free_module_presentation(ring: RingSpec, rank: int,
                             label: str = "") -> ModulePresentation:
    rels = _quotient_columns(ring, rank)
    return ModulePresentation(ring, rank, tuple(rels), label or f"free-{rank}")


def direct_sum(a: ModulePresentation, b: ModulePresentation,
               label: str = "") -> ModulePresentation:
    if a.ring != b.ring:
        raise StructureError("direct sum over different rings")
    rank = a.ambient_rank + b.ambient_rank
    rels = [r.embed(rank, 0) for r in a.relations]
    rels += [r.embed(rank, a.ambient_rank) for r in b.relations]
    return ModulePresentation(a.ring, rank, tuple(rels),
                              label or f"{a.label}(+){b.label}")


def tensor_quotient(P: ModulePresentation, gens: Sequence[Polynomial],
                    label: str = "") -> ModulePresentation:
    """P/(gens)P: adjoin g*e_i for every generator and ambient index."""
    ring = P.ring
    rels = list(P.relations)
    for g in gens:
        ring.check_member(g)
        if not g:
            continue
        for i in range(P.ambient_rank):
            rels.append(FreeModuleElement(
                P.ambient_rank, ring.nvars, ring.prime,
                tuple((i, e, c) for e, c in g.items)))
    return ModulePresentation(ring, P.ambient_rank, tuple(rels),
                              label or (P.label + "/(I)"))


def _monomial_image_applicable(P: ModulePresentation) -> bool:
    image = P.ideal_image
    return bool(image) and all(len(g.items) == 1 for g in image) \
        and P.ring.monomial_quotient() is not None


def _ideal_quotient_difference(P: ModulePresentation, J, J_cert, J_monomials,
                               cap: int):
    """l(M/JM) = dim S/(JM + m^T) - dim S/(M + m^T) for monomial-image M.

    Valid once m^(T - maxdeg) lies in J locally: then the intersection of the
    monomial ideal M with m^T lies inside JM, so the short exact sequence
    0 -> (M + m^T)/(JM + m^T) -> S/(JM + m^T) -> S/(M + m^T) -> 0 has left
    term exactly M/JM.  The inclusion comes from the colength certificate of
    J (Nakayama), everything else is monomial bookkeeping.
    """
    from .linalg import dim_quotient_at

    ring = P.ring
    image = P.ideal_image
    dmax = max(g.degree() for g in image)
    T = J_cert.truncation_degree + dmax
    if T > cap:
        return None
    JM = []
    for f in J:
        for g in image:
            h = (f * g).truncate(T)
            if h:
                JM.append(h)
    image_exps = [g.items[0][0] for g in image]
    seeds = []
    for s in J_monomials:
        for e in image_exps:
            seeds.append(tuple(a + b for a, b in zip(s, e)))
    big = dim_quotient_at(JM, ring, T, extra_monomials=seeds)
    small = dim_quotient_at(list(image), ring, T)
    return big - small


def ideal_module_quotient_length(P: ModulePresentation,
                                 J: Sequence[Polynomial], cap: int = 4096):
    """Exact l(M/JM) when P is an ideal module with monomial generators.

    Returns None when the hypotheses do not apply or J does not certify.
    """
    from .linalg import local_colength

    if not _monomial_image_applicable(P):
        return None
    J = [g for g in J if g]
    cert = local_colength(J, P.ring, cap=cap)
    if not cert.certified:
        return None
    return _ideal_quotient_difference(P, J, cert, (), cap)


def ideal_module_power_length(P: ModulePresentation, I: Sequence[Polynomial],
                              k: int, cap: int = 4096):
    """Exact l(M/I^k M) for a monomial-image ideal module, seeded by the
    monomial content of the base ideal so deep powers stay tractable."""
    from .linalg import power_colength

    if not _monomial_image_applicable(P):
        return None
    cert, prods, seeds = power_colength([g for g in I if g], k, P.ring, cap=cap)
    if not cert.certified:
        return None
    return _ideal_quotient_difference(P, prods, cert, seeds, cap)


# ---------------------------------------------------------------------------
# minimization


def _unit_entry(col: FreeModuleElement):
    """(component, inverse of the constant) for an exact-constant entry.

    Only honest units of S qualify, i.e. entries that are nonzero constants;
    locally invertible entries with higher terms are left alone.
    """
    by_comp = {}
    for c, e, v in col.terms:
        by_comp.setdefault(c, []).append((e, v))
    for c, terms in by_comp.items():
        if len(terms) == 1 and not any(terms[0][0]):
            return c, terms[0][1]
    return None


def minimize_presentation(P: ModulePresentation) -> ModulePresentation:
    """Eliminate generators via relations with an exact unit entry.

    Dropping generator i against relation column j with unit entry u keeps
    the cokernel: every other relation has its i-th entry cleared with
    column j first, then coordinate i and column j are removed.
    """
    rank = P.ambient_rank
    cols = [c for c in P.relations]
    changed = True
    while changed and rank > 0:
        changed = False
        for j, col in enumerate(cols):
            hit = _unit_entry(col)
            if hit is None:
                continue
            comp, unit = hit
            inv = pow(unit, -1, P.ring.prime)
            new_cols = []
            for k, other in enumerate(cols):
                if k == j:
                    continue
                entry = other.component(comp)
                if entry:
                    other = other - col.mul_poly(entry.scale(inv))
                new_cols.append(other.drop_component(comp))
            cols = new_cols
            rank -= 1
            changed = True
            break
    seen = set()
    uniq = []
    for c in cols:
        if c.is_zero() or c.terms in seen:
            continue
        seen.add(c.terms)
        uniq.append(c.monic())
    uniq.sort(key=lambda v: _pot_key(*v.lm()), reverse=True)
    return ModulePresentation(P.ring, rank, tuple(uniq), P.label)


# ---------------------------------------------------------------------------
# resolutions and Ext


@dataclass(frozen=True)
class FreeResolution:
    """F_0 <- F_1 <- ... with coker(F_1 -> F_0) the presented module.

    matrices[k] holds the columns of the map F_{k+1} -> F_k; ranks lists the
    ranks of F_0, F_1, ...  Matrices are pruned: a syzygy column with an exact
    unit entry removes the corresponding redundant generator one level down.
    """

    presentation: ModulePresentation
    matrices: tuple
    ranks: tuple

    def matrix(self, k: int):
        return self.matrices[k - 1] if k - 1 < len(self.matrices) else ()


def _prune_step(B: list, K: list, ring: RingSpec):
    """Remove redundant columns of B using unit entries of K (= syz(B)).

    If K has a column j with an exact unit at row i, then B's column i is a
    combination of the others; clearing row i in the other K-columns and then
    deleting row i and column j yields generators of syz(B without column i).
    """
    p = ring.prime
    changed = True
    while changed:
        changed = False
        for j, col in enumerate(K):
            hit = _unit_entry(col)
            if hit is None:
                continue
            i, unit = hit
            inv = pow(unit, -1, p)
            newK = []
            for k, other in enumerate(K):
                if k == j:
                    continue
                entry = other.component(i)
                if entry:
                    other = other - col.mul_poly(entry.scale(inv))
                newK.append(other.drop_component(i))
            K = newK
            del B[i]
            changed = True
            break
    return B, [c for c in K if not c.is_zero()]


def free_resolution(P: ModulePresentation, length: int) -> FreeResolution:
    """Resolve by iterated syzygies over S (quotient relations live inside P)."""
    if length < 1:
        raise StructureError("length must be >= 1")
    ring = P.ring
    mats = []
    ranks = [P.ambient_rank]
    B = [c for c in P.relations]
    for _ in range(length):
        if not B:
            mats.append(())
            ranks.append(0)
            B = []
            continue
        K = list(syzygies(B, ring, fold_quotient=False).columns)
        B, K = _prune_step(B, K, ring)
        mats.append(tuple(B))
        ranks.append(len(B))
        B = K
    return FreeResolution(P, tuple(mats), tuple(ranks))


def _transpose(cols: Sequence[FreeModuleElement], source_rank: int,
               ring: RingSpec):
    """Columns of the dual map: row r of the matrix becomes dual column r."""
    nvars, p = ring.nvars, ring.prime
    ncols = len(cols)
    out = []
    for r in range(source_rank):
        terms = []
        for j, col in enumerate(cols):
            for c, e, v in col.terms:
                if c == r:
                    terms.append((j, e, v))
        out.append(FreeModuleElement(ncols, nvars, p, terms))
    return out


def subquotient_presentation(kernel_gens: Sequence[FreeModuleElement],
                             image_gens: Sequence[FreeModuleElement],
                             ring: RingSpec,
                             label: str = "") -> ModulePresentation:
    """Present ker/im: generators are the kernel generators, relations are the
    lifts of the image generators through them plus their syzygies over S.

    A lift failure means the image is not inside the kernel, which signals a
    bug upstream, so it raises instead of returning.
    """
    kernel_gens = [k for k in kernel_gens if not k.is_zero()]
    if not kernel_gens:
        for im in image_gens:
            if not im.is_zero():
                raise InconsistencyError("nonzero image with zero kernel")
        return ModulePresentation(ring, 0, (), label or "zero")
    G = buchberger(kernel_gens, ring, track=True)
    rels = []
    for im in image_gens:
        if im.is_zero():
            continue
        lift = lift_through(im, kernel_gens, G)
        if not lift.ok:
            raise InconsistencyError(
                "image generator does not lie in the kernel span")
        rels.append(FreeModuleElement.from_polys(list(lift.coefficients)))
    rels.extend(syzygies(kernel_gens, ring, fold_quotient=False).columns)
    return ModulePresentation(ring, len(kernel_gens), tuple(rels),
                              label or "subquotient")


def ext_module(P: ModulePresentation, j: int) -> ModulePresentation:
    """Ext^j over the ambient polynomial ring S, as a presentation.

    Dualizes a free resolution of P (transposed matrices) and takes homology
    at position j.  The quotient relations of the ring stay folded inside P;
    the dualizing side is always the plain polynomial ring.
    """
    ring = P.ring
    D = ring.nvars
    if not 0 <= j <= D:
        raise StructureError(f"cohomological index {j} out of range 0..{D}")
    res = free_resolution(P, j + 1)
    ranks = res.ranks
    rank_j = ranks[j] if j < len(ranks) else 0
    if rank_j == 0:
        return ModulePresentation(ring, 0, (), f"Ext^{j}({P.label})")
    mat_next = res.matrix(j + 1)  # F_{j+1} -> F_j
    mat_prev = res.matrix(j) if j >= 1 else ()
    dual_next = _transpose(mat_next, rank_j, ring) if mat_next else []
    if dual_next:
        kernel = kernel_of_map(dual_next, ring=ring, fold_quotient=False)
    else:
        kernel = tuple(FreeModuleElement.unit(rank_j, ring.nvars, ring.prime, i)
                       for i in range(rank_j))
    if j >= 1 and mat_prev:
        rank_prev = ranks[j - 1]
        image = _transpose(mat_prev, rank_prev, ring)
        image = [c for c in _as_rank(image, rank_j)]
    else:
        image = []
    pres = subquotient_presentation(kernel, image, ring,
                                    label=f"Ext^{j}({P.label})")
    return minimize_presentation(pres)


def _as_rank(cols, rank):
    for c in cols:
        if c.rank != rank:
            raise InconsistencyError("dual matrix rank mismatch")
        yield c


# ---------------------------------------------------------------------------
# support dimension via Fitting ideals


@dataclass(frozen=True)
class SupportDim:
    """Krull dimension of the support; status is "exact" or "delegated"."""

    value: Optional[int]
    status: str
    detail: str = ""

    def to_json(self) -> dict:
        return {"value": self.value, "status": self.status, "detail": self.detail}


def _det(matrix, ring: RingSpec) -> Polynomial:
    n = len(matrix)
    if n == 0:
        return ring.one()
    if n == 1:
        return matrix[0][0]
    cache = {}

    def rec(rows: tuple, cols: tuple) -> Polynomial:
        if len(rows) == 1:
            return matrix[rows[0]][cols[0]]
        key = (rows, cols)
        got = cache.get(key)
        if got is not None:
            return got
        total = ring.zero()
        r = rows[0]
        rest = rows[1:]
        for idx, c in enumerate(cols):
            entry = matrix[r][c]
            if entry.is_zero():
                continue
            sub = rec(rest, cols[:idx] + cols[idx + 1:])
            term = entry * sub
            total = total + (term if idx % 2 == 0 else -term)
        cache[key] = total
        return total

    return rec(tuple(range(n)), tuple(range(n)))


def _monomial_ideal_dimension(lead_exps, nvars: int) -> int:
    """dim of S/(monomial ideal): the largest variable subset meeting no
    generator's support entirely."""
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in lead_exps]
    if any(not s for s in supports):  # a unit generator: empty support
        return -1
    for size in range(nvars, -1, -1):
        for subset in itertools.combinations(range(nvars), size):
            sset = set(subset)
            if all(not s <= sset for s in supports):
                return size
    return 0


def support_dimension(P: ModulePresentation, minor_limit: int = 4000,
                      max_size: int = 6) -> SupportDim:
    """Krull dimension of Supp(P) via the 0-th Fitting ideal.

    sqrt(Fitt_0) = sqrt(Ann) for a finitely presented module, so the
    dimension of S/Fitt_0 is the dimension of the support.  Returns status
    "delegated" when the minor count is out of budget; the zero module gets
    dimension -1.
    """
    ring = P.ring
    r = P.ambient_rank
    if r == 0:
        return SupportDim(-1, "exact", "zero module")
    cols = P.relations
    k = len(cols)
    if k < r:
        return SupportDim(ring.nvars, "exact", "Fitting ideal is zero")
    from math import comb
    if r > max_size or comb(k, r) > minor_limit:
        return SupportDim(None, "delegated",
                          f"{comb(k, r) if r <= 30 else 'many'} minors of size {r}")
    matrix = P.relation_matrix()
    minors = []
    for subset in itertools.combinations(range(k), r):
        sub = [[matrix[i][j] for j in subset] for i in range(r)]
        d = _det(sub, ring)
        if d:
            minors.append(d)
    if not minors:
        return SupportDim(ring.nvars, "exact", "all maximal minors vanish")
    for m in minors:
        if m.is_constant():
            return SupportDim(-1, "exact", "Fitting ideal is the unit ideal")
    gb = buchberger([FreeModuleElement.from_polys([m]) for m in minors], ring)
    leads = [g.lm()[1] for g in gb.elements]
    if any(not any(e) for e in leads):
        return SupportDim(-1, "exact", "Fitting ideal is the unit ideal")
    dim = _monomial_ideal_dimension(leads, ring.nvars)
    return SupportDim(dim, "exact")


def ring_dimension(ring: RingSpec) -> int:
    """Krull dimension of the ring at the origin (ambient dim minus quotient)."""
    sd = support_dimension(quotient_presentation((), ring, "ring"))
    if sd.status != "exact" or sd.value is None:
        raise StructureError("could not compute the ring dimension exactly")
    return sd.value
