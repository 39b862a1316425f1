"""Koszul complexes on presented modules and exact lengths of their homology.

The complex is built with the standard exterior-algebra differentials; for a
presented module the free covers are block copies of the cover of M and the
relations ride along on every summand.  Homology is computed through honest
Groebner kernels: truncating the complex first is wrong for inner positions
(K(x; k[x]/x^N) picks up a spurious kernel), so kernels come first and
truncation only ever happens inside the final length computation.

Indexing: differentials are homological, K_d -> ... -> K_0, and cohomology is
read off as H^i = H_{d-i}, so H^d(f; M) = M/fM.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .ring import Polynomial, RingSpec, StructureError
from .groebner import FreeModuleElement, kernel_of_map
from .linalg import LengthCertificate, module_local_colength
from .modules import (InconsistencyError, ModulePresentation,
                      minimize_presentation, subquotient_presentation,
                      tensor_quotient)


@dataclass(frozen=True)
class KoszulComplex:
    """K(f_1,...,f_d; M) with homological differentials d_i: K_i -> K_{i-1}."""

    elements: tuple
    module: ModulePresentation
    differentials: tuple     # differentials[i-1] = columns of d_i
    ranks: tuple             # free-cover rank of K_0..K_d
    subsets: tuple           # index subsets labelling the blocks of each K_i

    @property
    def length(self) -> int:
        return len(self.elements)

    def block_relations(self, i: int) -> tuple:
        """The relation columns of M copied onto every block of K_i."""
        P = self.module
        nblocks = len(self.subsets[i])
        rank = self.ranks[i]
        out = []
        for b in range(nblocks):
            for rel in P.relations:
                out.append(rel.embed(rank, b * P.ambient_rank))
        return tuple(out)


def build_koszul(f: Sequence[Polynomial], P: ModulePresentation) -> KoszulComplex:
    """Assemble the Koszul complex of f on the presented module P.

    Sign convention: d(e_{j_1<...<j_i}) = sum_k (-1)^(k+1) f_{j_k} e_{...^j_k...}.
    """
    f = list(f)
    if not f:
        raise StructureError("need a nonempty element sequence")
    ring = P.ring
    for g in f:
        ring.check_member(g)
    d = len(f)
    r = P.ambient_rank
    nvars, p = ring.nvars, ring.prime
    subsets = [tuple(itertools.combinations(range(d), i)) for i in range(d + 1)]
    index = [
        {T: pos for pos, T in enumerate(level)} for level in subsets
    ]
    ranks = [len(level) * r for level in subsets]
    diffs = []
    for i in range(1, d + 1):
        cols = []
        for T in subsets[i]:
            for g in range(r):
                terms = []
                for k, j in enumerate(T):
                    face = T[:k] + T[k + 1:]
                    block = index[i - 1][face]
                    sign = 1 if k % 2 == 0 else p - 1
                    for e, c in f[j].items:
                        terms.append((block * r + g, e, (sign * c) % p))
                cols.append(FreeModuleElement(ranks[i - 1], nvars, p, terms))
        diffs.append(tuple(cols))
    return KoszulComplex(tuple(f), P, tuple(diffs), tuple(ranks), tuple(subsets))


def _standard_basis_elements(rank: int, ring: RingSpec):
    return tuple(FreeModuleElement.unit(rank, ring.nvars, ring.prime, i)
                 for i in range(rank))


def homology_presentation(K: KoszulComplex, i: int) -> ModulePresentation:
    """Presentation of the homological H_i = ker d_i / im d_{i+1} over S."""
    d = K.length
    if not 0 <= i <= d:
        raise StructureError(f"homological index {i} out of range 0..{d}")
    ring = K.module.ring
    if i == 0:
        kernel = _standard_basis_elements(K.ranks[0], ring)
    else:
        cols = K.differentials[i - 1]
        kernel = kernel_of_map(cols, ring=ring, fold_quotient=False,
                               target_relations=K.block_relations(i - 1))
    image = []
    if i < d:
        image.extend(K.differentials[i])
    image.extend(K.block_relations(i))
    pres = subquotient_presentation(kernel, image, ring,
                                    label=f"H_{i}(Koszul; {K.module.label})")
    return minimize_presentation(pres)


def koszul_homology_length(K: KoszulComplex, i: int, cap: int = 256,
                           start: Optional[int] = None) -> LengthCertificate:
    """Exact length of the homological H_i; cap_exceeded when not finite in range."""
    pres = homology_presentation(K, i)
    return module_local_colength(pres, cap=cap, start=start)


@dataclass(frozen=True)
class CohomologyProfile:
    """Lengths of H^0..H^d, reading H^i as H_{d-i}."""

    elements: tuple
    lengths: tuple                      # lengths[i] is a LengthCertificate for H^i
    top_cross_check: tuple              # (l(H^d) via homology, l(M/fM) direct)

    def length(self, i: int) -> LengthCertificate:
        return self.lengths[i]

    def to_json(self) -> dict:
        return {
            "lengths": [c.to_json() for c in self.lengths],
            "top_cross_check": list(self.top_cross_check),
        }


def koszul_cohomology_profile(f: Sequence[Polynomial], P: ModulePresentation,
                              cap: int = 256,
                              start: Optional[int] = None) -> CohomologyProfile:
    """Lengths of all Koszul cohomology modules of f on P.

    H^d is identified with M/fM; the identification is cross-checked against
    the direct colength of the quotient presentation and a mismatch raises.
    """
    K = build_koszul(f, P)
    d = K.length
    lengths = []
    for i in range(d + 1):
        lengths.append(koszul_homology_length(K, d - i, cap=cap, start=start))
    direct = module_local_colength(tensor_quotient(P, f), cap=cap, start=start)
    top = lengths[d]
    if top.certified and direct.certified and top.value != direct.value:
        raise InconsistencyError(
            f"H^d length {top.value} disagrees with l(M/fM) = {direct.value}")
    return CohomologyProfile(tuple(f), tuple(lengths), (top.value, direct.value))
