"""Paper-facing invariants: Hilbert-Samuel multiplicity, the Euler
characteristic identity for parameter ideals, Lech's inequality, local
cohomology finiteness profiles, certified asymptotic depth, the spectral
bound on Koszul cohomology lengths, and effaceability ratio tables.

Multiplicities come from d-th finite differences of k -> l(P/I^k P) with a
three-repeat stabilization rule; no asymptotic statement is ever asserted
from finitely many samples, only trends and certified finiteness verdicts.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence

from .ring import Polynomial, RingSpec, StructureError
from .linalg import (DEFAULT_CAP, GrowthEstimate, LengthCertificate,
                     growth_degree, local_colength, module_local_colength,
                     power_colength)
from .modules import (ModulePresentation, SupportDim, ext_module,
                      ideal_module_power_length, quotient_presentation,
                      ring_dimension, support_dimension, tensor_quotient)
from .koszul import build_koszul, koszul_homology_length


class PreconditionError(Exception):
    """An operation's stated hypothesis does not hold for the input."""


# ---------------------------------------------------------------------------
# Hilbert-Samuel multiplicity


@dataclass(frozen=True)
class MultiplicityEstimate:
    """Stabilized d-th finite difference of k -> l(P/I^k P)."""

    value: Optional[int]
    differences_window: tuple
    status: str                 # "stabilized" | "unstable"
    dimension: int
    colengths: tuple = ()

    def to_json(self) -> dict:
        return {"value": self.value, "status": self.status,
                "dimension": self.dimension,
                "differences_window": list(self.differences_window),
                "colengths": list(self.colengths)}


def power_generators(gens: Sequence[Polynomial], k: int,
                     truncate_at: Optional[int] = None):
    """All k-fold products of the generators (generators of I^k)."""
    out = []
    seen = set()
    for combo in itertools.combinations_with_replacement(range(len(gens)), k):
        f = gens[combo[0]]
        for idx in combo[1:]:
            f = f * gens[idx]
            if truncate_at is not None:
                f = f.truncate(truncate_at)
        if truncate_at is not None:
            f = f.truncate(truncate_at)
        if f and f.items not in seen:
            seen.add(f.items)
            out.append(f)
    return out


def _module_dimension(P: ModulePresentation) -> int:
    sd = support_dimension(P)
    if sd.status == "exact" and sd.value is not None and sd.value >= 0:
        return sd.value
    return P.ring.nvars


def _dth_differences(lens, d):
    diffs = list(lens)
    for _ in range(d):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    return diffs


def hs_multiplicity(I: Sequence[Polynomial], P: ModulePresentation,
                    window: Optional[int] = None, cap: int = 4096,
                    dimension: Optional[int] = None,
                    start_hint: Optional[int] = None) -> MultiplicityEstimate:
    """e_I(P) by finite differences of the colength along powers of I.

    Samples l(P/I^k P) for k = 0, 1, 2, ... and takes d-th differences, d the
    dimension of P; the estimate is accepted once three consecutive values
    agree, and sampling stops there.  `window` bounds the largest power
    tried; running out of window, or a colength that fails to certify, makes
    the estimate unstable (the caller may enlarge the window).
    """
    gens = [g for g in I if g]
    if not gens:
        raise PreconditionError("empty ideal")
    d = dimension if dimension is not None else _module_dimension(P)
    w = window if window is not None else d + 6
    if w < d + 2:
        raise PreconditionError("window too small for d-th differences")
    is_plain_ring = (P.ambient_rank == 1 and not P.ideal_image and
                     len(P.relations) == len(P.ring.quotient_relations))
    lens = [0]
    diffs = []
    for k in range(1, w + 1):
        hint = start_hint * k + 8 if start_hint else None
        if is_plain_ring:
            cert, _, _ = power_colength(gens, k, P.ring, cap=cap)
            value = cert.value if cert.certified else None
        else:
            value = ideal_module_power_length(P, gens, k, cap=cap)
            if value is None:
                pk = power_generators(gens, k, truncate_at=cap)
                cert = module_local_colength(tensor_quotient(P, pk), cap=cap,
                                             start=hint)
                value = cert.value if cert.certified else None
        if value is None:
            return MultiplicityEstimate(None, tuple(diffs), "unstable", d,
                                        tuple(lens[1:]))
        lens.append(value)
        diffs = _dth_differences(lens, d)
        if len(diffs) >= 3 and diffs[-1] == diffs[-2] == diffs[-3]:
            return MultiplicityEstimate(diffs[-1], tuple(diffs), "stabilized",
                                        d, tuple(lens[1:]))
    return MultiplicityEstimate(None, tuple(diffs), "unstable", d, tuple(lens[1:]))


# ---------------------------------------------------------------------------
# Euler characteristic identity (multiplicity vs Koszul lengths)


@dataclass(frozen=True)
class SerreReport:
    multiplicity: MultiplicityEstimate
    lengths: tuple               # LengthCertificates of H_0..H_d (homological)
    alternating_sum: Optional[int]
    passed: Optional[bool]
    status: str                  # "ok" | "inconclusive"

    def to_json(self) -> dict:
        return {"multiplicity": self.multiplicity.to_json(),
                "lengths": [c.to_json() for c in self.lengths],
                "alternating_sum": self.alternating_sum,
                "passed": self.passed, "status": self.status}


def serre_check(f: Sequence[Polynomial], P: ModulePresentation,
                window: Optional[int] = None, cap: int = 4096,
                start_hint: Optional[int] = None) -> SerreReport:
    """Check e_I(P) = sum_i (-1)^i l(H_i(f; P)) in exact integers.

    Requires f to be a system of parameters on P: as many elements as the
    dimension of P and finite colength of P/fP.
    """
    gens = [g for g in f if g]
    d = _module_dimension(P)
    if len(gens) != d:
        raise PreconditionError(
            f"need dim(P) = {d} elements, got {len(gens)}")
    quotient = module_local_colength(tensor_quotient(P, gens), cap=cap,
                                     start=start_hint)
    if not quotient.certified:
        raise PreconditionError("f is not a system of parameters on P "
                                "(colength did not certify)")
    K = build_koszul(gens, P)
    lengths = []
    for i in range(len(gens) + 1):
        lengths.append(koszul_homology_length(K, i, cap=cap, start=start_hint))
    if not all(c.certified for c in lengths):
        return SerreReport(hs_multiplicity(gens, P, window, cap,
                                           start_hint=start_hint),
                           tuple(lengths), None, None, "inconclusive")
    alt = sum((-1) ** i * c.value for i, c in enumerate(lengths))
    mult = hs_multiplicity(gens, P, window=window, cap=cap,
                           dimension=d, start_hint=start_hint)
    if mult.status != "stabilized":
        return SerreReport(mult, tuple(lengths), alt, None, "inconclusive")
    return SerreReport(mult, tuple(lengths), alt, mult.value == alt, "ok")


# ---------------------------------------------------------------------------
# Lech's inequality


@dataclass(frozen=True)
class LechReport:
    e_ideal: int
    colength: int
    e_maximal: int
    dimension: int
    lhs: int
    rhs: int
    passed: bool
    status: str

    def to_json(self) -> dict:
        return {"e_ideal": self.e_ideal, "colength": self.colength,
                "e_maximal": self.e_maximal, "dimension": self.dimension,
                "lhs": self.lhs, "rhs": self.rhs,
                "passed": self.passed, "status": self.status}


def lech_check(I: Sequence[Polynomial], ring: RingSpec,
               window: Optional[int] = None, cap: int = 4096) -> LechReport:
    """Exact-integer check of e_I(R) <= d! e_m(R) l(R/I)."""
    R = quotient_presentation((), ring, "R")
    d = ring_dimension(ring)
    colength = local_colength(I, ring, cap=cap)
    if not colength.certified:
        raise PreconditionError("l(R/I) did not certify; the ideal may not be "
                                "primary to the maximal ideal")
    e_I = hs_multiplicity(I, R, window=window, cap=cap, dimension=d)
    e_m = hs_multiplicity(ring.maximal_ideal(), R, window=window, cap=cap,
                          dimension=d)
    if e_I.status != "stabilized" or e_m.status != "stabilized":
        raise PreconditionError("a multiplicity did not stabilize; enlarge the window")
    lhs = e_I.value
    rhs = factorial(d) * e_m.value * colength.value
    return LechReport(e_I.value, colength.value, e_m.value, d, lhs, rhs,
                      lhs <= rhs, "ok")


# ---------------------------------------------------------------------------
# local cohomology finiteness profile


@dataclass(frozen=True)
class ProfileEntry:
    index: int
    finite: str                       # "yes" | "no" | "semi"
    length: Optional[LengthCertificate]
    evidence: dict

    def to_json(self) -> dict:
        return {"index": self.index, "finite": self.finite,
                "length": self.length.to_json() if self.length else None,
                "evidence": self.evidence}


@dataclass(frozen=True)
class FinitenessProfile:
    """Per-index finiteness of H^i_m(M), decided through Ext over the ambient
    ring: H^i_m(M) has finite length iff Ext^(D-i)(M, S) has support dimension
    at most zero, and then the two have equal length."""

    module_label: str
    dimension: int
    entries: tuple

    @property
    def certified_asydepth(self) -> int:
        for e in self.entries:
            if e.finite != "yes":
                return e.index
        return self.dimension

    @property
    def fully_certified(self) -> bool:
        k = self.certified_asydepth
        return all(e.finite in ("yes", "no") for e in self.entries[:k + 1]
                   if e.index <= min(k, self.dimension - 1) or e.index == k)

    def entry(self, i: int) -> ProfileEntry:
        return self.entries[i]

    def to_json(self) -> dict:
        return {"module": self.module_label, "dimension": self.dimension,
                "certified_asydepth": self.certified_asydepth,
                "entries": [e.to_json() for e in self.entries]}


def lc_finiteness_profile(P: ModulePresentation, cap: int = DEFAULT_CAP) -> FinitenessProfile:
    """Finiteness verdicts for H^i_m, i = 0..dim(P), with exact lengths when finite."""
    ring = P.ring
    D = ring.nvars
    dim_P = _module_dimension(P)
    entries = []
    for i in range(dim_P + 1):
        ext = ext_module(P, D - i)
        if ext.ambient_rank == 0:
            entries.append(ProfileEntry(
                i, "yes",
                LengthCertificate(0, 1, (0, 0), "certified", note="zero module"),
                {"support_dimension": -1, "status": "exact", "detail": "zero module"}))
            continue
        sd = support_dimension(ext)
        if sd.status == "exact" and sd.value is not None:
            if sd.value <= 0:
                cert = module_local_colength(ext, cap=cap)
                finite = "yes" if cert.certified else "semi"
                entries.append(ProfileEntry(i, finite, cert,
                                            {"support_dimension": sd.value,
                                             "status": "exact"}))
            else:
                growth = growth_degree(ext)
                verdict = "no" if (growth.degree is None or growth.degree >= 1
                                   or growth.status == "inconclusive") else "semi"
                entries.append(ProfileEntry(i, verdict, None,
                                            {"support_dimension": sd.value,
                                             "status": "exact",
                                             "growth": growth.to_json()}))
        else:
            growth = growth_degree(ext)
            if growth.status == "stabilized":
                cert = module_local_colength(ext, cap=cap)
                entries.append(ProfileEntry(i, "yes" if cert.certified else "semi",
                                            cert, {"growth": growth.to_json()}))
            elif growth.status == "estimated" and growth.degree and growth.degree >= 1:
                entries.append(ProfileEntry(i, "semi", None,
                                            {"growth": growth.to_json(),
                                             "support": sd.to_json()}))
            else:
                entries.append(ProfileEntry(i, "semi", None,
                                            {"growth": growth.to_json(),
                                             "support": sd.to_json()}))
    return FinitenessProfile(P.label, dim_P, tuple(entries))


@dataclass(frozen=True)
class AsydepthResult:
    value: int
    status: str                   # "certified" | "semi"
    profile: FinitenessProfile

    def to_json(self) -> dict:
        return {"value": self.value, "status": self.status,
                "profile": self.profile.to_json()}


def certified_asydepth(P: ModulePresentation, cap: int = DEFAULT_CAP) -> AsydepthResult:
    """Largest k with H^i_m(P) finite for all i < k.

    By the equivalence between bounded Koszul cohomology on parameter ideals
    and finite local cohomology this equals the asymptotic depth of P.  The
    hypothesis dim(P) = dim(R) is checked and violations raise.
    """
    dim_R = ring_dimension(P.ring)
    dim_P = _module_dimension(P)
    if dim_P != dim_R:
        raise PreconditionError(
            f"dim(P) = {dim_P} differs from dim(R) = {dim_R}")
    profile = lc_finiteness_profile(P, cap=cap)
    k = profile.certified_asydepth
    semi = any(e.finite == "semi" for e in profile.entries[:min(k + 1, len(profile.entries))])
    return AsydepthResult(k, "semi" if semi else "certified", profile)


# ---------------------------------------------------------------------------
# the binomial bound on Koszul cohomology lengths


@dataclass(frozen=True)
class BoundReport:
    index: int
    measured: Optional[int]
    bound: Optional[int]
    terms: tuple
    passed: Optional[bool]
    status: str                   # "ok" | "inapplicable"

    def to_json(self) -> dict:
        return {"index": self.index, "measured": self.measured,
                "bound": self.bound, "terms": list(self.terms),
                "passed": self.passed, "status": self.status}


def backward_bound_check(P: ModulePresentation, f: Sequence[Polynomial], i: int,
                         cap: int = DEFAULT_CAP,
                         profile: Optional[FinitenessProfile] = None) -> BoundReport:
    """Check l(H^i(f;P)) <= sum_j C(d, i-j) l(H^j_m(P)) in exact integers.

    Dual lengths l(H^j_m(P)) are read off the finiteness profile as the
    lengths of the matching Ext modules (Matlis duality preserves length).
    Inapplicable when some H^j_m, j <= i, is not finite.
    """
    d = _module_dimension(P)
    if profile is None:
        profile = lc_finiteness_profile(P, cap=cap)
    terms = []
    for j in range(i + 1):
        e = profile.entry(j)
        if e.finite != "yes" or e.length is None or not e.length.certified:
            return BoundReport(i, None, None, (), None, "inapplicable")
        terms.append(comb(d, i - j) * e.length.value)
    K = build_koszul([g for g in f if g], P)
    measured = koszul_homology_length(K, len([g for g in f if g]) - i, cap=cap)
    if not measured.certified:
        return BoundReport(i, None, sum(terms), tuple(terms), None, "inapplicable")
    bound = sum(terms)
    return BoundReport(i, measured.value, bound, tuple(terms),
                       measured.value <= bound, "ok")


# ---------------------------------------------------------------------------
# effaceability ratio tables


@dataclass(frozen=True)
class SeriesRow:
    n: int
    len_hi: Optional[int]
    len_ring_quotient: Optional[int]
    ratio: Optional[Fraction]
    incomplete: bool

    def to_json(self) -> dict:
        return {"n": self.n, "len_hi": self.len_hi,
                "len_ring_quotient": self.len_ring_quotient,
                "ratio": [self.ratio.numerator, self.ratio.denominator] if self.ratio else None,
                "incomplete": self.incomplete}


def effaceability_series(instances, target: str, i: int,
                         cap: int = 4096) -> list:
    """Rows (n, l(H^i(I_n; target)), l(R/I_n), ratio) for family instances.

    Ratios are exact fractions; nothing is asserted about their limit.
    """
    rows = []
    for inst in instances:
        ring = inst.ring
        quotient = local_colength(inst.ideal, ring, cap=cap,
                                  start=inst.colength_hint())
        P = inst.targets[target]
        K = build_koszul(list(inst.ideal), P)
        h = koszul_homology_length(K, len(inst.ideal) - i, cap=cap,
                                   start=inst.colength_hint())
        if quotient.certified and h.certified and quotient.value:
            rows.append(SeriesRow(inst.parameters["n"], h.value, quotient.value,
                                  Fraction(h.value, quotient.value), False))
        else:
            rows.append(SeriesRow(inst.parameters["n"],
                                  h.value if h.certified else None,
                                  quotient.value if quotient.certified else None,
                                  None, True))
    rows.sort(key=lambda r: r.n)
    return rows


# ---------------------------------------------------------------------------
# seeded sampling of parameter ideals (for the property suites)


def sample_parameter_ideal(ring: RingSpec, rng: random.Random,
                           max_degree: int = 4, cap: int = 256):
    """One random system of parameters with certified finite colength."""
    d = ring_dimension(ring)
    nv = ring.nvars
    p = ring.prime
    for _ in range(200):
        gens = []
        for _k in range(d):
            terms = {}
            # a random spread of low-degree terms, unit coefficients allowed
            for _t in range(rng.randint(2, 4)):
                deg = rng.randint(1, max_degree)
                exps = [0] * nv
                for _ in range(deg):
                    exps[rng.randrange(nv)] += 1
                terms[tuple(exps)] = rng.randrange(1, p)
            gens.append(Polynomial(nv, p, terms.items()))
        if any(g.is_zero() for g in gens):
            continue
        cert = local_colength(gens, ring, cap=cap)
        if cert.certified and cert.value > 0:
            return tuple(gens), cert
    raise RuntimeError("failed to sample a parameter ideal; widen the budget")
