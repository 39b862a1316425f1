"""Exact linear algebra at the origin: colengths with stabilization certificates.

The workhorse spans the image of a generator list (or of the relation columns
of a presented module) inside F/m^N F, where F is a free module over the
ambient ring and m is the ideal of all variables.  Pivots are discovered in
order of increasing valuation, so once every monomial of some total degree t
is a pivot we know m^t F lies in the span plus m^{t+1} F; Nakayama's lemma
(in the local ring at the origin) then gives m^t F inside the span itself, so
every dimension computed below degree t is final and the dimension of the
quotient at t is the exact local colength.  That equality of consecutive
dimensions is what the returned certificate records.

Two accelerations keep the span small on the deep, thin quotients this tool
targets:

* rows that reduce to a single term are moved into a per-component monomial
  ideal whose multiples are counted combinatorially and never enumerated;
* when every quotient relation of the ring is a monomial, the whole
  computation runs on the monomial basis of the quotient ring directly.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .ring import Polynomial, RingSpec, StructureError

DEFAULT_CAP = 256
DEFAULT_MAX_ROWS = 500_000


class ResourceExceeded(Exception):
    """Internal signal: the span closure outgrew its row budget."""


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class LengthCertificate:
    """An exact length plus the evidence that the truncation stabilized.

    `witness` holds the pair of equal consecutive quotient dimensions
    (dim at truncation_degree, dim at truncation_degree + 1).  For status
    "cap_exceeded" the value is the last dimension reached, not a length.
    """

    value: int
    truncation_degree: int
    witness: tuple
    status: str  # "certified" | "cap_exceeded"
    note: str = ""

    def __post_init__(self) -> None:
        if self.truncation_degree < 1:
            raise StructureError("truncation_degree must be >= 1")
        if self.status == "certified":
            a, b = self.witness
            if a != b or a != self.value:
                raise StructureError("certified witness dimensions must equal the value")

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "truncation_degree": self.truncation_degree,
            "witness": list(self.witness),
            "status": self.status,
            "note": self.note,
        }


# ---------------------------------------------------------------------------
# dense row reduction (small systems, and the oracle side of tests)


def rref_rank(rows: Sequence[Sequence[int]], prime: int):
    """Reduced row echelon form over F_p.  Returns (rank, reduced basis rows)."""
    work = [list(map(lambda a: a % prime, r)) for r in rows]
    if work:
        width = len(work[0])
        if any(len(r) != width for r in work):
            raise StructureError("rows must share one length")
    basis = []
    pivot_cols = []
    for row in work:
        for pc, br in zip(pivot_cols, basis):
            c = row[pc]
            if c:
                row = [(a - c * b) % prime for a, b in zip(row, br)]
        lead = next((j for j, a in enumerate(row) if a), None)
        if lead is None:
            continue
        inv = pow(row[lead], -1, prime)
        row = [(a * inv) % prime for a in row]
        basis.append(row)
        pivot_cols.append(lead)
    order = sorted(range(len(basis)), key=lambda i: pivot_cols[i])
    basis = [basis[i] for i in order]
    pivot_cols = [pivot_cols[i] for i in order]
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            c = basis[i][pivot_cols[j]]
            if c:
                basis[i] = [(a - c * b) % prime for a, b in zip(basis[i], basis[j])]
    return len(basis), tuple(tuple(r) for r in basis)


# ---------------------------------------------------------------------------
# monomial ideals (the absorber)


class _MonoIdeal:
    """Minimal generators kept sorted by degree for early-exit membership."""

    __slots__ = ("gens", "_degs")

    def __init__(self, gens: Iterable[tuple] = ()):
        self.gens = []
        self._degs = []
        for g in gens:
            self.add(tuple(g))

    def contains(self, exps: tuple) -> bool:
        deg = sum(exps)
        for g, gd in zip(self.gens, self._degs):
            if gd > deg:
                return False
            for gi, ei in zip(g, exps):
                if gi > ei:
                    break
            else:
                return True
        return False

    def add(self, exps: tuple) -> bool:
        if self.contains(exps):
            return False
        keep = [(g, d) for g, d in zip(self.gens, self._degs)
                if not _divides(exps, g)]
        keep.append((exps, sum(exps)))
        keep.sort(key=lambda gd: gd[1])
        self.gens = [g for g, _ in keep]
        self._degs = [d for _, d in keep]
        return True


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _iter_standard(gens: Sequence[tuple], nvars: int, maxdeg: int, exact: Optional[int] = None):
    """Yield exponent tuples outside the monomial ideal, of total degree < maxdeg
    (or == exact when given).  Subtrees under an ideal member are pruned."""
    by_last = [[] for _ in range(nvars)]
    for g in gens:
        last = max((i for i, e in enumerate(g) if e), default=0)
        by_last[last].append(g)
    exps = [0] * nvars

    def blocked(depth: int) -> bool:
        for g in by_last[depth]:
            for i in range(depth + 1):
                if g[i] > exps[i]:
                    break
            else:
                return True
        return False

    def rec(depth: int, remaining: int):
        if depth == nvars - 1:
            lo, hi = (remaining, remaining) if exact is not None else (0, remaining)
            for e in range(lo, hi + 1):
                exps[depth] = e
                if not blocked(depth):
                    yield tuple(exps)
                elif exact is None:
                    break  # larger exponents stay blocked
            exps[depth] = 0
            return
        for e in range(0, remaining + 1):
            exps[depth] = e
            if blocked(depth):
                break
            yield from rec(depth + 1, remaining - e)
        exps[depth] = 0

    bound = exact if exact is not None else maxdeg - 1
    if bound < 0:
        return
    yield from rec(0, bound)


# ---------------------------------------------------------------------------
# the span closure


class ClosureResult:
    """Outcome of one truncated span computation.

    Exposes quotient dimensions and, when stabilization was observed, the
    degree at which it happened.  Dimensions are valid for every truncation
    t <= trunc (and frozen above the stabilization degree).
    """

    def __init__(self, ncomp, nvars, prime, trunc, mono, pivots, stabilized_at, status):
        self.ncomp = ncomp
        self.nvars = nvars
        self.prime = prime
        self.trunc = trunc
        self.mono = mono          # list of _MonoIdeal, one per component
        self.pivots = pivots      # dict (comp, exps) -> True
        self.stabilized_at = stabilized_at
        self.status = status      # "stabilized" | "exhausted" | "resource"

    def _count_below(self, t: int) -> int:
        total = 0
        for comp in range(self.ncomp):
            for e in _iter_standard(self.mono[comp].gens, self.nvars, t):
                if (comp, e) not in self.pivots:
                    total += 1
        return total

    def dimension_at(self, t: int) -> int:
        """dim of F/(span + m^t F).  Frozen above the stabilization degree."""
        if t < 0:
            raise StructureError("t must be >= 0")
        if self.stabilized_at is not None:
            t = min(t, self.stabilized_at)
        else:
            t = min(t, self.trunc)
        return self._count_below(t)

    def dimension_profile(self, upto: int) -> list:
        """[dim at 1, ..., dim at upto] via one bucketed enumeration."""
        limit = upto
        if self.stabilized_at is not None:
            limit = min(limit, self.stabilized_at)
        buckets = [0] * max(limit, 1)
        for comp in range(self.ncomp):
            for e in _iter_standard(self.mono[comp].gens, self.nvars, limit):
                if (comp, e) not in self.pivots:
                    buckets[sum(e)] += 1
        dims = []
        run = 0
        for t in range(1, upto + 1):
            if t <= limit:
                run += buckets[t - 1]
            dims.append(run)
        return dims

    def standard_basis(self, t: Optional[int] = None):
        """The monomial basis of the quotient below truncation t."""
        if t is None:
            t = self.stabilized_at if self.stabilized_at is not None else self.trunc
        out = []
        for comp in range(self.ncomp):
            for e in _iter_standard(self.mono[comp].gens, self.nvars, t):
                if (comp, e) not in self.pivots:
                    out.append((comp, e))
        out.sort(key=lambda ce: (sum(ce[1]), ce[0], ce[1]))
        return out


def _term_key(key):
    comp, exps = key
    return (sum(exps), comp, tuple(reversed(exps)))


def span_closure(seeds, ncomp: int, nvars: int, prime: int, trunc: int,
                 quotient_monomials=None, max_rows: int = DEFAULT_MAX_ROWS,
                 stop_on_full: bool = True) -> ClosureResult:
    """Close the span of the seed rows under multiplication-then-truncation.

    seeds: iterable of dicts {(component, exps): coeff}.  The span returned is
    exactly the image of the submodule generated by the seeds in F/m^trunc F,
    because truncating after each single-variable multiplication agrees with
    truncating the full product.  Work is processed in order of valuation, so
    once a valuation is drained every pivot below it is final and the filled-
    degree stop rule may fire.
    """
    mono = [_MonoIdeal(quotient_monomials or ()) for _ in range(ncomp)]
    pivots = {}
    rows = []       # row id -> dict or None (tombstone)
    # buckets[v]: pending work of valuation >= v; items are fresh row dicts or
    # (row id, variable) products materialized only when popped
    buckets = [[] for _ in range(trunc + 1)]
    tkey = _term_key

    def in_mono(key) -> bool:
        return mono[key[0]].contains(key[1])

    def push_work(v: dict) -> None:
        if v:
            pri = min(sum(k[1]) for k in v)
            buckets[pri].append(v)

    def new_monomial(key) -> None:
        comp, exps = key
        if not mono[comp].add(exps):
            return
        dead = [k for k in pivots if k[0] == comp and _divides(exps, k[1])]
        for k in dead:
            rid = pivots.pop(k)
            row = rows[rid]
            rows[rid] = None
            rest = {kk: c for kk, c in row.items() if kk != k and not in_mono(kk)}
            push_work(rest)

    def insert(v: dict) -> None:
        while v:
            lm = min(v, key=tkey)
            if in_mono(lm):
                del v[lm]
                continue
            rid = pivots.get(lm)
            if rid is None:
                # store the row cleaned of absorbed terms so reducers never
                # splatter dead monomials back into later reductions
                if len(v) > 1:
                    v = {k: c for k, c in v.items() if k == lm or not in_mono(k)}
                if len(v) == 1:
                    new_monomial(lm)
                    return
                c = v[lm]
                if c != 1:
                    inv = pow(c, -1, prime)
                    v = {k: (inv * cc) % prime for k, cc in v.items()}
                rid = len(rows)
                rows.append(v)
                pivots[lm] = rid
                if rid >= max_rows:
                    raise ResourceExceeded()
                pri = sum(lm[1]) + 1
                if pri < trunc:
                    bucket = buckets[pri]
                    for var in range(nvars):
                        bucket.append((rid, var))
                return
            red = rows[rid]
            c = v[lm]
            for k, ck in red.items():
                nv = (v.get(k, 0) - c * ck) % prime
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)

    def degree_full(deg: int) -> bool:
        for comp in range(ncomp):
            for e in _iter_standard(mono[comp].gens, nvars, 0, exact=deg):
                if (comp, e) not in pivots:
                    return False
        return True

    for seed in seeds:
        v = {k: c % prime for k, c in seed.items()
             if c % prime and sum(k[1]) < trunc and not in_mono(k)}
        push_work(v)

    stabilized_at = None
    status = "exhausted"
    try:
        pri = 0
        while pri <= trunc:
            bucket = buckets[pri]
            idx = 0
            while idx < len(bucket):
                item = bucket[idx]
                idx += 1
                if type(item) is dict:
                    v = dict(item)
                else:
                    rid, var = item
                    row = rows[rid]
                    if row is None:
                        continue
                    # dead terms (absorbed monomials) are not filtered here:
                    # they are deleted when they surface as leading terms,
                    # which keeps the hot path free of membership scans
                    v = {}
                    for (comp, exps), c in row.items():
                        e = list(exps)
                        e[var] += 1
                        if sum(e) < trunc:
                            v[(comp, tuple(e))] = c
                insert(v)
            buckets[pri] = []
            # everything of valuation <= pri is final now
            if stop_on_full and pri < trunc and degree_full(pri):
                stabilized_at = pri
                status = "stabilized"
                break
            pri += 1
    except ResourceExceeded:
        status = "resource"

    return ClosureResult(ncomp, nvars, prime, trunc, mono, pivots, stabilized_at, status)


# ---------------------------------------------------------------------------
# seeds from ring / presentation data


def _seeds_from_generators(gens: Sequence[Polynomial], ring: RingSpec, fold_quotient=True):
    seeds = []
    polys = list(gens)
    if fold_quotient:
        polys += list(ring.quotient_relations)
    for f in polys:
        ring.check_member(f)
        if f:
            seeds.append({(0, e): c for e, c in f.items})
    return seeds


def _seeds_from_presentation(presentation):
    seeds = []
    for col in presentation.relations:
        seed = {}
        for comp, exps, c in col.terms:
            seed[(comp, exps)] = c
        if seed:
            seeds.append(seed)
    return seeds


def _quotient_monomials(ring: RingSpec):
    return ring.monomial_quotient()


# ---------------------------------------------------------------------------
# public operations


def dim_quotient_at(gens: Sequence[Polynomial], ring: RingSpec, bound: int,
                    max_rows: int = DEFAULT_MAX_ROWS,
                    extra_monomials: Sequence[tuple] = ()) -> int:
    """dim over F_p of S/(gens + quotient relations + m^bound).

    `extra_monomials` may list exponent tuples of monomials already known to
    lie in the ideal modulo m^bound; they speed the run up without changing
    the answer.
    """
    if bound < 1:
        raise StructureError("bound must be >= 1")
    qm = _quotient_monomials(ring)
    seeds = _seeds_from_generators(gens, ring, fold_quotient=qm is None)
    seeds += [{(0, tuple(e)): 1} for e in extra_monomials if sum(e) < bound]
    res = span_closure(seeds, 1, ring.nvars, ring.prime, bound,
                       quotient_monomials=qm, max_rows=max_rows)
    if res.status == "resource":
        raise ResourceExceeded(f"row budget exhausted at truncation {bound}")
    return res.dimension_at(bound)


def _minimalize_monomials(gens):
    out = _MonoIdeal()
    for g in sorted(gens, key=sum):
        out.add(tuple(g))
    return list(out.gens)


def monomial_ideal_power(gens: Sequence[tuple], k: int, limit: int = 60,
                         degree_bound: Optional[int] = None):
    """Minimal generators of the k-th power of a monomial ideal.

    The base is trimmed to the `limit` lowest-degree minimal generators, so
    the result generates a possibly smaller ideal; callers only rely on the
    output consisting of valid k-fold products.
    """
    base = _minimalize_monomials(gens)
    base.sort(key=sum)
    base = base[:limit]
    if not base or k <= 0:
        return []
    power = list(base)
    for _ in range(k - 1):
        candidates = set()
        for a in power:
            for b in base:
                e = tuple(x + y for x, y in zip(a, b))
                if degree_bound is None or sum(e) < degree_bound:
                    candidates.add(e)
        power = _minimalize_monomials(candidates)
    return power


def power_seed_monomials(gens: Sequence[Polynomial], k: int, ring: RingSpec,
                         cap: int, max_rows: int = DEFAULT_MAX_ROWS):
    """Monomials known to lie in (gens)^k modulo m^cap.

    Runs the base closure once, takes the monomials it absorbed (members of
    the ideal modulo m^cap) and forms k-fold products: each product of k
    elements of I + m^cap lies in I^k + m^cap, so these are valid seeds for
    the power computation at the same truncation.
    """
    qm = _quotient_monomials(ring)
    seeds = _seeds_from_generators(gens, ring, fold_quotient=qm is None)
    res = span_closure(seeds, 1, ring.nvars, ring.prime, cap,
                       quotient_monomials=qm, max_rows=max_rows)
    mono = list(res.mono[0].gens)
    if qm:
        # quotient monomials belong to every power already; exclude multiples
        strip = _MonoIdeal(qm)
        mono = [g for g in mono if not strip.contains(g)]
    return monomial_ideal_power(mono, k, degree_bound=cap)


def _stabilized_colength(seed_maker, ncomp, nvars, prime, quotient_monomials,
                         cap, start, max_rows) -> LengthCertificate:
    # One run truncated at the cap; the filled-degree stop rule makes the
    # generous truncation free whenever the ideal is primary to the origin.
    # `start` survives as an ignored hint for compatibility of call sites.
    if cap < 2:
        raise StructureError("cap must be >= 2")
    if ncomp == 0:
        return LengthCertificate(0, 1, (0, 0), "certified", note="zero ambient rank")
    res = span_closure(seed_maker(), ncomp, nvars, prime, cap,
                       quotient_monomials=quotient_monomials, max_rows=max_rows)
    if res.stabilized_at is not None:
        t = max(res.stabilized_at, 1)
        value = res.dimension_at(t)
        return LengthCertificate(value, t, (value, value), "certified")
    if res.status == "resource":
        note = "row budget exhausted"
    else:
        note = ""
    dim = res.dimension_at(cap)
    prev = res.dimension_at(cap - 1)
    return LengthCertificate(dim, cap, (prev, dim), "cap_exceeded", note=note)


def local_colength(gens: Sequence[Polynomial], ring: RingSpec, cap: int = DEFAULT_CAP,
                   start: Optional[int] = None,
                   max_rows: int = DEFAULT_MAX_ROWS,
                   extra_monomials: Sequence[tuple] = ()) -> LengthCertificate:
    """Exact local colength of R/(gens) at the origin, with certificate.

    The dimension of the truncated quotient is tracked degree by degree until
    two consecutive values agree, which by Nakayama proves m^t is contained
    in the expanded ideal and hence that the value is exact.  `cap` bounds
    the truncation degree tried.
    """
    qm = _quotient_monomials(ring)
    fold = qm is None

    def seeds():
        out = _seeds_from_generators(gens, ring, fold_quotient=fold)
        out += [{(0, tuple(e)): 1} for e in extra_monomials if sum(e) < cap]
        return out

    return _stabilized_colength(seeds, 1, ring.nvars, ring.prime, qm, cap,
                                start, max_rows)


def power_colength(gens: Sequence[Polynomial], k: int, ring: RingSpec,
                   cap: int = DEFAULT_CAP,
                   max_rows: int = DEFAULT_MAX_ROWS):
    """l(R/I^k) with the power computation seeded by the base run.

    Returns (certificate, power generators, seed monomials); the seeds are
    monomials of I^k modulo m^cap and make the absorber effective on deep
    binomial families.
    """
    import itertools as _it

    gens = [g for g in gens if g]
    prods = []
    for combo in _it.combinations_with_replacement(range(len(gens)), k):
        f = gens[combo[0]]
        for idx in combo[1:]:
            f = (f * gens[idx]).truncate(cap)
        if f:
            prods.append(f)
    seeds = power_seed_monomials(gens, k, ring, cap, max_rows=max_rows) if k > 1 else ()
    cert = local_colength(prods, ring, cap=cap, max_rows=max_rows,
                          extra_monomials=seeds)
    return cert, prods, seeds


def module_local_colength(presentation, cap: int = DEFAULT_CAP,
                          start: Optional[int] = None,
                          max_rows: int = DEFAULT_MAX_ROWS) -> LengthCertificate:
    """Local colength of the cokernel of a presentation's relation matrix."""
    ring = presentation.ring
    qm = _quotient_monomials(ring)
    return _stabilized_colength(
        lambda: _seeds_from_presentation(presentation),
        presentation.ambient_rank, ring.nvars, ring.prime, qm, cap, start, max_rows)


@dataclass(frozen=True)
class GrowthEstimate:
    """Fitted degree of N -> dim coker(P mod m^N); degree 0 means finite length."""

    degree: Optional[int]
    status: str  # "stabilized" | "estimated" | "inconclusive"
    value: Optional[int] = None
    samples: tuple = ()

    def to_json(self) -> dict:
        return {"degree": self.degree, "status": self.status,
                "value": self.value, "samples": list(self.samples)}


def growth_degree(presentation, window: int = 6, trunc: Optional[int] = None,
                  max_rows: int = DEFAULT_MAX_ROWS) -> GrowthEstimate:
    """Estimate the polynomial growth degree of the truncated dimensions."""
    if window < 4:
        raise StructureError("window must be >= 4")
    ring = presentation.ring
    n = trunc if trunc else window + 12
    res = span_closure(_seeds_from_presentation(presentation),
                       presentation.ambient_rank, ring.nvars, ring.prime, n,
                       quotient_monomials=_quotient_monomials(ring),
                       max_rows=max_rows)
    if res.status == "resource":
        return GrowthEstimate(None, "inconclusive", note_samples := ())
    if res.stabilized_at is not None:
        value = res.dimension_at(res.stabilized_at)
        return GrowthEstimate(0, "stabilized", value, (value,))
    dims = res.dimension_profile(n)
    tail = dims[-(window + 1):]
    seq = list(tail)
    for degree in range(0, window - 2):
        if len(set(seq)) == 1:
            return GrowthEstimate(degree, "estimated", dims[-1], tuple(tail))
        if len(seq) < 4:
            break
        seq = [b - a for a, b in zip(seq, seq[1:])]
    return GrowthEstimate(None, "inconclusive", dims[-1], tuple(tail))
