"""Truncated Cech strands of graded-module classes, with reduction data.

For a class alpha, the strand complex has, in Cech degree q, one basis
vector per pair (T, w): T a size-(q+1) set of irrelevant generators and w a
Laurent exponent vector of degree -alpha lying in the window w >= L_T,
where L_T = -exp(lcm of f_j^{e_j} over j in T) is the truncation bound at
level e (the dual Taylor term of the generator powers f_j^{e_j}; unlike
the product-localization window this one stabilizes level by level).
Subsets run over the full range of sizes 1..#generators, so at exact
levels every model dimension above dim X vanishes and every homotopy is
honest.  The differential inserts a generator with the usual alternating
sign and never changes w, so the whole strand splits as a direct sum of
small complexes, one per exponent vector w, which keeps exact reduction
cheap; identical subset families share one memoized reduction.

Reduction is plain Gauss elimination over Q, one pivot at a time, tracked
as a deformation retract: inclusion iota (model rows to chain columns),
projection rho, homotopy h, and the original differential D satisfy

    iota . D = 0,      D . rho = 0,        iota . rho = id,
    D_q h_q + h_{q-1} D_{q-1} = id - rho_q iota_q,
    iota h = 0,        h rho = 0,          h h = 0,

all in the row convention (composition left to right along arrows).  The
reduced differential is identically zero, so model dimensions are the
cohomology dimensions of the truncated strand.

Strands are cached in memory and optionally on disk (TORICRES_CACHE_DIR,
default ~/.cache/toricres).
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .errors import ResourceGuard, StabilizationError, UnsupportedGeometryError
from .qlinalg import QMatrix, _frac_str, int_kernel_basis, solve_int
from .qpoly import cnorm
from .toric import ToricVariety, _fm_eliminate, _interval

FORMAT_VERSION = 3

Class = tuple[int, ...]
Label = tuple[tuple[int, ...], tuple[int, ...]]  # (generator subset, exponent)


_GENERATOR_CAP = 16


def cech_depth(x: ToricVariety) -> int:
    """Largest Cech degree: #generators - 1 (the full subset range).

    No size truncation: model dimensions above dim X vanish at exact levels,
    and keeping every subset keeps all homotopies honest."""
    return len(x.max_cones) - 1


@lru_cache(maxsize=None)
def _subset_data(x: ToricVariety):
    """Generator exponents, all nonempty generator subsets, and the depth."""
    gens = x.irrelevant_exponents()
    if len(gens) > _GENERATOR_CAP:
        raise ResourceGuard(
            f"{len(gens)} irrelevant generators need 2^{len(gens)} Cech "
            f"subsets; cap is 2^{_GENERATOR_CAP}")
    depth = cech_depth(x)
    subsets: list[tuple[int, ...]] = []
    for size in range(1, depth + 2):
        subsets.extend(itertools.combinations(range(len(gens)), size))
    return gens, tuple(subsets), depth


def _window_bound(gens, subset: tuple[int, ...], e: Sequence[int]) -> tuple[int, ...]:
    # lcm of the f_j^{e_j} over j in the subset, negated: the term for the
    # subset is Hom of the corresponding Taylor summand, not the product
    # localization (the product window breaks level-by-level stabilization).
    r = len(gens[0])
    out = [0] * r
    for j in subset:
        g = gens[j]
        for rho in range(r):
            out[rho] = min(out[rho], -e[j] * g[rho])
    return tuple(out)


@lru_cache(maxsize=None)
def _degree_fiber(x: ToricVariety, target: Class):
    """Particular exponent and kernel lattice for degree(w) = target."""
    if x.torsion:
        raise UnsupportedGeometryError("torsion class groups are not supported")
    g_rows = [[g[i] for g in x.grading] for i in range(x.class_rank)]
    u0 = solve_int(g_rows, list(target))
    kernel = tuple(tuple(k) for k in int_kernel_basis(g_rows))
    if u0 is not None and len(kernel) != x.dim:
        raise AssertionError("kernel rank mismatch")
    return (tuple(u0) if u0 is not None else None), kernel


def _fiber_points(x: ToricVariety, u0: tuple[int, ...],
                  kernel, lower: Sequence[int]) -> list[tuple[int, ...]]:
    """All w = u0 + kernel combination with w >= lower, exact enumeration."""
    m = len(kernel)
    if m == 0:
        return [u0] if all(a >= b for a, b in zip(u0, lower)) else []
    ineqs = []
    for rho in range(x.n_rays):
        c = tuple(Fraction(kernel[i][rho]) for i in range(m))
        ineqs.append((c, Fraction(lower[rho] - u0[rho])))
    return _walk_fiber(x, u0, kernel, ineqs)


def _fiber_points_signed(x: ToricVariety, u0: tuple[int, ...],
                         kernel, neg: Sequence[int]) -> list[tuple[int, ...]]:
    """Fiber points with w < 0 exactly on the rays in neg."""
    m = len(kernel)
    neg_set = set(neg)
    if m == 0:
        ok = all((u0[rho] <= -1) == (rho in neg_set) for rho in range(x.n_rays))
        return [u0] if ok else []
    ineqs = []
    for rho in range(x.n_rays):
        c = tuple(Fraction(kernel[i][rho]) for i in range(m))
        if rho in neg_set:
            # u0 + t.k <= -1, flipped into >= form
            ineqs.append((tuple(-v for v in c), Fraction(1 + u0[rho])))
        else:
            ineqs.append((c, Fraction(-u0[rho])))
    return _walk_fiber(x, u0, kernel, ineqs)


def _walk_fiber(x: ToricVariety, u0, kernel, ineqs) -> list[tuple[int, ...]]:
    m = len(kernel)
    systems: list = [ineqs]
    for var in range(m - 1, 0, -1):
        nxt = _fm_eliminate(systems[-1], var)
        if nxt is None:
            return []
        systems.append(nxt)
    systems.reverse()
    out: list[tuple[int, ...]] = []
    point = [Fraction(0)] * m

    def walk(level: int) -> None:
        lo, hi = _interval(systems[level], level, point)
        if lo is None or hi is None:
            raise UnsupportedGeometryError("unbounded strand window")
        for t in range(math.ceil(lo), math.floor(hi) + 1):
            point[level] = Fraction(t)
            if level + 1 == m:
                out.append(tuple(
                    u0[rho] + sum(kernel[i][rho] * int(point[i]) for i in range(m))
                    for rho in range(x.n_rays)))
            else:
                walk(level + 1)
        point[level] = Fraction(0)

    walk(0)
    return out


def _strand_blocks(x: ToricVariety, alpha: Class, e: Sequence[int]):
    """Per-exponent blocks of the strand: for each w, the upward-closed
    family of subsets whose window contains w, grouped by Cech degree."""
    gens, subsets, depth = _subset_data(x)
    target = tuple(-a for a in alpha)
    u0, kernel = _degree_fiber(x, target)
    if u0 is None:
        return depth, []
    bounds = {T: _window_bound(gens, T, e) for T in subsets}
    top_size = depth + 1
    seen: set[tuple[int, ...]] = set()
    for T in subsets:
        if len(T) == top_size:
            for w in _fiber_points(x, u0, kernel, bounds[T]):
                seen.add(w)
    blocks = []
    for w in sorted(seen):
        fam = tuple(T for T in subsets
                    if all(a >= b for a, b in zip(w, bounds[T])))
        if fam:
            blocks.append((w, fam))
    return depth, blocks


@dataclass
class ReducedStrand:
    """Strand complex of one class at one truncation level, fully reduced."""

    alpha: Class
    e: tuple[int, ...]
    depth: int
    chain_labels: list[list[Label]]
    model_labels: list[list[Label]]
    diff: list[QMatrix]   # q -> chains_q x chains_{q+1}, q = 0..depth-1
    iota: list[QMatrix]   # q -> model_q x chains_q
    rho: list[QMatrix]    # q -> chains_q x model_q
    h: list[QMatrix]      # q -> chains_{q+1} x chains_q, q = 0..depth-1

    def dims(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.model_labels)

    def chain_dims(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.chain_labels)

    def to_obj(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "e": list(self.e),
            "depth": self.depth,
            "chain_labels": [[[list(t), list(w)] for t, w in labels]
                             for labels in self.chain_labels],
            "model_labels": [[[list(t), list(w)] for t, w in labels]
                             for labels in self.model_labels],
            "diff": [m.to_obj() for m in self.diff],
            "iota": [m.to_obj() for m in self.iota],
            "rho": [m.to_obj() for m in self.rho],
            "h": [m.to_obj() for m in self.h],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ReducedStrand":
        return cls(
            alpha=tuple(obj["alpha"]),
            e=tuple(obj["e"]),
            depth=obj["depth"],
            chain_labels=[[(tuple(t), tuple(w)) for t, w in labels]
                          for labels in obj["chain_labels"]],
            model_labels=[[(tuple(t), tuple(w)) for t, w in labels]
                          for labels in obj["model_labels"]],
            diff=[QMatrix.from_obj(o) for o in obj["diff"]],
            iota=[QMatrix.from_obj(o) for o in obj["iota"]],
            rho=[QMatrix.from_obj(o) for o in obj["rho"]],
            h=[QMatrix.from_obj(o) for o in obj["h"]],
        )


def _reduce_block(per_q: list[list[tuple[int, ...]]],
                  entries: list[dict[tuple[int, int], int]],
                  policy: str):
    """Fully reduce one block over Q, tracking the retract certificates.

    Coordinates are kept by original local index throughout; dropped ones
    simply leave the active sets.  Returns surviving indices per degree and
    the certificates as index-keyed sparse structures.
    """
    depth1 = len(per_q)
    sizes = [len(v) for v in per_q]
    active = [set(range(s)) for s in sizes]
    # d[q]: row -> {col: coeff}; cols[q]: col -> {row: coeff} mirrors for pivots
    d = [dict() for _ in range(depth1 - 1)]
    for q, ent in enumerate(entries):
        dq = d[q]
        for (i, j), c in ent.items():
            dq.setdefault(i, {})[j] = c
    iota = [{i: {i: 1} for i in range(s)} for s in sizes]   # model row -> chain covector
    rho = [{i: {i: 1} for i in range(s)} for s in sizes]    # model col -> chain vector
    h = [dict() for _ in range(depth1 - 1)]                 # chain(q+1) -> {chain(q): c}

    def pick_pivot():
        best = None
        for q in range(depth1 - 1):
            for i, row in d[q].items():
                for j, a in row.items():
                    if policy == "first":
                        cand = (0, 0, q, i, j, a)
                    else:
                        fill = (len(row) - 1)
                        cand = (0 if abs(a) == 1 else 1, fill, q, i, j, a)
                    if best is None or cand[:5] < best[:5]:
                        best = cand
        return best

    while True:
        piv = pick_pivot()
        if piv is None:
            break
        _, _, q, pi, pj, a = piv
        inv_a = Fraction(1, 1) / Fraction(a)
        row_piv = d[q].get(pi, {})
        col_entries = [(i, r[pj]) for i, r in d[q].items() if pj in r and i != pi]
        row_entries = [(j, c) for j, c in row_piv.items() if j != pj]

        iota_piv = iota[q][pi]
        rho_piv = rho[q + 1][pj]

        # homotopy gains 1/a * (rho column at pivot) x (iota row at pivot)
        hq = h[q]
        for c1, v1 in rho_piv.items():
            dst = hq.setdefault(c1, {})
            for c0, v0 in iota_piv.items():
                s = dst.get(c0, 0) + v1 * v0 * inv_a
                if s:
                    dst[c0] = cnorm(s)
                else:
                    del dst[c0]
            if not dst:
                del hq[c1]

        # iota rows at q: subtract (C/a) * pivot row
        for i, cval in col_entries:
            f = cval * inv_a
            tgt = iota[q][i]
            for c0, v0 in iota_piv.items():
                s = tgt.get(c0, 0) - f * v0
                if s:
                    tgt[c0] = cnorm(s)
                else:
                    tgt.pop(c0, None)
        # rho columns at q+1: subtract (B/a) * pivot column
        for j, bval in row_entries:
            f = bval * inv_a
            tgt = rho[q + 1][j]
            for c1, v1 in rho_piv.items():
                s = tgt.get(c1, 0) - f * v1
                if s:
                    tgt[c1] = cnorm(s)
                else:
                    tgt.pop(c1, None)

        # Schur complement on d[q]
        for i, cval in col_entries:
            fi = cval * inv_a
            ri = d[q].setdefault(i, {})
            for j, bval in row_entries:
                s = ri.get(j, 0) - fi * bval
                if s:
                    ri[j] = cnorm(s)
                else:
                    ri.pop(j, None)
            if not ri:
                del d[q][i]

        # drop pivot row/col everywhere
        active[q].discard(pi)
        active[q + 1].discard(pj)
        iota[q].pop(pi, None)
        rho[q].pop(pi, None)
        iota[q + 1].pop(pj, None)
        rho[q + 1].pop(pj, None)
        d[q].pop(pi, None)
        for i in list(d[q]):
            d[q][i].pop(pj, None)
            if not d[q][i]:
                del d[q][i]
        if q + 1 < depth1 - 1:
            d[q + 1].pop(pj, None)
        if q - 1 >= 0:
            for i in list(d[q - 1]):
                d[q - 1][i].pop(pi, None)
                if not d[q - 1][i]:
                    del d[q - 1][i]

    return active, iota, rho, h


def _block_entries(fam: list[tuple[int, ...]], depth: int):
    """Per-degree coordinates and signed incidence entries of one block."""
    per_q: list[list[tuple[int, ...]]] = [[] for _ in range(depth + 1)]
    for T in fam:
        per_q[len(T) - 1].append(T)
    for q in range(depth + 1):
        per_q[q].sort()
    index: dict[tuple[int, ...], int] = {}
    for q in range(depth + 1):
        for i, T in enumerate(per_q[q]):
            index[T] = i
    fam_set = set(fam)
    gen_ids = sorted({j for T in fam for j in T})
    entries: list[dict[tuple[int, int], int]] = [dict() for _ in range(depth)]
    for q in range(depth):
        for T in per_q[q]:
            for j in gen_ids:
                if j in T:
                    continue
                T2 = tuple(sorted(T + (j,)))
                if T2 not in fam_set:
                    continue
                sign = -1 if T2.index(j) % 2 else 1
                entries[q][(index[T], index[T2])] = sign
    return per_q, entries


_reduce_memo: dict = {}

cache_counters = {"memory": 0, "disk": 0, "built": 0}


def cache_counters_reset() -> None:
    for k in cache_counters:
        cache_counters[k] = 0


def _family_to_obj(hit) -> dict:
    per_q, entries, active, iota, rho, h = hit

    def certs(cc):
        return [{str(i): {str(j): _frac_str(v) for j, v in sorted(row.items())}
                 for i, row in sorted(level.items())} for level in cc]

    return {
        "per_q": [[list(T) for T in level] for level in per_q],
        "entries": [{f"{i},{j}": c for (i, j), c in sorted(ent.items())}
                    for ent in entries],
        "active": [sorted(a) for a in active],
        "iota": certs(iota),
        "rho": certs(rho),
        "h": certs(h),
    }


def _family_from_obj(obj: dict):
    def certs(cc):
        return [{int(i): {int(j): cnorm(Fraction(v)) for j, v in row.items()}
                 for i, row in level.items()} for level in cc]

    per_q = [[tuple(T) for T in level] for level in obj["per_q"]]
    entries = [{(int(i), int(j)): c
                for ij, c in ent.items()
                for i, j in [ij.split(",")]} for ent in obj["entries"]]
    active = [set(a) for a in obj["active"]]
    return per_q, entries, active, certs(obj["iota"]), certs(obj["rho"]), certs(obj["h"])


def _reduced_family(fam: tuple[tuple[int, ...], ...], depth: int, policy: str):
    """Memoized reduction of one subset family.

    The block of an exponent depends on the exponent only through its family,
    so identical families across exponents and strands share one reduction.
    Reductions persist on disk keyed by content hash; a corrupt or stale
    entry fails its hash check and is rebuilt."""
    key = (fam, depth, policy)
    hit = _reduce_memo.get(key)
    if hit is not None:
        cache_counters["memory"] += 1
        return hit
    dkey = _stable_key({"v": FORMAT_VERSION, "kind": "family",
                        "fam": [list(T) for T in fam],
                        "depth": depth, "policy": policy})
    path = cache_root() / f"{dkey}.json"
    if path.exists():
        try:
            obj = json.loads(path.read_text())
            if obj.get("sha") == _stable_key(obj["payload"]):
                hit = _family_from_obj(obj["payload"])
                cache_counters["disk"] += 1
                _reduce_memo[key] = hit
                return hit
        except (KeyError, ValueError, json.JSONDecodeError):
            pass  # corrupt entry: fall through and rebuild
    per_q, entries = _block_entries(list(fam), depth)
    active, iota, rho, h = _reduce_block(per_q, entries, policy)
    hit = (per_q, entries, active, iota, rho, h)
    cache_counters["built"] += 1
    _reduce_memo[key] = hit
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = _family_to_obj(hit)
        tmp = path.with_suffix(f".{os.getpid()}.tmp")
        tmp.write_text(json.dumps({"payload": payload,
                                   "sha": _stable_key(payload)}))
        tmp.replace(path)
    except OSError:
        pass  # cache is best-effort
    return hit


_fam_dims_memo: dict = {}


def _family_dims(fam: tuple[tuple[int, ...], ...], depth: int) -> tuple[int, ...]:
    """Cohomology dimensions of one subset family, by ranks only."""
    key = (fam, depth)
    hit = _fam_dims_memo.get(key)
    if hit is None:
        per_q, entries = _block_entries(list(fam), depth)
        sizes = [len(v) for v in per_q]
        ranks = [0] * depth
        for q in range(depth):
            if entries[q]:
                m = QMatrix(sizes[q], sizes[q + 1])
                for (i, j), c in entries[q].items():
                    m.rows[i][j] = c
                ranks[q] = m.rank()
        hit = tuple(sizes[q] - (ranks[q] if q < depth else 0)
                    - (ranks[q - 1] if q > 0 else 0)
                    for q in range(depth + 1))
        _fam_dims_memo[key] = hit
    return hit


def build_reduced_strand(x: ToricVariety, alpha: Class, e: Sequence[int],
                         policy: str = "sparse") -> ReducedStrand:
    e = tuple(int(v) for v in e)
    depth, blocks = _strand_blocks(x, alpha, e)

    chain_labels: list[list[Label]] = [[] for _ in range(depth + 1)]
    model_labels: list[list[Label]] = [[] for _ in range(depth + 1)]
    # collect per-block results, then assemble in global sorted label order
    per_block = []
    for w, fam in blocks:
        per_q, entries, active, iota, rho, h = _reduced_family(fam, depth, policy)
        per_block.append((w, per_q, entries, active, iota, rho, h))
        for q in range(depth + 1):
            for T in per_q[q]:
                chain_labels[q].append((T, w))
            for i in sorted(active[q]):
                model_labels[q].append((per_q[q][i], w))
    for q in range(depth + 1):
        chain_labels[q].sort()
        model_labels[q].sort()
    chain_pos = [{lab: i for i, lab in enumerate(labels)}
                 for labels in chain_labels]
    model_pos = [{lab: i for i, lab in enumerate(labels)}
                 for labels in model_labels]

    cd = [len(v) for v in chain_labels]
    md = [len(v) for v in model_labels]
    diff = [QMatrix(cd[q], cd[q + 1]) for q in range(depth)]
    hmat = [QMatrix(cd[q + 1], cd[q]) for q in range(depth)]
    iota = [QMatrix(md[q], cd[q]) for q in range(depth + 1)]
    rho = [QMatrix(cd[q], md[q]) for q in range(depth + 1)]

    for w, per_q, entries, active, biota, brho, bh in per_block:
        gchain = [  # local index -> global chain index per degree
            [chain_pos[q][(T, w)] for T in per_q[q]] for q in range(depth + 1)]
        for q in range(depth):
            dq = diff[q]
            for (i, j), c in entries[q].items():
                dq.rows[gchain[q][i]][gchain[q + 1][j]] = c
            hq = hmat[q]
            for c1, rowv in bh[q].items():
                out = hq.rows[gchain[q + 1][c1]]
                for c0, v in rowv.items():
                    out[gchain[q][c0]] = v
        for q in range(depth + 1):
            for i in active[q]:
                gm = model_pos[q][(per_q[q][i], w)]
                out = iota[q].rows[gm]
                for c0, v in biota[q][i].items():
                    out[gchain[q][c0]] = v
                for c0, v in brho[q][i].items():
                    rho[q].rows[gchain[q][c0]][gm] = v

    return ReducedStrand(alpha=tuple(alpha), e=e, depth=depth,
                         chain_labels=chain_labels, model_labels=model_labels,
                         diff=diff, iota=iota, rho=rho, h=hmat)


def strand_dims(x: ToricVariety, alpha: Class, e: Sequence[int]) -> tuple[int, ...]:
    """Cohomology dimensions of the truncated strand, one per Cech degree.

    Rank-only fast path: no certificates are produced."""
    depth, blocks = _strand_blocks(x, alpha, e)
    dims = [0] * (depth + 1)
    for w, fam in blocks:
        for q, v in enumerate(_family_dims(fam, depth)):
            dims[q] += v
    return tuple(dims)


def strand_invariants_ok(s: ReducedStrand) -> bool:
    """All retract identities, checked exactly on the assembled matrices."""
    depth = s.depth
    for q in range(depth - 1):
        if not s.diff[q].matmul(s.diff[q + 1]).is_zero():
            return False
    for q in range(depth + 1):
        md = len(s.model_labels[q])
        if not s.iota[q].matmul(s.rho[q]) == QMatrix.identity(md):
            return False
        if q < depth and not s.iota[q].matmul(s.diff[q]).is_zero():
            return False
        if q < depth and not s.diff[q].matmul(s.rho[q + 1]).is_zero():
            return False
    for q in range(depth + 1):
        cd = len(s.chain_labels[q])
        acc = QMatrix.zero(cd, cd)
        if q < depth:
            acc = acc + s.diff[q].matmul(s.h[q])
        if q > 0:
            acc = acc + s.h[q - 1].matmul(s.diff[q - 1])
        want = QMatrix.identity(cd) - s.rho[q].matmul(s.iota[q])
        if acc != want:
            return False
    for q in range(1, depth + 1):
        if not s.iota[q].matmul(s.h[q - 1]).is_zero():
            return False
    for q in range(depth):
        if not s.h[q].matmul(s.rho[q]).is_zero():
            return False
    for q in range(1, depth):
        if not s.h[q].matmul(s.h[q - 1]).is_zero():
            return False
    return True


# -- truncation level search ---------------------------------------------------

_PATTERN_RAY_CAP = 16


@lru_cache(maxsize=None)
def _support_patterns(x: ToricVariety):
    """Negative-support patterns whose blocks carry cohomology in q <= dim.

    At a uniform level c the block of an exponent w is all-or-nothing: it is
    the full family {T : no common ray of the T-cones has w < 0} once c
    reaches depth(w) = -min(w), and empty before that.  The family, hence
    the block cohomology, depends on w only through its negative-ray set,
    so one table per variety decides which exponents can contribute."""
    if x.n_rays > _PATTERN_RAY_CAP:
        raise UnsupportedGeometryError(
            f"support pattern table needs 2^{x.n_rays} entries; "
            f"cap is 2^{_PATTERN_RAY_CAP}")
    gens, subsets, depth = _subset_data(x)
    cones = [frozenset(c) for c in x.max_cones]
    common = {T: frozenset.intersection(*(cones[j] for j in T)) for T in subsets}
    q_top = min(x.dim, depth)
    out = []
    for bits in range(0, 1 << x.n_rays):
        neg = frozenset(rho for rho in range(x.n_rays) if bits >> rho & 1)
        fam = tuple(T for T in subsets if not (neg & common[T]))
        if not fam:
            continue
        dims = _family_dims(fam, depth)
        if any(dims[q] for q in range(q_top + 1)):
            out.append(tuple(sorted(neg)))
    return tuple(out)


_points_cache: dict = {}


def contributing_points(x: ToricVariety,
                        alpha: Class) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """All (exponent, pattern) pairs whose blocks carry cohomology.

    These exponents support every cohomology model of the class, at any
    uniform level at least the stabilization level; deeper fiber exponents
    have patterns with no cohomology in any degree and reduce to nothing."""
    key = (x, tuple(alpha))
    hit = _points_cache.get(key)
    if hit is None:
        target = tuple(-a for a in alpha)
        u0, kernel = _degree_fiber(x, target)
        pts = []
        if u0 is not None:
            for neg in _support_patterns(x):
                for w in _fiber_points_signed(x, u0, kernel, neg):
                    pts.append((w, neg))
        pts.sort()
        hit = tuple(pts)
        _points_cache[key] = hit
    return hit


def stabilization_level(x: ToricVariety, alpha: Class) -> tuple[int, ...]:
    """Smallest uniform level at which the strand dimensions are exact.

    The strand at level c*(1,..,1) is the direct sum of the full blocks of
    the fiber exponents of depth at most c, so dimensions are nondecreasing
    in c and constant once c reaches the deepest exponent whose support
    pattern carries cohomology.  That depth is computed exactly: enumerate
    each contributing pattern's fiber polytope and take the max depth."""
    r = len(x.max_cones)
    c = 0
    for w, neg in contributing_points(x, alpha):
        c = max(c, -min(w))
    return (c,) * r


# -- block-level access ------------------------------------------------------------

@lru_cache(maxsize=None)
def _pattern_family(x: ToricVariety, neg: tuple[int, ...]):
    """Subsets whose cones have no common ray that the pattern negates.

    At any uniform level c, the family of an exponent w with depth(w) <= c
    is exactly the family of its negative-support pattern."""
    gens, subsets, depth = _subset_data(x)
    cones = [frozenset(c) for c in x.max_cones]
    negs = frozenset(neg)
    return tuple(T for T in subsets
                 if not (negs & frozenset.intersection(*(cones[j] for j in T))))


class FamilyCerts:
    """Reduction certificates of one pattern family, with index maps.

    Model coordinates are positions in the sorted surviving-index list;
    chain coordinates are positions in the sorted per-degree subset lists.
    Instances are shared and must be treated as read-only."""

    __slots__ = ("depth", "per_q", "pos", "active", "dims", "iota", "rho_t", "h")

    def __init__(self, x: ToricVariety, neg: tuple[int, ...], policy: str):
        _, _, depth = _subset_data(x)
        self.depth = depth
        fam = _pattern_family(x, neg)
        if not fam:
            self.per_q = [[] for _ in range(depth + 1)]
            self.pos = [{} for _ in range(depth + 1)]
            self.active = [[] for _ in range(depth + 1)]
            self.dims = (0,) * (depth + 1)
            self.iota = [[] for _ in range(depth + 1)]
            self.rho_t = [{} for _ in range(depth + 1)]
            self.h = [{} for _ in range(depth)]
            return
        per_q, entries, active, iota, rho, h = _reduced_family(fam, depth, policy)
        self.per_q = per_q
        self.pos = [{T: i for i, T in enumerate(per_q[q])} for q in range(depth + 1)]
        self.active = [sorted(active[q]) for q in range(depth + 1)]
        self.dims = tuple(len(a) for a in self.active)
        self.iota = [[iota[q][i] for i in self.active[q]] for q in range(depth + 1)]
        self.rho_t = []
        for q in range(depth + 1):
            t: dict[int, list[tuple[int, Fraction]]] = {}
            for mpos, i in enumerate(self.active[q]):
                for c, v in rho[q][i].items():
                    t.setdefault(c, []).append((mpos, v))
            self.rho_t.append(t)
        self.h = h


@lru_cache(maxsize=None)
def family_certs(x: ToricVariety, neg: tuple[int, ...],
                 policy: str = "sparse") -> FamilyCerts:
    return FamilyCerts(x, neg, policy)


def pattern_of(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, v in enumerate(w) if v < 0)


# -- caching ---------------------------------------------------------------------

_memory_cache: dict = {}


def cache_root() -> Path:
    env = os.environ.get("TORICRES_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "toricres"


def _stable_key(payload) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def strand_key(x: ToricVariety, alpha: Class, e: Sequence[int], policy: str) -> str:
    return _stable_key({
        "v": FORMAT_VERSION,
        "kind": "strand",
        "x": x.to_obj(),
        "alpha": list(alpha),
        "e": list(e),
        "policy": policy,
    })


def reduced_strand(x: ToricVariety, alpha: Class, e: Sequence[int],
                   policy: str = "sparse", use_disk: bool = True) -> ReducedStrand:
    mk = (x.rays, x.max_cones, x.grading, tuple(alpha), tuple(e), policy)
    hit = _memory_cache.get(mk)
    if hit is not None:
        return hit
    key = strand_key(x, alpha, e, policy)
    path = cache_root() / f"{key}.json"
    if use_disk and path.exists():
        try:
            obj = json.loads(path.read_text())
            if obj.get("sha") == _stable_key(obj["payload"]):
                s = ReducedStrand.from_obj(obj["payload"])
                _memory_cache[mk] = s
                return s
        except (KeyError, ValueError, json.JSONDecodeError):
            pass  # corrupt entry: fall through and rebuild
    s = build_reduced_strand(x, alpha, e, policy)
    _memory_cache[mk] = s
    if use_disk:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            payload = s.to_obj()
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps({"payload": payload,
                                       "sha": _stable_key(payload)}))
            tmp.replace(path)
        except OSError:
            pass  # cache is best-effort
    return s


def cache_stats() -> dict:
    root = cache_root()
    if not root.exists():
        return {"dir": str(root), "files": 0, "bytes": 0}
    files = list(root.glob("*.json"))
    return {"dir": str(root), "files": len(files),
            "bytes": sum(f.stat().st_size for f in files)}


def cache_clear() -> int:
    root = cache_root()
    n = 0
    if root.exists():
        for f in root.glob("*.json"):
            f.unlink()
            n += 1
    return n


# -- transport between truncation levels -------------------------------------------

def inclusion_matrix(small: ReducedStrand, big: ReducedStrand, q: int) -> QMatrix:
    """0/1 matrix of the label-preserving inclusion of chain spaces."""
    pos = {lab: i for i, lab in enumerate(big.chain_labels[q])}
    m = QMatrix(len(small.chain_labels[q]), len(big.chain_labels[q]))
    for i, lab in enumerate(small.chain_labels[q]):
        j = pos.get(lab)
        if j is None:
            raise StabilizationError("levels are not nested")
        m.rows[i][j] = 1
    return m


def model_transfer(small: ReducedStrand, big: ReducedStrand) -> list[QMatrix]:
    """Per degree: model(small) -> model(big) through the chain inclusion."""
    out = []
    for q in range(small.depth + 1):
        nu = inclusion_matrix(small, big, q)
        out.append(small.iota[q].matmul(nu).matmul(big.rho[q]))
    return out
