"""Projective toric geometry from point supports, in dimensions 1 to 3.

The variety never appears as anything but combinatorics: primitive inner
facet normals of the Minkowski sum of the supports (the rays), the sets of
normals active at each vertex (the maximal cones), and a free presentation
of the class group obtained from the Smith form of the ray matrix.  Degrees
of monomials, divisor classes of the input supports and homogenized
exponent vectors are all computed against that presentation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, UnsupportedGeometryError
from .qlinalg import int_kernel_basis, int_rank, smith_normal_form, solve_int

Point = tuple[int, ...]
Support = tuple[Point, ...]


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = math.gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in v)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


# -- convex hull facets, dimensions 1..3 --------------------------------------

def facet_normals(points: list[Point]) -> list[tuple[int, ...]]:
    """Primitive inner normals of the facets of conv(points).

    Requires the points to span the ambient space affinely.
    """
    pts = sorted(set(points))
    if not pts:
        raise InputError("empty point set")
    dim = len(pts[0])
    diffs = [[p[i] - pts[0][i] for i in range(dim)] for p in pts[1:]]
    if int_rank(diffs) != dim:
        raise UnsupportedGeometryError("points do not span the ambient space")
    if dim == 1:
        return [(-1,), (1,)]
    if dim == 2:
        hull = _hull2d(pts)
        normals = []
        for i in range(len(hull)):
            x1, y1 = hull[i]
            x2, y2 = hull[(i + 1) % len(hull)]
            normals.append(_primitive((-(y2 - y1), x2 - x1)))
        return sorted(set(normals))
    if dim == 3:
        return _facets3d(pts)
    raise UnsupportedGeometryError(f"dimension {dim} not supported")


def _hull2d(pts: list[Point]) -> list[Point]:
    """Counterclockwise convex hull, monotone chain."""
    pts = sorted(set(pts))
    if len(pts) < 3:
        raise UnsupportedGeometryError("degenerate planar point set")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _facets3d(pts: list[Point]) -> list[tuple[int, ...]]:
    normals: set[tuple[int, ...]] = set()
    n = len(pts)
    for i, j, k in itertools.combinations(range(n), 3):
        a, b, c = pts[i], pts[j], pts[k]
        u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
        v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
        nv = (u[1] * v[2] - u[2] * v[1],
              u[2] * v[0] - u[0] * v[2],
              u[0] * v[1] - u[1] * v[0])
        if nv == (0, 0, 0):
            continue
        nv = _primitive(nv)
        for cand in (nv, tuple(-x for x in nv)):
            if cand in normals:
                continue
            base = _dot(cand, a)
            if all(_dot(cand, p) >= base for p in pts):
                normals.add(cand)
    return sorted(normals)


# -- the variety ----------------------------------------------------------------

@dataclass(frozen=True)
class ToricVariety:
    """Complete toric variety presented by rays, maximal cones and grading."""

    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]
    grading: tuple[tuple[int, ...], ...]   # class of D_ray, one per ray
    torsion: tuple[int, ...] = ()

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def class_rank(self) -> int:
        return len(self.grading[0]) if self.grading else 0

    def degree_of(self, u: Sequence[int]) -> tuple[int, ...]:
        """Class-group degree of the (Laurent) monomial with exponents u."""
        return tuple(sum(g[i] * u[r] for r, g in enumerate(self.grading))
                     for i in range(self.class_rank))

    def irrelevant_exponents(self) -> tuple[tuple[int, ...], ...]:
        """Exponent vector of the monomial generator attached to each cone."""
        out = []
        for cone in self.max_cones:
            inside = set(cone)
            out.append(tuple(0 if r in inside else 1 for r in range(self.n_rays)))
        return tuple(out)

    def anticanonical_class(self) -> tuple[int, ...]:
        return self.degree_of([1] * self.n_rays)

    def var_names(self) -> tuple[str, ...]:
        return tuple(f"x{r + 1}" for r in range(self.n_rays))

    def to_obj(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
            "grading": [list(g) for g in self.grading],
            "torsion": list(self.torsion),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ToricVariety":
        return cls(
            dim=obj["dim"],
            rays=tuple(tuple(r) for r in obj["rays"]),
            max_cones=tuple(tuple(c) for c in obj["max_cones"]),
            grading=tuple(tuple(g) for g in obj["grading"]),
            torsion=tuple(obj.get("torsion", ())),
        )


def variety_from_points(points: Iterable[Point]) -> ToricVariety:
    """Normal fan of conv(points) with its class-group presentation."""
    pts = sorted(set(points))
    dim = len(pts[0])
    rays = tuple(facet_normals(pts))

    # support levels: a_rho = -min <p, u_rho>
    levels = [min(_dot(p, u) for p in pts) for u in rays]

    max_cones: set[tuple[int, ...]] = set()
    for p in pts:
        active = [r for r, u in enumerate(rays) if _dot(p, u) == levels[r]]
        if len(active) >= dim and int_rank([list(rays[r]) for r in active]) == dim:
            max_cones.add(tuple(sorted(active)))
    if not max_cones:
        raise UnsupportedGeometryError("no vertices found")

    # grading: free part of coker(M -> Z^rays) via the Smith form of the
    # ray matrix; rows m..R-1 of the left transform present the class group
    b = [list(r) for r in rays]
    d, l, _ = smith_normal_form(b)
    rank = sum(1 for i in range(min(len(b), dim)) if d[i][i])
    if rank != dim:
        raise UnsupportedGeometryError("rays do not span the dual lattice")
    torsion = tuple(d[i][i] for i in range(rank) if d[i][i] > 1)
    grading_rows = l[dim:]
    grading = tuple(tuple(row[r] for row in grading_rows) for r in range(len(rays)))

    return ToricVariety(dim=dim, rays=rays, max_cones=tuple(sorted(max_cones)),
                        grading=grading, torsion=torsion)


# -- problems given by supports ---------------------------------------------------

def default_label(j: int, point: Point) -> str:
    tail = "_".join(str(c).replace("-", "m") for c in point)
    return f"a{j}_{tail}"


@dataclass(frozen=True)
class SupportProblem:
    """A tuple of finite point supports with named generic coefficients."""

    supports: tuple[Support, ...]
    labels: tuple[tuple[str, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.supports[0][0])

    def all_labels(self) -> tuple[str, ...]:
        return tuple(name for group in self.labels for name in group)

    def to_obj(self) -> dict:
        return {
            "supports": [[list(p) for p in s] for s in self.supports],
            "labels": [list(g) for g in self.labels],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SupportProblem":
        supports = tuple(tuple(tuple(p) for p in s) for s in obj["supports"])
        if "labels" in obj and obj["labels"]:
            labels = tuple(tuple(g) for g in obj["labels"])
        else:
            labels = tuple(tuple(default_label(j, p) for p in s)
                           for j, s in enumerate(supports))
        return cls(supports=supports, labels=labels)


def support_problem(supports: Sequence[Sequence[Sequence[int]]],
                    labels: Sequence[Sequence[str]] | None = None) -> SupportProblem:
    sup = tuple(tuple(tuple(int(c) for c in p) for p in s) for s in supports)
    if not sup or not sup[0]:
        raise InputError("need at least one nonempty support")
    dim = len(sup[0][0])
    for s in sup:
        if not s:
            raise InputError("empty support")
        for p in s:
            if len(p) != dim:
                raise InputError("support points of mixed dimension")
        if len(set(s)) != len(s):
            raise InputError("repeated point in a support")
    if labels is None:
        lab = tuple(tuple(default_label(j, p) for p in s) for j, s in enumerate(sup))
    else:
        lab = tuple(tuple(g) for g in labels)
        if tuple(len(g) for g in lab) != tuple(len(s) for s in sup):
            raise InputError("label shape does not match supports")
    flat = [name for g in lab for name in g]
    if len(set(flat)) != len(flat):
        raise InputError("duplicate coefficient label")
    return SupportProblem(supports=sup, labels=lab)


def minkowski_points(supports: Sequence[Support]) -> list[Point]:
    sums = set()
    for combo in itertools.product(*supports):
        sums.add(tuple(sum(c) for c in zip(*combo)))
    return sorted(sums)


def variety_of(problem: SupportProblem) -> ToricVariety:
    return variety_from_points(minkowski_points(problem.supports))


def support_levels(x: ToricVariety, support: Support) -> tuple[int, ...]:
    """a_rho = -min over the support of <p, u_rho>, one per ray."""
    return tuple(-min(_dot(p, u) for p in support) for u in x.rays)


def divisor_class(x: ToricVariety, support: Support) -> tuple[int, ...]:
    return x.degree_of(support_levels(x, support))


def homogenized_exponent(x: ToricVariety, support: Support, point: Point) -> tuple[int, ...]:
    """Exponents of the Cox monomial of a support point: <p,u_rho> + a_rho."""
    a = support_levels(x, support)
    e = tuple(_dot(point, u) + a[r] for r, u in enumerate(x.rays))
    if any(c < 0 for c in e):
        raise AssertionError("negative homogenized exponent")
    return e


def codimension(supports: Sequence[Support]) -> int:
    """Codimension of the eliminant variety of a generic system.

    max over nonempty index sets J of |J| minus the rank of the lattice of
    differences of points of the union of the J-supports.
    """
    best = 0
    idx = range(len(supports))
    for size in range(1, len(supports) + 1):
        for js in itertools.combinations(idx, size):
            pts = [p for j in js for p in supports[j]]
            base = pts[0]
            diffs = [[c - b for c, b in zip(p, base)] for p in pts[1:]]
            r = int_rank(diffs) if diffs else 0
            best = max(best, size - r)
    return best


# -- lattice points of a degree window ----------------------------------------------

def _fm_eliminate(ineqs: list[tuple[tuple[Fraction, ...], Fraction]],
                  var: int) -> list[tuple[tuple[Fraction, ...], Fraction]] | None:
    """Project out variable `var` from the system sum(c*t) >= rhs.

    Returns None when the system is infeasible.
    """
    lowers, uppers, keep = [], [], []
    for c, r in ineqs:
        if c[var] > 0:
            lowers.append((c, r))
        elif c[var] < 0:
            uppers.append((c, r))
        else:
            keep.append((c, r))
    for cl, rl in lowers:
        for cu, ru in uppers:
            # cl[var]*a + cu[var]*b with weights to cancel var
            wl, wu = -cu[var], cl[var]
            c = tuple(wl * a + wu * b for a, b in zip(cl, cu))
            keep.append((c, wl * rl + wu * ru))
    # drop trivially true rows, fail on infeasible ones
    out = []
    for c, r in keep:
        if any(c):
            out.append((c, r))
        elif r > 0:
            return None
    return out


def _interval(ineqs, var: int, point: list[Fraction]) -> tuple[Fraction | None, Fraction | None]:
    lo: Fraction | None = None
    hi: Fraction | None = None
    for c, r in ineqs:
        if not c[var]:
            continue
        rest = r - sum(ci * ti for i, (ci, ti) in enumerate(zip(c, point)) if i != var and ci)
        bound = rest / c[var]
        if c[var] > 0:
            lo = bound if lo is None or bound > lo else lo
        else:
            hi = bound if hi is None or bound < hi else hi
    return lo, hi


def lattice_points_in_window(x: ToricVariety, alpha: Sequence[int],
                             lower: Sequence[int]) -> list[tuple[int, ...]]:
    """All u in Z^rays with degree(u) = alpha and u >= lower componentwise."""
    if x.torsion:
        raise UnsupportedGeometryError("torsion class groups are not supported")
    g_rows = [[g[i] for g in x.grading] for i in range(x.class_rank)]
    u0 = solve_int(g_rows, list(alpha))
    if u0 is None:
        return []
    kernel = int_kernel_basis(g_rows)
    m = len(kernel)
    if m != x.dim:
        raise AssertionError("kernel rank does not match the variety dimension")
    if m == 0:
        u = tuple(u0)
        return [u] if all(a >= b for a, b in zip(u, lower)) else []

    # inequalities sum_i kernel[i][rho] * t_i >= lower[rho] - u0[rho]
    ineqs = []
    for rho in range(x.n_rays):
        c = tuple(Fraction(kernel[i][rho]) for i in range(m))
        ineqs.append((c, Fraction(lower[rho] - u0[rho])))

    systems: list = [ineqs]
    for var in range(m - 1, 0, -1):
        nxt = _fm_eliminate(systems[-1], var)
        if nxt is None:
            return []
        systems.append(nxt)
    systems.reverse()  # systems[i] constrains t_0..t_i

    out: list[tuple[int, ...]] = []
    point = [Fraction(0)] * m

    def walk(level: int) -> None:
        lo, hi = _interval(systems[level], level, point)
        if lo is None or hi is None:
            raise UnsupportedGeometryError("unbounded degree window")
        ilo = math.ceil(lo)
        ihi = math.floor(hi)
        for t in range(ilo, ihi + 1):
            point[level] = Fraction(t)
            if level + 1 == m:
                u = tuple(u0[rho] + sum(kernel[i][rho] * int(point[i]) for i in range(m))
                          for rho in range(x.n_rays))
                out.append(u)
            else:
                walk(level + 1)
        point[level] = Fraction(0)

    walk(0)
    return sorted(out)
