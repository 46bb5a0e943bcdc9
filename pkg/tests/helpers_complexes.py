"""Random small complexes and morphism fixtures over the projective line."""
from __future__ import annotations

from fractions import Fraction

from toricres.complexes import (
    ComplexMorphism,
    FreeGradedComplex,
    variety_from_simplex,
)
from toricres.qpoly import PolyMatrix, SparsePoly

P1 = variety_from_simplex(1)
PARAMS = ("s", "t")
VARIABLES = PARAMS + P1.var_names()


def random_form(rng, deg: int) -> SparsePoly:
    """Random binary form of the given degree, coefficients linear in the
    parameters with small integers."""
    if deg < 0:
        return SparsePoly.zero(VARIABLES)
    terms = {}
    for k in range(deg + 1):
        xe = (k, deg - k)
        for pi in range(len(PARAMS) + 1):
            c = rng.randint(-3, 3)
            if c:
                pe = [0] * len(PARAMS)
                if pi < len(PARAMS):
                    pe[pi] = 1
                key = tuple(pe) + xe
                terms[key] = terms.get(key, 0) + c
    return SparsePoly(VARIABLES, terms)


def random_two_term(rng) -> FreeGradedComplex:
    """Two-term complex of free modules on the line with random entries."""
    r1 = rng.randint(1, 2)
    r0 = rng.randint(1, 2)
    cod = [rng.randint(-2, 3) for _ in range(r0)]
    dom = [rng.randint(-1, 4) for _ in range(r1)]
    rows = [[random_form(rng, dom[i] - cod[j]) for j in range(r0)]
            for i in range(r1)]
    return FreeGradedComplex(
        x=P1, variables=VARIABLES, n_params=len(PARAMS),
        degrees={-1: tuple((a,) for a in dom), 0: tuple((b,) for b in cod)},
        diffs={-1: PolyMatrix.from_rows(rows, VARIABLES, ncols=r0)})


def random_specialization(rng) -> dict[str, Fraction]:
    return {v: Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            for v in PARAMS}


def binary_form(coeffs) -> SparsePoly:
    """Constant-coefficient binary form from the coefficient list."""
    d = len(coeffs) - 1
    xv = P1.var_names()
    return SparsePoly(xv, {(d - k, k): c for k, c in enumerate(coeffs) if c})


def koszul_two(fa: SparsePoly, ga: SparsePoly, da: int, db: int,
               twist: int) -> FreeGradedComplex:
    """Koszul complex of two binary forms of degrees da, db, twisted."""
    xv = P1.var_names()
    deg = {-2: ((da + db - twist,),),
           -1: ((da - twist,), (db - twist,)),
           0: ((-twist,),)}
    d2 = PolyMatrix.from_rows([[-ga, fa]], xv, ncols=2)
    d1 = PolyMatrix.from_rows([[fa], [ga]], xv)
    return FreeGradedComplex(x=P1, variables=xv, n_params=0, degrees=deg,
                             diffs={-2: d2, -1: d1})


def rescale_morphism(f: SparsePoly, g: SparsePoly, u: SparsePoly,
                     df: int, dg: int, twist: int) -> ComplexMorphism:
    """The map K(f*u, g) -> K(f, g) dividing the first generator by u."""
    xv = P1.var_names()
    du = u.total_degree()
    M = koszul_two(f * u, g, df + du, dg, twist)
    N = koszul_two(f, g, df, dg, twist)
    one = SparsePoly.const(xv, 1)
    zero = SparsePoly.zero(xv)
    return ComplexMorphism(source=M, target=N, maps={
        -2: PolyMatrix.from_rows([[u]], xv),
        -1: PolyMatrix.from_rows([[u, zero], [zero, one]], xv, ncols=2),
        0: PolyMatrix.from_rows([[one]], xv)})


def identity_morphism(C: FreeGradedComplex) -> ComplexMorphism:
    maps = {}
    for p in C.degrees:
        m = PolyMatrix(C.rank(p), C.rank(p), C.variables)
        for k in range(C.rank(p)):
            m.rows[k][k] = SparsePoly.const(C.variables, 1)
        maps[p] = m
    return ComplexMorphism(source=C, target=C, maps=maps)
