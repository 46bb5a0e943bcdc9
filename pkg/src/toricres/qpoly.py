"""Sparse multivariate polynomials over Q, exact.

Polynomials are dicts mapping exponent tuples to nonzero coefficients.
Coefficients are int or fractions.Fraction, normalized to int whenever the
denominator is 1 so that the common all-integer case stays on fast paths.
The variable list is part of every polynomial; arithmetic requires equal
variable tuples.

Monomial order is degrevlex throughout: higher total degree first, ties
broken so that the last nonzero entry of the exponent difference is
negative for the larger monomial.  Serialization lists terms in descending
degrevlex and is bit-reproducible:

    poly   := "0" | term (" + " term)*
    term   := coeff | coeff (" * " factor)*
    coeff  := ["-"] digits | ["-"] digits "/" digits
    factor := name | name "^" exponent

Example: "2 * a^2 * c + -1/3 * b".
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Coeff = int | Fraction
Expo = tuple[int, ...]


def cnorm(c: Coeff) -> Coeff:
    """Collapse Fractions with denominator 1 to int."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    return c


def drl_key(exp: Expo) -> tuple:
    # sorting by this key ascending puts smaller monomials first
    return (sum(exp), tuple(-e for e in reversed(exp)))


class SparsePoly:
    """Immutable-by-convention sparse polynomial."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Expo, Coeff]):
        self.vars: tuple[str, ...] = tuple(variables)
        clean: dict[Expo, Coeff] = {}
        for e, c in terms.items():
            c = cnorm(c)
            if c:
                clean[tuple(e)] = c
        self.terms: dict[Expo, Coeff] = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "SparsePoly":
        return cls(variables, {})

    @classmethod
    def const(cls, variables: Sequence[str], c: Coeff) -> "SparsePoly":
        z: Expo = (0,) * len(variables)
        return cls(variables, {z: c})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "SparsePoly":
        i = tuple(variables).index(name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): 1})

    @classmethod
    def monomial(cls, variables: Sequence[str], exp: Expo, c: Coeff = 1) -> "SparsePoly":
        return cls(variables, {tuple(exp): c})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Coeff:
        if not self.terms:
            return 0
        [(e, c)] = self.terms.items()
        if any(e):
            raise ValueError("not a constant")
        return c

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def leading(self) -> tuple[Expo, Coeff]:
        """Leading (exponent, coeff) under degrevlex."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=drl_key)
        return e, self.terms[e]

    def num_terms(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[Expo, Coeff]]:
        return [(e, self.terms[e]) for e in sorted(self.terms, key=drl_key, reverse=True)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"SparsePoly({poly_to_text(self)!r})"

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "SparsePoly") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            elif e in t:
                del t[e]
        return SparsePoly(self.vars, t)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def scale(self, c: Coeff) -> "SparsePoly":
        c = cnorm(c)
        if not c:
            return SparsePoly.zero(self.vars)
        return SparsePoly(self.vars, {e: cc * c for e, cc in self.terms.items()})

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        self._check(other)
        if not self.terms or not other.terms:
            return SparsePoly.zero(self.vars)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Expo, Coeff] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return SparsePoly(self.vars, out)

    def __pow__(self, n: int) -> "SparsePoly":
        if n < 0:
            raise ValueError("negative power")
        result = SparsePoly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def shift(self, exp: Expo) -> "SparsePoly":
        """Multiply by the monomial x^exp (exp may be negative: Laurent shift)."""
        return SparsePoly(self.vars, {tuple(a + b for a, b in zip(e, exp)): c
                                      for e, c in self.terms.items()})

    def diff(self, name: str) -> "SparsePoly":
        i = self.vars.index(name)
        out: dict[Expo, Coeff] = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return SparsePoly(self.vars, out)

    # -- division ----------------------------------------------------------

    def exact_div(self, d: "SparsePoly") -> "SparsePoly | None":
        """Exact quotient self/d, or None when d does not divide self."""
        self._check(d)
        if not d.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.terms:
            return SparsePoly.zero(self.vars)
        de, dc = d.leading()
        rem = dict(self.terms)
        q: dict[Expo, Coeff] = {}
        # each step strictly lowers the leading monomial of the remainder
        while rem:
            re_ = max(rem, key=drl_key)
            te = tuple(a - b for a, b in zip(re_, de))
            if any(x < 0 for x in te):
                return None
            tc = cnorm(Fraction(rem[re_]) / Fraction(dc))
            q[te] = tc
            for e2, c2 in d.terms.items():
                e = tuple(a + b for a, b in zip(te, e2))
                s = rem.get(e, 0) - tc * c2
                if s:
                    rem[e] = s
                elif e in rem:
                    del rem[e]
        return SparsePoly(self.vars, q)

    # -- evaluation / substitution ------------------------------------------

    def eval(self, assign: Mapping[str, Coeff]) -> Coeff:
        idx = [assign[v] for v in self.vars]
        total: Coeff = 0
        for e, c in self.terms.items():
            val: Coeff = c
            for x, k in zip(idx, e):
                if k:
                    val = val * x ** k
            total = total + val
        return cnorm(Fraction(total)) if isinstance(total, Fraction) else total

    def substitute(self, images: Mapping[str, "SparsePoly"],
                   variables: Sequence[str]) -> "SparsePoly":
        """Ring map sending each variable to images[name] over a new variable set."""
        new_vars = tuple(variables)
        pows: list[dict[int, SparsePoly]] = []
        imgs: list[SparsePoly] = []
        for v in self.vars:
            img = images[v]
            if img.vars != new_vars:
                raise ValueError("image variables out of step")
            imgs.append(img)
            pows.append({0: SparsePoly.const(new_vars, 1)})
        out = SparsePoly.zero(new_vars)
        for e, c in self.terms.items():
            term = SparsePoly.const(new_vars, c)
            for i, k in enumerate(e):
                if not k:
                    continue
                cache = pows[i]
                if k not in cache:
                    kk = max(cache)
                    acc = cache[kk]
                    while kk < k:
                        acc = acc * imgs[i]
                        kk += 1
                        cache[kk] = acc
                term = term * cache[k]
            out = out + term
        return out

    def rename(self, variables: Sequence[str]) -> "SparsePoly":
        """Same exponents, new variable names (lengths must match)."""
        if len(variables) != len(self.vars):
            raise ValueError("length mismatch")
        return SparsePoly(variables, dict(self.terms))


# -- content and normalization ---------------------------------------------

def content_unit(p: SparsePoly) -> Coeff:
    """Rational unit u with p/u primitive: integer coprime coefficients and
    positive leading (degrevlex) coefficient.  Zero polynomial gives 1."""
    if not p.terms:
        return 1
    num = 0
    den = 1
    for c in p.terms.values():
        f = Fraction(c)
        num = math.gcd(num, abs(f.numerator))
        den = den * f.denominator // math.gcd(den, f.denominator)
    u = Fraction(num, den)
    _, lc = p.leading()
    if Fraction(lc) < 0:
        u = -u
    return cnorm(u)


def primitive_part(p: SparsePoly) -> SparsePoly:
    if not p.terms:
        return p
    u = Fraction(content_unit(p))
    return SparsePoly(p.vars, {e: cnorm(Fraction(c) / u) for e, c in p.terms.items()})


def same_up_to_sign(p: SparsePoly, q: SparsePoly) -> bool:
    return p == q or p == -q


# -- integer k-th roots ------------------------------------------------------

def _int_kth_root(n: int, k: int) -> int | None:
    """Exact k-th root of n >= 0, or None."""
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n else 0
    for cand in (r - 1, r, r + 1, r + 2):
        if cand >= 0 and cand ** k == n:
            return cand
    # float guess can be off for big n; bisect
    lo, hi = 0, 1
    while hi ** k < n:
        hi *= 2
    while lo <= hi:
        mid = (lo + hi) // 2
        m = mid ** k
        if m == n:
            return mid
        if m < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def _coeff_kth_root(c: Coeff, k: int) -> Coeff | None:
    f = Fraction(c)
    neg = f < 0
    if neg and k % 2 == 0:
        return None
    rn = _int_kth_root(abs(f.numerator), k)
    rd = _int_kth_root(f.denominator, k)
    if rn is None or rd is None:
        return None
    r = Fraction(rn, rd)
    return cnorm(-r if neg else r)


def kth_root(p: SparsePoly, k: int) -> SparsePoly | None:
    """Exact polynomial q with q**k == p, or None.

    Peels leading terms under degrevlex: the leading term of q is the k-th
    root of the leading term of p, and each further term t of q satisfies
    LT(p - q_partial**k) = k * LT(q)^(k-1) * t.  A final q**k == p check
    guards against non-power inputs that survive the peeling.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if k == 1:
        return p
    if not p.terms:
        return p
    le, lc = p.leading()
    if any(x % k for x in le):
        return None
    rc = _coeff_kth_root(lc, k)
    if rc is None:
        return None
    q = SparsePoly.monomial(p.vars, tuple(x // k for x in le), rc)
    lead_pow = q ** (k - 1)
    lpe, lpc = lead_pow.leading()
    # one peeling round per term of the root; generous bail-out bound
    for _ in range(len(p.terms) * k + 16):
        r = p - q ** k
        if not r.terms:
            return q
        re_, rc_ = r.leading()
        te = tuple(a - b for a, b in zip(re_, lpe))
        if any(x < 0 for x in te):
            return None
        tc = cnorm(Fraction(rc_) / (k * Fraction(lpc)))
        t = SparsePoly.monomial(p.vars, te, tc)
        if drl_key(te) >= drl_key(q.leading()[0]):
            return None
        q = q + t
    return None


# -- serialization -----------------------------------------------------------

def coeff_to_text(c: Coeff) -> str:
    f = Fraction(c)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def poly_to_text(p: SparsePoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        factors = [coeff_to_text(c)]
        for name, k in zip(p.vars, e):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append(f"{name}^{k}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


_COEFF_RE = re.compile(r"^-?\d+(/\d+)?$")
_FACTOR_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(\^(-?\d+))?$")


def poly_from_text(text: str, variables: Sequence[str]) -> SparsePoly:
    variables = tuple(variables)
    vi = {v: i for i, v in enumerate(variables)}
    text = text.strip()
    if text == "0":
        return SparsePoly.zero(variables)
    terms: dict[Expo, Coeff] = {}
    for raw in text.split(" + "):
        factors = [f.strip() for f in raw.strip().split("*")]
        head = factors[0]
        if not _COEFF_RE.match(head):
            raise ValueError(f"bad coefficient token {head!r}")
        c: Coeff = Fraction(head) if "/" in head else int(head)
        e = [0] * len(variables)
        for f in factors[1:]:
            m = _FACTOR_RE.match(f)
            if not m:
                raise ValueError(f"bad factor token {f!r}")
            name, _, kk = m.groups()
            if name not in vi:
                raise ValueError(f"unknown variable {name!r}")
            e[vi[name]] += int(kk) if kk else 1
        key = tuple(e)
        s = terms.get(key, 0) + c
        if s:
            terms[key] = s
        elif key in terms:
            del terms[key]
    return SparsePoly(variables, terms)


# -- matrices over the polynomial ring ---------------------------------------

class PolyMatrix:
    """Dense matrix of SparsePoly entries.  Row convention: vectors act on
    the left, v -> v @ M, so rows index the domain."""

    __slots__ = ("nrows", "ncols", "vars", "rows")

    def __init__(self, nrows: int, ncols: int, variables: Sequence[str],
                 rows: list[list[SparsePoly]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.vars = tuple(variables)
        if rows is None:
            z = SparsePoly.zero(self.vars)
            rows = [[z] * ncols for _ in range(nrows)]
        self.rows = rows

    @classmethod
    def from_rows(cls, rows: list[list[SparsePoly]], variables: Sequence[str],
                  ncols: int | None = None) -> "PolyMatrix":
        n = len(rows)
        m = ncols if ncols is not None else (len(rows[0]) if rows else 0)
        return cls(n, m, variables, [list(r) for r in rows])

    def __getitem__(self, rc: tuple[int, int]) -> SparsePoly:
        return self.rows[rc[0]][rc[1]]

    def set(self, r: int, c: int, p: SparsePoly) -> None:
        self.rows[r][c] = p

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.vars) == (other.nrows, other.ncols, other.vars) \
            and self.rows == other.rows

    def is_zero(self) -> bool:
        return all(not p for row in self.rows for p in row)

    def matmul(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = PolyMatrix(self.nrows, other.ncols, self.vars)
        for i in range(self.nrows):
            for k in range(self.ncols):
                p = self.rows[i][k]
                if not p:
                    continue
                for j in range(other.ncols):
                    q = other.rows[k][j]
                    if q:
                        out.rows[i][j] = out.rows[i][j] + p * q
        return out

    def transpose(self) -> "PolyMatrix":
        out = PolyMatrix(self.ncols, self.nrows, self.vars)
        for i in range(self.nrows):
            for j in range(self.ncols):
                out.rows[j][i] = self.rows[i][j]
        return out

    def map_entries(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.nrows, self.ncols, self.vars,
                          [[fn(p) for p in row] for row in self.rows])

    def eval(self, assign: Mapping[str, Coeff]) -> list[list[Coeff]]:
        return [[p.eval(assign) for p in row] for row in self.rows]

    def to_text(self) -> list[list[str]]:
        return [[poly_to_text(p) for p in row] for row in self.rows]

    @classmethod
    def from_text(cls, cells: list[list[str]], variables: Sequence[str]) -> "PolyMatrix":
        rows = [[poly_from_text(s, variables) for s in row] for row in cells]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        return cls(n, m, variables, rows)

    def det(self) -> SparsePoly:
        """Fraction-free Bareiss determinant with sparsest-entry pivoting."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if n == 0:
            return SparsePoly.const(self.vars, 1)
        a = [list(r) for r in self.rows]
        sign = 1
        prev = SparsePoly.const(self.vars, 1)
        for k in range(n - 1):
            # full pivoting on the fewest-term nonzero entry
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    p = a[i][j]
                    if p:
                        score = (p.num_terms(), i, j)
                        if best is None or score < best[0]:
                            best = (score, i, j)
            if best is None:
                return SparsePoly.zero(self.vars)
            _, pi, pj = best
            if pi != k:
                a[k], a[pi] = a[pi], a[k]
                sign = -sign
            if pj != k:
                for row in a:
                    row[k], row[pj] = row[pj], row[k]
                sign = -sign
            piv = a[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = a[i][j] * piv - a[i][k] * a[k][j]
                    if num:
                        q = num.exact_div(prev)
                        if q is None:
                            raise ArithmeticError("non-exact division in fraction-free elimination")
                        a[i][j] = q
                    else:
                        a[i][j] = SparsePoly.zero(self.vars)
                a[i][k] = SparsePoly.zero(self.vars)
            prev = piv
        d = a[n - 1][n - 1]
        return d if sign > 0 else -d


def poly_sum(polys: Iterable[SparsePoly], variables: Sequence[str]) -> SparsePoly:
    out = SparsePoly.zero(variables)
    for p in polys:
        out = out + p
    return out
