"""Exact multivariate polynomial algebra in the binomial-coefficient basis.

Polynomials are stored as rational linear combinations of products
C(x_1, i_1) * ... * C(x_D, i_D).  A polynomial maps integer points to
integers exactly when every stored coefficient is an integer, which is
the property the rest of the package leans on.  All arithmetic is exact
(`fractions.Fraction`); nothing in this module touches floats.
"""
from __future__ import annotations

import ast
import math
import re
from fractions import Fraction
from functools import lru_cache
from itertools import product as _cartesian

import numpy as np

from .errors import ValidationError

__all__ = [
    "binom_int",
    "IntPoly",
    "PolyMap",
    "parse_poly",
    "parse_polymap",
    "binom_power",
    "compose",
    "cs_system",
    "binom_table_mod",
]


def binom_int(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) for any integer n and k >= 0.

    Negative n uses C(n, k) = (-1)^k C(k - n - 1, k).
    """
    if k < 0:
        return 0
    if n >= 0:
        return math.comb(n, k)
    return (-1) ** k * math.comb(k - n - 1, k)


def binom_frac(c: Fraction, k: int) -> Fraction:
    """C(c, k) for a rational argument: c(c-1)...(c-k+1)/k!."""
    out = Fraction(1)
    for r in range(k):
        out *= c - r
    return out / math.factorial(k)


@lru_cache(maxsize=None)
def _univ_product(a: int, b: int) -> tuple[tuple[int, int], ...]:
    # C(x,a) * C(x,b) = sum_k C(k,a) * C(a, k-b) * C(x,k), max(a,b) <= k <= a+b
    out = []
    for k in range(max(a, b), a + b + 1):
        c = math.comb(k, a) * math.comb(a, k - b)
        if c:
            out.append((k, c))
    return tuple(out)


@lru_cache(maxsize=None)
def _multi_product(i: tuple[int, ...], j: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    partials = [((), 1)]
    for a, b in zip(i, j):
        rule = _univ_product(a, b)
        partials = [(idx + (k,), c * m) for idx, c in partials for k, m in rule]
    return tuple(partials)


def _grlex_key(idx: tuple[int, ...]):
    return (sum(idx), tuple(-e for e in idx))


class IntPoly:
    """A polynomial over named variables, held in the binomial basis."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms):
        self.variables = tuple(variables)
        clean = {}
        nv = len(self.variables)
        for idx, c in terms.items():
            idx = tuple(int(e) for e in idx)
            if len(idx) != nv or any(e < 0 for e in idx):
                raise ValidationError(f"bad exponent index {idx} for {nv} variables")
            c = Fraction(c)
            if c:
                clean[idx] = clean.get(idx, Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}

    # -- constructors ------------------------------------------------
    @classmethod
    def zero(cls, variables):
        return cls(variables, {})

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): Fraction(c)})

    @classmethod
    def variable(cls, variables, name):
        variables = tuple(variables)
        if name not in variables:
            raise ValidationError(f"unknown variable {name!r}")
        idx = [0] * len(variables)
        idx[variables.index(name)] = 1
        return cls(variables, {tuple(idx): Fraction(1)})

    # -- basic queries -----------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        """Total degree; 0 for the zero or constant polynomial."""
        return max((sum(i) for i in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_integer_valued(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coeff(self, idx) -> Fraction:
        return self.terms.get(tuple(idx), Fraction(0))

    def sorted_terms(self):
        """Terms in graded-lexicographic order (by total degree, then lex)."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    # -- arithmetic --------------------------------------------------
    def _check_compatible(self, other: "IntPoly"):
        if self.variables != other.variables:
            raise ValidationError(
                f"variable mismatch: {self.variables} vs {other.variables}"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = IntPoly.constant(self.variables, other)
        self._check_compatible(other)
        out = dict(self.terms)
        for idx, c in other.terms.items():
            out[idx] = out.get(idx, Fraction(0)) + c
        return IntPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(self.variables, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = IntPoly.constant(self.variables, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return IntPoly(self.variables, {i: b * c for i, b in self.terms.items()})
        self._check_compatible(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for i, bi in self.terms.items():
            for j, bj in other.terms.items():
                w = bi * bj
                for idx, m in _multi_product(i, j):
                    out[idx] = out.get(idx, Fraction(0)) + w * m
        return IntPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = Fraction(other)
        if not c:
            raise ValidationError("division by zero")
        return self * (Fraction(1) / c)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValidationError("exponents must be nonnegative integers")
        out = IntPoly.constant(self.variables, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self.terms.items()))))

    # -- evaluation --------------------------------------------------
    def __call__(self, *point) -> Fraction:
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        if len(point) != self.nvars:
            raise ValidationError(f"expected {self.nvars} coordinates")
        total = Fraction(0)
        for idx, c in self.terms.items():
            w = c
            for x, i in zip(point, idx):
                w *= binom_int(int(x), i)
            total += w
        return total

    def eval_mod_table(self, p: int) -> np.ndarray:
        """Values of the polynomial mod p at x = 0..p-1 (univariate only)."""
        if self.nvars != 1:
            raise ValidationError("eval_mod_table needs a univariate polynomial")
        if not self.is_integer_valued:
            raise ValidationError("polynomial is not integer valued")
        kmax = self.degree
        if kmax >= p:
            raise ValidationError(f"degree {kmax} >= p = {p}: binomial tables need degree < p")
        tab = binom_table_mod(p, kmax)
        out = np.zeros(p, dtype=np.int64)
        for (i,), c in self.terms.items():
            out += (int(c) % p) * tab[i]
            out %= p
        return out

    def split_outer(self, outer: int):
        """Group terms by the exponents of the first ``outer`` variables.

        Returns {outer_index_tuple: IntPoly in the remaining variables}.
        """
        if not 0 < outer < self.nvars:
            raise ValidationError("outer must leave at least one inner variable")
        inner_vars = self.variables[outer:]
        groups: dict[tuple[int, ...], dict] = {}
        for idx, c in self.terms.items():
            o, i = idx[:outer], idx[outer:]
            groups.setdefault(o, {})[i] = c
        return {o: IntPoly(inner_vars, t) for o, t in groups.items()}

    # -- basis conversion --------------------------------------------
    def monomial_coeffs(self) -> dict[tuple[int, ...], Fraction]:
        """Coefficients in the ordinary power basis x^e."""
        out: dict[tuple[int, ...], Fraction] = {}
        for idx, c in self.terms.items():
            factors = [_binom_monomial(i) for i in idx]
            for combo in _cartesian(*[range(len(f)) for f in factors]):
                w = c
                for f, e in zip(factors, combo):
                    w *= f[e]
                if w:
                    out[combo] = out.get(combo, Fraction(0)) + w
        return {k: v for k, v in out.items() if v}

    @classmethod
    def from_monomials(cls, variables, coeffs) -> "IntPoly":
        variables = tuple(variables)
        out = cls.zero(variables)
        gens = [cls.variable(variables, v) for v in variables]
        for idx, c in coeffs.items():
            term = cls.constant(variables, c)
            for g, e in zip(gens, idx):
                term = term * g ** e
            out = out + term
        return out

    # -- serialization -----------------------------------------------
    def to_json_dict(self):
        return {
            "vars": list(self.variables),
            "terms": [[list(i), f"{c.numerator}/{c.denominator}"] for i, c in self.sorted_terms()],
        }

    @classmethod
    def from_json_dict(cls, d) -> "IntPoly":
        terms = {tuple(i): Fraction(c) for i, c in d["terms"]}
        return cls(tuple(d["vars"]), terms)

    def __repr__(self):
        if self.is_zero:
            return "0"
        bits = []
        for idx, c in self.sorted_terms():
            factors = []
            if c != 1 or not any(idx):
                factors.append(str(c))
            for v, e in zip(self.variables, idx):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"C({v},{e})")
            bits.append("*".join(factors))
        return " + ".join(bits)


@lru_cache(maxsize=None)
def _binom_monomial(i: int) -> tuple[Fraction, ...]:
    """Power-basis coefficients (constant first) of the univariate C(y, i)."""
    coeffs = [Fraction(1)]
    for r in range(i):
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for e, c in enumerate(coeffs):
            nxt[e + 1] += c
            nxt[e] -= c * r
        coeffs = nxt
    f = math.factorial(i)
    return tuple(c / f for c in coeffs)


def binom_power(P, l: int):
    """C(P, l) computed iteratively: C(P, r) = C(P, r-1) * (P - r + 1) / r."""
    if isinstance(P, PolyMap):
        return PolyMap(P.variables, [binom_power(c, l) for c in P.components])
    if l < 0:
        raise ValidationError("binomial power needs l >= 0")
    out = IntPoly.constant(P.variables, 1)
    for r in range(1, l + 1):
        out = out * (P - (r - 1)) * Fraction(1, r)
    return out


def compose(Q: IntPoly, P: IntPoly) -> IntPoly:
    """Q(P) for univariate Q, written in the binomial basis of Q."""
    if Q.nvars != 1:
        raise ValidationError("compose expects a univariate outer polynomial")
    out = IntPoly.constant(P.variables, 0)
    powers: dict[int, IntPoly] = {}
    cur = IntPoly.constant(P.variables, 1)
    lmax = Q.degree
    for r in range(lmax + 1):
        powers[r] = cur
        cur = cur * (P - r) * Fraction(1, r + 1)
    for (l,), c in Q.terms.items():
        out = out + powers[l] * c
    return out


# ----------------------------------------------------------------------
# text parsing


_VAR_RE = re.compile(r"^(?:[a-wyz]|x\d*|h\d+|[a-zA-Z]\w*)$")
_H_RE = re.compile(r"^h(\d+)$")


def _canonical_var_order(names):
    def key(n):
        if n == "x":
            return (0, 0, n)
        if n == "y":
            return (1, 0, n)
        m = _H_RE.match(n)
        if m:
            return (2, int(m.group(1)), n)
        return (3, 0, n)

    return tuple(sorted(set(names), key=key))


def _collect_names(tree) -> list[str]:
    names = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id != "C":
            names.append(node.id)
    return names


def _eval_node(node, variables) -> IntPoly:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, variables)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int):
            return IntPoly.constant(variables, node.value)
        raise ValidationError(f"unsupported literal {node.value!r}")
    if isinstance(node, ast.Name):
        return IntPoly.variable(variables, node.id)
    if isinstance(node, ast.UnaryOp):
        v = _eval_node(node.operand, variables)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise ValidationError("unsupported unary operator")
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            base = _eval_node(node.left, variables)
            if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                raise ValidationError("exponents must be integer literals")
            return base ** node.right.value
        left = _eval_node(node.left, variables)
        right = _eval_node(node.right, variables)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.degree > 0:
                raise ValidationError("division only by nonzero constants")
            c = right.constant_term
            if not c:
                raise ValidationError("division by zero")
            return left * (Fraction(1) / c)
        raise ValidationError("unsupported operator")
    if isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id == "C"):
            raise ValidationError("only the C(expr, k) call is supported")
        if len(node.args) != 2 or node.keywords:
            raise ValidationError("C takes exactly two arguments")
        inner = _eval_node(node.args[0], variables)
        karg = node.args[1]
        if not isinstance(karg, ast.Constant) or not isinstance(karg.value, int) or karg.value < 0:
            raise ValidationError("second argument of C must be a nonnegative integer literal")
        return binom_power(inner, karg.value)
    raise ValidationError(f"unsupported syntax: {ast.dump(node)}")


def _parse_tree(text: str):
    try:
        return ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise ValidationError(f"cannot parse polynomial text: {e}") from None


def parse_poly(text: str, variables=None) -> IntPoly:
    """Parse a single polynomial from text (ops + - * / ^, calls C(expr, k))."""
    tree = _parse_tree(text)
    if isinstance(tree.body, ast.Tuple):
        raise ValidationError("expected a single polynomial, got a comma-separated list")
    if variables is None:
        variables = _canonical_var_order(_collect_names(tree))
        if not variables:
            variables = ("x",)
    return _eval_node(tree.body, tuple(variables))


def parse_polymap(text: str, variables=None) -> "PolyMap":
    """Parse a comma-separated list of polynomials sharing one variable set."""
    tree = _parse_tree(text)
    if isinstance(tree.body, ast.Tuple):
        parts = tree.body.elts
    else:
        parts = [tree.body]
    if variables is None:
        variables = _canonical_var_order(_collect_names(tree))
        if not variables:
            variables = ("x",)
    variables = tuple(variables)
    return PolyMap(variables, [_eval_node(p, variables) for p in parts])


class PolyMap:
    """A tuple of polynomials over a shared variable set."""

    __slots__ = ("variables", "components")

    def __init__(self, variables, components):
        self.variables = tuple(variables)
        comps = []
        for c in components:
            if not isinstance(c, IntPoly):
                raise ValidationError("components must be IntPoly")
            if c.variables != self.variables:
                raise ValidationError("component variable mismatch")
            comps.append(c)
        if not comps:
            raise ValidationError("a polynomial map needs at least one component")
        self.components = tuple(comps)

    @classmethod
    def from_text(cls, text: str, variables=None) -> "PolyMap":
        return parse_polymap(text, variables)

    @property
    def t(self) -> int:
        return len(self.components)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    @property
    def has_zero_constants(self) -> bool:
        return all(not c.constant_term for c in self.components)

    @property
    def is_integer_valued(self) -> bool:
        return all(c.is_integer_valued for c in self.components)

    def binom_power(self, l: int) -> "PolyMap":
        return binom_power(self, l)

    def degree_part(self, j: int) -> "PolyMap":
        comps = [
            IntPoly(self.variables, {i: c for i, c in comp.terms.items() if sum(i) == j})
            for comp in self.components
        ]
        return PolyMap(self.variables, comps)

    def coefficient_vectors(self) -> dict[tuple[int, ...], tuple[Fraction, ...]]:
        """Map each multi-index to its vector of per-component coefficients."""
        keys = set()
        for c in self.components:
            keys.update(c.terms)
        return {
            m: tuple(c.terms.get(m, Fraction(0)) for c in self.components)
            for m in sorted(keys, key=_grlex_key)
        }

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        return tuple(c(*point) for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.variables == other.variables and self.components == other.components

    def __hash__(self):
        return hash((self.variables, self.components))

    def to_json_dict(self):
        return {
            "vars": list(self.variables),
            "components": [c.to_json_dict() for c in self.components],
        }

    @classmethod
    def from_json_dict(cls, d) -> "PolyMap":
        comps = [IntPoly.from_json_dict(c) for c in d["components"]]
        return cls(tuple(d["vars"]), comps)

    def __repr__(self):
        return "(" + ", ".join(repr(c) for c in self.components) + ")"


def cs_system(m: int, d: int) -> PolyMap:
    """The 2^m-component system x + (y + sum_i w_i h_i)^d - sum_i (i-1) w_i h_i.

    Components are ordered by w in {0,1}^m with the last bit varying fastest.
    """
    if m < 1 or d < 1:
        raise ValidationError("cs_system needs m >= 1 and d >= 1")
    variables = ("x", "y") + tuple(f"h{i}" for i in range(1, m + 1))
    x = IntPoly.variable(variables, "x")
    y = IntPoly.variable(variables, "y")
    hs = [IntPoly.variable(variables, f"h{i}") for i in range(1, m + 1)]
    comps = []
    for w in _cartesian([0, 1], repeat=m):
        shift = y
        corr = IntPoly.constant(variables, 0)
        for i, (wi, h) in enumerate(zip(w, hs), start=1):
            if wi:
                shift = shift + h
                corr = corr + (i - 1) * h
        comps.append(x + shift ** d - corr)
    return PolyMap(variables, comps)


def binom_table_mod(p: int, kmax: int) -> np.ndarray:
    """Array of shape (kmax+1, p) with row k holding C(x, k) mod p, x = 0..p-1."""
    if kmax >= p:
        raise ValidationError("binomial tables mod p need k < p")
    x = np.arange(p, dtype=np.int64)
    tab = np.zeros((kmax + 1, p), dtype=np.int64)
    tab[0] = 1
    for k in range(1, kmax + 1):
        inv = pow(k, -1, p)
        tab[k] = (tab[k - 1] * ((x - k + 1) % p)) % p
        tab[k] = (tab[k] * inv) % p
    return tab
