"""Polynomial sequences on tori with 1/p-rational Taylor coefficients.

A sequence g(n) = sum_i g_i C(n, i) mod 1 on the m-torus carries one
filtration level per coordinate and one depth marker per Taylor
coefficient (coefficient i lives in the subgroup spanned by coordinates
of level >= depth(i); the default depth is i).  Characters are integer
vectors k acting by x -> k . x with modulus |k| = sum |k_j|.

Composing with an integer-valued polynomial map lifts the sequence to a
product torus; all lift arithmetic is exact, so statements like "this
character annihilates the lifted sequence" are decided symbolically, with
the exponential-sum defect only confirming them numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian

import numpy as np

from .binpoly import IntPoly, PolyMap, binom_power, binom_table_mod, parse_polymap
from .errors import CostError, ValidationError
from .field import PrimeField

__all__ = [
    "TorusSeq",
    "LiftedSeq",
    "CharacterZ",
    "IrrationalityReport",
    "DefectReport",
    "irrationality_check",
    "lift_gP",
    "character_sum",
    "weyl_defect",
    "verify_section11",
]

_ENUM_BUDGET = 2_000_000


@dataclass(frozen=True)
class CharacterZ:
    coeffs: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    @property
    def is_trivial(self) -> bool:
        return not any(self.coeffs)


class TorusSeq:
    """g(n) = sum_i g_i C(n, i) mod 1 with g_i in (1/p) Z^m."""

    __slots__ = ("p", "m", "numerators", "levels", "depth")

    def __init__(self, p: int, numerators, levels=None, depth=None):
        if not isinstance(p, int) or p < 2:
            raise ValidationError("denominator prime must be >= 2")
        self.p = p
        nums = tuple(tuple(int(v) for v in row) for row in numerators)
        if not nums:
            raise ValidationError("need at least the constant coefficient")
        m = len(nums[0])
        if any(len(r) != m for r in nums):
            raise ValidationError("coefficient vectors have inconsistent length")
        self.m = m
        self.numerators = nums
        self.levels = tuple(levels) if levels is not None else (self.degree,) * m
        if len(self.levels) != m:
            raise ValidationError("need one level per coordinate")
        self.depth = tuple(depth) if depth is not None else tuple(range(len(nums)))
        if len(self.depth) != len(nums):
            raise ValidationError("need one depth marker per coefficient")
        for i in range(1, len(nums)):
            for c in range(m):
                if self.levels[c] < self.depth[i] and nums[i][c] % p:
                    raise ValidationError(
                        f"coefficient {i} has depth {self.depth[i]} but touches "
                        f"coordinate {c} of level {self.levels[c]}"
                    )

    @property
    def degree(self) -> int:
        return len(self.numerators) - 1

    @property
    def nvars(self) -> int:
        return 1

    @property
    def dim(self) -> int:
        return self.m

    def taylor_items(self):
        for i, row in enumerate(self.numerators):
            yield (i,), row

    def __call__(self, n: int):
        out = []
        for c in range(self.m):
            tot = sum(
                row[c] * math.comb(n, i) if n >= 0 else row[c] * _binom_any(n, i)
                for i, row in enumerate(self.numerators)
            )
            out.append(Fraction(tot % self.p, self.p))
        return tuple(out)


def _binom_any(n: int, k: int) -> int:
    from .binpoly import binom_int

    return binom_int(n, k)


class LiftedSeq:
    """A sequence g composed with a polynomial map, on the product torus."""

    __slots__ = ("p", "nvars", "dim", "taylor")

    def __init__(self, p: int, nvars: int, dim: int, taylor):
        self.p = p
        self.nvars = nvars
        self.dim = dim
        self.taylor = dict(taylor)

    def taylor_items(self):
        return self.taylor.items()


@dataclass(frozen=True)
class IrrationalityReport:
    bound: int
    passed: bool
    witness_level: int | None
    witness: CharacterZ | None


@dataclass(frozen=True)
class DefectReport:
    value: float
    argmax: CharacterZ
    bound: int
    n_characters: int


def _enumerate_characters(dim: int, K: int):
    """Nonzero integer vectors with |k| <= K, by modulus then lexicographic."""
    if (2 * K + 1) ** dim > _ENUM_BUDGET:
        raise CostError(f"character enumeration of size (2K+1)^{dim} too large")
    out = [
        k
        for k in _cartesian(range(-K, K + 1), repeat=dim)
        if any(k) and sum(abs(v) for v in k) <= K
    ]
    out.sort(key=lambda k: (sum(abs(v) for v in k), k))
    return out


def irrationality_check(g: TorusSeq, A: int) -> IrrationalityReport:
    """No character of modulus <= A on the depth-i level block kills g_i.

    Scans i = 1..deg(g); the block for coefficient i is the set of
    coordinates whose level equals depth(i).
    """
    if A < 1:
        raise ValidationError("irrationality bound must be >= 1")
    for i in range(1, g.degree + 1):
        block = [c for c in range(g.m) if g.levels[c] == g.depth[i]]
        if not block:
            continue
        vals = [g.numerators[i][c] % g.p for c in block]
        for k in _enumerate_characters(len(block), A):
            if sum(kc * v for kc, v in zip(k, vals)) % g.p == 0:
                full = [0] * g.m
                for c, kc in zip(block, k):
                    full[c] = kc
                return IrrationalityReport(A, False, i, CharacterZ(tuple(full)))
    return IrrationalityReport(A, True, None, None)


def lift_gP(g: TorusSeq, P: PolyMap) -> LiftedSeq:
    """Taylor data of n -> (g(P_1(n)), ..., g(P_t(n))) on the t*m-torus.

    Coordinate (component k, torus coordinate c) sits at flat index k*m + c.
    """
    if not P.is_integer_valued:
        raise ValidationError("the map must be integer valued")
    t, m, p = P.t, g.m, g.p
    taylor: dict[tuple[int, ...], list[int]] = {}
    for i in range(1, g.degree + 1):
        gi = g.numerators[i]
        Ci = binom_power(P, i)
        for k, comp in enumerate(Ci.components):
            for midx, coeff in comp.terms.items():
                if coeff.denominator != 1:
                    raise ArithmeticError("binomial power of an integer map must be integral")
                row = taylor.setdefault(midx, [0] * (t * m))
                for c in range(m):
                    row[k * m + c] += int(coeff) * gi[c]
    zero = (0,) * P.nvars
    if g.numerators[0] != (0,) * m:
        row = taylor.setdefault(zero, [0] * (t * m))
        for k in range(t):
            for c in range(m):
                row[k * m + c] += g.numerators[0][c]
    taylor = {
        midx: tuple(v % p for v in row)
        for midx, row in taylor.items()
        if any(v % p for v in row)
    }
    return LiftedSeq(p, P.nvars, t * m, taylor)


def character_sum(seq, k: CharacterZ | tuple) -> complex:
    """E_n e(k . seq(n)) with n ranging over [0, p)^(number of parameters)."""
    if not isinstance(k, CharacterZ):
        k = CharacterZ(tuple(int(v) for v in k))
    p = seq.p
    dim = seq.dim if isinstance(seq, (TorusSeq, LiftedSeq)) else None
    if dim is None or len(k.coeffs) != dim:
        raise ValidationError("character length does not match the torus dimension")
    phase: dict[tuple[int, ...], int] = {}
    for midx, row in seq.taylor_items():
        n = sum(kc * v for kc, v in zip(k.coeffs, row)) % p
        if n:
            phase[midx] = n
    if not phase:
        return 1.0 + 0.0j
    field = PrimeField(p) if p > 2 else None
    char = (
        field.char_table if field is not None else np.exp(2j * np.pi * np.arange(p) / p)
    )
    D = seq.nvars
    degs = [max(midx[j] for midx in phase) for j in range(D)]
    if any(d >= p for d in degs):
        raise ValidationError("phase degree must stay below p")
    tabs = [binom_table_mod(p, d) for d in degs]
    if D == 1:
        val = np.zeros(p, dtype=np.int64)
        for (a,), n in phase.items():
            val += n * tabs[0][a]
        return complex(char[val % p].mean())
    if D == 2:
        # row-by-row: collapse the x-dependence, vectorize over y
        by_b: dict[int, dict[int, int]] = {}
        for (a, b), n in phase.items():
            by_b.setdefault(b, {})[a] = n
        total = 0.0 + 0.0j
        parts = []
        for x0 in range(p):
            val = np.zeros(p, dtype=np.int64)
            for b, arow in by_b.items():
                w = sum(n * int(tabs[0][a, x0]) for a, n in arow.items()) % p
                if w:
                    val += w * tabs[1][b]
            parts.append(char[val % p].sum())
        total = np.sum(np.asarray(parts))
        return complex(total) / p**2
    raise CostError("character sums implemented for at most two parameters")


def weyl_defect(seq, K: int, level_respecting: bool = False) -> DefectReport:
    """Largest |E e(k . seq)| over nontrivial characters of modulus <= K.

    With ``level_respecting`` (plain sequences only) the search is limited
    to characters supported on a single filtration-level block.  Ties go to
    the first character in (modulus, lex) order.
    """
    if K < 1:
        raise ValidationError("modulus bound must be >= 1")
    if level_respecting:
        if not isinstance(seq, TorusSeq):
            raise ValidationError("level-respecting search needs a plain torus sequence")
        cands = []
        for lev in sorted(set(seq.levels)):
            block = [c for c in range(seq.m) if seq.levels[c] == lev]
            for k in _enumerate_characters(len(block), K):
                full = [0] * seq.m
                for c, kc in zip(block, k):
                    full[c] = kc
                cands.append(tuple(full))
        cands.sort(key=lambda k: (sum(abs(v) for v in k), k))
    else:
        cands = _enumerate_characters(seq.dim, K)
    best = -1.0
    best_k = None
    for k in cands:
        v = abs(character_sum(seq, k))
        if v > best:
            best = v
            best_k = k
    return DefectReport(best, CharacterZ(best_k), K, len(cands))


def verify_section11(p: int) -> dict:
    """End-to-end check of the quadratic annihilation example at prime p.

    Builds g(n) = (alpha n, alpha C(n,2)) with alpha = floor(sqrt p)/p on the
    2-torus with levels (1, 2), lifts it along (x, x+y, x+2y, x+y^2), and
    verifies: A-irrationality at A = floor(sqrt p); exact annihilation by the
    character (x1 - z1) + (x2 - 2 y2 + u2); failure for a one-sign
    modification; the cross-level cancellation in the C(y,2) coefficient; and
    defect 1 of the annihilating character.
    """
    PrimeField(p)  # validates primality
    a = math.isqrt(p)
    g = TorusSeq(p, [(0, 0), (a, 0), (0, a)], levels=(1, 2))
    irr = irrationality_check(g, a)
    P = parse_polymap("x, x+y, x+2*y, x+y^2")
    lifted = lift_gP(g, P)
    # level-1 weights (1, 0, 0, -1): the y-coefficient they produce cancels
    # the stray linear term that C(x+2y, 2) contributes at level 2
    eta = CharacterZ((1, 1, 0, -2, 0, 1, -1, 0))
    eta_mod = CharacterZ((1, 1, 0, -2, 0, -1, -1, 0))

    def annihilates(k: CharacterZ) -> bool:
        return all(
            sum(kc * v for kc, v in zip(k.coeffs, row)) % p == 0
            for _, row in lifted.taylor_items()
        )

    sym = annihilates(eta)
    sym_mod = annihilates(eta_mod)
    # cross-level transfer at the C(y,2) coefficient: the first-level part
    # and the second-level part are separately nonzero but cancel
    eta1, eta2 = eta.coeffs[0::2], eta.coeffs[1::2]
    c1 = sum(e * int(c.coeff((0, 2))) for e, c in zip(eta1, P.components)) * a
    C2 = binom_power(P, 2)
    c2 = sum(e * int(c.coeff((0, 2))) for e, c in zip(eta2, C2.components)) * a
    transfer = {
        "level1_part": c1,
        "level2_part": c2,
        "parts_nonzero": c1 % p != 0 and c2 % p != 0,
        "sum_vanishes": (c1 + c2) % p == 0,
    }
    defect = abs(character_sum(lifted, eta))
    passed = (
        irr.passed
        and sym
        and not sym_mod
        and transfer["parts_nonzero"]
        and transfer["sum_vanishes"]
        and abs(defect - 1.0) <= 1e-9
    )
    return {
        "p": p,
        "alpha_numerator": a,
        "irrationality": irr,
        "annihilator": eta,
        "annihilator_symbolic_zero": sym,
        "modified_symbolic_zero": sym_mod,
        "transfer": transfer,
        "defect_at_annihilator": defect,
        "passed": passed,
    }
