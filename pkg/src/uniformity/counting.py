"""Averaged products over polynomial configurations, set counts, and energy.

The workhorse is a blocked grid scan: for a map P = (P_1, ..., P_t) in D
parameters it walks the first D-1 coordinates in vectorized blocks and keeps
the last coordinate as a dense numpy axis.  Maps of the common shape
P_i = x + c_i(y) take a fast path that gathers from doubled value tables
with no modular reduction in the inner loop.

Linear systems are canonicalized by the Hermite form of their coefficient
lattice before dispatch: the averaged product is invariant under an
invertible integer change of the parameters, so the two systems with closed
Fourier forms (the three-parameter cube and the pair of three-term
progressions sharing a start) are recognized in any parametrization.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlin
from .binpoly import IntPoly, PolyMap, binom_table_mod
from .errors import CostError, ValidationError
from .field import FieldFn, PrimeField, fourier_transform

__all__ = [
    "SetF",
    "CountReport",
    "lambda_P",
    "count_in_set",
    "additive_energy",
    "lambda_linear",
    "verify_asymptotic",
    "decompose_via_linear",
]

_GRID_BUDGET = 2e9
_ROUND_GUARD = 1e-3

try:  # optional compiled kernels for the affine fast path
    import numba as _numba

    @_numba.njit(parallel=True, cache=True)
    def _affine_prod_kernel(shifts, tables, out):  # pragma: no cover - compiled
        t, p = shifts.shape
        for x in _numba.prange(p):
            s = 0.0 + 0.0j
            for y in range(p):
                prod = tables[0, x + shifts[0, y]]
                for i in range(1, t):
                    prod *= tables[i, x + shifts[i, y]]
                s += prod
            out[x] = s

    @_numba.njit(parallel=True, cache=True)
    def _affine_count_kernel(shifts, tables, out):  # pragma: no cover - compiled
        t, p = shifts.shape
        for x in _numba.prange(p):
            n = 0
            for y in range(p):
                ok = True
                for i in range(t):
                    if not tables[i, x + shifts[i, y]]:
                        ok = False
                        break
                if ok:
                    n += 1
            out[x] = n

except ImportError:  # pragma: no cover
    _numba = None

_NUMBA_MIN_P = 1024


def default_threads() -> int:
    env = os.environ.get("GF_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"GF_THREADS={env!r} is not an integer") from None
        if n < 1:
            raise ValidationError("GF_THREADS must be >= 1")
        return n
    return 1


class SetF:
    """A subset of F_p."""

    __slots__ = ("field", "members")

    def __init__(self, field: PrimeField, members):
        self.field = field
        self.members = tuple(sorted({int(x) % field.p for x in members}))

    @classmethod
    def from_spec(cls, field: PrimeField, spec: str) -> "SetF":
        """Parse 'random:<seed>:<density>', 'residues:<k>', or 'interval:<a>:<b>'."""
        parts = spec.split(":")
        kind = parts[0]
        p = field.p
        if kind == "random" and len(parts) == 3:
            seed = int(parts[1])
            density = float(parts[2])
            if not 0 <= density <= 1:
                raise ValidationError("density must lie in [0, 1]")
            rng = np.random.Generator(np.random.Philox(seed))
            mask = rng.random(p) < density
            return cls(field, np.nonzero(mask)[0].tolist())
        if kind == "residues" and len(parts) == 2:
            k = int(parts[1])
            if k < 1:
                raise ValidationError("residue power must be >= 1")
            return cls(field, {pow(x, k, p) for x in range(1, p)})
        if kind == "interval" and len(parts) == 3:
            a, b = int(parts[1]), int(parts[2])
            if b < a:
                raise ValidationError("interval needs a <= b")
            return cls(field, range(a, b + 1))
        raise ValidationError(f"unrecognized set spec {spec!r}")

    @property
    def density(self) -> float:
        return len(self.members) / self.field.p

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return int(x) % self.field.p in set(self.members)

    def indicator(self) -> FieldFn:
        return FieldFn.indicator(self.field, self.members)

    def bool_table(self) -> np.ndarray:
        t = np.zeros(self.field.p, dtype=bool)
        t[list(self.members)] = True
        return t


@dataclass(frozen=True)
class CountReport:
    p: int
    lhs_count: int
    rhs_model: float
    residual: float


# ----------------------------------------------------------------------
# grid scan machinery


def _component_layout(P: PolyMap, p: int):
    """Decompose P_i(x_outer, y) = sum_a prod_o C(x_o, a_o) * q_{i,a}(y).

    Returns (patterns, affine) where patterns[i] lists (outer_index,
    inner_table mod p) pairs and affine marks two-parameter maps where every
    component is x + c_i(y).
    """
    outer = P.nvars - 1
    patterns = []
    affine = P.nvars == 2
    for comp in P.components:
        if not comp.is_integer_valued:
            raise ValidationError("components must be integer valued")
        groups = comp.split_outer(outer)
        pats = [(oidx, q.eval_mod_table(p)) for oidx, q in sorted(groups.items())]
        patterns.append(pats)
        if affine:
            lin = groups.get((1,))
            if (
                any(o not in ((0,), (1,)) for o in groups)
                or lin is None
                or lin.terms != {(0,): Fraction(1)}
            ):
                affine = False
    return patterns, affine


def _run_parallel(fn, chunks, threads, count_mode):
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    if count_mode:
        return sum(int(v) for v in parts)
    re = math.fsum(complex(v).real for v in parts)
    im = math.fsum(complex(v).imag for v in parts)
    return complex(re, im)


def _scan_blocks(P: PolyMap, p: int, tables, threads: int, count_mode: bool):
    D = P.nvars
    t = P.t
    if not 1 <= D <= 3:
        raise ValidationError("grid scans support 1 to 3 parameters")
    if p**D * t > _GRID_BUDGET:
        raise CostError(f"grid of size p^{D} * {t} exceeds the scan budget")
    if D == 1:
        acc = None
        for comp, tab in zip(P.components, tables):
            vals = tab[comp.eval_mod_table(p)]
            if acc is None:
                acc = vals.copy()
            elif count_mode:
                acc &= vals
            else:
                acc *= vals
        return int(np.count_nonzero(acc)) if count_mode else complex(acc.sum())

    patterns, affine = _component_layout(P, p)
    block = max(8, (1 << 21) // p)

    if affine:
        shifts = []
        for pats in patterns:
            c = np.zeros(p, dtype=np.int64)
            for oidx, tab in pats:
                if oidx == (0,):
                    c = tab
            shifts.append(c.astype(np.int32))
        ext = [np.concatenate([tab, tab]) for tab in tables]

        if _numba is not None and p >= _NUMBA_MIN_P:
            # deterministic regardless of thread count: one slot per row,
            # pairwise-summed afterwards
            sh = np.stack(shifts)
            _numba.set_num_threads(min(max(threads, 1), _numba.config.NUMBA_NUM_THREADS))
            if count_mode:
                tb = np.stack(ext).astype(np.uint8)
                out = np.zeros(p, dtype=np.int64)
                _affine_count_kernel(sh, tb, out)
                return int(out.sum())
            tb = np.stack(ext).astype(np.complex128)
            out = np.zeros(p, dtype=np.complex128)
            _affine_prod_kernel(sh, tb, out)
            return complex(out.sum())

        xs_all = np.arange(p, dtype=np.int32)

        def run_affine(lo_hi):
            lo, hi = lo_hi
            xs = xs_all[lo:hi][:, None]
            acc = None
            for c, e in zip(shifts, ext):
                g = e[xs + c[None, :]]
                if acc is None:
                    acc = g
                elif count_mode:
                    acc &= g
                else:
                    acc *= g
            return int(np.count_nonzero(acc)) if count_mode else complex(acc.sum())

        chunks = [(lo, min(lo + block, p)) for lo in range(0, p, block)]
        return _run_parallel(run_affine, chunks, threads, count_mode)

    # generic path: blocked over the outer assignments, dense over the last axis
    outer = D - 1
    amax = [
        max((o[j] for pats in patterns for o, _ in pats), default=0)
        for j in range(outer)
    ]
    ctabs = [binom_table_mod(p, a) for a in amax]
    grid = np.indices((p,) * outer).reshape(outer, -1).T  # (p^outer, outer)

    def run_generic(lo_hi):
        lo, hi = lo_hi
        O = grid[lo:hi]
        acc = None
        for pats, tab in zip(patterns, tables):
            val = np.zeros((hi - lo, p), dtype=np.int64)
            for oidx, itab in pats:
                w = np.ones(hi - lo, dtype=np.int64)
                for j, a in enumerate(oidx):
                    if a:
                        w = w * ctabs[j][a][O[:, j]] % p
                val += w[:, None] * itab[None, :]
            vals = tab[val % p]
            if acc is None:
                acc = vals
            elif count_mode:
                acc &= vals
            else:
                acc *= vals
        return int(np.count_nonzero(acc)) if count_mode else complex(acc.sum())

    n = grid.shape[0]
    chunks = [(lo, min(lo + block, n)) for lo in range(0, n, block)]
    return _run_parallel(run_generic, chunks, threads, count_mode)


def lambda_P(P: PolyMap, fs, threads: int | None = None) -> complex:
    """E_x f_1(P_1(x)) ... f_t(P_t(x)) over x in F_p^D."""
    fs = list(fs)
    if len(fs) != P.t:
        raise ValidationError(f"need {P.t} functions, got {len(fs)}")
    p = fs[0].p
    if any(f.p != p for f in fs):
        raise ValidationError("functions live over different primes")
    if P.degree >= p:
        raise ValidationError("map degree must be smaller than p")
    threads = default_threads() if threads is None else threads
    raw = _scan_blocks(P, p, [f.values for f in fs], threads, count_mode=False)
    return raw / p**P.nvars


def count_in_set(P: PolyMap, A: SetF, threads: int | None = None) -> int:
    """Exact number of x in F_p^D with every P_i(x) in A."""
    p = A.field.p
    if P.degree >= p:
        raise ValidationError("map degree must be smaller than p")
    threads = default_threads() if threads is None else threads
    tab = A.bool_table()
    return _scan_blocks(P, p, [tab] * P.t, threads, count_mode=True)


def additive_energy(A: SetF) -> int:
    """|{(x, y, u, z) in A^4 : x + y = u + z}| via the fourth Fourier moment.

    The float result is rounded; if it lands suspiciously far from an
    integer the count is redone exactly.
    """
    p = A.field.p
    ind = np.zeros(p, dtype=np.complex128)
    ind[list(A.members)] = 1.0
    ih = fourier_transform(ind) / p
    raw = p**3 * float(np.sum(np.abs(ih) ** 4))
    n = round(raw)
    if abs(raw - n) > _ROUND_GUARD:
        return _energy_exact(A)
    return int(n)


def _energy_exact(A: SetF) -> int:
    p = A.field.p
    c = np.zeros(p, dtype=np.int64)
    c[list(A.members)] = 1
    sums = np.zeros(p, dtype=np.int64)
    for a in A.members:
        sums += np.roll(c, a)
    return int(np.sum(sums * sums))


# ----------------------------------------------------------------------
# linear systems

_CUBE = ((1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1))
_TWO_APS = ((1, 0, 0), (1, 1, 0), (1, 2, 0), (1, 0, 1), (1, 0, 2))


def _linear_matrix(Psi: PolyMap):
    rows = []
    for comp in Psi.components:
        if comp.degree > 1 or comp.constant_term:
            raise ValidationError("expected a linear map with zero constant terms")
        row = [0] * Psi.nvars
        for idx, c in comp.terms.items():
            if c.denominator != 1:
                raise ValidationError("linear map needs integer coefficients")
            row[idx.index(1)] = int(c)
        rows.append(tuple(row))
    return tuple(rows)


def _row_hermite(rows):
    """Hermite form of an integer matrix under unimodular row operations."""
    mat = [list(r) for r in rows]
    if not mat:
        return ()
    m, ncols = len(mat), len(mat[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, m) if mat[i][c]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(mat[i][c]))
            i0 = nz[0]
            for i in nz[1:]:
                q = mat[i][c] // mat[i0][c]
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[i0])]
        nz = [i for i in range(r, m) if mat[i][c]]
        if not nz:
            continue
        mat[r], mat[nz[0]] = mat[nz[0]], mat[r]
        if mat[r][c] < 0:
            mat[r] = [-a for a in mat[r]]
        for i in range(r):
            q = mat[i][c] // mat[r][c]
            mat[i] = [a - q * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == m:
            break
    return tuple(tuple(row) for row in mat[:r])


def _lattice_signature(V):
    # Hermite form of the transpose: canonical under reparametrization of
    # the inner variables by GL_r(Z), which leaves the average unchanged.
    cols = tuple(tuple(row[j] for row in V) for j in range(len(V[0])))
    return _row_hermite(cols)


def lambda_linear(Psi: PolyMap, fs, threads: int | None = None) -> complex:
    """Averaged product over a system of linear forms.

    The cube system and the shared-start pair of 3-term progressions are
    evaluated through closed Fourier identities; anything else in at most
    three parameters falls back to the grid scan.
    """
    fs = list(fs)
    if len(fs) != Psi.t:
        raise ValidationError(f"need {Psi.t} functions, got {len(fs)}")
    p = fs[0].p
    V = _linear_matrix(Psi)
    sig = _lattice_signature(V)
    if len(V) == 4 and sig == _lattice_signature(_CUBE):
        hats = [fourier_transform(f.values) / p for f in fs]
        neg = (-np.arange(p)) % p
        return complex(np.sum(hats[0] * hats[1][neg] * hats[2][neg] * hats[3]))
    if len(V) == 5 and sig == _lattice_signature(_TWO_APS):
        hats = [fourier_transform(f.values) / p for f in fs]
        neg2 = (-2 * np.arange(p)) % p
        g1 = fourier_transform(hats[1][neg2] * hats[2])
        g2 = fourier_transform(hats[3][neg2] * hats[4])
        return complex(np.mean(fs[0].values * g1 * g2))
    if Psi.nvars > 3:
        raise CostError("generic linear systems supported for at most 3 parameters")
    return lambda_P(Psi, fs, threads=threads)


def decompose_via_linear(P: PolyMap):
    """Write P(x) = Psi(Q_1(x), ..., Q_r(x)) with Psi linear.

    Groups the binomial coefficient vectors of P by direction: parallel
    vectors share an inner polynomial.  Returns (Psi, Qs).
    """
    vecs = P.coefficient_vectors()
    dirs: list[tuple[int, ...]] = []
    inners: list[dict] = []
    for m, b in vecs.items():
        if not any(b):
            continue
        prim = ratlin.integer_primitive(b)
        k = next((i for i, d in enumerate(dirs) if d == prim), None)
        if k is None:
            dirs.append(prim)
            inners.append({})
            k = len(dirs) - 1
        j = next(i for i, v in enumerate(prim) if v)
        inners[k][m] = Fraction(b[j], prim[j])
    r = len(dirs)
    variables = tuple(f"y{i + 1}" for i in range(r))
    comps = []
    for i in range(P.t):
        terms = {}
        for j, d in enumerate(dirs):
            if d[i]:
                idx = [0] * r
                idx[j] = 1
                terms[tuple(idx)] = Fraction(d[i])
        comps.append(IntPoly(variables, terms))
    Psi = PolyMap(variables, comps)
    Qs = [IntPoly(P.variables, terms) for terms in inners]
    return Psi, Qs


def verify_asymptotic(
    P: PolyMap, A: SetF, Psi: PolyMap | None = None, threads: int | None = None
) -> CountReport:
    """Compare the configuration count in A against its linear-system model.

    The model predicts count(P in A)/p^D ~ count(Psi in A)/p^r; the report
    carries the difference of the two normalized densities as ``residual``.
    """
    p = A.field.p
    if Psi is None:
        Psi, _ = decompose_via_linear(P)
    V = _linear_matrix(Psi)
    # exact certificate that P factors through Psi
    rows = [[Fraction(v) for v in row] for row in V]
    for m, b in P.coefficient_vectors().items():
        if any(b) and ratlin.solve(rows, b) is None:
            raise ValidationError("map does not factor through the given linear system")
    lhs = count_in_set(P, A, threads=threads)
    lam = lambda_linear(Psi, [A.indicator()] * Psi.t, threads=threads)
    rhs = lam.real * float(p) ** Psi.nvars
    residual = lhs / p**P.nvars - lam.real
    return CountReport(p, lhs, rhs, residual)
