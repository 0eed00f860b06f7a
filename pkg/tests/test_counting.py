import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_average, brute_count, brute_energy
from uniformity.binpoly import parse_polymap
from uniformity.counting import (
    SetF,
    additive_energy,
    count_in_set,
    decompose_via_linear,
    lambda_P,
    lambda_linear,
    verify_asymptotic,
)
from uniformity.errors import CostError, ValidationError
from uniformity.field import FieldFn, PrimeField


def _random_fns(p, n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    F = PrimeField(p)
    return [FieldFn.random_bounded(F, rng) for _ in range(n)]


def test_lambda_matches_brute_force_affine():
    p = 13
    P = parse_polymap("x, x+y, x+2*y, x+y^2")
    fs = _random_fns(p, 4, 1)
    comps = [
        lambda x, y: x,
        lambda x, y: x + y,
        lambda x, y: x + 2 * y,
        lambda x, y: x + y * y,
    ]
    want = brute_average([f.values for f in fs], comps, p, 2)
    assert lambda_P(P, fs) == pytest.approx(want, abs=1e-12)


def test_lambda_matches_brute_force_generic():
    p = 11
    P = parse_polymap("x*y, x + C(y, 2), y")
    fs = _random_fns(p, 3, 2)
    comps = [
        lambda x, y: x * y,
        lambda x, y: x + y * (y - 1) // 2,
        lambda x, y: y,
    ]
    want = brute_average([f.values for f in fs], comps, p, 2)
    assert lambda_P(P, fs) == pytest.approx(want, abs=1e-12)


def test_lambda_three_parameters():
    p = 7
    P = parse_polymap("x, x+y, x+z, x+y+z")
    fs = _random_fns(p, 4, 3)
    comps = [
        lambda x, y, z: x,
        lambda x, y, z: x + y,
        lambda x, y, z: x + z,
        lambda x, y, z: x + y + z,
    ]
    want = brute_average([f.values for f in fs], comps, p, 3)
    assert lambda_P(P, fs) == pytest.approx(want, abs=1e-12)


def test_lambda_threads_agree():
    p = 61
    P = parse_polymap("x, x+y, x+y^2, x+y+y^2")
    fs = _random_fns(p, 4, 4)
    a = lambda_P(P, fs, threads=1)
    b = lambda_P(P, fs, threads=4)
    assert a == pytest.approx(b, abs=1e-13)


def test_count_in_set_exact():
    p = 13
    F = PrimeField(p)
    A = SetF.from_spec(F, "random:5:0.5")
    P = parse_polymap("x, x+y, x+2*y")
    comps = [lambda x, y: x, lambda x, y: x + y, lambda x, y: x + 2 * y]
    assert count_in_set(P, A) == brute_count(A.members, comps, p, 2)


def test_count_full_set():
    p = 11
    F = PrimeField(p)
    A = SetF(F, range(p))
    P = parse_polymap("x, x+y, x+y^2")
    assert count_in_set(P, A) == p * p


@pytest.mark.parametrize("spec", ["random:1:0.3", "random:2:0.7", "residues:2", "interval:2:9"])
def test_additive_energy_matches_brute_force(spec):
    F = PrimeField(31)
    A = SetF.from_spec(F, spec)
    assert additive_energy(A) == brute_energy(A.members, 31)


def test_additive_energy_full_field():
    F = PrimeField(11)
    assert additive_energy(SetF(F, range(11))) == 11**3


def test_set_specs():
    F = PrimeField(11)
    assert SetF.from_spec(F, "interval:3:5").members == (3, 4, 5)
    qr = SetF.from_spec(F, "residues:2")
    assert qr.members == tuple(sorted({x * x % 11 for x in range(1, 11)}))
    r1 = SetF.from_spec(F, "random:9:0.5")
    r2 = SetF.from_spec(F, "random:9:0.5")
    assert r1.members == r2.members  # seeded determinism
    with pytest.raises(ValidationError):
        SetF.from_spec(F, "bogus:1")
    with pytest.raises(ValidationError):
        SetF.from_spec(F, "random:1:1.5")


def test_lambda_linear_cube_identity():
    p = 31
    Psi = parse_polymap("x, x+y, x+z, x+y+z")
    fs = _random_fns(p, 4, 6)
    direct = lambda_P(Psi, fs)
    assert lambda_linear(Psi, fs) == pytest.approx(direct, abs=1e-10)


def test_lambda_linear_two_progressions_identity():
    p = 31
    Psi = parse_polymap("x, x+y, x+2*y, x+z, x+2*z")
    fs = _random_fns(p, 5, 7)
    direct = lambda_P(Psi, fs)
    assert lambda_linear(Psi, fs) == pytest.approx(direct, abs=1e-10)


def test_lambda_linear_recognizes_reparametrization():
    # cube lattice in disguised coordinates: y -> y+z, z -> z
    p = 31
    Psi = parse_polymap("x, x+y+z, x+z, x+y+2*z")
    fs = _random_fns(p, 4, 8)
    direct = lambda_P(Psi, fs)
    assert lambda_linear(Psi, fs) == pytest.approx(direct, abs=1e-10)


def test_decompose_via_linear_roundtrip():
    P = parse_polymap("x, x+y, x+y^2, x+y+y^2")
    Psi, Qs = decompose_via_linear(P)
    assert Psi.t == P.t
    assert len(Qs) == Psi.nvars
    for x in range(-3, 4):
        for y in range(-3, 4):
            inner = [int(Q(x, y)) for Q in Qs]
            assert tuple(Psi(*inner)) == tuple(P(x, y))


def test_verify_asymptotic_full_field_residual_zero():
    F = PrimeField(101)
    A = SetF(F, range(101))
    P = parse_polymap("x, x+y, x+y^2, x+y+y^2")
    rep = verify_asymptotic(P, A)
    assert rep.residual == 0.0
    assert rep.lhs_count == 101**2


def test_verify_asymptotic_rejects_bad_factorization():
    F = PrimeField(101)
    A = SetF.from_spec(F, "random:3:0.5")
    P = parse_polymap("x, x+y, x+y^2, x+y+y^2")
    Psi = parse_polymap("x, x+y, x+z, x+2*y+z")  # wrong lattice
    with pytest.raises(ValidationError):
        verify_asymptotic(P, A, Psi=Psi)


def test_grid_budget_enforced():
    fs = _random_fns(11, 4, 9)
    P = parse_polymap("x, x+y, x+z, x+w")
    with pytest.raises(ValidationError):
        lambda_P(P, fs)  # 4 parameters unsupported by the scan


def test_degree_must_stay_below_p():
    fs = _random_fns(5, 2, 10)
    P = parse_polymap("x, x+y^7")
    with pytest.raises(ValidationError):
        lambda_P(P, fs)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 0.9))
def test_energy_properties(seed, dens):
    F = PrimeField(61)
    A = SetF.from_spec(F, f"random:{seed}:{dens}")
    n = len(A)
    e = additive_energy(A)
    # diagonal quadruples give n^2; Cauchy-Schwarz gives n^4/p
    assert e >= max(n * n, n**4 // 61)
    assert e <= n**3 + 1e-9
