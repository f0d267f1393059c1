import pytest

import latsnf


B22 = [[2, 1], [0, 3]]


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def det2(M):
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def test_hnf_round_trip():
    H, U = latsnf.hnf(B22)
    assert mat_mul(B22, U) == H
    assert abs(det2(U)) == 1
    assert H[1][0] == 0 and H[0][0] > 0 and H[1][1] > 0


def test_lll_preserves_determinant():
    B, U = latsnf.lll(B22)
    assert abs(det2(U)) == 1
    assert abs(det2(B)) == abs(det2(B22))
    assert mat_mul(B22, U) == B


def test_snf_reduce_pinned():
    red = latsnf.snf_reduce(B22)
    assert red["N"] == 885127
    assert red["b"] == [768]
    assert red["T"] == 384
    assert abs(det2(red["M"])) == 1
    assert red["bound_certified"]

    relaxed = latsnf.snf_reduce(B22, strict=False)
    assert relaxed["N"] == 55399
    assert relaxed["T"] == 96


def test_validate_snf():
    latsnf.validate_snf([[7, 3], [0, 1]])
    with pytest.raises(ValueError):
        latsnf.validate_snf([[4, 1], [0, 1]])


def test_phi3_pinned():
    a, y = latsnf.phi3(7, [3], [2, 1])
    assert (a, y) == (5, [5, 6])
    assert latsnf.ln_contains(7, [3], [2 + 5, 1 + 6])


def test_sampling_is_seed_deterministic():
    draws = latsnf.sample_gaussian(101, 2, 50.0, count=5, seed=7)
    again = latsnf.sample_gaussian(101, 2, 50.0, count=5, seed=7)
    assert draws == again
    assert len(draws) == 5
    assert all(0 <= c < 101 for v in draws for c in v)
    other = latsnf.sample_gaussian(101, 2, 50.0, count=5, seed=8)
    assert draws != other


def test_smoothing_unit_and_scaling():
    unit = latsnf.smoothing_parameter([[1]], 0.08643)
    assert unit["s_star"] == pytest.approx(1.0, abs=1e-4)
    scaled = latsnf.smoothing_parameter([[5]], 0.08643)
    assert scaled["s_star"] == pytest.approx(5 * unit["s_star"], rel=1e-5)
    assert latsnf.smoothing_estimate([[1]], 0.08643) >= unit["s_star"]


def test_sis_round_trip():
    inst = latsnf.sis_gen(31, "1/2", seed=5)
    assert inst["N"] == 31 and len(inst["g"]) >= 2
    h = latsnf.sis_solve(inst)
    assert h is not None
    verdict = latsnf.sis_verify(inst, h)
    assert verdict["accepted"] and verdict["reason"] == "ok"
    tight = latsnf.sis_verify(inst, h, bound=1)
    if verdict["max_abs"] > 1:
        assert not tight["accepted"]


def test_gdd_reduce_pinned():
    run = latsnf.gdd_reduce(B22, [5, 1], trials=400, seed=1)
    assert run["x_out"] == [-69, 57]
    assert run["trials"] == 32
    tr = run["trace"]
    assert tr["m"] == 7 and tr["N"] == 55399 and tr["T"] == 96
    assert tr["distance"] == pytest.approx(92.800862065, rel=1e-9)
    assert tr["bound_ok"]


def test_sivp_reduce_pinned():
    res = latsnf.sivp_reduce(B22, trials=60, seed=11)
    assert res["vectors"] == [[-47, 21], [-29, -69]]
    assert res["norms2"] == [2650, 5602]
    assert res["all_within_bound"]
    assert res["trials"] == 2


def test_contract_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        latsnf.gdd_reduce(B22, [1, 2, 3])
    with pytest.raises(ValueError):
        latsnf.lll(B22, delta="5/4")
