import numpy as np
import pytest

import gfbs


def test_algorithm_catalog():
    names = gfbs.algorithms()
    assert len(names) == 15
    assert "ProximalFBS" in names and "RelaxedADMM" in names


def test_generate_is_deterministic():
    a = gfbs.generate("Lasso", 7, (20, 0, 50))
    b = gfbs.generate("Lasso", 7, (20, 0, 50))
    assert a["M"].shape == (50, 20)
    np.testing.assert_array_equal(a["M"], b["M"])
    assert a["lambda"] > 0


def test_ppa_scalar_lasso_example():
    out = gfbs.run("ClassicalPPA", "Lasso", 0, (1, 0, 1), {"x0": 3.0}, iters=10, tol=0.0, lambda_=1.0)
    np.testing.assert_allclose(out["states"][:, 0], [3.0, 2.0, 1.0, 0.0, 0.0])
    assert out["csv"].splitlines()[0] == "iter,q_residual,s_distance,objective,kkt_residual"


def test_pfbs_residual_monotone_and_converges():
    out = gfbs.run("ProximalFBS", seed=3, iters=5000, tol=1e-13)
    r = np.asarray(out["q_residuals"])
    assert np.all(np.diff(r) <= 1e-10)
    assert out["converged"]
    np.testing.assert_allclose(out["states"][-1], out["x_star"], atol=1e-8)


def test_certify_and_compare():
    rep = gfbs.certify("RelaxedADMM", params={"gamma": 1.5}, iters=500)
    names = {c["name"]: c for c in rep["checks"]}
    assert rep["passed"]
    assert names["admm_inner_product"]["passed"]
    assert gfbs.compare("ChambollePock", seed=1, iters=300) <= 1e-8


def test_prox_and_moreau():
    y = np.array([2.0, -0.3, 0.7])
    p = gfbs.prox("l1 0.5", 1.0, y)
    np.testing.assert_allclose(p, [1.5, 0.0, 0.2])
    c = gfbs.prox_conjugate("l1 0.5", 1.0, y)
    np.testing.assert_allclose(p + c, y, atol=1e-12)


def test_degenerate_q_norm():
    Q = np.diag([1.0, 0.0])
    assert gfbs.q_norm(Q, np.array([3.0, 100.0])) == pytest.approx(3.0)


def test_errors_surface_as_exceptions():
    with pytest.raises(gfbs.GfbsError):
        gfbs.run("ProximalFBS", "TV1D")
    code, _, err = gfbs.main(["run"])
    assert code == 1 and err
