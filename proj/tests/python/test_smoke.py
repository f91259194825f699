import json
import math

try:
    import smplab as sm
except ImportError:
    import _smplab as sm


def test_eigenvalues_and_pucci():
    vals = sm.eigenvalues([[1.0, 0.0], [0.0, -1.0]])
    assert vals == [-1.0, 1.0]

    # band [1,2] on diag(1,-1): 2*1 + 1*(-1)
    assert abs(sm.pucci("plus", 1.0, 2.0, [[1.0, 0.0], [0.0, -1.0]]) - 1.0) < 1e-12

    # k = 1 smallest eigenvalue of diag(0,2) is 0
    assert sm.pucci_truncated("minus", 1.0, 1.0, 1, [[0.0, 0.0], [0.0, 2.0]]) == 0.0


def test_eval_operator():
    desc = json.dumps({"kind": "pucci_plus", "lambda": 1.0, "Lambda": 2.0, "dim": 2})
    v = sm.eval_operator(desc, [0.0, 0.0], 0.0, 0.0, [0.0, 0.0],
                         [[1.0, 0.0], [0.0, -1.0]])
    assert abs(v - 1.0) < 1e-12


def test_structure_checker():
    desc = json.dumps({"kind": "normalized_p_laplacian", "dim": 2, "p": 3.0})
    rep = sm.check_structure(desc, n_samples=2000, scale=2.0, seed=7)
    assert rep["pass"]
    assert rep["samples_checked"] == 2000


def test_barrier_certificate():
    cert = sm.certify_barrier(n=2, r0=0.4, alpha=1.0, cap=1.0, lam=1.0, Lam=2.0,
                              b_sup=1.0, c_abs_sup=1.0, t_prime=0.0, t2=0.3,
                              grid_pts=24)
    assert cert["pass"]
    assert cert["margin"] > 0.0
    assert math.isfinite(cert["beta"])


def test_run_experiment_roundtrip():
    assert "truncated_counterexample" in sm.list_experiments()
    out = json.loads(sm.run_experiment(json.dumps(
        {"experiment": "truncated_counterexample"})))
    assert out["pass"]
    assert out["metrics"]["super_residual"] == 0.0
