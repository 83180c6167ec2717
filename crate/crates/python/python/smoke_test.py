"""Smoke test for the ergo_lab extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
or `pip install crates/python`, then run `python crates/python/python/smoke_test.py`.
"""

import cmath
import math

import ergo_lab as el


def main():
    mu = el.WeightTable("mobius", 100_000)
    la = el.WeightTable("liouville", 100_000)
    assert [mu[n] for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert mu.partial_sum(1000) == 2 and mu.partial_sum(10_000) == -23
    assert la.partial_sum(4) == 0
    assert el.check_lambda_mu_identity(10_000)["holds"]
    try:
        mu[0]
    except IndexError:
        pass
    else:
        raise AssertionError("index 0 must be rejected")

    p = el.Polynomial.parse("0,0,1")
    assert p.degree == 2 and p.eval_mod(10, 7) == 100 % 7
    q = el.Polynomial([0, -1])
    assert str(q) == "0,-1"

    s = el.weighted_poly_sum(mu, el.Polynomial([0, 1]), "0/1", 1000)
    assert abs(s - 2 / 1000) < 1e-15
    s_float = el.weighted_poly_sum(mu, el.Polynomial([0, 1]), 2 * math.pi / 7, 1000)
    s_exact = el.weighted_poly_sum(mu, el.Polynomial([0, 1]), "1/7", 1000)
    assert abs(s_float - s_exact) < 1e-12
    best = el.max_over_grid(mu, p, 4096, den=256)
    assert 0 <= best["index"] < 256 and best["modulus"] > 0

    j = 64
    f = el.uniform_values(1, 0, j)
    g = el.uniform_values(1, 1, j)
    spectral = el.spectral_average(f, g, mu, p, q, 2000)
    direct = el.direct_average(f, g, mu, p, q, 2000)
    assert max(abs(a - b) for a, b in zip(spectral, direct)) < 1e-9
    report = el.spectral_check(mu, 31, 1000, p, q, seed=7, trials=2)
    assert report["passed"], report

    signs = el.sign_values(0, 0, 8)
    assert all(v in (1, -1) for v in signs)
    trace = el.convergence_trace_cyclic(97, el.sign_values(3, 0, 97), el.sign_values(3, 1, 97), p, el.Polynomial([0, 1]), mu)
    assert [n for n, _ in trace[:4]] == [1, 2, 4, 8]
    assert all(abs(v) <= 1 + 1e-12 for _, v in trace)

    osc = el.oscillation_sum(el.sign_values(5, 0, 256), el.sign_values(5, 1, 256), el.Polynomial([0, 1]), q, mu, 6)
    assert len(osc["ratios"]) == 6
    m = el.global_maximal(el.sign_values(5, 0, 256), el.sign_values(5, 1, 256), el.Polynomial([0, 1]), q, mu, 512)
    assert len(m) == 256 and all(v >= 0 for v in m)
    assert cmath.isclose(complex(f[0]), f[0])
    print(f"ergo_lab {el.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
