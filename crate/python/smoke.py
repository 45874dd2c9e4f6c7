"""Smoke test for the bisqueeze_py extension.

Build with `cargo build --release -p bisqueeze-py --features extension-module`,
copy target/release/libbisqueeze_py.so to bisqueeze_py.so on PYTHONPATH, then
run this script.
"""

import math
import sys

import bisqueeze_py as bq


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    failures = []

    def check(name, ok):
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
        if not ok:
            failures.append(name)

    m = bq.Model.rank_one(64)
    check("rank-one repr", repr(m) == 'Model(name="rank-one", dim=64)')
    check("regular", m.is_regular)
    bio = m.biorthogonality(12)
    check("biorthogonality", bio["max_deviation"] < 1e-12)
    # <phi_n, Psi_n> summed by hand
    phi, psi = m.phi(3), m.psi(3)
    check("phi/psi pair", close(sum(p.conjugate() * q for p, q in zip(phi, psi)), 1.0, 1e-12))

    pair = bq.bi_squeezed(m, 0.3, 0.4)
    check("bi-squeezed pairing", close(pair["pairing"], 1.0, 1e-10) and pair["converged"])

    # <Psi_0, N(t) phi_0> = sinh^2(2 lambda t)
    el = bq.number_elements(m, 0.1, 1.0)
    check("number element", close(el["psi_phi"][0], math.sinh(0.2) ** 2, 1e-10))

    var = bq.quadrature_variance(m, 0.1, 0.7)
    check("variance product", close(var["product"], 0.25, 1e-10))

    ident = bq.squeeze_identification(m, 0.15)
    best = ident["pairings"][ident["best"]]
    check("identification", best["exponential"] == "exp(-iH)" and best["residual"] < 1e-10)

    # mpmath: atanh(1/q) with q = x + sqrt(x^2 - 1), x = 1/cos 0.6
    theorem, _ = bq.swanson_radii(0.3)
    check("swanson radius", close(theorem, 0.5866632036455847, 1e-12))

    try:
        bq.Model.from_spec('{"name": "identity", "nu": 1}')
        check("unknown key rejected", False)
    except ValueError:
        check("unknown key rejected", True)

    print(f"{len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
