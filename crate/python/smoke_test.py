"""Smoke test for the abflux Python extension."""

import math

import abflux


def main():
    l0, mu = abflux.decompose_flux(2.3, -1)
    assert l0 == 2 and abs(mu - 0.3) < 1e-12, (l0, mu)

    assert abs(abflux.gamma(5.0) - 24.0) < 1e-12
    assert abs(abflux.kummer(0.0, 1.5, 2.0) - 1.0) < 1e-14
    assert abs(abflux.kummer(1.0, 1.0, 0.7) - math.exp(0.7)) < 1e-12

    p = abflux.FieldParams(mu=0.5, alpha=0.2, gamma=0.8)
    qn = abflux.QuantumNumbers("klein_gordon", 1, 0, k3=0.1)
    level = abflux.energy_case1(qn, p)
    check = abflux.oracle_level("case1", qn, p, level.value)
    print(f"KG case1 l=1 n=0: closed {level.value:.12f}  oracle {check:.12f}")
    assert abs(level.value - check) < 1e-7

    dq = abflux.QuantumNumbers("dirac", 1, 1, k3=0.2)
    dl = abflux.energy_case1(dq, p)
    dcheck = abflux.oracle_level("case1", dq, p, dl.value)
    print(f"Dirac case1 l=1 n=1: closed {dl.value:.12f}  oracle {dcheck:.12f}")
    assert abs(dl.value - dcheck) < 1e-7

    msf = abflux.FieldParams(mu=0.5, gamma=1.0)
    for n in range(4):
        k0 = abflux.energy_schrodinger_b(abflux.QuantumNumbers("schrodinger", 0, n), msf).value
        assert abs(k0 - (2 * n + 1)) < 1e-12, k0

    v = abflux.radial_v("case1", 0, qn, p, level.value, [0.5, 1.0, 2.0])
    assert len(v) == 3 and all(math.isfinite(abs(x)) for x in v)

    try:
        abflux.QuantumNumbers("photon", 0, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("bad equation name accepted")

    print("smoke test OK")


if __name__ == "__main__":
    main()
