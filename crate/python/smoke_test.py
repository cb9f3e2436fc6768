"""Smoke test for the metazeta_py extension module."""

import metazeta_py as mz


def main():
    g = mz.GroupParams(2, 5, 3, 7)
    assert g.is_valid()
    assert str(g) == "G(2,5,3,7)"
    assert g.coefficients() == g.subgroup_counts()
    assert sum(g.coefficients()) == 99

    h = mz.GroupParams(2, 5, 3, 15)
    assert h.zeta_equal(g) and not h.is_isomorphic(g)
    assert g.compare(h) == {"isomorphic": False, "zeta_equal": True, "lattice_isomorphic": False}
    assert mz.GroupParams(2, 5, 3, -1).k == 31

    assert mz.valid_k_set(2, 5, 3) == list(range(1, 32, 2))
    report = mz.classify(2, 5, 3, lattice=True, verify=True)
    assert len(report["iso"]["blocks"]) == 8
    assert len(report["zeta"]["blocks"]) == 3
    assert len(report["lattice"]["blocks"]) == 5
    assert all(c["passed"] for c in report["cross_checks"])

    assert mz.quasiregular_counts(3, 3, 2) == [1, 4, 4, 1]
    assert mz.vp(2, 96) == 5 and mz.vp(3, 0) is None
    assert mz.lte_valuation(3, 10, 1, 9) == 4

    try:
        mz.GroupParams(2, 3, 2, 1).subgroup_counts(max_order=8)
    except mz.ResourceLimitError:
        pass
    else:
        raise AssertionError("expected ResourceLimitError")
    try:
        mz.GroupParams(4, 1, 1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    summary = mz.sweep(2, 32)
    assert all(r["passed"] for r in summary["rows"])
    print("smoke test ok")


if __name__ == "__main__":
    main()
