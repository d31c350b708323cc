"""Smoke test for the pyfvelab extension module."""

import math

import pyfvelab as fv


def main():
    s = fv.Scheme.preset("scheme-4-1")
    assert s.k == 4
    assert s.check(4) and s.max_orthogonality_order() == 4

    s3 = fv.Scheme.preset("scheme-3-1")
    assert s3.max_orthogonality_order() == 2

    quintic = fv.Scheme.quintic(math.sqrt(15) / 4)
    assert abs(quintic.alphas[1] - 0.629941) < 1e-6

    try:
        fv.Scheme.method_ii(3, [0.5])
    except ValueError as e:
        assert "odd order" in str(e)
    else:
        raise AssertionError("Method II accepted an odd order")

    again = fv.Scheme.from_json(s.to_json())
    assert again.alphas == s.alphas

    mesh = fv.Mesh.uniform(8, 0.0, 1.0)
    assert len(mesh.dual_points(s)) == 8 * 4
    sol = fv.solve(s, "example-6-1", mesh)
    assert abs(sol.eval(0.3) - math.sin(0.3)) < 1e-6
    assert sol.errors()["err_h1"] < 1e-6

    report = fv.run_study(s, "example-6-1", [2, 4, 8, 16])
    orders = report.orders("err_h1")
    assert orders[0] is not None and abs(orders[-1] - 4.0) < 0.05
    assert report.to_csv().startswith("h,err_h1")
    print(report.to_markdown())
    print("smoke test passed")


if __name__ == "__main__":
    main()
