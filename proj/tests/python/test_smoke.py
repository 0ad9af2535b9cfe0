"""Smoke tests for the python bindings: constants, identities, one small solve."""

import math

import choquard as cq


def close(a, b, rel=1e-10):
    return abs(a - b) <= rel * max(1.0, abs(b))


def test_constants():
    for N, lam in [(3, 1.0), (3, 2.0), (4, 2.0), (5, 3.0), (5, 4.0)]:
        pp = cq.ProblemParams.make(N, lam)
        assert abs(pp.alpha * pp.A / (N * (N - 2)) - 1.0) <= 1e-12
    pp = cq.ProblemParams.make(3, 1.0)
    assert close(pp.A, 4.0 * math.pi / 3.0, 1e-13)


def test_bubble_values():
    pp = cq.ProblemParams.make(3, 1.0)
    b = cq.BubbleParams(1.0, [0.0, 0.0, 0.0])
    assert close(cq.bubble_value(pp, b, [0.0, 0.0, 0.0]), 1.0)
    assert close(cq.z_mode(pp, 0, b, [0.0, 0.0, 0.0]), -0.5)
    assert close(cq.mode_pairing(pp, 0), math.pi**2 / 64.0, 1e-10)
    assert close(cq.mode_pairing(pp, 2), math.pi**2 / 64.0, 1e-10)


def test_kernel_and_solver():
    pp = cq.ProblemParams.make(3, 1.0)
    assert close(cq.radial_kernel_entry(pp, 1.0, 1.0, 2.0), 2.0 * math.pi, 1e-10)
    ctx = cq.RadialContext.make(pp, 96)
    sys1 = cq.ProjectedSystem(ctx, cq.BubbleParams(1.0, []))
    diag = sys1.kernel_diagnostic()
    assert diag["near_null_count"] == 1
    assert diag["cos_angle_z0"] >= 0.999
    # projected solve of the manufactured g = L U recovers U
    g = [
        3.0 * (1.0 + r * r) ** -2.5
        - pp.alpha * (2 * pp.p - 1) * pp.A * (1 + r * r) ** -0.5 * (1 + r * r) ** -2.0
        for r in ctx.r
    ]
    out = sys1.solve(g, decay=5.0)
    worst = max(
        abs(p - (1 + r * r) ** -0.5) for p, r in zip(out["phi"], ctx.r)
    )
    assert worst <= 1e-3  # coarse 96-node grid


def test_pipeline():
    pp = cq.ProblemParams.make(3, 1.0)
    ctx = cq.RadialContext.make(pp, 96)
    k = cq.PotentialSpec(3, 1.0, [cq.Bump(cq.BumpKind.ring, 0.5, [], 1.0, 0.0, 1.3)])
    ups = cq.Upsilon(pp, k, 96, 9)
    zeros = cq.find_critical_points(ups, cq.Box(0.5, 2.5), 16, 7)
    assert len(zeros) == 1
    mu_star = zeros[0]["mu"]
    sys1 = cq.ProjectedSystem(ctx, cq.BubbleParams(mu_star, []))
    sol = cq.contraction_solve(sys1, 5e-3, k)
    assert sol.converged
    assert sol.phi_norm < 0.01
    rep = cq.residual_check(sys1, sol, k)
    assert rep["positive"]
    assert rep["residual_y"] <= 1e-4
    full = cq.solve_full(ctx, ups, 5e-3, mu_star)
    assert full["c_norm"] <= 1e-10


def test_kcheck():
    spec = cq.PotentialSpec(3, 1.0, [cq.Bump(cq.BumpKind.gaussian, 1.0, [], 1.0)])
    rep = cq.check_assumptions(spec)
    assert rep["k2"] == "fail"
    assert rep["index_sum"] == -1


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"{name}: ok")
            except AssertionError as exc:
                failures += 1
                print(f"{name}: FAILED {exc}")
    raise SystemExit(1 if failures else 0)
