"""Quick check that the extension imports and reproduces a few known numbers."""

import math

import nv_entangle as nv


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    assert close(nv.cross_relaxation_field(), 0.102461, 1e-5)
    assert close(abs(nv.dipolar_coupling(10e-9, 0.0)), 25974.19, 1e-6)
    assert nv.gamma1_scaled(1.1) == 250e3

    p = nv.EngineParams.from_concentration(1.1, 56021.045)
    rho = nv.steady_state(p)
    assert abs(sum(rho.eigenvalues()) - 1.0) < 1e-12
    c = nv.concurrence(rho)
    assert close(c, 0.0404459657, 1e-8), c
    jl, jr = nv.heat_currents(p, rho)
    assert jl > 0 and abs(jl + jr) < 1e-9 * jl

    rho0 = nv.DensityMatrix.thermal_product(p.n_l, p.n_r)
    late = nv.evolve(p, rho0, [1e-6, 5.08741e-6, 4e-4])
    assert close(nv.concurrence(late[1]), 0.0831947, 1e-5)
    assert late[2].trace_distance(rho) < 1e-9

    equal = nv.EngineParams.resonant(1.1e6, 56e3, 250e3, 0.3, 0.3)
    assert nv.concurrence(nv.steady_state(equal)) == 0.0

    opt = nv.optimal_g(1.1)
    assert close(opt["g_star_hz"], 56021.045, 2e-6), opt
    assert opt["warning"] is None

    report = nv.feasibility()
    assert report["diffusion"]["passed"] and not report["all_passed"]

    try:
        nv.EngineParams.resonant(1.1e6, 56e3, -1.0, 0.5, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative rate accepted")

    bell = [[0, 0, 0, 0], [0, 0.5, 0.5, 0], [0, 0.5, 0.5, 0], [0, 0, 0, 0]]
    assert math.isclose(nv.concurrence(nv.DensityMatrix(bell)), 1.0, abs_tol=1e-12)
    print("smoke test ok: C* = %.6f at g* = %.1f Hz" % (c, opt["g_star_hz"]))


if __name__ == "__main__":
    main()
