import math

import pytest

import finspec


def unit(n, k=0):
    x = [0.0] * n
    x[k] = 1.0
    return x


def test_truncation_and_eigenvalues():
    T = finspec.build_truncation(finspec.free_jacobi(), 3)
    assert T.dim == 3
    assert T.at(0, 1) == 1.0 and T.at(0, 0) == 0.0
    d = finspec.eigendecompose(T)
    root2 = math.sqrt(2.0)
    assert d.eigenvalues == pytest.approx([-root2, 0.0, root2], abs=1e-14)
    assert d.spectral_radius() == pytest.approx(root2)


def test_cdf_masses_sum_to_probe_norm():
    T = finspec.build_truncation(finspec.hermite_position(), 40)
    fam = finspec.SpectralFamily.build(T)
    cdf = fam.cdf(unit(40))
    assert cdf.total == pytest.approx(1.0, abs=1e-12)
    assert sum(cdf.jump_masses) == pytest.approx(1.0, abs=1e-12)
    assert cdf.evaluate(float("inf")) == pytest.approx(1.0, abs=1e-12)
    assert cdf.evaluate(cdf.jump_locations[0] - 1.0) == 0.0
    # Symmetric operator, e1 probe: median at zero.
    assert cdf.evaluate(0.0) == pytest.approx(0.5, abs=0.1)


def test_identity_integral_matches_matvec():
    T = finspec.build_truncation(finspec.discrete_schroedinger([0.0, 0.1]), 30)
    fam = finspec.SpectralFamily.build(T)
    x = [1.0 / (i + 1.0) for i in range(30)]
    lhs = fam.stieltjes_apply(lambda lam: lam, -float("inf"), float("inf"), x)
    rhs = T.matvec(x)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_resolvent_agrees_with_spectral_integral():
    T = finspec.build_truncation(finspec.free_jacobi(), 25)
    fam = finspec.SpectralFamily.build(T)
    z = 0.3 + 0.7j
    x = unit(25)
    direct = finspec.resolvent_solve_real(T, z, x)
    integral = fam.stieltjes_apply_complex(lambda lam: 1.0 / (lam - z), -float("inf"),
                                           float("inf"), x)
    assert max(abs(a - b) for a, b in zip(direct, integral)) < 1e-12
    assert finspec.operational_calculus_residual(fam, T, z, x) < 1e-12


def test_stone_reconstruction_converges():
    T = finspec.build_truncation(finspec.free_jacobi(), 12)
    fam = finspec.SpectralFamily.build(T)
    x = unit(12)
    increment = [b - a for a, b in zip(fam.apply_F(-0.6, x), fam.apply_F(0.6, x))]
    rec = finspec.stone_reconstruct(T, -0.6, 0.6, 1e-3, x, refinement_tol=1e-9)
    err = max(abs(r - i) for r, i in zip(rec.result, increment))
    assert err < 5e-3
    assert rec.endpoint_distance > 0.0


def test_convergence_study_reaches_semicircle():
    study = finspec.ConvergenceStudy()
    study.spec = finspec.free_jacobi()
    study.probe = finspec.basis_probe(1)
    study.ns = [100, 200]
    study.lambda_grid = [-1.5 + 3.0 * j / 20.0 for j in range(21)]
    study.oracle = finspec.semicircle_oracle()
    rep = finspec.run_cdf_convergence(study)
    assert rep.sup(1) < rep.sup(0) * 1.1
    assert rep.sup(1) < 0.05
    cell = rep.cell(1, 10)
    assert cell.cdf == pytest.approx(0.5, abs=0.05)


def test_tail_limits_and_membership():
    study = finspec.ConvergenceStudy()
    study.spec = finspec.hermite_position()
    study.probe = finspec.basis_probe(1)
    study.ns = [40, 80, 160]
    rep = finspec.run_tail_limits(study, [1.0, 3.0])
    assert len(rep.rows) == 6
    assert all(r.bound_satisfied for r in rep.rows)
    verdict = finspec.domain_membership_report(study.spec, study.probe, study.ns).verdict
    assert verdict == finspec.MembershipVerdict.Bounded


def test_verify_passes_on_small_section():
    report = finspec.run_verify(finspec.free_jacobi(), finspec.basis_probe(1),
                                finspec.VerifyOptions())
    assert report.pass_
    assert all(c.pass_ for c in report.checks)
    assert {c.name for c in report.checks} >= {
        "eigenvector-orthonormality",
        "cdf-mass-completeness",
        "riemann-sum-mesh-bound",
    }


def test_errors_surface_as_python_exceptions():
    with pytest.raises(finspec.ConfigError):
        finspec.build_truncation(finspec.free_jacobi(), 0)
    assert issubclass(finspec.ConfigError, ValueError)
    assert issubclass(finspec.NumericalError, ArithmeticError)
    T = finspec.build_truncation(finspec.free_jacobi(), 4)
    with pytest.raises(finspec.ConfigError):
        finspec.resolvent_solve_real(T, 1.0 + 0.0j, unit(4))
