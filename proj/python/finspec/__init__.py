"""Finite-section spectral measures for self-adjoint operators.

The heavy lifting lives in the compiled extension; this package re-exports
its public names. Typical flow: pick an operator family, truncate, build the
spectral family, then integrate against it.

    >>> import finspec
    >>> T = finspec.build_truncation(finspec.free_jacobi(), 50)
    >>> fam = finspec.SpectralFamily.build(T)
    >>> x = [1.0] + [0.0] * 49
    >>> fam.cdf(x).evaluate(0.0)  # doctest: +ELLIPSIS
    0.5...
"""

from ._core import (
    CdfCell,
    CdfConvergenceReport,
    Cluster,
    ConfigError,
    ConvergenceStudy,
    DomainProbe,
    DomainReport,
    EigenDecomposition,
    MembershipVerdict,
    NumericalError,
    OperatorSpec,
    OracleSpec,
    SpectralCDF,
    SpectralFamily,
    StoneLimitRow,
    StoneLimitStudy,
    StoneReconstruction,
    TailLimitRow,
    TailLimitsReport,
    TailReport,
    TruncatedOperator,
    VerifyCheck,
    VerifyOptions,
    VerifyReport,
    __version__,
    basis_probe,
    build_truncation,
    cluster_eigenvalues,
    default_cluster_tolerance,
    diagonal_unbounded,
    discontinuity_scan,
    discrete_schroedinger,
    domain_membership_report,
    eigendecompose,
    free_jacobi,
    gaussian_oracle,
    hermite_position,
    operational_calculus_residual,
    point_mass_oracle,
    power_probe,
    resolvent_solve,
    resolvent_solve_real,
    run_cdf_convergence,
    run_tail_limits,
    run_verify,
    semicircle_oracle,
    stone_limit_study,
    stone_reconstruct,
    user_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
