"""Numerical and statistical tolerances shared by checks, CLI and tests."""

#: absolute/relative slack for identities that hold exactly in real arithmetic
IDENTITY_TOL = 1e-9
#: total-variation bound between the enumerated law and the multinomial law
TV_TOL = 1e-12
#: half-width of statistical bands, in standard errors
SIGMA_BAND = 5.0
#: accepted sample-variance / theory-variance ratio at 500 replications
VARIANCE_RATIO = (0.75, 1.30)
#: asymptotic Kolmogorov 5% critical value is KS_COEF / sqrt(reps)
KS_COEF = 1.36
#: trapezoid mass of an emitted KDE must be within this of 1
KDE_MASS_TOL = 1e-3


def ks_critical(reps: int) -> float:
    return KS_COEF / reps**0.5
