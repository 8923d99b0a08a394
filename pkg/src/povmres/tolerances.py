"""Numerical tolerances shared across the package.

All entropies are in bits (log base 2).
"""

LOG_BASE = 2

# max |M - M^dagger| entry deviation accepted as Hermitian
TOL_HERM = 1e-10
# eigenvalues at or below this count as zero (numerical support)
EIG_CUTOFF = 1e-12
# eigenvalues above -PSD_TOL are accepted as nonnegative and clamped
PSD_TOL = 1e-10
# max entry of P_ker(N) M P_ker(N) for im M to count as inside im N
SUPP_TOL = 1e-9
# max entry deviation of sum of effects from identity
COMPLETENESS_TOL = 1e-9
# column sums of a stochastic map
STOCHASTIC_TOL = 1e-12
# trace preservation / unitarity of Kraus families
CHANNEL_TOL = 1e-9
# a bracket with upper - lower at or below this is exact
BRACKET_TOL = 1e-7
# default tolerance for free-set predicates
PREDICATE_TOL = 1e-9


def as_dict():
    """Tolerance block embedded in every report."""
    return {
        "tol_herm": TOL_HERM,
        "eig_cutoff": EIG_CUTOFF,
        "psd_tol": PSD_TOL,
        "supp_tol": SUPP_TOL,
        "completeness_tol": COMPLETENESS_TOL,
        "stochastic_tol": STOCHASTIC_TOL,
        "channel_tol": CHANNEL_TOL,
        "bracket_tol": BRACKET_TOL,
        "predicate_tol": PREDICATE_TOL,
    }
