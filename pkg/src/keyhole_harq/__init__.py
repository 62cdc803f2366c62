"""Outage probabilities of HARQ schemes over keyhole (rank-one) MIMO channels.

Analytic engines (:mod:`.outage`), high-SNR asymptotes (:mod:`.asymptotics`),
a seeded Monte Carlo simulator (:mod:`.montecarlo`) and figure sweeps
(:mod:`.experiments`) share the records defined in :mod:`.core`.
"""

from .asymptotics import (AsymptoticBreakdown, RouteDisagreementError, UnsupportedCaseError,
                          asym_canonical, asym_cc, asym_ir, asym_type1, asymptotic, coding_gain,
                          diversity_order, g_of_r)
from .core import (AntennaCase, AntennaProfile, Method, OutageEstimate, SchemeTag, SystemConfig,
                   antenna_profile, db_to_linear, effective_threshold, linear_to_db)
from .distribution import (AccuracyError, KeyholeGainDist, cdf_x, laplace_factor, mellin_kernel,
                           pdf_x)
from .montecarlo import (CCVariant, NumericalFaultError, RngSpec, estimate_outage, gap_ir_cc,
                         mutual_info, simulate)
from .outage import (cc_outage_floor, outage_cc_upper, outage_exact, outage_ir, outage_type1)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticBreakdown", "RouteDisagreementError", "UnsupportedCaseError", "asym_canonical",
    "asym_cc", "asym_ir", "asym_type1", "asymptotic", "coding_gain", "diversity_order", "g_of_r",
    "AntennaCase", "AntennaProfile", "Method", "OutageEstimate", "SchemeTag", "SystemConfig",
    "antenna_profile", "db_to_linear", "effective_threshold", "linear_to_db",
    "AccuracyError", "KeyholeGainDist", "cdf_x", "laplace_factor", "mellin_kernel", "pdf_x",
    "CCVariant", "NumericalFaultError", "RngSpec", "estimate_outage", "gap_ir_cc", "mutual_info",
    "simulate", "cc_outage_floor", "outage_cc_upper", "outage_exact", "outage_ir", "outage_type1",
]
