"""Ruin probabilities for the Cramer-Lundberg model: exact, approximate, simulated."""
from .approx import (
    METHODS,
    RuinApprox,
    approximate,
    devylder,
    jt_beekman,
    jt_ramsay,
    perturbed_1m,
    perturbed_2m,
    ramsay_pade12,
    renyi,
    two_point_ramsay,
)
from .claims import Erlang, Exponential, Gamma, HyperExponential, MomentsOnly, Uniform
from .oracle import exact_ruin_rational, mc_aggregate_loss, talbot_invert, talbot_ruin
from .ratlap import ExpPolyMixture, RationalLT, pade, partial_fractions, two_point_pade
from .riskmodel import RiskModel

__all__ = [
    "METHODS",
    "Erlang",
    "ExpPolyMixture",
    "Exponential",
    "Gamma",
    "HyperExponential",
    "MomentsOnly",
    "RationalLT",
    "RiskModel",
    "RuinApprox",
    "Uniform",
    "approximate",
    "devylder",
    "exact_ruin_rational",
    "jt_beekman",
    "jt_ramsay",
    "mc_aggregate_loss",
    "pade",
    "partial_fractions",
    "perturbed_1m",
    "perturbed_2m",
    "ramsay_pade12",
    "renyi",
    "talbot_invert",
    "talbot_ruin",
    "two_point_pade",
    "two_point_ramsay",
]
