"""Multi-base integer representations: greedy and minimal-weight encoders,
the counting and Diophantine machinery behind their weight bounds, and
supporting simulations."""

from .enumeration import enumerate_power_products, largest_leq, t_bound
from .greedy import greedy_encode, greedy_encode_with_table, greedy_profile
from .minweight import counting_check, minimal_weight_exact, weight_profile
from .numsys import BaseSystem, PowerProduct, Representation, validate_system

__version__ = "0.1.0"

__all__ = [
    "BaseSystem",
    "PowerProduct",
    "Representation",
    "counting_check",
    "enumerate_power_products",
    "greedy_encode",
    "greedy_encode_with_table",
    "greedy_profile",
    "largest_leq",
    "minimal_weight_exact",
    "t_bound",
    "validate_system",
    "weight_profile",
]
