"""Item pricing for Bayesian buyers over totally ordered items."""

from .model import (
    ADDITIVE,
    UNIT_DEMAND,
    BestResponse,
    BuyerType,
    Lottery,
    PricingInstance,
    Violation,
    additive_proxy,
    best_response_item_pricing,
    best_response_menu,
    revenue_item_pricing,
    revenue_menu,
    validate_instance,
)
from .scalar import INF

__version__ = "0.1.0"
