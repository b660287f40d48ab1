"""Performance/fault management: PM store, KPI reports, subscriptions."""

from ranslicing.pmfm.service import (
    VERDICT_MET,
    VERDICT_VIOLATED,
    KpiReport,
    PmFmService,
    Subscription,
    SubscriptionFilter,
)

__all__ = [
    "KpiReport",
    "PmFmService",
    "Subscription",
    "SubscriptionFilter",
    "VERDICT_MET",
    "VERDICT_VIOLATED",
]
