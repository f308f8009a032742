"""Benchmark data files: loading, fee rules, fees and monthly statistics."""

from __future__ import annotations

from .fees import (
    TxContext,
    applicable_fee,
    fee_rule_matches,
    merchant_monthly_stats,
    month_of,
    payment_context,
    select_rule,
    transaction_fee,
)
from .fixture import generate_fixture, write_fixture
from .loader import dump_dataset, load_dataset
from .model import TABLES, Dataset, FeeRule, MerchantConfig, MonthlyStats, Payment
from .ranges import RangeSpec, parse_range_spec

__all__ = [
    "TABLES", "Dataset", "FeeRule", "MerchantConfig", "MonthlyStats", "Payment", "RangeSpec",
    "TxContext", "applicable_fee", "dump_dataset", "fee_rule_matches", "generate_fixture",
    "load_dataset", "merchant_monthly_stats", "month_of", "parse_range_spec", "payment_context",
    "select_rule", "transaction_fee", "write_fixture",
]
