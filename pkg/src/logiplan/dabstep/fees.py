"""Fee-rule matching, fee computation and merchant monthly statistics."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from decimal import Decimal

from ..errors import DataError, FeeError
from .model import Dataset, FeeRule, MerchantConfig, MonthlyStats, Payment

# first day_of_year of each month in a 365-day year
_MONTH_STARTS = (1, 32, 60, 91, 121, 152, 182, 213, 244, 274, 305, 335)


def month_of(day_of_year: int) -> int:
    if not 1 <= day_of_year <= 366:
        raise ValueError(f"day_of_year out of range: {day_of_year}")
    return bisect.bisect_right(_MONTH_STARTS, day_of_year)


@dataclass(frozen=True)
class TxContext:
    card_scheme: str
    account_type: str
    capture_delay: str
    monthly_fraud_level: float
    monthly_volume: float
    mcc: int
    is_credit: bool
    aci: str
    intracountry: bool


def _capture_delay_ok(spec, merchant_value: str) -> bool:
    v = merchant_value.strip().lower()
    if spec.kind == "tag":
        return v == spec.tag
    if v == "manual":
        return False
    if v == "immediate":
        return spec.contains(0)
    try:
        days = float(v)
    except ValueError:
        return False
    return spec.contains(days)


def fee_rule_matches(rule: FeeRule, ctx: TxContext) -> bool:
    if rule.card_scheme is not None and rule.card_scheme != ctx.card_scheme:
        return False
    if rule.account_type is not None and ctx.account_type not in rule.account_type:
        return False
    if rule.capture_delay is not None and not _capture_delay_ok(rule.capture_delay, ctx.capture_delay):
        return False
    if rule.monthly_fraud_level is not None and not rule.monthly_fraud_level.contains(ctx.monthly_fraud_level):
        return False
    if rule.monthly_volume is not None and not rule.monthly_volume.contains(ctx.monthly_volume):
        return False
    if rule.merchant_category_code is not None and ctx.mcc not in rule.merchant_category_code:
        return False
    if rule.is_credit is not None and rule.is_credit != ctx.is_credit:
        return False
    if rule.aci is not None and ctx.aci not in rule.aci:
        return False
    if rule.intracountry is not None and rule.intracountry != ctx.intracountry:
        return False
    return True


def transaction_fee(rule_or_fixed, rate: int | None = None, amount: float | None = None) -> float:
    """``fixed_amount + rate * amount / 10000``, rounded to 14 decimal places.

    Accepts either ``(rule, amount)`` or ``(fixed_amount, rate, amount)``.
    """
    if isinstance(rule_or_fixed, FeeRule):
        if amount is not None:
            raise TypeError("transaction_fee(rule, amount) takes two arguments")
        fixed, rate, amount = rule_or_fixed.fixed_amount, rule_or_fixed.rate, rate
    else:
        fixed = rule_or_fixed
    if amount is None or rate is None:
        raise TypeError("missing amount")
    if amount < 0:
        raise FeeError(f"amount must be non-negative, got {amount}")
    return round(fixed + rate * amount / 10000, 14)


def merchant_monthly_stats(ds: Dataset, merchant: str, year: int) -> list[MonthlyStats]:
    """Per-month volume and fraud for one merchant-year; months without payments are omitted."""
    key = (merchant, year)
    cached = ds._stats.get(key)
    if cached is not None:
        return cached
    rows = ds.payments.rows
    h = ds.payments.header
    mi, yi, di, ai, fi = (h.index(c) for c in ("merchant", "year", "day_of_year", "eur_amount", "has_fraudulent_dispute"))
    total: dict[int, Decimal] = {}
    fraud: dict[int, Decimal] = {}
    seen_merchant = False
    for r in rows:
        if r[mi] != merchant:
            continue
        seen_merchant = True
        if r[yi] != year:
            continue
        m = month_of(r[di])
        amt = Decimal(repr(r[ai]))
        total[m] = total.get(m, Decimal(0)) + amt
        if r[fi]:
            fraud[m] = fraud.get(m, Decimal(0)) + amt
    if not seen_merchant:
        raise DataError(f"unknown merchant {merchant!r}")
    out = []
    for m in sorted(total):
        t = total[m]
        f = fraud.get(m, Decimal(0))
        level = float(Decimal(100) * f / t) if t > 0 else 0.0
        out.append(MonthlyStats(merchant, year, m, t, f, level))
    ds._stats[key] = out
    return out


def _month_stats(ds: Dataset, merchant: str, year: int, month: int) -> MonthlyStats | None:
    for s in merchant_monthly_stats(ds, merchant, year):
        if s.month == month:
            return s
    return None


def payment_context(ds: Dataset, payment: Payment, merchant_ctx: MerchantConfig | None = None) -> TxContext:
    m = merchant_ctx or ds.merchant(payment.merchant)
    stats = _month_stats(ds, payment.merchant, payment.year, month_of(payment.day_of_year))
    return TxContext(
        card_scheme=payment.card_scheme,
        account_type=m.account_type,
        capture_delay=m.capture_delay,
        monthly_fraud_level=stats.fraud_level if stats else 0.0,
        monthly_volume=float(stats.total_volume) if stats else 0.0,
        mcc=m.merchant_category_code,
        is_credit=payment.is_credit,
        aci=payment.aci,
        intracountry=payment.issuing_country == payment.acquirer_country,
    )


def select_rule(rules, ctx: TxContext) -> FeeRule | None:
    """The most specific matching rule; ties go to the lowest id."""
    best = None
    for r in rules:
        if fee_rule_matches(r, ctx):
            if best is None or (r.specificity, -r.id) > (best.specificity, -best.id):
                best = r
    return best


def applicable_fee(
    ds: Dataset,
    payment: Payment,
    merchant_ctx: MerchantConfig | None = None,
    aci: str | None = None,
) -> tuple[int, float]:
    """(rule id, fee) for a payment; ``aci`` overrides the payment's indicator for what-if analysis."""
    ctx = payment_context(ds, payment, merchant_ctx)
    if aci is not None:
        ctx = replace(ctx, aci=aci)
    rule = select_rule(ds.fee_rules, ctx)
    if rule is None:
        raise FeeError(f"no fee rule matches payment {payment.psp_reference}")
    return rule.id, transaction_fee(rule, payment.eur_amount)
