"""Typed records for the benchmark's data files, and the in-memory Dataset."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from decimal import Decimal
from typing import Any, Iterator

from ..errors import DataError
from ..tools.relation import Relation
from .ranges import RangeSpec

ACCOUNT_TYPES = ("R", "D", "H", "F", "S", "O")

PAYMENT_COLUMNS = (
    "psp_reference", "merchant", "card_scheme", "year", "hour_of_day", "minute_of_hour",
    "day_of_year", "is_credit", "eur_amount", "ip_country", "issuing_country", "device_type",
    "ip_address", "email_address", "card_number", "shopper_interaction", "card_bin",
    "has_fraudulent_dispute", "is_refused_by_adyen", "aci", "acquirer_country",
)

FEE_FIELDS = (
    "ID", "card_scheme", "account_type", "capture_delay", "monthly_fraud_level", "monthly_volume",
    "merchant_category_code", "is_credit", "aci", "fixed_amount", "rate", "intracountry",
)

# the table names plans use with query_data: the five data-file stems
TABLES = ("payments", "fees", "merchant_data", "acquirer_countries", "merchant_category_codes")


@dataclass(frozen=True)
class Payment:
    psp_reference: Any
    merchant: str
    card_scheme: str
    year: int
    hour_of_day: int
    minute_of_hour: int
    day_of_year: int
    is_credit: bool
    eur_amount: float
    ip_country: str
    issuing_country: str
    device_type: str
    ip_address: Any
    email_address: Any
    card_number: Any
    shopper_interaction: str
    card_bin: Any
    has_fraudulent_dispute: bool
    is_refused_by_adyen: bool
    aci: str
    acquirer_country: str

    @classmethod
    def from_row(cls, row: tuple) -> "Payment":
        return cls(*row)

    def as_row(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class FeeRule:
    id: int
    card_scheme: str | None = None
    account_type: tuple[str, ...] | None = None
    capture_delay: RangeSpec | None = None
    monthly_fraud_level: RangeSpec | None = None
    monthly_volume: RangeSpec | None = None
    merchant_category_code: tuple[int, ...] | None = None
    is_credit: bool | None = None
    aci: tuple[str, ...] | None = None
    fixed_amount: float = 0.0
    rate: int = 0
    intracountry: bool | None = None

    MATCH_FIELDS = (
        "card_scheme", "account_type", "capture_delay", "monthly_fraud_level", "monthly_volume",
        "merchant_category_code", "is_credit", "aci", "intracountry",
    )

    def __post_init__(self) -> None:
        if self.fixed_amount < 0 or self.rate < 0:
            raise DataError(f"fee rule {self.id}: fixed_amount and rate must be non-negative")

    @property
    def specificity(self) -> int:
        """Number of constrained (non-wildcard) matching fields."""
        return sum(1 for name in self.MATCH_FIELDS if getattr(self, name) is not None)


@dataclass(frozen=True)
class MerchantConfig:
    merchant: str
    capture_delay: str
    acquirer: tuple[str, ...]
    merchant_category_code: int
    account_type: str

    def __post_init__(self) -> None:
        if self.account_type not in ACCOUNT_TYPES:
            raise DataError(f"merchant {self.merchant}: account_type {self.account_type!r} not in {ACCOUNT_TYPES}")


@dataclass(frozen=True)
class MonthlyStats:
    merchant: str
    year: int
    month: int
    total_volume: Decimal
    fraud_volume: Decimal
    fraud_level: float

    def __post_init__(self) -> None:
        if self.fraud_volume > self.total_volume:
            raise DataError("fraud volume exceeds total volume")


@dataclass
class Dataset:
    payments: Relation
    fee_rules: list[FeeRule]
    merchants: dict[str, MerchantConfig]
    acquirer_countries: list[tuple[str, str]]
    mccs: list[tuple[int, str]]
    raw_fees: list[dict] = field(default_factory=list, repr=False)
    _tables: dict[str, Relation] = field(default_factory=dict, repr=False)
    _stats: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.payments.header != PAYMENT_COLUMNS:
            raise DataError("payments relation must use the canonical column order")

    # -- record access --------------------------------------------------------------------
    def iter_payments(self) -> Iterator[Payment]:
        for row in self.payments.rows:
            yield Payment(*row)

    def merchant(self, name: str) -> MerchantConfig:
        try:
            return self.merchants[name]
        except KeyError:
            raise DataError(f"unknown merchant {name!r}") from None

    def rule(self, rule_id: int) -> FeeRule:
        for r in self.fee_rules:
            if r.id == rule_id:
                return r
        raise DataError(f"unknown fee rule {rule_id}")

    # -- tables for query_data --------------------------------------------------------------
    def table(self, name: str) -> Relation:
        if name == "payments":
            return self.payments
        if name not in TABLES:
            from ..tools.relation import RelationError

            raise RelationError("unknown_table", f"unknown table '{name}' (tables: {', '.join(TABLES)})")
        rel = self._tables.get(name)
        if rel is None:
            rel = self._tables[name] = self._build_table(name)
        return rel

    def tables(self) -> dict[str, Relation]:
        return {name: self.table(name) for name in TABLES}

    def _build_table(self, name: str) -> Relation:
        if name == "acquirer_countries":
            return Relation(["acquirer", "country_code"], self.acquirer_countries)
        if name == "merchant_category_codes":
            return Relation(["mcc", "description"], self.mccs)
        if name == "merchant_data":
            return Relation(
                ["merchant", "capture_delay", "acquirer", "merchant_category_code", "account_type"],
                [
                    (m.merchant, m.capture_delay, m.acquirer, m.merchant_category_code, m.account_type)
                    for m in self.merchants.values()
                ],
            )
        header = ["id"] + list(FEE_FIELDS[1:])
        rows = []
        for r in self.fee_rules:
            rows.append((
                r.id, r.card_scheme, r.account_type,
                r.capture_delay.text if r.capture_delay else None,
                r.monthly_fraud_level.text if r.monthly_fraud_level else None,
                r.monthly_volume.text if r.monthly_volume else None,
                r.merchant_category_code, r.is_credit, r.aci, r.fixed_amount, r.rate, r.intracountry,
            ))
        return Relation(header, rows)

    # -- facts ------------------------------------------------------------------------------
    def fact_text(self) -> str:
        """Small tables rendered as logic facts (countries lower-cased, as in hand-written programs)."""
        from ..logic.terms import Atom, Compound, Int, mklist
        from ..logic.writer import format_term

        lines: list[str] = []

        def fact(name, *args):
            lines.append(format_term(Compound(name, args)) + ".")

        for acq, cc in self.acquirer_countries:
            fact("acquirer_country", Atom(acq), Atom(cc.lower()))
        for acq in dict.fromkeys(a for a, _ in self.acquirer_countries):
            fact("acquirer", Atom(acq))
        for cc in dict.fromkeys(c.lower() for _, c in self.acquirer_countries):
            fact("country", Atom(cc))
        for m in self.merchants.values():
            fact(
                "merchant_data", Atom(m.merchant), Atom(m.capture_delay),
                mklist([Atom(a) for a in m.acquirer]), Int(m.merchant_category_code), Atom(m.account_type),
            )
        for code, desc in self.mccs:
            fact("mcc", Int(code), Atom(desc))
        return "\n".join(lines) + "\n"

    def assert_facts(self, kb) -> int:
        """Consult the fact rendering into ``kb`` with dataset provenance; returns the clause count."""
        before = sum(len(kb.clauses(k) or ()) for k in list(kb.predicates()))
        kb.consult(self.fact_text(), provenance="dataset")
        return sum(len(kb.clauses(k) or ()) for k in list(kb.predicates())) - before
