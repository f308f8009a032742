"""Deterministic synthetic dataset in the benchmark's file formats.

The generator never reads the real benchmark; names and categories mirror
its documented schema so that plans written for one run against the other.
"""

from __future__ import annotations

import hashlib
import random

from ..tools.relation import Relation
from .model import PAYMENT_COLUMNS, Dataset, FeeRule, MerchantConfig
from .ranges import parse_range_spec

ACQUIRERS = (
    ("gringotts", "GB"),
    ("the_savings_and_loan_bank", "US"),
    ("bank_of_springfield", "US"),
    ("dagoberts_vault", "NL"),
    ("dagoberts_geldpakhuis", "NL"),
    ("lehman_brothers", "US"),
    ("medici", "IT"),
    ("tellsons_bank", "FR"),
)

MCCS = (
    (5812, "Eating Places and Restaurants"),
    (5942, "Book Stores"),
    (7997, "Membership Clubs (Sports, Recreation, Athletic), Country Clubs, and Private Golf Courses"),
    (5813, "Drinking Places (Alcoholic Beverages) - Bars, Taverns, Nightclubs, Cocktail Lounges, and Discotheques"),
    (7372, "Computer Programming, Data Processing, and Integrated Systems Design Services"),
)

MERCHANTS = (
    MerchantConfig("Crossfit_Hanna", "manual", ("gringotts", "the_savings_and_loan_bank"), 7997, "F"),
    MerchantConfig("Belles_cookbook_store", "1", ("lehman_brothers",), 5942, "R"),
    MerchantConfig("Golfclub_Baron_Friso", "2", ("medici",), 7997, "F"),
    MerchantConfig("Martinis_Fine_Steakhouse", "immediate", ("dagoberts_geldpakhuis", "tellsons_bank"), 5812, "H"),
    MerchantConfig("Rafa_AI", "7", ("tellsons_bank",), 7372, "D"),
)

CARD_SCHEMES = ("GlobalCard", "NexPay", "SwiftCharge", "TransactPlus")
ACIS = ("A", "B", "C", "D", "E", "F", "G")
# the documented country set plus GB, so cross-border GB/FR examples have rows
SHOPPER_COUNTRIES = ("SE", "NL", "LU", "IT", "BE", "FR", "GR", "ES", "GB")
DEVICES = ("Windows", "Linux", "MacOS", "iOS", "Android", "Other")

# monthly volumes in the fixture are a few thousand euros, so volume ranges are scaled down
_VOLUMES = ("<1k", "1k-3k", "3k-5k", ">5k")
_FRAUD = ("<5%", "5%-10%", ">10%")
_DELAYS = ("<3", "3-5", ">5", "immediate", "manual")


def _hex(rng: random.Random, n: int = 22) -> str:
    return hashlib.sha1(str(rng.random()).encode()).hexdigest()[:n]


def _rules(rng: random.Random, n: int) -> list[FeeRule]:
    rules = []
    for i in range(1, n):
        def maybe(p, make):
            return make() if rng.random() < p else None

        rules.append(FeeRule(
            id=i,
            card_scheme=maybe(0.8, lambda: rng.choice(CARD_SCHEMES)),
            account_type=maybe(0.4, lambda: tuple(sorted(rng.sample("RDHFSO", rng.randint(1, 3))))),
            capture_delay=maybe(0.35, lambda: parse_range_spec(rng.choice(_DELAYS), "days")),
            monthly_fraud_level=maybe(0.3, lambda: parse_range_spec(rng.choice(_FRAUD), "percent")),
            monthly_volume=maybe(0.3, lambda: parse_range_spec(rng.choice(_VOLUMES), "euros")),
            merchant_category_code=maybe(0.3, lambda: tuple(sorted(rng.sample([c for c, _ in MCCS], 2)))),
            is_credit=maybe(0.5, lambda: rng.random() < 0.5),
            aci=maybe(0.5, lambda: tuple(sorted(rng.sample(ACIS, rng.randint(1, 4))))),
            fixed_amount=round(rng.uniform(0, 0.15), 2),
            rate=rng.randint(10, 99),
            intracountry=maybe(0.3, lambda: rng.random() < 0.5),
        ))
    # a catch-all rule guarantees every payment has at least one applicable fee
    rules.append(FeeRule(id=n, fixed_amount=0.12, rate=60))
    return rules


def _payments(rng: random.Random, n: int) -> Relation:
    countries = dict(ACQUIRERS)
    rows = []
    for i in range(n):
        m = rng.choice(MERCHANTS)
        acquirer = rng.choice(m.acquirer)
        issuing = rng.choice(SHOPPER_COUNTRIES)
        ip = issuing if rng.random() < 0.7 else rng.choice(SHOPPER_COUNTRIES)
        fraud = rng.random() < 0.08
        rows.append((
            10_000_000_000 + i * 7919,
            m.merchant,
            rng.choice(CARD_SCHEMES),
            2023,
            rng.randrange(24),
            rng.randrange(60),
            rng.randint(1, 365),
            rng.random() < 0.6,
            round(rng.lognormvariate(4.0, 0.9), 2),
            ip,
            issuing,
            rng.choice(DEVICES),
            _hex(rng),
            _hex(rng),
            _hex(rng),
            "Ecommerce" if rng.random() < 0.8 else "POS",
            rng.randint(4000, 5999),
            fraud,
            (not fraud) and rng.random() < 0.05,
            rng.choice(ACIS),
            countries[acquirer],
        ))
    return Relation(PAYMENT_COLUMNS, rows)


def generate_fixture(seed: int = 0, payments: int = 1000, rules: int = 20) -> Dataset:
    rng = random.Random(seed)
    fee_rules = _rules(rng, rules)
    return Dataset(
        payments=_payments(rng, payments),
        fee_rules=fee_rules,
        merchants={m.merchant: m for m in MERCHANTS},
        acquirer_countries=list(ACQUIRERS),
        mccs=list(MCCS),
    )


def write_fixture(out_dir, seed: int = 0, payments: int = 1000, rules: int = 20):
    from .loader import dump_dataset

    return dump_dataset(generate_fixture(seed, payments, rules), out_dir)
