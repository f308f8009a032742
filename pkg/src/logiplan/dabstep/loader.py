"""Reading and writing the benchmark's data files."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path
from typing import Any, Callable, Mapping

from ..errors import DataError
from ..tools.relation import Relation
from .model import FEE_FIELDS, PAYMENT_COLUMNS, Dataset, FeeRule, MerchantConfig
from .ranges import parse_range_spec

FILES = {
    "payments": "payments.csv",
    "fees": "fees.json",
    "merchant_data": "merchant_data.json",
    "acquirer_countries": "acquirer_countries.csv",
    "merchant_category_codes": "merchant_category_codes.csv",
}

_TRUE = {"true", "1", "1.0", "yes", "t"}
_FALSE = {"false", "0", "0.0", "no", "f"}


def parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in _TRUE:
        return True
    if s in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_id(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return text


def _opt_str(text: str):
    return text if text != "" else None


_PAYMENT_TYPES: dict[str, Callable[[str], Any]] = {
    "psp_reference": _opt_id,
    "merchant": str,
    "card_scheme": str,
    "year": int,
    "hour_of_day": int,
    "minute_of_hour": int,
    "day_of_year": int,
    "is_credit": parse_bool,
    "eur_amount": float,
    "ip_country": _opt_str,
    "issuing_country": _opt_str,
    "device_type": _opt_str,
    "ip_address": _opt_str,
    "email_address": _opt_str,
    "card_number": _opt_str,
    "shopper_interaction": str,
    "card_bin": _opt_id,
    "has_fraudulent_dispute": parse_bool,
    "is_refused_by_adyen": parse_bool,
    "aci": str,
    "acquirer_country": _opt_str,
}


def _read_csv(path: Path, required: tuple[str, ...]) -> tuple[list[int], csv.reader]:
    f = open(path, newline="", encoding="utf-8")
    reader = csv.reader(f)
    try:
        header = next(reader)
    except StopIteration:
        f.close()
        raise DataError(f"{path.name}: file is empty") from None
    missing = [c for c in required if c not in header]
    if missing:
        f.close()
        raise DataError(f"{path.name}: missing column(s) {', '.join(missing)}")
    return [header.index(c) for c in required], _closing_rows(f, reader)


def _closing_rows(f, reader):
    with f:
        yield from reader


def load_payments(path: Path) -> Relation:
    idx, rows = _read_csv(path, PAYMENT_COLUMNS)
    converters = [_PAYMENT_TYPES[c] for c in PAYMENT_COLUMNS]
    plan = list(zip(idx, converters, PAYMENT_COLUMNS))
    out = []
    for n, raw in enumerate(rows, start=2):
        if not raw:
            continue
        try:
            row = tuple(conv(raw[i]) for i, conv, _ in plan)
        except (ValueError, IndexError) as e:
            bad = next((c for i, conv, c in plan if not _converts(conv, raw, i)), "?")
            raise DataError(f"{path.name}: row {n}: column {bad}: {e}") from None
        if row[8] < 0:
            raise DataError(f"{path.name}: row {n}: eur_amount must be non-negative")
        if not 1 <= row[6] <= 366:
            raise DataError(f"{path.name}: row {n}: day_of_year out of range")
        out.append(row)
    return Relation(PAYMENT_COLUMNS, out)


def _converts(conv, raw, i) -> bool:
    try:
        conv(raw[i])
        return True
    except (ValueError, IndexError):
        return False


def _list_field(value, rule_id, name, item=str):
    if value is None:
        return None
    if not isinstance(value, list):
        raise DataError(f"fees.json: rule {rule_id}: {name} must be a list")
    if not value:
        return None
    try:
        return tuple(item(v) for v in value)
    except (TypeError, ValueError):
        raise DataError(f"fees.json: rule {rule_id}: bad value in {name}") from None


def _opt_bool(value, rule_id, name):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)) and value in (0, 1):
        return bool(value)
    if isinstance(value, str):
        try:
            return parse_bool(value)
        except ValueError:
            pass
    raise DataError(f"fees.json: rule {rule_id}: {name} must be a boolean or null")


def _opt_range(value, rule_id, name, unit):
    if value is None or value == "":
        return None
    try:
        return parse_range_spec(str(value), unit)
    except DataError as e:
        raise DataError(f"fees.json: rule {rule_id}: {name}: {e}") from None


def fee_rule_from_json(obj: Mapping[str, Any]) -> FeeRule:
    missing = [f for f in FEE_FIELDS if f not in obj]
    if missing:
        raise DataError(f"fees.json: rule {obj.get('ID', '?')}: missing field(s) {', '.join(missing)}")
    rid = obj["ID"]
    try:
        return FeeRule(
            id=int(rid),
            card_scheme=obj["card_scheme"] or None,
            account_type=_list_field(obj["account_type"], rid, "account_type"),
            capture_delay=_opt_range(obj["capture_delay"], rid, "capture_delay", "days"),
            monthly_fraud_level=_opt_range(obj["monthly_fraud_level"], rid, "monthly_fraud_level", "percent"),
            monthly_volume=_opt_range(obj["monthly_volume"], rid, "monthly_volume", "euros"),
            merchant_category_code=_list_field(obj["merchant_category_code"], rid, "merchant_category_code", int),
            is_credit=_opt_bool(obj["is_credit"], rid, "is_credit"),
            aci=_list_field(obj["aci"], rid, "aci"),
            fixed_amount=float(obj["fixed_amount"]),
            rate=int(obj["rate"]),
            intracountry=_opt_bool(obj["intracountry"], rid, "intracountry"),
        )
    except (TypeError, ValueError) as e:
        raise DataError(f"fees.json: rule {rid}: {e}") from None


def merchant_from_json(obj: Mapping[str, Any]) -> MerchantConfig:
    fields_ = ("merchant", "capture_delay", "acquirer", "merchant_category_code", "account_type")
    missing = [f for f in fields_ if f not in obj]
    if missing:
        raise DataError(f"merchant_data.json: {obj.get('merchant', '?')}: missing field(s) {', '.join(missing)}")
    acq = obj["acquirer"]
    if isinstance(acq, str):
        acq = [acq]
    mcc = obj["merchant_category_code"]
    if isinstance(mcc, list):
        if len(mcc) != 1:
            raise DataError(f"merchant_data.json: {obj['merchant']}: expected one merchant_category_code")
        mcc = mcc[0]
    return MerchantConfig(
        merchant=str(obj["merchant"]),
        capture_delay=str(obj["capture_delay"]),
        acquirer=tuple(str(a) for a in acq),
        merchant_category_code=int(mcc),
        account_type=str(obj["account_type"]),
    )


def _load_json_array(path: Path) -> list:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{path.name}: invalid JSON: {e}") from None
    if not isinstance(data, list):
        raise DataError(f"{path.name}: expected a JSON array of objects")
    return data


def load_acquirer_countries(path: Path) -> list[tuple[str, str]]:
    idx, rows = _read_csv(path, ("acquirer", "country_code"))
    out = []
    for n, raw in enumerate(rows, start=2):
        if raw:
            try:
                out.append((raw[idx[0]], raw[idx[1]]))
            except IndexError:
                raise DataError(f"{path.name}: row {n}: too few columns") from None
    return out


def load_mccs(path: Path) -> list[tuple[int, str]]:
    idx, rows = _read_csv(path, ("mcc", "description"))
    out = []
    for n, raw in enumerate(rows, start=2):
        if raw:
            try:
                out.append((int(raw[idx[0]]), raw[idx[1]]))
            except (ValueError, IndexError) as e:
                raise DataError(f"{path.name}: row {n}: column mcc: {e}") from None
    return out


def resolve_paths(paths: Mapping[str, str | os.PathLike] | str | os.PathLike) -> dict[str, Path]:
    """Accept either a directory holding the standard file names or an explicit role → path mapping."""
    if isinstance(paths, (str, os.PathLike)):
        base = Path(paths)
        if not base.is_dir():
            raise DataError(f"data directory not found: {base}")
        resolved = {role: base / name for role, name in FILES.items()}
    else:
        unknown = set(paths) - set(FILES)
        if unknown:
            raise DataError(f"unknown file role(s): {', '.join(sorted(unknown))}")
        resolved = {role: Path(p) for role, p in paths.items()}
    for role in FILES:
        p = resolved.get(role)
        if p is None:
            raise DataError(f"no path given for {role}")
        if not p.is_file():
            raise DataError(f"missing file: {p}")
    return resolved


def load_dataset(paths, kb=None) -> Dataset:
    """Load all five data files; small tables are also asserted into ``kb`` as facts when given."""
    p = resolve_paths(paths)
    raw_fees = _load_json_array(p["fees"])
    rules = [fee_rule_from_json(o) for o in raw_fees]
    if len({r.id for r in rules}) != len(rules):
        raise DataError("fees.json: duplicate rule IDs")
    merchants = {}
    for obj in _load_json_array(p["merchant_data"]):
        m = merchant_from_json(obj)
        merchants[m.merchant] = m
    ds = Dataset(
        payments=load_payments(p["payments"]),
        fee_rules=rules,
        merchants=merchants,
        acquirer_countries=load_acquirer_countries(p["acquirer_countries"]),
        mccs=load_mccs(p["merchant_category_codes"]),
        raw_fees=raw_fees,
    )
    if kb is not None:
        ds.assert_facts(kb)
    return ds


# -- writing ----------------------------------------------------------------------------------


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_payments(path: Path, rel: Relation) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(rel.header)
        for row in rel.rows:
            w.writerow([_csv_cell(v) for v in row])


def _range_text(spec):
    return spec.text if spec is not None else None


def fee_rule_to_json(r: FeeRule) -> dict:
    return {
        "ID": r.id,
        "card_scheme": r.card_scheme,
        "account_type": list(r.account_type or []),
        "capture_delay": _range_text(r.capture_delay),
        "monthly_fraud_level": _range_text(r.monthly_fraud_level),
        "monthly_volume": _range_text(r.monthly_volume),
        "merchant_category_code": list(r.merchant_category_code or []),
        "is_credit": r.is_credit,
        "aci": list(r.aci or []),
        "fixed_amount": r.fixed_amount,
        "rate": r.rate,
        "intracountry": r.intracountry,
    }


def merchant_to_json(m: MerchantConfig) -> dict:
    return {
        "merchant": m.merchant,
        "capture_delay": m.capture_delay,
        "acquirer": list(m.acquirer),
        "merchant_category_code": m.merchant_category_code,
        "account_type": m.account_type,
    }


def dump_dataset(ds: Dataset, out_dir: str | os.PathLike) -> dict[str, Path]:
    """Write ``ds`` in the standard file formats; returns the role → path mapping."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {role: out / name for role, name in FILES.items()}
    write_payments(paths["payments"], ds.payments)
    paths["fees"].write_text(json.dumps([fee_rule_to_json(r) for r in ds.fee_rules], indent=1) + "\n", encoding="utf-8")
    paths["merchant_data"].write_text(
        json.dumps([merchant_to_json(m) for m in ds.merchants.values()], indent=1) + "\n", encoding="utf-8"
    )
    with open(paths["acquirer_countries"], "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["acquirer", "country_code"])
        w.writerows(ds.acquirer_countries)
    with open(paths["merchant_category_codes"], "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["mcc", "description"])
        w.writerows(ds.mccs)
    return paths
