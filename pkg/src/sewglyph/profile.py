"""Encode structured profile fields as short tokens drawn beside the text."""

import math
import re
from dataclasses import dataclass

from .errors import NormalizationError

PROFILE_FIELDS = ("age", "country", "marriage", "gender")

# None means "empty": the field contributes no token.
MARRIAGE_TOKENS = {
    "married": "m",
    "divorced": "d",
    "divorce": "d",
    "single": "s",
    "separated": "p",
    "widowed": "w",
    "widow": "w",
    "nan": "0",
    "": None,
}
GENDER_TOKENS = {
    "female": "f",
    "male": "m",
    "other": "o",
    "nan": "N",
    "": None,
}

_INTEGRAL = re.compile(r"^\d+(?:\.0*)?$")


@dataclass(frozen=True)
class ProfileRecord:
    age: object = None
    country: object = None
    marriage: object = None
    gender: object = None

    @classmethod
    def from_mapping(cls, mapping):
        unknown = set(mapping) - set(PROFILE_FIELDS)
        if unknown:
            raise NormalizationError("profile", ", ".join(sorted(unknown)))
        return cls(**{k: mapping.get(k) for k in PROFILE_FIELDS})


def _is_empty(value):
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    return isinstance(value, str) and not value.strip()


def _categorical(field, value, table):
    key = "" if _is_empty(value) else str(value).strip().lower()
    if key not in table:
        raise NormalizationError(field, value)
    return table[key]


def _age_token(value):
    if _is_empty(value):
        return None
    if isinstance(value, bool):
        raise NormalizationError("age", value)
    if isinstance(value, (int, float)):
        if value < 0 or value != int(value):
            raise NormalizationError("age", value)
        return str(int(value))
    text = str(value).strip()
    if _INTEGRAL.match(text):
        return str(int(float(text)))
    return text


def _country_token(value):
    if _is_empty(value):
        return None
    return str(value).strip().upper()


def normalize_profile(record):
    """Validate a record, returning a copy whose categoricals are canonical names.

    Raises NormalizationError naming the first offending field.
    """
    marriage = _categorical("marriage", record.marriage, MARRIAGE_TOKENS)
    gender = _categorical("gender", record.gender, GENDER_TOKENS)
    canon_m = {v: k for k, v in MARRIAGE_TOKENS.items() if k in ("married", "divorced", "single", "separated", "widowed", "nan")}
    canon_g = {v: k for k, v in GENDER_TOKENS.items() if k}
    return ProfileRecord(
        age=_age_token(record.age),
        country=_country_token(record.country),
        marriage=canon_m.get(marriage),
        gender=canon_g.get(gender),
    )


def encode_profile(record):
    """Tokens in the order age, country, marriage, gender; empty fields are skipped.

    >>> encode_profile(ProfileRecord(36, "IND", "married", "male"))
    ['36', 'IND', 'm', 'm']
    """
    tokens = [
        _age_token(record.age),
        _country_token(record.country),
        _categorical("marriage", record.marriage, MARRIAGE_TOKENS),
        _categorical("gender", record.gender, GENDER_TOKENS),
    ]
    return [t for t in tokens if t is not None]


def parse_profile_arg(text):
    """Parse ``age=36,country=IND,marriage=married,gender=male``."""
    fields = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise NormalizationError("profile", part)
        fields[key.strip().lower()] = value.strip()
    return ProfileRecord.from_mapping(fields)
