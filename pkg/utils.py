import json
import logging
import os
import random
from fractions import Fraction
from typing import Annotated, Any

from dotenv import load_dotenv
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer

from errors import ParseError

load_dotenv()

logger = logging.getLogger(__name__)


def get_default_seed() -> int:
    return int(os.getenv("ACCUM_LAB_SEED", "0"))


def get_log_level() -> str:
    return os.getenv("ACCUM_LAB_LOG_LEVEL", "WARNING").upper()


def get_modulus_cap() -> int:
    return int(os.getenv("ACCUM_LAB_MODULUS_CAP", "1000000"))


def get_default_prefix_len() -> int:
    return int(os.getenv("ACCUM_LAB_PREFIX_LEN", "2000"))


def get_default_burn_in() -> int:
    return int(os.getenv("ACCUM_LAB_BURN_IN", "200"))


# Exact rationals

def parse_fraction(value: Any) -> Fraction:
    """Read an exact rational from a Fraction, an int or a "p/q" string.

    Floats are rejected: a float has already lost exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError("booleans are not rationals: " + repr(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError("not a rational: " + repr(value)) from e
    raise ParseError("not an exact rational: " + repr(value))


def format_fraction(value: Fraction) -> str:
    return str(value)


Rational = Annotated[
    Fraction,
    BeforeValidator(parse_fraction),
    PlainSerializer(format_fraction, return_type=str),
]


class FrozenModel(BaseModel):
    """Immutable pydantic base shared by every value type of the toolkit."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    def to_json(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


# Serialization

def _json_default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json", by_alias=True)
    raise TypeError("cannot serialize " + type(obj).__name__)


def canonical_json(payload: Any) -> str:
    """Sorted-key JSON with exact rationals as strings; stable across runs."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True, default=_json_default) + "\n"


def load_json_file(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError("cannot read JSON from " + path + ": " + str(e)) from e


# Seeded randomness

def case_rng(seed: int, suite: str, index: int) -> random.Random:
    """Per-case generator: the string "<seed>/<suite>/<index>" seeds a fresh Random.

    String seeds hash deterministically, so a run is fully determined by the
    user-visible seed.
    """
    return random.Random(str(seed) + "/" + suite + "/" + str(index))


def random_fraction(rng: random.Random, low: int, high: int, denominator: int) -> Fraction:
    """Uniform rational in [low, high] on the grid 1/denominator."""
    return Fraction(rng.randint(low * denominator, high * denominator), denominator)
