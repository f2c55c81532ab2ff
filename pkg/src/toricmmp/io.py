"""File formats and deterministic serialization.

All artifacts use one self-describing JSON layout; exact rationals travel as
"p/q" strings so certificates survive round trips losslessly.  Fan files
carry rank / rays / cones; map files carry matrix / source / target (paths
resolved relative to the map file); divisor files carry coeffs.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

from .errors import InputError
from .fan import Fan, FanMap
from .divisor import InvariantDivisor


def parse_rational(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad rational {s!r}: {e}")
    raise InputError(f"bad rational {s!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}")


def load_fan(path) -> Fan:
    data = _load_json(path)
    try:
        return Fan(int(data["rank"]),
                   tuple(tuple(int(c) for c in r) for r in data["rays"]),
                   tuple(tuple(int(i) for i in c) for c in data["cones"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed fan file {path}: {e}")


def fan_to_obj(F: Fan):
    return {"rank": F.rank,
            "rays": [list(r) for r in F.rays],
            "cones": [list(c) for c in F.max_cones]}


def save_fan(F: Fan, path):
    with open(path, "w") as fh:
        fh.write(dumps(fan_to_obj(F)))


def load_divisor(path, F: Fan = None) -> InvariantDivisor:
    data = _load_json(path)
    try:
        coeffs = tuple(parse_rational(c) for c in data["coeffs"])
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed divisor file {path}: {e}")
    if F is not None and len(coeffs) != len(F.rays):
        raise InputError("divisor length does not match the fan's ray count")
    return InvariantDivisor(coeffs)


def divisor_to_obj(D: InvariantDivisor):
    return {"coeffs": [format_rational(c) for c in D.coeffs]}


def load_map(path) -> FanMap:
    data = _load_json(path)
    base = os.path.dirname(os.path.abspath(path))
    try:
        matrix = tuple(tuple(int(c) for c in row) for row in data["matrix"])
        source = load_fan(os.path.join(base, data["source"]))
        target = load_fan(os.path.join(base, data["target"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed map file {path}: {e}")
    return FanMap(matrix, source, target)


def load_exponents(path) -> tuple:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("exponents")
    try:
        return tuple(tuple(int(c) for c in m) for m in data)
    except (TypeError, ValueError) as e:
        raise InputError(f"malformed exponents file {path}: {e}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dumps(obj) -> str:
    """Byte-deterministic report text."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
