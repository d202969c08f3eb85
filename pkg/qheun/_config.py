"""
Run options and the flat ``key = value`` configuration files.
"""
import re
from fractions import Fraction

from .operators import FAMILIES
from .utilities import Bunch

default_opts = {
    "backend": "numeric",
    "seed": 0,
    "tolerance": None,
    "format": "json",
    "output": None,
    "negative_controls": False,
    "verbose": False,
    "tail_epsilon": 1e-17,
    "max_terms": 10000,
}

# Keys of a transform configuration file; the source (primed) parameters
# of the chosen family are accepted in addition under their own names.
default_transform = {
    "family": "a4",
    "case": None,
    "q": 0.5,
    "e_source": None,
    "mu0": 0,
    "kernel_alpha": 0,
    "xi": None,
    "xi_mode": "fixed",
    "variant": "P1",
    "exponent": "plus",
    "x": None,
    "x0": 0.7,
    "n_points": 10,
    "tail_epsilon": 1e-17,
    "max_terms": 10000,
}

BACKENDS = ("numeric", "exact")
FORMATS = ("json", "csv")

_INT = re.compile(r"^[+-]?\d+$")
_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def process_opts(**opts):
    """Defaults plus *opts*, validated; unknown keys raise KeyError."""
    newopts = Bunch(default_opts)
    newopts.update_values(strict=True, **opts)
    newopts.backend = validate_backend(newopts.backend)
    newopts.format = validate_format(newopts.format)
    newopts.tolerance = validate_tolerance(newopts.tolerance)
    newopts.seed = validate_seed(newopts.seed)
    return newopts


def validate_backend(backend):
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    return backend


def validate_format(fmt):
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    return fmt


def validate_tolerance(tolerance):
    if tolerance is None:
        return None
    tolerance = float(tolerance)
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    return tolerance


def validate_seed(seed):
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return seed


def parse_value(text, exact=False):
    """
    Parse one configuration value.

    Integers, rationals ``p/q``, decimals, complex literals (``1+2j``),
    booleans, ``none``, comma-separated lists and bare words are
    recognized.  Decimals become floats unless *exact*, in which case
    they are kept as Fractions without float rounding.
    """
    text = text.strip()
    if "," in text:
        return [parse_value(item, exact) for item in text.split(",") if item.strip()]
    low = text.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    if low == "none":
        return None
    if _INT.match(text):
        return int(text)
    if _RATIONAL.match(text):
        return Fraction(text)
    if _DECIMAL.match(text):
        return Fraction(text) if exact else float(text)
    if low.endswith("j"):
        try:
            return complex(text)
        except ValueError:
            pass
    return text


def read_config(path, exact=False):
    """
    Read a flat ``key = value`` file.

    ``#`` starts a comment; blank lines are ignored; a key given twice
    keeps its last value.
    """
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            out[key] = parse_value(value, exact)
    return out


def process_transform_config(config):
    """
    Split a transform configuration into run options and source parameters.

    Returns
    -------
    Bunch of the ``default_transform`` keys, with ``source`` holding the
    remaining keys, which must be parameter names of the family.
    """
    config = dict(config)
    cfg = Bunch(default_transform)
    cfg.update_values({k: v for k, v in config.items() if k in default_transform})
    family = cfg.family
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {sorted(FAMILIES)}, got {family!r}")
    allowed = set(FAMILIES[family].defaults)
    source = {k: v for k, v in config.items() if k not in default_transform}
    bad = sorted(set(source) - allowed)
    if bad:
        raise KeyError(f"unknown keys {bad} for family {family}")
    cfg.source = source
    if cfg.case is not None:
        cfg.case = int(cfg.case)
        if family != "a4":
            raise ValueError("worked cases are defined for the a4 family only")
    elif cfg.e_source is None:
        raise ValueError("give either a worked case or the source eigenvalue e_source")
    if cfg.x is not None and not isinstance(cfg.x, list):
        cfg.x = [cfg.x]
    cfg.n_points = int(cfg.n_points)
    if cfg.n_points < 0:
        raise ValueError(f"n_points must be non-negative, got {cfg.n_points}")
    return cfg
