import os
from fractions import Fraction

import numpy as np

# Bunch follows Robert Kern's recipe as used in pycurrents
# (http://currents.soest.hawaii.edu/hgstage/pycurrents/).


class Bunch(dict):
    """
    Dictionary with attribute access.

    Every structured result in qheun is a Bunch: parameter sets,
    transform specs, eigenpairs, certificates.  ``b.key`` and
    ``b["key"]`` are interchangeable.  Printing lists the entries one
    per line, sorted by key.
    """

    def __init__(self, *args, **kwargs):
        dict.__init__(self)
        for arg in args:
            self.update(arg)
        self.update(kwargs)

    def __getattr__(self, name):
        try:
            return self[name]
        except KeyError as err:
            raise AttributeError(f"'{type(self).__name__}' object has no attribute '{name}'") from err

    def __setattr__(self, name, value):
        self[name] = value

    def __str__(self):
        if not self:
            return ""
        width = min(20, max(len(str(k)) for k in self))
        lines = [f"{k!s:<{width}} : {v!s}" for k, v in sorted(self.items(), key=lambda kv: str(kv[0]))]
        return "\n".join(lines) + "\n"

    def update_values(self, *args, strict=False, **kw):
        """
        Update existing keys only.

        Positional arguments are mappings merged in order, then *kw*.
        Keys not already present are dropped, or raise KeyError when
        *strict* is True; this is how option defaults are overridden.
        """
        new = {}
        for d in args:
            new.update(d)
        new.update(kw)
        if strict:
            bad = set(new) - set(self)
            if bad:
                raise KeyError(f"unknown keys {sorted(bad)}; expected some of {sorted(self)}")
        self.update({k: v for k, v in new.items() if k in self})
        return self


def format_scalar(value):
    """
    Stable text form of a backend scalar.

    Fractions print as ``p/q`` (or ``p``), numeric values with
    ``repr`` precision so that output is reproducible bit for bit.
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    return repr(value)


def thread_count(default=1):
    """Worker count from the QHEUN_THREADS environment variable."""
    raw = os.environ.get("QHEUN_THREADS")
    if raw is None or raw.strip() == "":
        return default
    try:
        n = int(raw)
    except ValueError as err:
        raise ValueError(f"QHEUN_THREADS must be a positive integer, got {raw!r}") from err
    if n < 1:
        raise ValueError(f"QHEUN_THREADS must be a positive integer, got {raw!r}")
    return n
