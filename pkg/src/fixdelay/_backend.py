"""Kernel backend selection and flat encodings for the chain kernels.

The compiled kernel is preferred when the extension built; the pure-Python
kernel is always available.  FIXDELAY_BACKEND=python|c forces a choice.
"""

from __future__ import annotations

import os

import numpy as np

from . import _chain_py
from .delays import DelaySpec
from .seeds import ClosedFormSeed

_BACKENDS = {"python": _chain_py}

try:
    from . import _chain_c
    _BACKENDS["c"] = _chain_c
except ImportError:  # extension not built; pure Python carries on
    _chain_c = None


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def default_backend() -> str:
    forced = os.environ.get("FIXDELAY_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ValueError(f"FIXDELAY_BACKEND={forced!r} but available backends "
                             f"are {available_backends()}")
        return forced
    return "c" if "c" in _BACKENDS else "python"


def get_backend(name: str = "auto"):
    if name == "auto":
        name = default_backend()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")


def encode_delay(spec: DelaySpec):
    """Flatten a delay spec (recursing through sums) into kernel arrays."""
    kinds, params = [], []
    offsets = [0]

    def walk(s: DelaySpec):
        if s.kind == "sum":
            for m in s.members:
                walk(m)
            return
        code = {"constant": 0, "sinusoidal": 1, "polynomial": 2}[s.kind]
        kinds.append(code)
        params.extend(s.params)
        offsets.append(len(params))

    walk(spec)
    return (np.asarray(kinds, dtype=np.int32),
            np.asarray(offsets, dtype=np.int32),
            np.asarray(params, dtype=np.float64))


def encode_seed(form: ClosedFormSeed):
    poly = np.asarray(form.poly, dtype=np.float64)
    sexp = np.zeros(2)
    if form.exp_term is not None:
        sexp[:] = form.exp_term
    scos = np.zeros(3)
    if form.cos_term is not None:
        scos[:] = form.cos_term
    return poly, sexp, scos
