"""Verdicts and the tolerance policy that separates "zero" from "small"."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Verdict(str, Enum):
    HARMONIC = "Harmonic"
    PROPER = "ProperBiharmonic"
    NOT = "NotBiharmonic"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


#: margin by which the tension must exceed its tolerance to call a map proper
PROPER_MARGIN = 10.0


@dataclass(frozen=True)
class Tolerances:
    """Zero thresholds: ``abs_ + rel * scale`` for exact jets, ``fd_abs`` otherwise.

    ``scale`` is the summed magnitude of the individual terms a residual is
    assembled from, so the relative part tracks cancellation error.
    """

    abs_: float = 1e-9
    rel: float = 1e-7
    fd_abs: float = 1e-4

    def threshold(self, scale, analytic: bool) -> np.ndarray:
        if analytic:
            return self.abs_ + self.rel * np.asarray(scale)
        return np.full(np.shape(scale), self.fd_abs)

    def as_dict(self) -> dict:
        return {"tol_abs": self.abs_, "tol_rel": self.rel, "tol_fd": self.fd_abs}


DEFAULT_TOLERANCES = Tolerances()


def decide(tension_norm, tension_tol, bitension_norm, bitension_tol, fd_err,
           axis=-1) -> np.ndarray:
    """Reduce per-point residuals over ``axis`` to an array of verdict strings.

    Harmonic needs every tension norm under tolerance; ProperBiharmonic needs
    every bitension norm under tolerance and the tension maximum above
    ``PROPER_MARGIN`` times its tolerance.  A nonzero bitension counts only
    where it beats the finite-difference error estimate; anything that cannot
    be decided is Inconclusive.
    """
    tn = np.asarray(tension_norm)
    bn = np.asarray(bitension_norm)
    fd = np.asarray(fd_err)
    tension_zero = (tn <= tension_tol) & (fd <= tension_tol)
    bit_zero = (bn <= bitension_tol) & (fd <= bitension_tol)
    bit_nonzero = (bn > bitension_tol) & (bn > fd)
    harmonic = np.all(tension_zero, axis=axis)
    biharmonic = np.all(bit_zero, axis=axis)
    not_bih = np.any(bit_nonzero, axis=axis)
    proper = np.any(tn > PROPER_MARGIN * np.asarray(tension_tol), axis=axis)
    out = np.full(harmonic.shape, Verdict.INCONCLUSIVE.value, dtype=object)
    out[not_bih] = Verdict.NOT.value
    out[biharmonic & proper] = Verdict.PROPER.value
    out[harmonic] = Verdict.HARMONIC.value
    return out


def point_class(tension_norm, tension_tol, bitension_norm, bitension_tol, fd_err) -> np.ndarray:
    """Per-point version of :func:`decide` (no reduction)."""
    return decide(np.asarray(tension_norm)[..., None], np.asarray(tension_tol)[..., None],
                  np.asarray(bitension_norm)[..., None], np.asarray(bitension_tol)[..., None],
                  np.asarray(fd_err)[..., None])
