"""Covering sequences on the parameter box and their (dispersion) discrepancy."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .moments import ContractError, ParamBox
from .rng import stream

KINDS = ("sobol", "halton", "uniform")
SOBOL_MAX_DIM = 21201
_SOBOL_BITS = 30


class ConfigurationError(ValueError):
    pass


def first_primes(k: int) -> np.ndarray:
    out: list[int] = []
    cand = 2
    while len(out) < k:
        if all(cand % q for q in out if q * q <= cand):
            out.append(cand)
        cand += 1
    return np.array(out, dtype=np.int64)


def radical_inverse(k: int, base: int) -> float:
    inv, f = 0.0, 1.0 / base
    while k > 0:
        k, digit = divmod(k, base)
        inv += digit * f
        f /= base
    return inv


def _sobol_block(d: int, start: int, count: int) -> np.ndarray:
    eng = qmc.Sobol(d, scramble=False, bits=_SOBOL_BITS)
    if start:
        eng.fast_forward(start)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # balance warning for n != 2^m
        return eng.random(count)


def _check_dim(kind: str, d: int) -> None:
    if kind not in KINDS:
        raise ConfigurationError(f"unknown covering kind {kind!r}; choose from {KINDS}")
    if d < 1:
        raise ConfigurationError("dimension must be >= 1")
    if kind == "sobol" and d > SOBOL_MAX_DIM:
        raise ConfigurationError(f"Sobol direction numbers support d <= {SOBOL_MAX_DIM}, got {d}")


def _digital_shift(u: np.ndarray, seed: int) -> np.ndarray:
    scale = 2 ** _SOBOL_BITS
    shift = stream(seed, 0).integers(0, scale, size=u.shape[-1], dtype=np.int64)
    ints = np.floor(u * scale).astype(np.int64)
    return (ints ^ shift) / scale


def point_k(kind: str, d: int, k: int, seed: int = 0, shift: bool = False) -> np.ndarray:
    """Point ``k`` (0-based, unskipped) of a unit-cube sequence. Stateless."""
    return unit_points(kind, d, k, 1, seed=seed, shift=shift)[0]


def unit_points(kind: str, d: int, start: int, count: int, seed: int = 0,
                shift: bool = False) -> np.ndarray:
    """Points ``start .. start+count-1`` of a unit-cube sequence, shape (count, d)."""
    _check_dim(kind, d)
    if kind == "sobol":
        u = _sobol_block(d, start, count)
        return _digital_shift(u, seed) if shift else u
    if kind == "halton":
        bases = first_primes(d)
        return np.array([[radical_inverse(k, int(b)) for b in bases]
                         for k in range(start, start + count)]).reshape(count, d)
    return np.array([stream(seed, k).random(d) for k in range(start, start + count)]).reshape(count, d)


@dataclass
class CoveringSpec:
    """Serializable description of a covering sequence."""
    kind: str = "sobol"
    seed: int = 0
    skip_first: bool = True
    shift: bool = False

    def build(self, box: ParamBox) -> "CoveringSequence":
        return CoveringSequence(self.kind, box, seed=self.seed, skip_first=self.skip_first,
                                shift=self.shift)


class CoveringSequence:
    """Stateful iterator over a covering sequence rescaled to ``box``.

    Sobol and Halton skip their index-0 point (the origin corner) unless
    ``skip_first=False``. ``shift=True`` applies a seeded digital shift to Sobol.
    """

    def __init__(self, kind: str, box: ParamBox, seed: int = 0, skip_first: bool = True,
                 shift: bool = False):
        _check_dim(kind, box.dim)
        self.kind = kind
        self.box = box
        self.seed = seed
        self.shift = shift
        self.offset = 1 if (skip_first and kind != "uniform") else 0
        self.index = 0
        self._engine: Optional[qmc.Sobol] = None

    @property
    def dimension(self) -> int:
        return self.box.dim

    def next_point(self) -> np.ndarray:
        k = self.index + self.offset
        if self.kind == "sobol":
            # keep one engine so consecutive draws avoid re-fast-forwarding
            if self._engine is None:
                self._engine = qmc.Sobol(self.dimension, scramble=False, bits=_SOBOL_BITS)
                if k:
                    self._engine.fast_forward(k)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                u = self._engine.random(1)[0]
            if self.shift:
                u = _digital_shift(u[None, :], self.seed)[0]
        else:
            u = point_k(self.kind, self.dimension, k, seed=self.seed)
        self.index += 1
        return self.box.scale(u)

    def take(self, count: int) -> np.ndarray:
        return np.array([self.next_point() for _ in range(count)]).reshape(count, self.dimension)

    def __iter__(self):
        while True:
            yield self.next_point()


def default_probes(box: ParamBox, m: int = 2 ** 14) -> np.ndarray:
    return box.scale(unit_points("sobol", box.dim, 0, m))


def discrepancy(points, probes) -> float:
    """Largest distance from a probe to its nearest point.

    A lower bound on sup over the box of the nearest-point distance; it
    tightens as the probe set densifies.
    """
    points = np.asarray(points, dtype=float)
    probes = np.asarray(probes, dtype=float)
    if points.size == 0:
        raise ContractError("points must be nonempty")
    if probes.size == 0:
        raise ContractError("probes must be nonempty")
    if points.ndim == 1:
        points = points[:, None]
    if probes.ndim == 1:
        probes = probes[:, None]
    dist, _ = cKDTree(points).query(probes, k=1)
    return float(np.max(dist))
