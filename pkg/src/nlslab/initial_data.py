"""Built-in initial-data profiles: gaussian, super-gaussian, and sums of bumps."""

from __future__ import annotations

import numpy as np

from .spectral import ComplexField, Grid, Space


def _center_vector(grid: Grid, center) -> np.ndarray:
    if center is None:
        return np.zeros(grid.d)
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.size == 1 and grid.d > 1:
        c = np.full(grid.d, c[0])
    if c.size != grid.d:
        raise ValueError(f"center has {c.size} components, grid is {grid.d}-dimensional")
    return c


def _modulated(grid: Grid, envelope: np.ndarray, modulation) -> np.ndarray:
    if modulation is None:
        return envelope.astype(np.complex128)
    k = _center_vector(grid, modulation)
    phase = sum(ki * xi for ki, xi in zip(k, grid.x_mesh))
    return envelope * np.exp(1j * phase)


def gaussian(grid: Grid, width: float = 1.0, center=None, modulation=None,
             amplitude: float = 1.0) -> ComplexField:
    """amplitude * exp(-|x-c|^2 / (2 width^2)) * exp(i k.x)."""
    c = _center_vector(grid, center)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.x_mesh, c))
    env = amplitude * np.exp(-r2 / (2.0 * width**2))
    return ComplexField(grid, Space.PHYSICAL, _modulated(grid, env, modulation))


def super_gaussian(grid: Grid, width: float = 1.0, power: int = 2, center=None,
                   modulation=None, amplitude: float = 1.0) -> ComplexField:
    """Flat-top profile amplitude * exp(-(|x-c|^2 / (2 width^2))^power)."""
    if power < 1:
        raise ValueError(f"super-gaussian power must be >= 1, got {power}")
    c = _center_vector(grid, center)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.x_mesh, c))
    env = amplitude * np.exp(-((r2 / (2.0 * width**2)) ** power))
    return ComplexField(grid, Space.PHYSICAL, _modulated(grid, env, modulation))


def bump_sum(grid: Grid, bumps) -> ComplexField:
    """Sum of gaussian bumps; each entry is a dict of gaussian() keyword arguments."""
    if not bumps:
        raise ValueError("bump_sum requires at least one bump")
    total = np.zeros(grid.shape, dtype=np.complex128)
    for bump in bumps:
        total += gaussian(grid, **bump).values
    return ComplexField(grid, Space.PHYSICAL, total)


BUILTIN_KINDS = ("gaussian", "super_gaussian", "bump_sum")


def build(grid: Grid, spec: dict) -> ComplexField:
    """Dispatch on spec['kind']; remaining keys are passed to the builder."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "gaussian":
        return gaussian(grid, **spec)
    if kind == "super_gaussian":
        return super_gaussian(grid, **spec)
    if kind == "bump_sum":
        return bump_sum(grid, **spec)
    raise ValueError(f"unknown initial-data kind {kind!r}; expected one of {BUILTIN_KINDS}")
