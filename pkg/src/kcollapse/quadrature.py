"""Equispaced quadrature on the torus and Marcinkiewicz-Zygmund ratios.

The (2n+1)^d grid t_l = 2*pi*l/(2n+1) integrates trig polynomials of
degree <= 2n exactly (normalized measure): the only lattice frequency
aliasing to 0 inside the spectrum is 0 itself. For discrete-vs-continuous
norm comparisons, mz_ratio reports the ratio of the grid l_p mean to the
true quasi-norm; for degree <= n and p >= 1 this ratio sits inside
absolute constants, which is what makes the node counts in the collapse
estimates dimension-free in n.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DegenerateNorm, ExactnessViolated
from .torus import TrigPoly, quasi_norm, sample_values

__all__ = ["NodeSet", "quadrature_mean", "mz_ratio"]


@dataclass(frozen=True)
class NodeSet:
    """Grid of (2n+1)^d equispaced nodes 2*pi*l/(2n+1) on the torus."""

    n: int
    d: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if self.d not in (1, 2):
            raise ValueError("d must be 1 or 2")

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    @property
    def count(self) -> int:
        return self.size**self.d

    def axis_nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    def points(self) -> np.ndarray:
        """All nodes, shape (count, d), lexicographic in the grid index."""
        t = self.axis_nodes()
        if self.d == 1:
            return t.reshape(-1, 1)
        return np.array(list(product(t, t)))

    def exact_for(self, degree: int) -> bool:
        return degree <= 2 * self.n


def quadrature_mean(poly: TrigPoly, nodes: NodeSet, allow_inexact: bool = False) -> complex:
    """Grid mean of poly over the node set.

    Equals the true mean (the k=0 coefficient) whenever the node count
    resolves the spectrum, i.e. poly.degree <= 2n. Outside that range the
    call raises unless allow_inexact is set, since silent aliasing is the
    exact failure mode these estimates must control.
    """
    if poly.d != nodes.d:
        raise ValueError("dimension mismatch")
    if not nodes.exact_for(poly.degree) and not allow_inexact:
        raise ExactnessViolated(
            f"degree {poly.degree} exceeds exactness range of {nodes.count} nodes"
        )
    vals = sample_values(poly, (nodes.size,) * poly.d)
    return complex(vals.mean())


def mz_ratio(poly: TrigPoly, nodes: NodeSet, p: float, oversample: int = 8) -> float:
    """Discrete-to-continuous norm ratio (mean_l |T(t_l)|^p)^{1/p} / ||T||_p.

    Raises DegenerateNorm for (numerically) zero polynomials, where the
    ratio is meaningless. oversample seeds the continuous-norm grid; raise
    it for p < 1 integrands with slow cusp tails.
    """
    if poly.d != nodes.d:
        raise ValueError("dimension mismatch")
    if p <= 0:
        raise ValueError("p must be positive")
    denom = quasi_norm(poly, p, oversample=oversample)
    if denom < 1e-300:
        raise DegenerateNorm("polynomial is numerically zero")
    vals = np.abs(sample_values(poly, (nodes.size,) * poly.d))
    if np.isinf(p):
        num = float(vals.max())
    else:
        num = float(np.mean(vals**p) ** (1.0 / p))
    return num / denom
