"""Trigonometric polynomials on the d-torus (d = 1 or 2).

Conventions used throughout the package:

* A polynomial of degree N is f(x) = sum_{|k|_inf <= N} c_k e^{i(k,x)}.
  Coefficients are stored densely as a complex array of shape (2N+1,)
  (or (2N+1, 2N+1) for d = 2) with index j <-> frequency k = j - N.
* The torus carries normalized measure: integrals are means over
  [0, 2pi)^d, so ||1||_p = 1 for every p.
* Uniform grids have points x_j = 2*pi*j / M per axis. Sampling a
  polynomial on any grid is exact pointwise, even below the Nyquist
  size; only coefficient *recovery* requires M >= 2N+1.

L_p "norms" with 0 < p < 1 are quasi-norms: the triangle inequality
fails but ||f+g||_p^p <= ||f||_p^p + ||g||_p^p holds. quasi_norm
handles the whole range 0 < p <= inf uniformly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateNorm, NonConvergedQuadrature, UndersampledGrid

__all__ = [
    "TrigPoly",
    "GridSignal",
    "ExponentPair",
    "dft_synthesize",
    "dft_analyze",
    "quasi_norm",
    "convolve",
    "symmetric_difference",
    "translate",
    "evaluate",
    "freq_grid",
]


def _as_sizes(sizes, d: int) -> tuple[int, ...]:
    if isinstance(sizes, (int, np.integer)):
        sizes = (int(sizes),) * d
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) != d:
        raise ValueError(f"expected {d} grid sizes, got {sizes}")
    if any(s < 1 for s in sizes):
        raise ValueError(f"grid sizes must be positive, got {sizes}")
    return sizes


def freq_grid(degree: int, d: int) -> list[np.ndarray]:
    """Per-axis frequency vectors [-N..N] for a degree-N polynomial."""
    k = np.arange(-degree, degree + 1)
    return [k] * d


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Immutable trig polynomial; ``coeffs[j] = c_{j - degree}`` per axis."""

    d: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        want = (2 * self.degree + 1,) * self.d
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != want:
            raise ValueError(f"coeffs shape {c.shape} != {want}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(d: int, degree: int = 0) -> "TrigPoly":
        return TrigPoly(d, degree, np.zeros((2 * degree + 1,) * d, dtype=np.complex128))

    @staticmethod
    def constant(value: complex, d: int) -> "TrigPoly":
        return TrigPoly(d, 0, np.full((1,) * d, value, dtype=np.complex128))

    @staticmethod
    def from_modes(d: int, degree: int, modes: Mapping) -> "TrigPoly":
        """Build from a {frequency: coefficient} mapping."""
        c = np.zeros((2 * degree + 1,) * d, dtype=np.complex128)
        for k, v in modes.items():
            idx = (int(k) + degree,) if d == 1 else tuple(int(ki) + degree for ki in k)
            c[idx] += v
        return TrigPoly(d, degree, c)

    # -- accessors ----------------------------------------------------

    def coef(self, k) -> complex:
        """Coefficient at frequency k (0 outside the stored band)."""
        ks = (k,) if self.d == 1 and np.isscalar(k) else tuple(k)
        if any(abs(int(ki)) > self.degree for ki in ks):
            return 0.0 + 0.0j
        idx = tuple(int(ki) + self.degree for ki in ks)
        return complex(self.coeffs[idx])

    @property
    def mean(self) -> complex:
        return self.coef((0,) * self.d if self.d == 2 else 0)

    def with_degree(self, degree: int) -> "TrigPoly":
        """Re-embed in a (larger or truncating) coefficient band."""
        if degree == self.degree:
            return self
        c = np.zeros((2 * degree + 1,) * self.d, dtype=np.complex128)
        lo = max(-degree, -self.degree)
        hi = min(degree, self.degree)
        if lo <= hi:
            src = tuple(slice(lo + self.degree, hi + self.degree + 1) for _ in range(self.d))
            dst = tuple(slice(lo + degree, hi + degree + 1) for _ in range(self.d))
            c[dst] = self.coeffs[src]
        return TrigPoly(self.d, degree, c)

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        flipped = np.conj(self.coeffs[(slice(None, None, -1),) * self.d])
        scale = max(1.0, float(np.abs(self.coeffs).max(initial=0.0)))
        return bool(np.abs(self.coeffs - flipped).max(initial=0.0) <= tol * scale)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        n = max(self.degree, other.degree)
        return TrigPoly(self.d, n, self.with_degree(n).coeffs + other.with_degree(n).coeffs)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (other * (-1.0))

    def __mul__(self, scalar) -> "TrigPoly":
        return TrigPoly(self.d, self.degree, self.coeffs * scalar)

    __rmul__ = __mul__

    # -- serialization -------------------------------------------------

    def to_json_dict(self) -> dict:
        flat = self.coeffs.ravel()
        return {
            "d": self.d,
            "degree": self.degree,
            "re": flat.real.tolist(),
            "im": flat.imag.tolist(),
        }

    @staticmethod
    def from_json_dict(obj: Mapping) -> "TrigPoly":
        d, degree = int(obj["d"]), int(obj["degree"])
        c = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return TrigPoly(d, degree, c.reshape((2 * degree + 1,) * d))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def loads(s: str) -> "TrigPoly":
        return TrigPoly.from_json_dict(json.loads(s))


@dataclass(frozen=True, eq=False)
class GridSignal:
    """Samples of a function on the uniform grid x_j = 2*pi*j/M per axis."""

    d: int
    sizes: tuple[int, ...]
    samples: np.ndarray

    def __post_init__(self):
        sizes = _as_sizes(self.sizes, self.d)
        object.__setattr__(self, "sizes", sizes)
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape != sizes:
            raise ValueError(f"samples shape {s.shape} != {sizes}")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def to_json_dict(self) -> dict:
        flat = self.samples.ravel()
        return {
            "d": self.d,
            "sizes": list(self.sizes),
            "re": flat.real.tolist(),
            "im": flat.imag.tolist(),
        }

    @staticmethod
    def from_json_dict(obj: Mapping) -> "GridSignal":
        d = int(obj["d"])
        sizes = tuple(int(s) for s in obj["sizes"])
        s = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return GridSignal(d, sizes, s.reshape(sizes))


@dataclass(frozen=True)
class ExponentPair:
    """The (p, q) exponent pair with q1 = min(q, 1).

    q1 is the power making x -> x^{q1} subadditive on L_q, which is how
    every triangle-type estimate is written for 0 < q < 1.
    """

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError(f"p must be positive, got {self.p}")
        if not (self.q > 0):
            raise ValueError(f"q must be positive, got {self.q}")

    @property
    def q1(self) -> float:
        return min(self.q, 1.0)

    def to_json_dict(self) -> dict:
        enc = lambda v: "inf" if math.isinf(v) else v
        return {"p": enc(self.p), "q": enc(self.q), "q1": self.q1}

    @staticmethod
    def from_json_dict(obj: Mapping) -> "ExponentPair":
        dec = lambda v: math.inf if v in ("inf", "Infinity") else float(v)
        return ExponentPair(dec(obj["p"]), dec(obj["q"]))


# ---------------------------------------------------------------------------
# sampling / analysis


def sample_values(poly: TrigPoly, sizes) -> np.ndarray:
    """Exact samples of poly on the sizes-grid, any grid size.

    Coefficients are accumulated mod M per axis before the inverse FFT;
    that reproduces pointwise values exactly because e^{ikx_j} depends
    on k only mod M on the grid.
    """
    sizes = _as_sizes(sizes, poly.d)
    N = poly.degree
    k = np.arange(-N, N + 1)
    if poly.d == 1:
        (M,) = sizes
        buf = np.zeros(M, dtype=np.complex128)
        np.add.at(buf, k % M, poly.coeffs)
        return np.fft.ifft(buf) * M
    M1, M2 = sizes
    buf = np.zeros((M1, M2), dtype=np.complex128)
    np.add.at(buf, (np.ix_(k % M1, k % M2)), poly.coeffs)
    return np.fft.ifft2(buf) * (M1 * M2)


def dft_synthesize(poly: TrigPoly, sizes) -> GridSignal:
    """Evaluate poly on the uniform grid; requires sizes >= 2*degree+1."""
    sizes = _as_sizes(sizes, poly.d)
    need = 2 * poly.degree + 1
    if any(M < need for M in sizes):
        raise UndersampledGrid(f"sizes {sizes} < 2*degree+1 = {need}")
    return GridSignal(poly.d, sizes, sample_values(poly, sizes))


def dft_analyze(signal: GridSignal, degree: int) -> TrigPoly:
    """Recover coefficients up to the given degree from grid samples."""
    need = 2 * degree + 1
    if any(M < need for M in signal.sizes):
        raise UndersampledGrid(f"sizes {signal.sizes} < 2*degree+1 = {need}")
    k = np.arange(-degree, degree + 1)
    if signal.d == 1:
        (M,) = signal.sizes
        hat = np.fft.fft(signal.samples) / M
        return TrigPoly(1, degree, hat[k % M])
    M1, M2 = signal.sizes
    hat = np.fft.fft2(signal.samples) / (M1 * M2)
    return TrigPoly(2, degree, hat[np.ix_(k % M1, k % M2)])


def evaluate(poly: TrigPoly, points: np.ndarray) -> np.ndarray:
    """Direct (non-FFT) evaluation at arbitrary points; the slow oracle.

    points: shape (n,) for d=1 or (n, 2) for d=2.
    """
    N = poly.degree
    k = np.arange(-N, N + 1)
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if poly.d == 1:
        return np.exp(1j * np.outer(pts, k)) @ poly.coeffs
    pts = pts.reshape(-1, 2)
    e1 = np.exp(1j * np.outer(pts[:, 0], k))
    e2 = np.exp(1j * np.outer(pts[:, 1], k))
    return np.einsum("ai,ij,aj->a", e1, poly.coeffs, e2)


# ---------------------------------------------------------------------------
# quasi-norms


def _grid_mean_norm(poly: TrigPoly, p: float, oversample: int) -> float:
    base = 2 * poly.degree + 1
    sizes = (max(2, oversample * base),) * poly.d
    vals = np.abs(sample_values(poly, sizes))
    if math.isinf(p):
        return float(vals.max())
    return float(np.mean(vals**p) ** (1.0 / p))


def quasi_norm(poly: TrigPoly, p: float, oversample: int = 8) -> float:
    """L_p quasi-norm (normalized measure), 0 < p <= inf.

    Computed as a grid mean on oversample*(2N+1) points per axis, then
    refined: the oversampling factor is doubled until the value moves
    by <= 1e-3 relatively. Three doublings without convergence raise
    NonConvergedQuadrature; for |f|^p with p < 1 the integrand has
    cusps at zeros of f, so callers needing tighter values should pass
    a larger oversample rather than trust extra digits.
    """
    if not (p > 0):
        raise ValueError(f"p must be positive, got {p}")
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    if not np.any(poly.coeffs):
        return 0.0
    prev = _grid_mean_norm(poly, p, oversample)
    for _ in range(3):
        oversample *= 2
        cur = _grid_mean_norm(poly, p, oversample)
        if abs(cur - prev) <= 1e-3 * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise NonConvergedQuadrature(
        f"quasi_norm(p={p}) still moving after 3 oversample doublings"
    )


# ---------------------------------------------------------------------------
# operators diagonal in frequency


def _freq_mult(poly: TrigPoly, factor: np.ndarray) -> TrigPoly:
    return TrigPoly(poly.d, poly.degree, poly.coeffs * factor)


def convolve(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """Normalized convolution mean_y a(y) b(x - y): coefficients multiply.

    The support of the product lies in the smaller band, so the result
    has degree min(deg a, deg b). A kernel with unit coefficients on
    [-n, n]^d therefore reproduces any polynomial of degree <= n.
    """
    if a.d != b.d:
        raise ValueError("dimension mismatch")
    n = min(a.degree, b.degree)
    return TrigPoly(a.d, n, a.with_degree(n).coeffs * b.with_degree(n).coeffs)


def symmetric_difference(poly: TrigPoly, h: Sequence[float], r: int) -> TrigPoly:
    """r-th symmetric difference with step h, spectrally.

    Delta_h^r f(x) = sum_{v=0}^r (-1)^v C(r,v) f(x - (r/2 - v) h); on the
    mode e^{i(k,x)} this multiplies by (-2i sin((k,h)/2))^r.
    """
    if r < 0:
        raise ValueError("order r must be >= 0")
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if h.shape != (poly.d,):
        raise ValueError(f"step must have {poly.d} components")
    ks = freq_grid(poly.degree, poly.d)
    if poly.d == 1:
        theta = ks[0] * h[0]
    else:
        theta = ks[0][:, None] * h[0] + ks[1][None, :] * h[1]
    return _freq_mult(poly, (-2j * np.sin(theta / 2.0)) ** r)


def translate(poly: TrigPoly, t: Sequence[float]) -> TrigPoly:
    """f(. - t): multiplies c_k by e^{-i(k,t)}."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (poly.d,):
        raise ValueError(f"shift must have {poly.d} components")
    ks = freq_grid(poly.degree, poly.d)
    if poly.d == 1:
        phase = ks[0] * t[0]
    else:
        phase = ks[0][:, None] * t[0] + ks[1][None, :] * t[1]
    return _freq_mult(poly, np.exp(-1j * phase))
