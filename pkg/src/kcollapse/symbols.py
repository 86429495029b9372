"""Homogeneous Fourier multipliers and the kernels built from them.

A symbol psi is positively homogeneous of order alpha > 0, smooth and
non-vanishing away from the origin. Three families are provided:

* ``weyl`` (d=1): psi(xi) = |xi|^alpha * exp(i*alpha*pi*sign(xi)/2),
  the classical Weyl fractional derivative symbol;
* ``fractional_laplacian``: psi(xi) = |xi|^alpha;
* ``linear_differential``: psi(xi) = sum_{|k|=m} a_k (i xi_1)^{k_1} ...
  (i xi_d)^{k_d}, an order-m constant-coefficient operator whose symbol
  must not vanish on the unit sphere (checked at construction).

The multiplier psi(D) acts on trig polynomials by c_k -> psi(k) c_k for
k != 0 and always annihilates the mean, so psi(D) and its inverse are
mutually inverse on the mean-free part.

Kernels: make_vallee builds the de la Vallee Poussin window kernel
V_n = sum v(k/n) e^{i(k,x)} (degree 2n, reproduces degree <= n);
make_modified_vallee multiplies its spectrum by sum_j sin^2(k_j), the
exact counterpart of a second symmetric difference with step 2*e_j;
make_shell builds the dyadic frequency shell of the inverse symbol,
whose L_q quasi-norm decays like 2^{-(alpha + d(1/q-1)) nu}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from .errors import InvalidSymbol, OriginEvaluation
from .torus import TrigPoly, freq_grid

__all__ = [
    "HomogeneousSymbol",
    "CutoffProfile",
    "KernelSpec",
    "symbol_eval",
    "cutoff_eval",
    "make_vallee",
    "make_modified_vallee",
    "make_shell",
    "apply_multiplier",
    "sine_square_sum",
]

Family = Literal["weyl", "fractional_laplacian", "linear_differential"]


@dataclass(frozen=True)
class HomogeneousSymbol:
    """Order-alpha homogeneous symbol on R^d minus the origin."""

    family: Family
    alpha: float
    d: int = 1
    coeffs: tuple = ()  # ((multi_index, a_k), ...) for linear_differential

    def __post_init__(self):
        if self.d not in (1, 2):
            raise InvalidSymbol(f"d must be 1 or 2, got {self.d}")
        if self.family == "weyl":
            if self.d != 1:
                raise InvalidSymbol("weyl symbol is one-dimensional")
            if self.alpha <= 0:
                raise InvalidSymbol("alpha must be positive")
        elif self.family == "fractional_laplacian":
            if self.alpha <= 0:
                raise InvalidSymbol("alpha must be positive")
        elif self.family == "linear_differential":
            if not self.coeffs:
                raise InvalidSymbol("linear_differential needs coefficients")
            coeffs = tuple((tuple(int(i) for i in k), complex(a)) for k, a in self.coeffs)
            orders = {sum(k) for k, _ in coeffs}
            if len(orders) != 1:
                raise InvalidSymbol("all multi-indices must share one order")
            m = orders.pop()
            if m <= 0:
                raise InvalidSymbol("order must be positive")
            if any(len(k) != self.d or min(k) < 0 for k, _ in coeffs):
                raise InvalidSymbol("multi-indices must be length-d, nonnegative")
            object.__setattr__(self, "coeffs", coeffs)
            object.__setattr__(self, "alpha", float(m))
            self._validate_nonvanishing()
        else:
            raise InvalidSymbol(f"unknown family {self.family!r}")

    def _validate_nonvanishing(self, samples: int = 10**4):
        # sphere sample: {-1,+1} for d=1, uniform angles for d=2
        if self.d == 1:
            xi = np.array([[-1.0], [1.0]])
        else:
            t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
            xi = np.stack([np.cos(t), np.sin(t)], axis=1)
        vals = np.abs(self._eval(xi))
        if vals.min() < 1e-9:
            raise InvalidSymbol("symbol vanishes on the unit sphere")

    def _eval(self, xi: np.ndarray) -> np.ndarray:
        """xi shaped (n, d); caller guarantees no zero rows."""
        if self.family == "weyl":
            x = xi[:, 0]
            return np.abs(x) ** self.alpha * np.exp(
                1j * self.alpha * np.pi * np.sign(x) / 2.0
            )
        if self.family == "fractional_laplacian":
            r = np.sqrt((xi**2).sum(axis=1))
            return (r**self.alpha).astype(np.complex128)
        out = np.zeros(xi.shape[0], dtype=np.complex128)
        for k, a in self.coeffs:
            term = np.ones(xi.shape[0], dtype=np.complex128)
            for j, kj in enumerate(k):
                if kj:
                    term = term * (1j * xi[:, j]) ** kj
            out += a * term
        return out

    def to_json_dict(self) -> dict:
        obj = {"family": self.family, "alpha": self.alpha, "d": self.d}
        if self.family == "linear_differential":
            obj["coeffs"] = [[list(k), [a.real, a.imag]] for k, a in self.coeffs]
        return obj

    @staticmethod
    def from_json_dict(obj: Mapping) -> "HomogeneousSymbol":
        coeffs = tuple(
            (tuple(k), complex(a[0], a[1])) for k, a in obj.get("coeffs", [])
        )
        return HomogeneousSymbol(
            obj["family"], float(obj["alpha"]), int(obj.get("d", 1)), coeffs
        )


def symbol_eval(sym: HomogeneousSymbol, xi) -> complex | np.ndarray:
    """Evaluate psi at one point or an (n, d) batch; origin rejected."""
    arr = np.atleast_1d(np.asarray(xi, dtype=float))
    single = arr.ndim == 1
    pts = arr.reshape(1, -1) if single else arr
    if pts.shape[1] != sym.d:
        raise ValueError(f"points must have {sym.d} components")
    if np.any(np.all(pts == 0.0, axis=1)):
        raise OriginEvaluation("homogeneous symbol has no value at 0")
    vals = sym._eval(pts)
    return complex(vals[0]) if single else vals


def _eval_on_freqs(sym: HomogeneousSymbol, degree: int) -> np.ndarray:
    """psi on the [-N, N]^d lattice with the origin set to 0."""
    N = degree
    k = np.arange(-N, N + 1, dtype=float)
    if sym.d == 1:
        pts = k.reshape(-1, 1)
    else:
        K1, K2 = np.meshgrid(k, k, indexing="ij")
        pts = np.stack([K1.ravel(), K2.ravel()], axis=1)
    nz = ~np.all(pts == 0.0, axis=1)
    out = np.zeros(pts.shape[0], dtype=np.complex128)
    out[nz] = sym._eval(pts[nz])
    return out.reshape((2 * N + 1,) * sym.d)


# ---------------------------------------------------------------------------
# smooth cutoff


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """h(u) = s(u) / (s(u) + s(1-u)) with s(u) = exp(-1/u) for u > 0.

    h == 0 for u <= 0, h == 1 for u >= 1, and h(u) + h(1-u) = 1.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    s = np.exp(-1.0 / um)
    s1 = np.exp(-1.0 / (1.0 - um))
    out[mid] = s / (s + s1)
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Tensor cutoff v(xi) = prod_j w(xi_j), w(t) = h(2 - |t|).

    v is C^inf, identically 1 on [-1,1]^d and 0 outside [-2,2]^d.
    """

    d: int = 1

    def axis_profile(self, t) -> np.ndarray:
        return _smooth_step(2.0 - np.abs(np.asarray(t, dtype=float)))

    def __call__(self, xi) -> np.ndarray:
        arr = np.asarray(xi, dtype=float)
        if self.d == 1:
            return self.axis_profile(arr)
        return self.axis_profile(arr[..., 0]) * self.axis_profile(arr[..., 1])


def cutoff_eval(v: CutoffProfile, xi) -> float | np.ndarray:
    out = v(xi)
    return float(out) if np.isscalar(xi) or np.ndim(out) == 0 else out


def _cutoff_on_freqs(v: CutoffProfile, degree: int, scale: float) -> np.ndarray:
    """v(k/scale) on the [-N, N]^d lattice as a (2N+1,)*d array."""
    k = np.arange(-degree, degree + 1, dtype=float) / scale
    w = v.axis_profile(k)
    return w if v.d == 1 else np.multiply.outer(w, w)


def sine_square_sum(degree: int, d: int) -> np.ndarray:
    """sum_j sin^2(k_j) on the [-N, N]^d lattice."""
    k = np.arange(-degree, degree + 1, dtype=float)
    s = np.sin(k) ** 2
    if d == 1:
        return s
    return s[:, None] + s[None, :]


# ---------------------------------------------------------------------------
# kernels


def make_vallee(n: int, d: int = 1, v: CutoffProfile | None = None) -> TrigPoly:
    """De la Vallee Poussin kernel V_n: coefficients v(k/n), degree 2n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = v or CutoffProfile(d)
    return TrigPoly(d, 2 * n, _cutoff_on_freqs(v, 2 * n, float(n)))


def make_modified_vallee(m: int, d: int = 1, v: CutoffProfile | None = None) -> TrigPoly:
    """Kernel with spectrum (sum_j sin^2 k_j) * v(k / 2^m), degree 2^{m+1}.

    Equals -(1/4) sum_j Delta^2_{2 e_j} V_{2^m}: a second symmetric
    difference across a double unit step turns into -4 sin^2(k_j) on the
    spectrum. Zero mean by construction.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    v = v or CutoffProfile(d)
    n = 2**m
    deg = 2 * n
    return TrigPoly(d, deg, sine_square_sum(deg, d) * _cutoff_on_freqs(v, deg, float(n)))


def make_shell(
    nu: int, sym: HomogeneousSymbol, v: CutoffProfile | None = None
) -> TrigPoly:
    """Dyadic shell of the inverse symbol at scale 2^nu.

    Coefficients (v(k/2^{nu+1}) - v(k/2^nu)) / psi(k), supported on the
    annulus 2^nu < |k|_inf <= 2^{nu+2} and zero at k = 0. This is the
    alpha-normalized shell: its L_q quasi-norm decays at the rate
    2^{-(alpha + d(1/q - 1)) nu} that the telescoping estimates use.
    """
    if nu < 0:
        raise ValueError("nu must be >= 0")
    d = sym.d
    v = v or CutoffProfile(d)
    deg = 2 ** (nu + 2)
    band = _cutoff_on_freqs(v, deg, float(2 ** (nu + 1))) - _cutoff_on_freqs(
        v, deg, float(2**nu)
    )
    psi = _eval_on_freqs(sym, deg)
    coeff = np.zeros_like(psi)
    nz = band != 0.0
    coeff[nz] = band[nz] / psi[nz]  # origin excluded: band(0) = 1 - 1 = 0
    return TrigPoly(d, deg, coeff)


# ---------------------------------------------------------------------------
# multipliers

MultiplierMode = Literal["symbol", "inverse_symbol", "sine_ratio"]


def apply_multiplier(poly: TrigPoly, mode: MultiplierMode, sym: HomogeneousSymbol) -> TrigPoly:
    """Apply psi(D), its inverse, or the sine-normalized ratio.

    mode:
      * "symbol":          c_k -> psi(k) c_k
      * "inverse_symbol":  c_k -> c_k / psi(k)
      * "sine_ratio":      c_k -> psi(k) / (sum_j sin^2 k_j) * c_k

    The mean (k = 0) is annihilated in every mode, so "symbol" then
    "inverse_symbol" returns the input minus its mean. The sine-square
    sum is nonzero at every integer frequency k != 0.
    """
    if sym.d != poly.d:
        raise ValueError("symbol and polynomial dimensions differ")
    psi = _eval_on_freqs(sym, poly.degree)
    N = poly.degree
    origin = (N,) * poly.d
    factor = np.zeros_like(psi)
    nz = np.ones(psi.shape, dtype=bool)
    nz[origin] = False
    if mode == "symbol":
        factor[nz] = psi[nz]
    elif mode == "inverse_symbol":
        factor[nz] = 1.0 / psi[nz]
    elif mode == "sine_ratio":
        ss = sine_square_sum(N, poly.d)
        assert not nz.any() or ss[nz].min() > 1e-12, (
            "sine-square sum vanished off the origin"
        )
        factor[nz] = psi[nz] / ss[nz]
    else:
        raise ValueError(f"unknown multiplier mode {mode!r}")
    return TrigPoly(poly.d, poly.degree, poly.coeffs * factor)


# ---------------------------------------------------------------------------
# kernel descriptor (serialization surface for configs)


@dataclass(frozen=True)
class KernelSpec:
    """Recipe for one of the named kernels, serializable for run configs."""

    kind: Literal["vallee", "modified_vallee", "dyadic_shell"]
    scale: int
    d: int = 1
    symbol: HomogeneousSymbol | None = None

    def build(self, v: CutoffProfile | None = None) -> TrigPoly:
        if self.kind == "vallee":
            return make_vallee(self.scale, self.d, v)
        if self.kind == "modified_vallee":
            return make_modified_vallee(self.scale, self.d, v)
        if self.kind == "dyadic_shell":
            if self.symbol is None:
                raise ValueError("dyadic_shell needs a symbol")
            return make_shell(self.scale, self.symbol, v)
        raise ValueError(f"unknown kernel kind {self.kind!r}")

    def to_json_dict(self) -> dict:
        obj = {"kind": self.kind, "scale": self.scale, "d": self.d}
        if self.symbol is not None:
            obj["symbol"] = self.symbol.to_json_dict()
        return obj
