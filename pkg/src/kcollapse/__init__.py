"""Constructive collapse certificates for smoothness K-functionals.

For 0 < p < 1 the usual interpolation quantity between L_q and the
smoothness class generated by a homogeneous Fourier multiplier
degenerates: its infimum is 0 at every scale. This package builds the
degeneracy witnesses explicitly (periodic case on the 1- and 2-torus,
band-limited case on the line) and measures every inequality the
construction relies on, instead of trusting it.

Submodules are imported lazily so the command-line entry point can
configure threading before numpy loads.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = (
    "errors",
    "torus",
    "symbols",
    "quadrature",
    "collapse",
    "bandlimited",
    "cli",
)

_EXPORTS = {
    # errors
    "KCollapseError": "errors",
    "UndersampledGrid": "errors",
    "NonConvergedQuadrature": "errors",
    "OriginEvaluation": "errors",
    "InvalidSymbol": "errors",
    "ExactnessViolated": "errors",
    "DegenerateNorm": "errors",
    "IdentityBroken": "errors",
    "ApproximationTargetMissed": "errors",
    "TailNotNegligible": "errors",
    "BudgetExhausted": "errors",
    # torus
    "TrigPoly": "torus",
    "GridSignal": "torus",
    "ExponentPair": "torus",
    "sample_values": "torus",
    "evaluate": "torus",
    "quasi_norm": "torus",
    "symmetric_difference": "torus",
    "translate": "torus",
    "convolve": "torus",
    # symbols
    "HomogeneousSymbol": "symbols",
    "symbol_eval": "symbols",
    "CutoffProfile": "symbols",
    "cutoff_eval": "symbols",
    "make_vallee": "symbols",
    "make_modified_vallee": "symbols",
    "make_shell": "symbols",
    "apply_multiplier": "symbols",
    "KernelSpec": "symbols",
    # quadrature
    "NodeSet": "quadrature",
    "quadrature_mean": "quadrature",
    "mz_ratio": "quadrature",
    # collapse
    "TestInput": "collapse",
    "CollapseConfig": "collapse",
    "ProbeRecord": "collapse",
    "CollapseReport": "collapse",
    "smooth_decay_poly": "collapse",
    "initial_approximant": "collapse",
    "representation_identity_check": "collapse",
    "build_candidate": "collapse",
    "measure_split": "collapse",
    "telescope_bound": "collapse",
    "i2_quasi_triangle_bound": "collapse",
    "theoretical_bounds": "collapse",
    "collapse_search": "collapse",
    # bandlimited
    "BandlimitedFn": "bandlimited",
    "LineTestInput": "bandlimited",
    "NonPeriodicCollapseConfig": "bandlimited",
    "LineProbeRecord": "bandlimited",
    "LineCollapseReport": "bandlimited",
    "make_bump_input": "bandlimited",
    "make_annular_input": "bandlimited",
    "windowed_norm": "bandlimited",
    "sampling_identity_check": "bandlimited",
    "pp_sum_ratio": "bandlimited",
    "nikolskii_conv_ratio": "bandlimited",
    "lowfreq_split": "bandlimited",
    "j2_norm": "bandlimited",
    "j2_lambda_sweep": "bandlimited",
    "line_identity_check": "bandlimited",
    "nonperiodic_collapse": "bandlimited",
}

__all__ = ["__version__", *_SUBMODULES, *_EXPORTS]


def __getattr__(name):
    if name in _SUBMODULES:
        return import_module(f".{name}", __name__)
    if name in _EXPORTS:
        mod = import_module(f".{_EXPORTS[name]}", __name__)
        return getattr(mod, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
