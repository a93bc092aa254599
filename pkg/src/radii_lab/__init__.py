"""radii_lab: a numerical laboratory for multivariable Bohr-type radii.

The package computes certified lower and upper bounds for three radii of the
unit polydisk: the Bohr radius (coefficient majorant over all bounded
functions), the Bohr-Agler radius (same over the Schur-Agler class), and the
Schur-Agler radius (how far the Schur class can be dilated into the Agler
class).  Supporting machinery includes square-root binomial series with
explicit truncation error, transfer-function realizations of Agler-class
functions, defect-operator positivity experiments, Fourier-matrix polynomials
with small Agler norm, partial Steiner system packing bounds, and the
polarization / Bohnenblust-Hille / Grothendieck constant pipeline behind the
dimension-dependent upper bounds.
"""

__version__ = "0.1.0"

__all__ = [
    "series_kernel",
    "poly_core",
    "radii_bounds",
    "mq_builder",
    "operator_lab",
    "transfer_realization",
    "steiner_constants",
    "figures",
    "cli",
]
