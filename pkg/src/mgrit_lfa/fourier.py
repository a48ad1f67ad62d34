"""Frequency grids, circulant operators, and small dense spectral helpers.

Conventions used throughout the package:

* forward DFT of a length-n sequence x: X_k = sum_j x_j exp(-i w_k j) with
  w_k = 2 pi k / n and no normalization factor; the inverse carries 1/n
  (numpy's default). Parseval then reads ||X||_2 = sqrt(n) ||x||_2.
* a circulant operator with stencil {offset: coeff} acts as
  (A u)_j = sum_d coeff[d] * u_{j-d} with periodic indexing, so its
  eigenvalue for the k-th Fourier eigenvector is the stencil's DFT,
  sum_d coeff[d] exp(-i w_k d).

Dense eigensolves in this module are deliberately capped at dimension 64;
they exist for symbol-sized matrices, not for space-time systems.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "FrequencyGrid",
    "CirculantOperator",
    "dft_symbol",
    "spectral_norm",
    "spectral_radius",
]

EIG_DIM_CAP = 64


class FrequencyGrid:
    """Uniform frequency sample points of one of three kinds.

    kind "spatial"       n points covering [-pi, pi)
    kind "temporal-low"  n points covering [-pi/m, pi/m), the low-frequency
                         band left after coarsening by a factor m
    kind "temporal-full" n points covering [-pi/m, -pi/m + 2 pi), one full
                         period starting at the low band's left edge

    The grid stores the frequency values themselves, not indices.
    """

    KINDS = ("spatial", "temporal-low", "temporal-full")

    def __init__(self, n_points: int, kind: str, m: int | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown grid kind {kind!r}")
        if n_points < 1:
            raise ValueError("n_points must be positive")
        if kind == "spatial":
            lo, span = -np.pi, 2 * np.pi
        else:
            if m is None or m < 1:
                raise ValueError(f"kind {kind!r} requires a coarsening factor m >= 1")
            lo = -np.pi / m
            span = 2 * np.pi / m if kind == "temporal-low" else 2 * np.pi
        self.kind = kind
        self.m = m
        self.values = lo + span * np.arange(n_points) / n_points
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"FrequencyGrid({len(self)}, {self.kind!r}, m={self.m})"


class CirculantOperator:
    """Circulant matrix given by a sparse stencil over a periodic grid.

    Application uses the FFT: transform, multiply by the symbol at the grid
    frequencies, transform back. Offsets may be any integers; they act mod
    size.
    """

    def __init__(self, stencil: dict[int, complex], size: int):
        if size < 1:
            raise ValueError("size must be positive")
        if not stencil:
            raise ValueError("stencil must have at least one entry")
        self.size = size
        self.stencil = {int(d): complex(c) for d, c in stencil.items()}
        self._grid_symbol = self.symbol(2 * np.pi * np.fft.fftfreq(size))
        self._is_real = all(abs(c.imag) == 0.0 for c in self.stencil.values())

    def symbol(self, omega) -> np.ndarray | complex:
        """Stencil DFT sum_d c_d exp(-i omega d), evaluated at omega.

        Preserves extended precision: longdouble input stays longdouble.
        """
        omega = np.asarray(omega)
        cdtype = np.clongdouble if omega.dtype == np.longdouble else np.complex128
        acc = np.zeros(omega.shape, dtype=cdtype)
        for d, c in self.stencil.items():
            acc = acc + cdtype(c) * np.exp(-1j * omega * omega.dtype.type(d))
        return acc if acc.shape else acc[()]

    def symbol_grid(self) -> np.ndarray:
        """Symbol at the size-n DFT frequencies, in numpy fft ordering."""
        return self._grid_symbol

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Apply along the last axis; leading axes are batch dimensions."""
        u = np.asarray(u)
        if u.shape[-1] != self.size:
            raise ValueError(f"last axis has length {u.shape[-1]}, expected {self.size}")
        out = np.fft.ifft(np.fft.fft(u, axis=-1) * self._grid_symbol, axis=-1)
        if self._is_real and not np.iscomplexobj(u):
            return out.real
        return out

    def dense(self) -> np.ndarray:
        A = np.zeros((self.size, self.size), dtype=complex)
        idx = np.arange(self.size)
        for d, c in self.stencil.items():
            A[idx, (idx - d) % self.size] += c
        return A


def dft_symbol(op: CirculantOperator, k: int) -> complex:
    """Eigenvalue of the circulant for Fourier eigenvector k: the stencil
    DFT at w_k = 2 pi k / n."""
    if not 0 <= k < op.size:
        raise IndexError(f"frequency index {k} out of range for size {op.size}")
    w = 2 * np.pi * k / op.size
    return complex(sum(c * np.exp(-1j * w * d) for d, c in op.stencil.items()))


def _validated(matrix) -> np.ndarray:
    A = np.asarray(matrix)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if max(A.shape) > EIG_DIM_CAP:
        raise ValueError(
            f"dense spectral helpers are capped at dimension {EIG_DIM_CAP}; got {A.shape}"
        )
    return A


def spectral_norm(matrix) -> float:
    """Largest singular value. Rejects non-finite input and dim > 64."""
    A = _validated(matrix)
    if not A.size:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def spectral_radius(matrix) -> float:
    """Largest eigenvalue modulus. Rejects non-finite input, non-square
    matrices, and dim > 64."""
    A = _validated(matrix)
    if A.shape[0] != A.shape[1]:
        raise ValueError("spectral radius needs a square matrix")
    if not A.size:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))
