"""Lattice/Fourier plumbing for loops in the defining representation."""
from __future__ import annotations

import numpy as np

from .liealg import LieAlgebraData


def sigma_grid(M: int) -> np.ndarray:
    return 2 * np.pi * np.arange(M) / M - np.pi


def is_power_of_two(M: int) -> bool:
    return isinstance(M, (int, np.integer)) and M > 0 and (M & (M - 1)) == 0


def wavenumbers(M: int) -> np.ndarray:
    n = np.fft.fftfreq(M, d=1.0 / M)
    if M % 2 == 0:
        n[M // 2] = 0.0     # Nyquist mode has no consistent derivative
    return n


def spectral_derivative(f: np.ndarray) -> np.ndarray:
    """d/dsigma along axis 0 of lattice samples on [-pi, pi)."""
    M = f.shape[0]
    fh = np.fft.fft(f, axis=0)
    shape = (M,) + (1,) * (f.ndim - 1)
    return np.fft.ifft(1j * wavenumbers(M).reshape(shape) * fh, axis=0)


def pair(a: np.ndarray, b: np.ndarray) -> complex:
    """``(a|b) = (1/2pi) int tr(a b)`` by the trapezoid rule (exact for band-limited)."""
    return np.einsum("sij,sji->", a, b) / a.shape[0]


def components(data: LieAlgebraData, samples: np.ndarray, n_max: int) -> dict:
    """Pairing components ``(X | T e^{i n s})`` for all basis labels and ``|n| <= n_max``."""
    M = samples.shape[0]
    sig = sigma_grid(M)
    basis = data.matrices.numeric_basis
    # tr(X_s T^a) for all s, a
    tr = np.einsum("sij,aji->sa", samples, basis)
    out = {}
    for n in range(-n_max, n_max + 1):
        phase = np.exp(1j * n * sig)
        vals = phase @ tr / M
        for a, label in enumerate(data.basis):
            out[(label, n)] = complex(vals[a])
    return out


def synthesize(data: LieAlgebraData, comps: dict, M: int) -> np.ndarray:
    """Inverse of :func:`components`: lattice samples from pairing components."""
    sig = sigma_grid(M)
    mats = data.matrices
    n = data.rank + 1
    out = np.zeros((M, n, n), dtype=complex)
    for (label, p), val in comps.items():
        if val == 0:
            continue
        dual = data.dual_label(label)
        scale = float(data.form(label, dual))
        out += (val / scale) * np.exp(-1j * p * sig)[:, None, None] * mats.numeric(dual)[None]
    return out


def spectral_tail(samples: np.ndarray, frac: float = 0.25) -> float:
    """Relative spectral energy above mode ``frac * M``."""
    M = samples.shape[0]
    fh = np.fft.fft(samples.reshape(M, -1), axis=0)
    n = np.abs(np.fft.fftfreq(M, d=1.0 / M))
    total = np.sum(np.abs(fh) ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(fh[n > frac * M]) ** 2) / total)
