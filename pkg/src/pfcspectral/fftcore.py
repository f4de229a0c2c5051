"""Serial complex-to-complex FFTs with a fixed axis-composition order.

Backed by numpy's pocketfft (mixed-radix with Bluestein fallback, plan
caching internal to numpy). The composition order of the multi-axis
transforms is pinned so that the distributed pipeline and the serial
full-grid transform follow bit-identical code paths:

    forward nd : axis 0, axis 1, axis 2
    inverse nd : axis 2, axis 0, axis 1

which mirrors "2D transform, transpose, 1D transform" and its inverse.

Forward transforms are unnormalized; the inverse carries the full 1/N
factor, so inverse(forward(x)) == x.
"""

from __future__ import annotations

import numpy as np

__all__ = ["fft_axis", "fft_2d", "fft_nd"]


def _check(a: np.ndarray, axis: int) -> None:
    if a.ndim != 3:
        raise ValueError(f"expected a 3D buffer, got shape {a.shape}")
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")


def fft_axis(a: np.ndarray, axis: int, forward: bool = True) -> np.ndarray:
    """1D DFT along one axis of a 3D complex buffer."""
    _check(a, axis)
    if a.size == 0:
        return np.array(a, dtype=np.complex128, copy=True)
    if a.shape[axis] == 1:
        return np.asarray(a, dtype=np.complex128).copy()
    if forward:
        return np.fft.fft(a, axis=axis)
    return np.fft.ifft(a, axis=axis)


def fft_2d(a: np.ndarray, forward: bool = True) -> np.ndarray:
    """Transform over axes 0 and 1 (every z-plane independently)."""
    return fft_axis(fft_axis(a, 0, forward), 1, forward)


def fft_nd(a: np.ndarray, forward: bool = True) -> np.ndarray:
    """Full transform over all axes with length > 1."""
    if forward:
        return fft_axis(fft_2d(a, True), 2, True)
    return fft_2d(fft_axis(a, 2, False), False)
