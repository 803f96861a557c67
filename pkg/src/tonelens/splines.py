"""B-spline basis on [0, 1] with open uniform knots, and difference penalties.

The basis is evaluated by the Cox-de Boor recursion, vectorized over
evaluation points. Knot vectors are clamped (degree+1 repeated boundary
knots) so the basis is a partition of unity with interpolating endpoints.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError


def make_knots(basis_dim: int, degree: int) -> np.ndarray:
    """Open uniform knot vector on [0, 1] for ``basis_dim`` basis functions."""
    if basis_dim <= degree + 1:
        raise ParameterError(
            f"basis_dim must exceed degree + 1, got {basis_dim} with degree {degree}"
        )
    n_interior = basis_dim - degree - 1
    interior = np.linspace(0.0, 1.0, n_interior + 2)[1:-1]
    return np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])


def bspline_design(t, knots: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate all basis functions at each t; rows sum to one.

    ``t`` may be a scalar or 1-D array within [0, 1]; values outside the
    domain raise :class:`ParameterError`. At most degree+1 entries per row
    are nonzero.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any((t < 0.0) | (t > 1.0)):
        raise ParameterError("evaluation points must lie in [0, 1]")
    n_basis = len(knots) - degree - 1

    # zero-degree: indicator of the half-open knot span, closed at t = 1
    b = np.zeros((len(t), len(knots) - 1))
    for i in range(len(knots) - 1):
        if knots[i] < knots[i + 1]:
            b[:, i] = (knots[i] <= t) & (t < knots[i + 1])
    last = np.searchsorted(knots, 1.0, side="left") - 1  # last non-degenerate span
    b[t == 1.0, last] = 1.0

    for k in range(1, degree + 1):
        new = np.zeros((len(t), len(knots) - k - 1))
        for i in range(len(knots) - k - 1):
            left_den = knots[i + k] - knots[i]
            if left_den > 0:
                new[:, i] += (t - knots[i]) / left_den * b[:, i]
            right_den = knots[i + k + 1] - knots[i + 1]
            if right_den > 0:
                new[:, i] += (knots[i + k + 1] - t) / right_den * b[:, i + 1]
        b = new
    return b[:, :n_basis]


def bspline_basis(knots: np.ndarray, degree: int, t: float) -> np.ndarray:
    """Basis row vector at a single point t in [0, 1]."""
    return bspline_design(np.array([t]), knots, degree)[0]


def difference_matrix(size: int, order: int) -> np.ndarray:
    """Order-th forward difference operator as a (size-order, size) matrix."""
    if order < 1 or order >= size:
        raise ParameterError(f"difference order must be in [1, {size - 1}], got {order}")
    return np.diff(np.eye(size), n=order, axis=0)


def difference_penalty(size: int, order: int = 2) -> np.ndarray:
    """Positive-semidefinite roughness penalty D'D on coefficient sequences.

    On a uniform basis the second-difference form approximates a second
    derivative penalty; exactness is not claimed.
    """
    d = difference_matrix(size, order)
    return d.T @ d
