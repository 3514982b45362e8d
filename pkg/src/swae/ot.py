"""Exact discrete optimal transport on uniform empirical distributions.

Restricted to equal-size uniform atom sets, where the transport optimum
is attained at a permutation, so an exact assignment solver is all that
is needed. The solver kernel is the compiled extension when available
and an identical pure-Python implementation otherwise; see
:func:`assignment_backend`.

Besides the p-Wasserstein metric this module checks, numerically, that
the joint-space transport cost between (data, encoding) pairs and
(decoded sample, prior sample) pairs equals the sum-decomposed form with
separate data-space and latent-space squared distances. The two cost
matrices are built by independent code paths on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError, NumericError

try:
    from . import _assign as _assign_backend
    _BACKEND_NAME = "cython"
except ImportError:  # extension not built; use the pure twin
    from . import _assign_py as _assign_backend
    _BACKEND_NAME = "python"

MAX_ASSIGNMENT_SIZE = 512
MAX_THEOREM_SIZE = 64


def assignment_backend() -> str:
    """Which kernel is active: "cython" or "python"."""
    return _BACKEND_NAME


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Uniformly weighted atom set, one atom per row."""

    atoms: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=np.float64)
        if atoms.ndim != 2 or atoms.shape[0] < 1:
            raise DimensionError("atoms must be a non-empty 2-D array")
        if not np.all(np.isfinite(atoms)):
            raise NumericError("atoms contain non-finite entries")
        object.__setattr__(self, "atoms", atoms)

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]


@dataclass(frozen=True)
class Assignment:
    """Row->column permutation and its mean cost (1/n) sum C[i, perm[i]]."""

    permutation: np.ndarray
    cost: float


def min_cost_assignment(cost: np.ndarray) -> Assignment:
    """Exact minimum of (1/n) sum_i C[i, sigma(i)] over permutations."""
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise DimensionError(f"cost matrix must be square, got {cost.shape}")
    n = cost.shape[0]
    if n < 1:
        raise DimensionError("cost matrix must be non-empty")
    if n > MAX_ASSIGNMENT_SIZE:
        raise DimensionError(
            f"n={n} exceeds the supported bound {MAX_ASSIGNMENT_SIZE}")
    if not np.all(np.isfinite(cost)):
        raise NumericError("cost matrix contains non-finite entries")
    perm = _assign_backend.solve(cost)
    mean_cost = float(cost[np.arange(n), perm].sum() / n)
    return Assignment(permutation=perm, cost=mean_cost)


def _atoms(x) -> np.ndarray:
    if isinstance(x, EmpiricalDistribution):
        return x.atoms
    return EmpiricalDistribution(np.asarray(x)).atoms


def pairwise_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All-pairs squared Euclidean distances, computed row by row."""
    out = np.empty((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        diff = b - a[i]
        out[i] = np.sum(diff * diff, axis=1)
    return out


def empirical_wasserstein(a, b, p: int = 2) -> float:
    """p-Wasserstein distance between two equal-size uniform atom sets.

    Ground cost is the Euclidean distance raised to p; the value is the
    p-th root of the optimal mean assignment cost.
    """
    atoms_a, atoms_b = _atoms(a), _atoms(b)
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    if atoms_a.shape[0] != atoms_b.shape[0]:
        raise DimensionError(
            f"atom counts differ: {atoms_a.shape[0]} vs {atoms_b.shape[0]}")
    if atoms_a.shape[1] != atoms_b.shape[1]:
        raise DimensionError("atom dimensions differ")
    cost = pairwise_sq_dists(atoms_a, atoms_b)
    if p == 1:
        cost = np.sqrt(cost)
    best = min_cost_assignment(cost)
    return best.cost ** (1.0 / p)


def verify_theorem1(x_atoms: np.ndarray, z_atoms: np.ndarray,
                    encode_fn: Callable[[np.ndarray], np.ndarray],
                    decode_fn: Callable[[np.ndarray], np.ndarray],
                    p: int = 2,
                    joint_perturbation: float = 0.0
                    ) -> tuple[float, float, float]:
    """Compare the joint-space transport cost against its decomposed form.

    lhs: optimal assignment between raw concatenated vectors
    (x_i, E(x_i)) and (D(z_j), z_j), cost ||.||_2^p on the concatenation.
    rhs: optimal assignment where the cost is the sum of the data-space
    term ||x_i - D(z_j)||_2^p and the latent term ||E(x_i) - z_j||_2^p.

    For p=2 the two per-pair costs are equal identities, so the optima
    agree; the returned gap |lhs - rhs| is the numerical residual.
    ``joint_perturbation`` is a test hook added to one entry of the joint
    cost matrix to force a visible gap.
    """
    x_atoms = np.atleast_2d(np.asarray(x_atoms, dtype=np.float64))
    z_atoms = np.atleast_2d(np.asarray(z_atoms, dtype=np.float64))
    n = x_atoms.shape[0]
    if z_atoms.shape[0] != n:
        raise DimensionError("x_atoms and z_atoms must have equal counts")
    if n > MAX_THEOREM_SIZE:
        raise DimensionError(
            f"n={n} exceeds the supported bound {MAX_THEOREM_SIZE}")
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    e_x = np.atleast_2d(np.asarray(encode_fn(x_atoms), dtype=np.float64))
    d_z = np.atleast_2d(np.asarray(decode_fn(z_atoms), dtype=np.float64))
    if d_z.shape[1] != x_atoms.shape[1] or e_x.shape[1] != z_atoms.shape[1]:
        raise DimensionError("encoder/decoder output widths do not match")

    # joint path: explicit per-pair norms on concatenated vectors
    enc_side = np.concatenate([x_atoms, e_x], axis=1)
    dec_side = np.concatenate([d_z, z_atoms], axis=1)
    c_joint = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            diff = enc_side[i] - dec_side[j]
            c_joint[i, j] = diff @ diff
    # split path: broadcast pairwise distances per space, then summed
    c_split = pairwise_sq_dists(x_atoms, d_z) + pairwise_sq_dists(e_x, z_atoms)
    if p == 1:
        c_joint = np.sqrt(c_joint)
        c_split = np.sqrt(pairwise_sq_dists(x_atoms, d_z)) + np.sqrt(
            pairwise_sq_dists(e_x, z_atoms))
    c_joint[0, 0] += joint_perturbation

    lhs = min_cost_assignment(c_joint).cost
    rhs = min_cost_assignment(c_split).cost
    return lhs, rhs, abs(lhs - rhs)
