"""Dense complex linear algebra on small labeled tensor-product spaces.

Everything downstream (engine cycles, Lindblad steady states) runs on
Hilbert spaces of dimension <= ~8, so all storage is dense complex double
(row-major numpy arrays) and all eigenproblems use direct LAPACK solves.
Units: hbar = k_B = 1 throughout; energies and rates share one unit system.

Values are immutable after construction and all operations are pure
functions, so everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "HERMITICITY_TOL",
    "TRACE_TOL",
    "EIGENVALUE_FLOOR",
    "HilbertLayout",
    "Operator",
    "DensityMatrix",
    "gibbs_qubit",
    "tensor",
    "tensor_all",
    "partial_trace",
    "expectation",
    "von_neumann_entropy",
]

#: Max-abs tolerance on rho - rho^dagger for a valid density matrix.
HERMITICITY_TOL = 1e-12
#: Tolerance on |Tr rho - 1| for a valid density matrix.
TRACE_TOL = 1e-12
#: Eigenvalues of a density matrix may round off below zero by this much.
EIGENVALUE_FLOOR = -1e-10


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered tensor factorization of a Hilbert space.

    The factor order is fixed once per space and follows the convention
    catalyst (x) hot (x) cold; basis kets are written |s h c> with the
    catalyst index slowest.  Flat basis indices are row-major over the
    factor indices (the last factor varies fastest), matching the
    ordering produced by ``numpy.kron``.
    """

    factor_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.factor_dims)
        object.__setattr__(self, "factor_dims", dims)
        if not dims:
            raise ValueError("layout needs at least one tensor factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be >= 1, got {dims}")

    @property
    def total_dim(self) -> int:
        return math.prod(self.factor_dims)

    def flat_index(self, *factor_indices: int) -> int:
        """Flat basis index of the ket |i0 i1 ...> in this layout."""
        if len(factor_indices) != len(self.factor_dims):
            raise ValueError(
                f"expected {len(self.factor_dims)} factor indices, "
                f"got {len(factor_indices)}"
            )
        flat = 0
        for idx, dim in zip(factor_indices, self.factor_dims):
            if not 0 <= idx < dim:
                raise ValueError(f"factor index {idx} out of range for dim {dim}")
            flat = flat * dim + idx
        return flat

    def factor_indices(self, flat: int) -> tuple[int, ...]:
        """Inverse of :meth:`flat_index`."""
        if not 0 <= flat < self.total_dim:
            raise ValueError(f"flat index {flat} out of range")
        out = []
        for dim in reversed(self.factor_dims):
            out.append(flat % dim)
            flat //= dim
        return tuple(reversed(out))


def _as_square_complex(entries: np.ndarray | list, dim: int) -> np.ndarray:
    mat = np.array(entries, dtype=complex)
    if mat.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True)
class Operator:
    """A square matrix tied to a :class:`HilbertLayout`."""

    layout: HilbertLayout
    entries: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", _as_square_complex(self.entries, self.layout.total_dim)
        )

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def dagger(self) -> "Operator":
        return Operator(self.layout, self.entries.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)


@dataclass(frozen=True)
class DensityMatrix:
    """A state on a labeled space.

    Construction is deliberately cheap: validity (Hermiticity, unit trace,
    positivity) is only checked by an explicit :meth:`validate` call so
    that hot loops are not paying for eigendecompositions.  The
    steady-state solver always validates its output.
    """

    op: Operator

    @property
    def layout(self) -> HilbertLayout:
        return self.op.layout

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries

    def validate(self) -> None:
        """Raise ``ValueError`` unless this is a physical state."""
        mat = self.matrix
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian: max |rho - rho^+| = {herm:.3e}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} differs from 1")
        eigs = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
        if float(eigs.min()) < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {eigs.min():.3e}")

    def populations(self) -> np.ndarray:
        """Real diagonal of the matrix (no diagonality check)."""
        return self.matrix.diagonal().real.copy()


def gibbs_qubit(beta: float, omega: float) -> DensityMatrix:
    """Thermal state of a qubit with Hamiltonian H = omega |1><1|.

    Returns diag(1, a) / (1 + a) with a = exp(-beta*omega) in the
    {|0>, |1>} basis.  ``beta`` is an inverse energy (>= 0, with beta = 0
    the maximally mixed infinite-temperature state), ``omega`` an energy.
    """
    if not (math.isfinite(beta) and math.isfinite(omega)):
        raise ValueError("beta and omega must be finite")
    if beta < 0:
        raise ValueError(f"negative inverse temperature beta = {beta}")
    if omega <= 0:
        raise ValueError(f"qubit frequency must be positive, got {omega}")
    a = math.exp(-beta * omega)
    z = 1.0 + a
    mat = np.array([[1.0 / z, 0.0], [0.0, a / z]], dtype=complex)
    return DensityMatrix(Operator(HilbertLayout((2,)), mat))


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product; layouts concatenate."""
    layout = HilbertLayout(a.layout.factor_dims + b.layout.factor_dims)
    return Operator(layout, np.kron(a.entries, b.entries))


def tensor_all(ops: list[Operator] | tuple[Operator, ...]) -> Operator:
    """Left-fold of :func:`tensor` over a non-empty list of operators."""
    if not ops:
        raise ValueError("tensor_all needs at least one operator")
    return reduce(tensor, ops)


def partial_trace(rho: DensityMatrix, keep: tuple[int, ...] | list[int]) -> DensityMatrix:
    """Trace out all tensor factors not listed in ``keep``.

    ``keep`` holds indices into ``rho.layout.factor_dims`` (order
    irrelevant; the kept factors stay in their original order).  The
    trace is preserved exactly.
    """
    keep_sorted = sorted(set(int(k) for k in keep))
    dims = rho.layout.factor_dims
    n = len(dims)
    if not keep_sorted:
        raise ValueError("keep set must be non-empty")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} factors")

    # View the matrix as a rank-2n tensor (row multi-index, column
    # multi-index) and contract the traced row/column axis pairs.
    tensor_view = rho.matrix.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep_sorted]
    for offset, axis in enumerate(traced):
        # Each trace removes one row axis and one column axis; earlier
        # contractions shift the remaining axis numbers down.
        row_ax = axis - offset
        col_ax = axis - offset + (n - offset)
        tensor_view = np.trace(tensor_view, axis1=row_ax, axis2=col_ax)
    kept_dims = tuple(dims[i] for i in keep_sorted)
    reduced_dim = math.prod(kept_dims)
    reduced = tensor_view.reshape(reduced_dim, reduced_dim)
    return DensityMatrix(Operator(HilbertLayout(kept_dims), reduced))


def expectation(obs: Operator, rho: DensityMatrix) -> complex:
    """Tr[obs . rho]; complex in general, real up to round-off for Hermitian obs."""
    if obs.layout.factor_dims != rho.layout.factor_dims:
        raise ValueError(
            f"layout mismatch: observable {obs.layout.factor_dims} "
            f"vs state {rho.layout.factor_dims}"
        )
    # Tr[A B] = sum_{ij} A_ij B_ji without forming the product.
    return complex(np.sum(obs.entries * rho.matrix.T))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr[rho ln rho] in nats, with 0 ln 0 := 0.

    Uses a Hermitian eigensolver; eigenvalues are clamped to [0, 1] after
    checking they do not undershoot :data:`EIGENVALUE_FLOOR`, which keeps
    tiny negative round-off from producing NaNs.
    """
    mat = rho.matrix
    eigs = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    if float(eigs.min()) < EIGENVALUE_FLOOR:
        raise ValueError(f"state has negative eigenvalue {eigs.min():.3e}")
    eigs = np.clip(eigs, 0.0, 1.0)
    nonzero = eigs[eigs > 0.0]
    return float(-np.sum(nonzero * np.log(nonzero)))
