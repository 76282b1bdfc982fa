"""Dense quantum-state primitives: density matrices, pure states, partial traces,
spectra, entropies and the shared complex-matrix JSON format.

All matrices are plain ``numpy`` complex arrays. :class:`DensityMatrix` and
:class:`PureState` carry their subsystem dimensions so that partial traces need
no outside bookkeeping, and both are immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_FLOOR = -1e-9
NORM_TOL = 1e-10

_PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _p in _PAULI:
    _p.setflags(write=False)


class InvalidStateError(ValueError):
    """Raised when a matrix violates a density-matrix or pure-state invariant.

    ``invariant`` names the failed check (``"shape"``, ``"finite"``,
    ``"hermiticity"``, ``"trace"``, ``"psd"``, ``"norm"`` or ``"dims"``).
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(message)
        self.invariant = invariant


def pauli(n: int) -> np.ndarray:
    """Pauli matrix ``sigma_n`` for n in 1, 2, 3 (x, y, z)."""
    if n not in (1, 2, 3):
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {n!r}")
    return _PAULI[n]


def pauli_basis() -> tuple[np.ndarray, ...]:
    """Identity followed by the three Pauli matrices."""
    return _PAULI


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def _check_dims(dims: Sequence[int], total: int) -> tuple[int, ...]:
    dims = tuple(int(x) for x in dims)
    if not dims or any(x < 1 for x in dims):
        raise InvalidStateError("dims", f"subsystem dims must be positive, got {dims}")
    if int(np.prod(dims)) != total:
        raise InvalidStateError(
            "dims", f"product of subsystem dims {dims} is {int(np.prod(dims))}, expected {total}"
        )
    return dims


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, matrix, dims: Sequence[int] | None = None):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidStateError("shape", f"density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("finite", "density matrix has NaN or infinite entries")
        dims = _check_dims(dims if dims is not None else (m.shape[0],), m.shape[0])
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidStateError("hermiticity", f"matrix is not Hermitian: max|M - M^dag| = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidStateError("trace", f"trace is {tr.real:.12g}{tr.imag:+.3g}j, expected 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < PSD_FLOOR:
            raise InvalidStateError("psd", f"matrix is not positive semidefinite: eigenvalue {lo:.6e}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, key):
        return self.matrix[key]

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.matrix, other.matrix), self.dims + other.dims)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def allclose(self, other: "DensityMatrix", atol: float = 1e-12) -> bool:
        return self.dims == other.dims and np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm state vector with subsystem dims."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, amplitudes, dims: Sequence[int] | None = None):
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidStateError("finite", "state vector is empty or has NaN/Inf entries")
        norm = np.linalg.norm(v)
        if abs(norm - 1) > NORM_TOL:
            raise InvalidStateError("norm", f"state vector norm is {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(v))
        object.__setattr__(self, "dims", _check_dims(dims if dims is not None else (v.size,), v.size))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int] | None = None) -> "PureState":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v), dims)


def basis_state(index: int | Sequence[int], dims: Sequence[int]) -> PureState:
    """Computational basis ket; ``index`` may be flat or one digit per subsystem."""
    dims = tuple(dims)
    flat = int(np.ravel_multi_index(tuple(index), dims)) if not np.isscalar(index) else int(index)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[flat] = 1
    return PureState(v, dims)


def ghz_state(n: int, d: int = 2) -> PureState:
    """(|0...0> + ... + |d-1...d-1>)/sqrt(d) on n qudits."""
    dims = (d,) * n
    v = np.zeros(d**n, dtype=complex)
    step = sum(d**k for k in range(n))
    v[np.arange(d) * step] = 1 / np.sqrt(d)
    return PureState(v, dims)


def w_state(n: int = 3) -> PureState:
    v = np.zeros(2**n, dtype=complex)
    v[[1 << k for k in range(n)]] = 1 / np.sqrt(n)
    return PureState(v, (2,) * n)


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d) / d)


def tensor(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    if not mats:
        raise ValueError("tensor needs at least one operand")
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the subsystems listed in ``keep`` (kept in ascending order)."""
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n:
        raise ValueError(f"keep must be a nonempty proper subset of range({n}), got {keep}")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem index out of range for {n} subsystems: {keep}")
    traced = [k for k in range(n) if k not in keep]
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # contract each traced axis with its column partner, highest index first
    for k in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    kd = tuple(rho.dims[k] for k in keep)
    d = int(np.prod(kd))
    return DensityMatrix(t.reshape(d, d), kd)


def bipartition_schmidt_probabilities(psi: PureState) -> dict[tuple[int, ...], np.ndarray]:
    """Squared Schmidt coefficients of ``psi`` across every bipartition S|rest,
    keyed by the side S that contains subsystem 0 (each bipartition once)."""
    n = len(psi.dims)
    t = psi.amplitudes.reshape(psi.dims)
    out = {}
    for size in range(1, n):
        for rest in combinations(range(1, n), size - 1):
            part = (0,) + rest
            other = tuple(k for k in range(n) if k not in part)
            a = np.transpose(t, part + other).reshape(int(np.prod([psi.dims[k] for k in part])), -1)
            out[part] = np.linalg.svd(a, compute_uv=False) ** 2
    return out


def reduced_purities(psi: PureState) -> dict[tuple[int, ...], float]:
    """Tr(rho_S^2) for every bipartition S|rest of a pure state."""
    return {k: float(np.sum(p**2)) for k, p in bipartition_schmidt_probabilities(psi).items()}


def eig_hermitian(m) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in descending order."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if err > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
        raise ValueError(f"matrix is not Hermitian (max|M - M^dag| = {err:.3e})")
    return np.linalg.eigvalsh(m)[::-1]


def singular_values(m) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(np.asarray(m), compute_uv=False)


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -sum lambda log2 lambda."""
    return float(max(0.0, -np.sum(_xlog2x(np.linalg.eigvalsh(rho.matrix)))))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix, support_tol: float = 1e-12) -> float:
    """S(rho||sigma) in bits; ``inf`` when supp(rho) is not inside supp(sigma)."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    lam, vec = np.linalg.eigh(sigma.matrix)
    pop = np.real(np.einsum("ik,ij,jk->k", vec.conj(), rho.matrix, vec))
    kernel = lam <= support_tol
    if np.any(pop[kernel] > support_tol):
        return float("inf")
    cross = float(np.sum(pop[~kernel] * np.log2(lam[~kernel])))
    return float(max(0.0, -von_neumann_entropy(rho) - cross))


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None,
                          dims: Sequence[int] | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state G G^dag / Tr."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


def random_pure_state(d: int, rng: np.random.Generator, dims: Sequence[int] | None = None) -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    return PureState.normalized(rng.standard_normal(d) + 1j * rng.standard_normal(d), dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# -- shared JSON matrix format ------------------------------------------------

class MatrixFormatError(ValueError):
    pass


def matrix_to_dict(m, dims: Sequence[int] | None = None) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    out = {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }
    if dims is not None:
        out["dims"] = [int(x) for x in dims]
    return out


def matrix_from_dict(obj) -> tuple[np.ndarray, tuple[int, ...] | None]:
    """Parse ``{"rows", "cols", "data": [[re, im], ...], "dims"?}``."""
    if not isinstance(obj, dict):
        raise MatrixFormatError("top level: expected an object with rows, cols, data")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise MatrixFormatError(f"missing key {key!r}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    for key, val in (("rows", rows), ("cols", cols)):
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise MatrixFormatError(f"{key}: expected a positive integer, got {val!r}")
    if not isinstance(data, list):
        raise MatrixFormatError("data: expected a list of [re, im] pairs")
    if len(data) != rows * cols:
        raise MatrixFormatError(f"data: expected {rows * cols} entries, got {len(data)}")
    out = np.empty(rows * cols, dtype=complex)
    for i, z in enumerate(data):
        if (not isinstance(z, list) or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)):
            raise MatrixFormatError(f"data[{i}] (row {i // cols}, col {i % cols}): expected [re, im], got {z!r}")
        out[i] = complex(z[0], z[1])
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise MatrixFormatError(f"data[{bad}]: non-finite entry")
    dims = obj.get("dims")
    if dims is not None:
        if not isinstance(dims, list) or not all(isinstance(x, int) and x >= 1 for x in dims):
            raise MatrixFormatError(f"dims: expected a list of positive integers, got {dims!r}")
        dims = tuple(dims)
    return out.reshape(rows, cols), dims


def density_to_dict(rho: DensityMatrix) -> dict:
    return matrix_to_dict(rho.matrix, rho.dims)


def density_from_dict(obj) -> DensityMatrix:
    m, dims = matrix_from_dict(obj)
    return DensityMatrix(m, dims)
