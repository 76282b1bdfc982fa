"""Coherence in the computational basis and incoherence checks for channels."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .qstate import DensityMatrix, random_unitary, von_neumann_entropy

COMPLETENESS_TOL = 1e-9
NONZERO_TOL = 1e-10
INCOHERENT_TOL = 1e-10


class KrausError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus operators of a channel, all of shape ``(out_dim, in_dim)``.

    Construction enforces sum_j K_j^dag K_j = I to within ``COMPLETENESS_TOL``.
    """

    operators: tuple[np.ndarray, ...]

    def __init__(self, operators: Sequence):
        ops = []
        for k in operators:
            a = np.array(k, dtype=complex, copy=True)
            if a.ndim != 2:
                raise KrausError(f"Kraus operator must be a matrix, got shape {a.shape}")
            a.setflags(write=False)
            ops.append(a)
        if not ops:
            raise KrausError("empty Kraus set")
        shape = ops[0].shape
        if any(a.shape != shape for a in ops):
            raise KrausError(f"Kraus operators differ in shape: {sorted({a.shape for a in ops})}")
        s = sum(a.conj().T @ a for a in ops)
        err = np.max(np.abs(s - np.eye(shape[1])))
        if err > COMPLETENESS_TOL:
            raise KrausError(f"Kraus set is not trace preserving: max|sum K^dag K - I| = {err:.3e}")
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self):
        return len(self.operators)

    def then(self, other: "KrausSet") -> "KrausSet":
        """Channel that applies ``self`` first and ``other`` second."""
        return KrausSet([b @ a for b in other.operators for a in self.operators])


@dataclass(frozen=True)
class CoherenceReport:
    c_l1: float
    c_rel_ent: float
    is_incoherent: bool

    def to_dict(self) -> dict:
        return asdict(self)


def c_l1(rho: DensityMatrix) -> float:
    """Sum of absolute values of the off-diagonal entries."""
    m = np.abs(rho.matrix)
    return float(m[~np.eye(rho.dim, dtype=bool)].sum())


def dephase(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.diag(np.diag(rho.matrix)), rho.dims)


def c_rel_entropy(rho: DensityMatrix) -> float:
    """Relative entropy of coherence, S(dephase(rho)) - S(rho)."""
    return max(0.0, von_neumann_entropy(dephase(rho)) - von_neumann_entropy(rho))


def coherence_report(rho: DensityMatrix) -> CoherenceReport:
    l1 = c_l1(rho)
    return CoherenceReport(c_l1=l1, c_rel_ent=c_rel_entropy(rho), is_incoherent=l1 <= INCOHERENT_TOL)


def is_incoherent_operator(k, tol: float = NONZERO_TOL) -> bool:
    nonzero = np.abs(np.asarray(k)) > tol
    return bool(np.all(nonzero.sum(axis=0) <= 1))


def is_incoherent_kraus(kraus: KrausSet, tol: float = NONZERO_TOL) -> bool:
    """True iff every operator has at most one nonzero entry per column, i.e.
    maps each basis projector onto a multiple of a basis projector."""
    return all(is_incoherent_operator(k, tol) for k in kraus.operators)


def identity_kraus(d: int) -> KrausSet:
    return KrausSet([np.eye(d)])


def dephasing_kraus(d: int) -> KrausSet:
    """Full dephasing {|i><i|}."""
    ops = []
    for i in range(d):
        p = np.zeros((d, d))
        p[i, i] = 1
        ops.append(p)
    return KrausSet(ops)


def unitary_kraus(u) -> KrausSet:
    return KrausSet([u])


def _random_partial_permutation_family(d: int, m: int, rng: np.random.Generator) -> list[np.ndarray]:
    # each K_j = (partial permutation) x (complex diagonal): K^dag K is diagonal,
    # so a diagonal rescaling makes the family complete without touching supports
    ops = []
    for _ in range(m):
        perm = rng.permutation(d)
        keep = rng.random(d) < 0.8
        k = np.zeros((d, d), dtype=complex)
        cols = np.flatnonzero(keep)
        k[perm[cols], cols] = rng.standard_normal(cols.size) + 1j * rng.standard_normal(cols.size)
        ops.append(k)
    weight = sum(np.sum(np.abs(k) ** 2, axis=0) for k in ops)
    missing = weight < 1e-12
    if np.any(missing):
        fill = np.zeros((d, d), dtype=complex)
        fill[np.flatnonzero(missing), np.flatnonzero(missing)] = 1
        ops.append(fill)
        weight = weight + missing
    scale = 1 / np.sqrt(weight)
    return [k * scale for k in ops]


def _random_collapse_family(d: int, rng: np.random.Generator) -> list[np.ndarray]:
    # K_j = |r_j> (row j of an isometry W): sum_j K_j^dag K_j = W^dag W = I
    m = d + int(rng.integers(0, d + 1))
    w = random_unitary(m, rng)[:, :d]
    rows = rng.integers(0, d, size=m)
    ops = []
    for j in range(m):
        k = np.zeros((d, d), dtype=complex)
        k[rows[j], :] = w[j, :]
        ops.append(k)
    return ops


def random_incoherent_kraus(d: int, rng: np.random.Generator) -> KrausSet:
    """Random incoherent channel on a d-dimensional system.

    Mixes a partial-permutation family (dephasing, damping, incoherent
    unitaries) with a collapse family built from an isometry, then composes with
    a second draw so that operators with colliding columns also appear.
    """
    p = rng.uniform(0.2, 0.9)
    first = [np.sqrt(p) * k for k in _random_partial_permutation_family(d, int(rng.integers(1, 4)), rng)]
    first += [np.sqrt(1 - p) * k for k in _random_collapse_family(d, rng)]
    second = _random_partial_permutation_family(d, int(rng.integers(1, 3)), rng)
    ops = [b @ a for b in second for a in first]
    ops = [k for k in ops if np.max(np.abs(k)) > 1e-14]
    return KrausSet(ops)
