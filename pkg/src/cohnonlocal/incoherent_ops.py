"""Conversion operations: CNOT, the multi-qudit fan-out permutation, and generic
channel application."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coherence import KrausSet
from .qstate import DensityMatrix

MAX_FANOUT_DIM = 10**4


@dataclass(frozen=True)
class ConversionSpec:
    """Source qudit dimension ``d`` and total party count ``n`` (source plus
    ``n - 1`` ancillas prepared in |0>)."""

    d: int
    n: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")

    @property
    def total_dim(self) -> int:
        return self.d**self.n

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.d,) * self.n


def fanout_unitary(spec: ConversionSpec) -> np.ndarray:
    """Permutation |i, j, ..., k> -> |i, i+j mod d, ..., i+k mod d>."""
    d, n = spec.d, spec.n
    if spec.total_dim > MAX_FANOUT_DIM:
        raise ValueError(f"d**n = {spec.total_dim} exceeds the explicit-unitary cap {MAX_FANOUT_DIM}")
    digits = np.indices(spec.dims).reshape(n, -1)
    out = digits.copy()
    out[1:] = (digits[0] + digits[1:]) % d
    cols = np.ravel_multi_index(tuple(digits), spec.dims)
    rows = np.ravel_multi_index(tuple(out), spec.dims)
    u = np.zeros((spec.total_dim, spec.total_dim))
    u[rows, cols] = 1
    return u


def cnot() -> np.ndarray:
    return fanout_unitary(ConversionSpec(2, 2))


def _ancilla_padded(rho_s: DensityMatrix, spec: ConversionSpec) -> np.ndarray:
    anc = np.zeros((spec.d ** (spec.n - 1),) * 2)
    anc[0, 0] = 1
    return np.kron(rho_s.matrix, anc)


def convert_by_conjugation(rho_s: DensityMatrix, spec: ConversionSpec) -> DensityMatrix:
    """U (rho_s x |0..0><0..0|) U^dag with the explicit fan-out matrix."""
    _check_source(rho_s, spec)
    u = fanout_unitary(spec)
    return DensityMatrix(u @ _ancilla_padded(rho_s, spec) @ u.T, spec.dims)


def _check_source(rho_s: DensityMatrix, spec: ConversionSpec):
    if rho_s.dim != spec.d:
        raise ValueError(f"source state has dimension {rho_s.dim}, spec expects d={spec.d}")


def convert(rho_s: DensityMatrix, spec: ConversionSpec, check: bool = False) -> DensityMatrix:
    """sum_ij rho_ij |i...i><j...j| on ``spec.n`` qudits.

    With ``check=True`` the result is compared against explicit conjugation by
    the fan-out unitary.
    """
    _check_source(rho_s, spec)
    d, n = spec.d, spec.n
    stride = sum(d**k for k in range(n))
    pos = np.arange(d) * stride
    out = np.zeros((d**n, d**n), dtype=complex)
    out[np.ix_(pos, pos)] = rho_s.matrix
    result = DensityMatrix(out, spec.dims)
    if check:
        ref = convert_by_conjugation(rho_s, spec)
        err = np.max(np.abs(ref.matrix - result.matrix))
        assert err <= 1e-12, f"closed-form conversion disagrees with conjugation by {err:.3e}"
    return result


def apply_channel(kraus: KrausSet, rho: DensityMatrix) -> DensityMatrix:
    """sum_j K_j rho K_j^dag."""
    if kraus.in_dim != rho.dim:
        raise ValueError(f"channel input dimension {kraus.in_dim} does not match state dimension {rho.dim}")
    out = sum(k @ rho.matrix @ k.conj().T for k in kraus.operators)
    out = (out + out.conj().T) / 2
    dims = rho.dims if kraus.out_dim == rho.dim else (kraus.out_dim,)
    return DensityMatrix(out, dims)
