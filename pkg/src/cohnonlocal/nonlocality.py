"""Bell-type certificates for converted states.

Closed forms (Horodecki M, the projected CHSH value, the singular-value
Svetlichny bound, GME concurrence) sit next to search oracles that maximize the
same Bell expressions directly over measurement settings. The oracles use the
coordinate-ascent kernel from :mod:`._kernels` and never touch the closed forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .incoherent_ops import ConversionSpec, convert
from .qstate import (
    DensityMatrix,
    PureState,
    bipartition_schmidt_probabilities,
    eig_hermitian,
    pauli,
    pauli_basis,
    singular_values,
    tensor,
)

VIOLATION_TOL = 1e-9
UNIT_TOL = 1e-10

CHSH_BOUND = 2.0
SVETLICHNY_BOUND = 4.0
T_BOUND = 3.0
NS_BOUND = 3.0


@dataclass(frozen=True)
class MeasurementSetting:
    """Dichotomic observable ``bloch . sigma`` for a unit Bloch vector."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.bloch, dtype=float).reshape(-1)
        if v.size != 3 or not np.all(np.isfinite(v)):
            raise ValueError(f"setting must be a finite real 3-vector, got {self.bloch!r}")
        if abs(np.linalg.norm(v) - 1) > UNIT_TOL:
            raise ValueError(f"setting is not a unit vector (norm {np.linalg.norm(v):.12g})")
        object.__setattr__(self, "bloch", tuple(float(x) for x in v))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MeasurementSetting":
        return cls((np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)))

    @classmethod
    def along(cls, v) -> "MeasurementSetting":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def angles(self) -> tuple[float, float]:
        x, y, z = self.bloch
        return float(np.arccos(np.clip(z, -1.0, 1.0))), float(np.arctan2(y, x))

    def observable(self) -> np.ndarray:
        x, y, z = self.bloch
        return x * pauli(1) + y * pauli(2) + z * pauli(3)


def _setting(s) -> MeasurementSetting:
    return s if isinstance(s, MeasurementSetting) else MeasurementSetting(tuple(np.ravel(s)))


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Real Pauli correlations: ``t[n, m]`` for two qubits, ``m[i, j, k]`` for three."""

    entries: np.ndarray

    @property
    def order(self) -> int:
        return self.entries.ndim

    @property
    def unfolding(self) -> np.ndarray:
        """Matrix with rows indexed by the second party and columns by the
        (first, third) pair; for order 2 the matrix itself."""
        if self.order == 2:
            return self.entries
        return self.entries.transpose(1, 0, 2).reshape(3, 9)


@dataclass(frozen=True)
class CertificateReport:
    name: str
    value: float
    bound: float
    violated: bool
    settings: tuple[MeasurementSetting, ...] | None = None
    note: str | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "value": float(self.value),
            "bound": float(self.bound),
            "violated": bool(self.violated),
            "settings": None if self.settings is None else [list(s.angles) for s in self.settings],
        }
        if self.note is not None:
            out["note"] = self.note
        if self.detail:
            out["detail"] = self.detail
        return out


def make_report(name, value, bound, settings=None, note=None, **detail) -> CertificateReport:
    return CertificateReport(name, float(value), float(bound), bool(value > bound + VIOLATION_TOL),
                             None if settings is None else tuple(settings), note, detail)


def _require_dims(rho: DensityMatrix, dims: tuple[int, ...]):
    if tuple(rho.dims) != dims:
        raise ValueError(f"expected a state with subsystem dims {list(dims)}, got {list(rho.dims)}")


def _expect(rho: DensityMatrix, op: np.ndarray) -> float:
    return float(np.real(np.trace(rho.matrix @ op)))


# -- two qubits ---------------------------------------------------------------

def correlation_matrix(rho: DensityMatrix) -> CorrelationTensor:
    """t[n, m] = Tr(rho sigma_n x sigma_m), n, m = x, y, z."""
    _require_dims(rho, (2, 2))
    t = np.array([[_expect(rho, np.kron(pauli(n), pauli(m))) for m in (1, 2, 3)] for n in (1, 2, 3)])
    return CorrelationTensor(t)


def horodecki_M(rho: DensityMatrix) -> float:
    """Sum of the two largest eigenvalues of T^t T; CHSH is violated iff > 1."""
    t = correlation_matrix(rho).entries
    return float(np.sum(eig_hermitian(t.T @ t)[:2]))


def chsh_operator(a1, a2, b1, b2) -> np.ndarray:
    A1, A2, B1, B2 = (_setting(s).observable() for s in (a1, a2, b1, b2))
    return np.kron(A1, B1) + np.kron(A1, B2) + np.kron(A2, B1) - np.kron(A2, B2)


def chsh_value(rho: DensityMatrix, a1, a2, b1, b2) -> float:
    _require_dims(rho, (2, 2))
    return _expect(rho, chsh_operator(a1, a2, b1, b2))


def chsh_max(rho: DensityMatrix) -> float:
    return 2.0 * np.sqrt(max(horodecki_M(rho), 0.0))


# -- Bell expressions as term tables -------------------------------------------
# Each row: (coefficient, setting of party A, of party B, of party C); -1 = identity.

@dataclass(frozen=True)
class BellExpression:
    name: str
    labels: tuple[str, ...]
    party: tuple[int, ...]
    terms: tuple[tuple[float, int, int, int], ...]
    bound: float

    @property
    def coefs(self) -> np.ndarray:
        return np.array([t[0] for t in self.terms], dtype=np.float64)

    @property
    def index(self) -> np.ndarray:
        return np.ascontiguousarray([t[1:] for t in self.terms], dtype=np.int64)

    def operator(self, settings: Sequence) -> np.ndarray:
        obs = [_setting(s).observable() for s in settings]
        if len(obs) != len(self.labels):
            raise ValueError(f"{self.name} needs {len(self.labels)} settings, got {len(obs)}")
        nparty = max(self.party) + 1
        eye = np.eye(2)
        op = 0
        for coef, *ids in self.terms:
            op = op + coef * tensor(*(eye if i < 0 else obs[i] for i in ids[:nparty]))
        return op


CHSH = BellExpression(
    "chsh", ("A1", "A2", "B1", "B2"), (0, 0, 1, 1),
    ((1, 0, 2, -1), (1, 0, 3, -1), (1, 1, 2, -1), (-1, 1, 3, -1)),
    CHSH_BOUND,
)

SVETLICHNY = BellExpression(
    "svetlichny", ("A1", "A2", "B1", "B2", "C1", "C2"), (0, 0, 1, 1, 2, 2),
    ((1, 0, 2, 4), (1, 0, 2, 5), (1, 0, 3, 4), (-1, 0, 3, 5),
     (1, 1, 2, 4), (-1, 1, 2, 5), (-1, 1, 3, 4), (-1, 1, 3, 5)),
    SVETLICHNY_BOUND,
)

# settings ordered X0, X1, Y0, Y1, Z0, Z1
T_INEQUALITY = BellExpression(
    "T", ("X0", "X1", "Y0", "Y1", "Z0", "Z1"), (0, 0, 1, 1, 2, 2),
    ((1, 0, 2, -1), (1, 0, -1, 4), (1, -1, 2, 5), (-1, 1, 3, 4), (1, 1, 3, 5)),
    T_BOUND,
)

NS_INEQUALITY = BellExpression(
    "NS", ("X0", "X1", "Y0", "Y1", "Z0", "Z1"), (0, 0, 1, 1, 2, 2),
    ((1, 0, 3, -1), (1, 1, -1, 4), (1, -1, 2, 5), (1, 0, 2, 4), (-1, 1, 3, 5)),
    NS_BOUND,
)


def pauli_expectations(rho: DensityMatrix) -> np.ndarray:
    """R[mu, nu, ...] = Tr(rho sigma_mu x sigma_nu x ...), index 0 = identity."""
    n = len(rho.dims)
    if any(d != 2 for d in rho.dims) or n not in (2, 3):
        raise ValueError(f"expected two or three qubits, got dims {list(rho.dims)}")
    P = np.stack(pauli_basis())
    r = rho.matrix.reshape((2,) * (2 * n))
    if n == 2:
        out = np.einsum("abcd,mca,ndb->mn", r, P, P)
    else:
        out = np.einsum("abcdef,mda,neb,ofc->mno", r, P, P, P)
    return np.ascontiguousarray(np.real(out))


def _kernel_tensor(rho: DensityMatrix) -> np.ndarray:
    R = pauli_expectations(rho)
    if R.ndim == 2:
        R3 = np.zeros((4, 4, 4))
        R3[:, :, 0] = R
        return R3
    return R


def expression_value(rho: DensityMatrix, expr: BellExpression, settings: Sequence) -> float:
    """Value of ``expr`` through the kernel's tensor contraction (no operators)."""
    s = np.ascontiguousarray([_setting(x).bloch for x in settings], dtype=np.float64)
    return float(_kernels.evaluate(_kernel_tensor(rho), expr.coefs, expr.index, s))


def _grid_starts(resolution: int, count: int, rng: np.random.Generator) -> np.ndarray:
    theta = np.pi * (rng.integers(0, resolution, count) + 0.5) / resolution
    phi = 2 * np.pi * rng.integers(0, resolution, count) / resolution
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)


@dataclass(frozen=True)
class OracleConfig:
    """Search budget: ``restarts`` starts drawn from a ``resolution`` x
    ``resolution`` (theta, phi) grid per setting, each refined by up to
    ``sweeps`` rounds of exact single-setting updates."""

    resolution: int = 16
    restarts: int = 12
    sweeps: int = 200
    tol: float = 1e-14


def maximize_expression(R: np.ndarray, expr: BellExpression, config: OracleConfig,
                        rng: np.random.Generator) -> tuple[float, np.ndarray]:
    """Best (value, settings) over seeded restarts. Ties within 1e-12 go to the
    lexicographically smallest settings so the reduction is order independent."""
    if config.resolution < 1 or config.restarts < 1 or config.sweeps < 1:
        raise ValueError(f"invalid oracle configuration {config}")
    coefs, idx = expr.coefs, expr.index
    party = np.ascontiguousarray(expr.party, dtype=np.int64)
    best_val, best = -np.inf, None
    for _ in range(config.restarts):
        s = np.ascontiguousarray(_grid_starts(config.resolution, len(expr.labels), rng))
        val, _sw = _kernels.ascend(R, coefs, idx, party, s, config.sweeps, config.tol)
        if val > best_val + 1e-12 or (abs(val - best_val) <= 1e-12 and tuple(s.ravel()) < tuple(best.ravel())):
            best_val, best = max(val, best_val), s.copy()
    return float(best_val), best


def _oracle(rho, expr, dims, resolution, seed, config, name):
    _require_dims(rho, dims)
    cfg = config or OracleConfig(resolution=resolution)
    val, s = maximize_expression(_kernel_tensor(rho), expr, cfg, np.random.default_rng(seed))
    settings = [MeasurementSetting.along(v) for v in s]
    return make_report(name, val, expr.bound, settings)


def chsh_grid_oracle(rho: DensityMatrix, resolution: int = 16, seed: int = 0,
                     config: OracleConfig | None = None) -> CertificateReport:
    """Largest CHSH value found by settings search. Flipping A's settings
    negates the expression, so this is also the largest |<B_CHSH>|."""
    return _oracle(rho, CHSH, (2, 2), resolution, seed, config, "chsh_oracle")


# -- qudit pairs projected to two qubits ---------------------------------------

@dataclass(frozen=True)
class ProjectorPair:
    """P = P_A x P_B with P_A = (<e_alpha|; <e_beta|), P_B = (<e_gamma|; <e_lam|)."""

    alpha: int
    beta: int
    gamma: int
    lam: int
    d: int

    def __post_init__(self):
        idx = (self.alpha, self.beta, self.gamma, self.lam)
        if self.alpha == self.beta or self.gamma == self.lam:
            raise ValueError(f"projector pair needs alpha != beta and gamma != lambda, got {idx}")
        if any(i < 0 or i >= self.d for i in idx):
            raise ValueError(f"projector indices {idx} out of range for d={self.d}")

    @classmethod
    def diagonal(cls, i: int, j: int, d: int) -> "ProjectorPair":
        return cls(i, j, i, j, d)

    def matrix(self) -> np.ndarray:
        pa = np.zeros((2, self.d))
        pa[0, self.alpha] = pa[1, self.beta] = 1
        pb = np.zeros((2, self.d))
        pb[0, self.gamma] = pb[1, self.lam] = 1
        return np.kron(pa, pb)


def projected_state(rho: DensityMatrix, pair: ProjectorPair) -> tuple[float, DensityMatrix | None]:
    """Weight Tr[P rho P^dag] and the normalized two-qubit state (None if the weight vanishes)."""
    _require_dims(rho, (pair.d, pair.d))
    p = pair.matrix()
    block = p @ rho.matrix @ p.T
    w = float(np.real(np.trace(block)))
    if w <= 1e-12:
        return w, None
    block = (block + block.conj().T) / 2
    return w, DensityMatrix(block / w, (2, 2))


def projected_chsh(rho: DensityMatrix, pair: ProjectorPair) -> CertificateReport:
    """2 Tr[P rho P^dag] sqrt(M(rho~)): the largest value of the induced CHSH
    operator P^dag B P on ``rho``. Exceeding 2 certifies nonlocality of ``rho``."""
    w, sub = projected_state(rho, pair)
    ids = [pair.alpha, pair.beta, pair.gamma, pair.lam]
    if sub is None:
        return CertificateReport("projected_chsh", 0.0, CHSH_BOUND, False,
                                 note="undetectable on this subspace", detail={"pair": ids, "weight": w})
    return make_report("projected_chsh", 2 * w * np.sqrt(horodecki_M(sub)), CHSH_BOUND,
                   pair=ids, weight=w)


def theorem2_threshold(weight: float) -> float:
    """Smallest |rho_ij| above which the pair (i, j) certifies nonlocality."""
    return float(np.sqrt(max(0.0, 1 - weight**2)) / 2)


def theorem2_witness(rho_s: DensityMatrix) -> CertificateReport:
    """Scan every pair i < j of the source state for
    |rho_ij| > sqrt(1 - (rho_ii + rho_jj)^2) / 2.

    The reported value is the closed-form projected CHSH value
    2 sqrt((rho_ii + rho_jj)^2 + 4 |rho_ij|^2) of the best pair, which exceeds 2
    exactly when that condition holds.
    """
    if len(rho_s.dims) != 1 or rho_s.dim < 2:
        raise ValueError(f"expected a single qudit source state, got dims {list(rho_s.dims)}")
    m = rho_s.matrix
    best = None
    for i in range(rho_s.dim):
        for j in range(i + 1, rho_s.dim):
            w = float(np.real(m[i, i] + m[j, j]))
            c = float(abs(m[i, j]))
            val = 2 * np.sqrt(w**2 + 4 * c**2)
            if best is None or val > best[0] + 1e-15:
                best = (val, i, j, w, c)
    val, i, j, w, c = best
    return make_report("theorem2_witness", val, CHSH_BOUND, pair=[i, j], weight=w,
                   coherence=c, threshold=theorem2_threshold(w))


# -- three qubits -----------------------------------------------------------------

def correlation_tensor3(rho: DensityMatrix) -> CorrelationTensor:
    """m[i, j, k] = Tr(rho sigma_i x sigma_j x sigma_k), i, j, k = x, y, z."""
    _require_dims(rho, (2, 2, 2))
    m = np.empty((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                m[i, j, k] = _expect(rho, tensor(pauli(i + 1), pauli(j + 1), pauli(k + 1)))
    return CorrelationTensor(m)


def svetlichny_lambda1(rho: DensityMatrix) -> float:
    return float(singular_values(correlation_tensor3(rho).unfolding)[0])


def svetlichny_operator(settings: Sequence) -> np.ndarray:
    A1, A2, B1, B2, C1, C2 = (_setting(s).observable() for s in settings)
    return (tensor(A1, B1, C1 + C2) + tensor(A1, B2, C1 - C2)
            + tensor(A2, B1, C1 - C2) - tensor(A2, B2, C1 + C2))


def svetlichny_value(rho: DensityMatrix, settings: Sequence) -> float:
    """<S> for settings (A1, A2, B1, B2, C1, C2)."""
    _require_dims(rho, (2, 2, 2))
    if len(settings) != 6:
        raise ValueError(f"Svetlichny needs 6 settings, got {len(settings)}")
    return _expect(rho, svetlichny_operator(settings))


def svetlichny_oracle(rho: DensityMatrix, resolution: int = 16, seed: int = 0,
                      config: OracleConfig | None = None) -> CertificateReport:
    return _oracle(rho, SVETLICHNY, (2, 2, 2), resolution, seed, config, "svetlichny_oracle")


def svetlichny_bound(rho: DensityMatrix, resolution: int = 16, seed: int = 0,
                     config: OracleConfig | None = None) -> CertificateReport:
    """4 lambda_1 upper-bounds max |<S>|. It only permits a violation, so the
    report counts as violated when the settings search also exceeds 4."""
    lam = svetlichny_lambda1(rho)
    value = 4 * lam
    if value <= SVETLICHNY_BOUND + VIOLATION_TOL:
        return CertificateReport("svetlichny_bound", value, SVETLICHNY_BOUND, False,
                                 detail={"lambda1": lam})
    orc = svetlichny_oracle(rho, resolution, seed, config)
    return CertificateReport("svetlichny_bound", value, SVETLICHNY_BOUND, orc.violated, orc.settings,
                             detail={"lambda1": lam, "oracle_max": orc.value})


def t_reference_settings(swap: bool = False) -> tuple[MeasurementSetting, ...]:
    """X0 = Y0 = z, X1 = Y1 = x, Z0 = (z - x)/sqrt2, Z1 = (z + x)/sqrt2 (Z's
    exchanged when ``swap``)."""
    z, x = MeasurementSetting((0, 0, 1)), MeasurementSetting((1, 0, 0))
    zm, zp = MeasurementSetting.along((-1, 0, 1)), MeasurementSetting.along((1, 0, 1))
    z0, z1 = (zp, zm) if swap else (zm, zp)
    return (z, x, z, x, z0, z1)


def t_value(rho: DensityMatrix, settings: Sequence | None = None) -> float:
    """<T> for settings (X0, X1, Y0, Y1, Z0, Z1); defaults to the reference settings."""
    _require_dims(rho, (2, 2, 2))
    return _expect(rho, T_INEQUALITY.operator(settings or t_reference_settings()))


def ns_value(rho: DensityMatrix, settings: Sequence) -> float:
    """<NS> for settings (X0, X1, Y0, Y1, Z0, Z1)."""
    _require_dims(rho, (2, 2, 2))
    return _expect(rho, NS_INEQUALITY.operator(settings))


def t_certificate(rho: DensityMatrix) -> CertificateReport:
    """<T> at the reference settings and their Z-swapped partner, whichever is larger."""
    vals = [(t_value(rho, t_reference_settings(sw)), sw) for sw in (False, True)]
    val, sw = max(vals, key=lambda v: v[0])
    return make_report("T", val, T_BOUND, t_reference_settings(sw), swapped=sw)


def t_oracle(rho: DensityMatrix, resolution: int = 16, seed: int = 0,
             config: OracleConfig | None = None) -> CertificateReport:
    return _oracle(rho, T_INEQUALITY, (2, 2, 2), resolution, seed, config, "T_oracle")


def ns_oracle(rho: DensityMatrix, resolution: int = 16, seed: int = 0,
              config: OracleConfig | None = None) -> CertificateReport:
    return _oracle(rho, NS_INEQUALITY, (2, 2, 2), resolution, seed, config, "NS_oracle")


# -- genuine multipartite concurrence ------------------------------------------------

def c_gme_pure(psi: PureState) -> float:
    """min over bipartitions S|rest of sqrt(2 (1 - Tr rho_S^2))."""
    if not isinstance(psi, PureState):
        raise TypeError("c_gme_pure takes a PureState; mixed states need a convex roof")
    if len(psi.dims) < 2:
        raise ValueError(f"need at least two subsystems, got dims {list(psi.dims)}")
    # 1 - Tr rho_S^2 = 2 sum_{i<j} p_i p_j, summed pairwise to avoid cancellation
    linear = min(np.sum(np.triu(np.outer(p, p), 1)) for p in bipartition_schmidt_probabilities(psi).values())
    return float(2 * np.sqrt(max(linear, 0.0)))


def is_pure(rho: DensityMatrix, tol: float = 1e-10) -> bool:
    return abs(rho.purity() - 1) <= tol


def c_gme_converted(rho_s: DensityMatrix, n: int = 3) -> float:
    """C_gme of the fan-out image of ``rho_s`` on n parties, in closed form.

    Pure qudit sources give 2 sqrt(sum_{k<l} p_k p_l) with p the populations;
    qubit sources of any rank give 2 |rho_01|.
    """
    ConversionSpec(rho_s.dim, n)
    if len(rho_s.dims) != 1:
        raise ValueError(f"expected a single qudit source state, got dims {list(rho_s.dims)}")
    if rho_s.dim == 2:
        return float(2 * abs(rho_s.matrix[0, 1]))
    if not is_pure(rho_s):
        raise ValueError("closed form needs a pure source state for d > 2")
    p = np.real(np.diag(rho_s.matrix))
    pairs = (np.sum(p) ** 2 - np.sum(p**2)) / 2
    return float(2 * np.sqrt(max(pairs, 0.0)))


def converted_pure(psi: PureState, n: int = 3) -> PureState:
    """Fan-out image of a pure source as a state vector."""
    spec = ConversionSpec(psi.dim, n)
    stride = sum(psi.dim**k for k in range(n))
    v = np.zeros(spec.total_dim, dtype=complex)
    v[np.arange(psi.dim) * stride] = psi.amplitudes
    return PureState(v, spec.dims)


def converted(rho_s: DensityMatrix, n: int) -> DensityMatrix:
    return convert(rho_s, ConversionSpec(rho_s.dim, n))
