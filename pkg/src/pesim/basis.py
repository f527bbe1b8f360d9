"""Truncated spectral geometry: modes, eigenvalues, states, norms, transforms.

The domain is the unit box D = (0,1)^2 with depth (-1,0).  Velocity
components expand in sin(i pi x) sin(j pi y) cos(m pi z) (zero on the lateral
boundary, Neumann top/bottom); temperature in cos cos cos (Neumann
everywhere).  Each basis function is an eigenfunction of the unconstrained
diffusion operator with eigenvalue pi^2 (i^2 + j^2 + m^2); all factors are
L2-normalized so the coefficient vector is an orthonormal representation.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .engine import COS, SIN, Engine

SCHEMA_BASIS = "pesim.basis/1"


class Field(enum.Enum):
    V1 = "v1"
    V2 = "v2"
    TEMP = "T"


FIELD_CLASSES = {
    Field.V1: (SIN, SIN, COS),
    Field.V2: (SIN, SIN, COS),
    Field.TEMP: (COS, COS, COS),
}

_FIELD_ORDER = {Field.V1: 0, Field.V2: 1, Field.TEMP: 2}


@dataclass(frozen=True)
class ModeIndex:
    """Wavenumber triple plus field tag.

    Velocity fields require i, j >= 1 (sine factors vanish on the lateral
    boundary); temperature allows i, j >= 0.  m >= 0 for all fields.
    """

    i: int
    j: int
    m: int
    field: Field

    def __post_init__(self):
        lo = 0 if self.field is Field.TEMP else 1
        if self.i < lo or self.j < lo or self.m < 0:
            raise ValueError(f"inadmissible mode {self}")

    @property
    def eigenvalue(self) -> float:
        return np.pi ** 2 * (self.i ** 2 + self.j ** 2 + self.m ** 2)


class BasisMismatchError(ValueError):
    pass


class GridTooSmallError(ValueError):
    pass


@dataclass
class BasisSet:
    """Ordered truncated mode set with transforms and a quadrature rule.

    Immutable after construction; safe to share across workers.  The mode
    list is sorted by nondecreasing eigenvalue (ties broken by field and
    wavenumbers) and `eigenvalues` is aligned with it.
    """

    n_h: int
    n_z: int
    modes: tuple[ModeIndex, ...]
    eigenvalues: np.ndarray
    engine: Engine = dc_field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.engine is None:
            self.engine = Engine(self.n_h, self.n_z)
        self._field_index = {}
        self._field_shape = {
            Field.V1: (self.n_h, self.n_h, self.n_z + 1),
            Field.V2: (self.n_h, self.n_h, self.n_z + 1),
            Field.TEMP: (self.n_h + 1, self.n_h + 1, self.n_z + 1),
        }
        pos = {mode: k for k, mode in enumerate(self.modes)}
        for fld, shape in self._field_shape.items():
            lo = 0 if fld is Field.TEMP else 1
            idx = np.empty(shape, dtype=np.intp)
            for a in range(shape[0]):
                for b in range(shape[1]):
                    for c in range(shape[2]):
                        idx[a, b, c] = pos[ModeIndex(a + lo, b + lo, c, fld)]
            self._field_index[fld] = idx
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.eigenvalues.setflags(write=False)
        self._zero_mask = self.eigenvalues == 0.0

    # -- layout ------------------------------------------------------------

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def field_slice(self, fld: Field) -> np.ndarray:
        """Index array mapping the (i,j,m) box of a field into the flat vector."""
        return self._field_index[fld]

    def unpack(self, flat: np.ndarray) -> dict[Field, np.ndarray]:
        """Flat coefficients (..., n_modes) -> per-field (..., nI, nJ, nM) boxes."""
        return {fld: flat[..., idx] for fld, idx in self._field_index.items()}

    def pack(self, fields: dict[Field, np.ndarray]) -> np.ndarray:
        batch_shape = next(iter(fields.values())).shape[:-3]
        out = np.zeros(batch_shape + (self.n_modes,))
        for fld, arr in fields.items():
            idx = self._field_index[fld]
            out[..., idx.ravel()] = arr.reshape(arr.shape[:-3] + (-1,))
        return out

    def mode_position(self, mode: ModeIndex) -> int:
        lo = 0 if mode.field is Field.TEMP else 1
        return int(self._field_index[mode.field][mode.i - lo, mode.j - lo, mode.m])

    # -- quadrature rule (exact for products of four basis factors) --------

    @property
    def quadrature(self) -> dict[str, np.ndarray]:
        eng = self.engine
        return {
            "nodes_x": eng.dh.quad_nodes, "weights_x": eng.dh.quad_weights,
            "nodes_y": eng.dh.quad_nodes, "weights_y": eng.dh.quad_weights,
            "nodes_z": eng.dz.quad_nodes, "weights_z": eng.dz.quad_weights,
        }

    # -- serialization ------------------------------------------------------

    def description(self) -> dict:
        return {
            "schema": SCHEMA_BASIS,
            "domain": {"horizontal": [0.0, 1.0], "vertical": [-1.0, 0.0]},
            "N_h": self.n_h,
            "N_z": self.n_z,
            "modes": [[m.field.value, m.i, m.j, m.m] for m in self.modes],
            "eigenvalues": list(self.eigenvalues),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.description(), **kwargs)


def build_basis(n_h: int, n_z: int) -> BasisSet:
    """All admissible modes of the three fields up to the truncation.

    Rejects n_h = 0 (no velocity mode would be representable).
    """
    if int(n_h) != n_h or int(n_z) != n_z:
        raise ValueError("truncations must be integers")
    n_h, n_z = int(n_h), int(n_z)
    if n_h < 1:
        raise ValueError("N_h must be >= 1: N_h = 0 leaves no velocity mode")
    if n_z < 0:
        raise ValueError("N_z must be >= 0")

    modes = []
    for fld in (Field.V1, Field.V2):
        for i in range(1, n_h + 1):
            for j in range(1, n_h + 1):
                for m in range(0, n_z + 1):
                    modes.append(ModeIndex(i, j, m, fld))
    for i in range(0, n_h + 1):
        for j in range(0, n_h + 1):
            for m in range(0, n_z + 1):
                modes.append(ModeIndex(i, j, m, Field.TEMP))
    modes.sort(key=lambda md: (md.eigenvalue, _FIELD_ORDER[md.field], md.i, md.j, md.m))
    eig = np.array([md.eigenvalue for md in modes])
    return BasisSet(n_h, n_z, tuple(modes), eig)


@dataclass
class SpectralState:
    """Coefficient vector of Y = (v1, v2, T) on a basis, tagged with a time."""

    basis: BasisSet
    coeffs: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.n_modes,):
            raise ValueError(
                f"coefficient vector has shape {self.coeffs.shape}, "
                f"basis has {self.basis.n_modes} modes")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("non-finite coefficients")

    def copy(self) -> "SpectralState":
        return SpectralState(self.basis, self.coeffs.copy(), self.time)


def zero_state(basis: BasisSet, time: float = 0.0) -> SpectralState:
    return SpectralState(basis, np.zeros(basis.n_modes), time)


def unit_mode_state(basis: BasisSet, mode: ModeIndex, amplitude: float = 1.0,
                    time: float = 0.0) -> SpectralState:
    c = np.zeros(basis.n_modes)
    c[basis.mode_position(mode)] = amplitude
    return SpectralState(basis, c, time)


def _check_same_basis(a: SpectralState, b: SpectralState):
    ba, bb = a.basis, b.basis
    if ba is bb:
        return
    if ba.n_h != bb.n_h or ba.n_z != bb.n_z or ba.modes != bb.modes:
        raise BasisMismatchError("states live on different bases")


def inner_product(y: SpectralState, y1: SpectralState) -> float:
    """L2(O) inner product; the coefficient dot product for orthonormal modes."""
    _check_same_basis(y, y1)
    return float(np.dot(y.coeffs, y1.coeffs))


def norm_s(y: SpectralState, s: float) -> float:
    """Fractional norm sqrt(sum mu^s c^2).

    s = 0 is the L2 norm, s = 1 the V norm, s = 2 the domain-of-A norm.  For
    s < 0 the temperature zero mode (eigenvalue 0) is excluded by convention.
    """
    if not -3.0 <= s <= 3.0:
        raise ValueError("s must lie in [-3, 3]")
    mu = y.basis.eigenvalues
    c = y.coeffs
    if s == 0.0:
        val = float(np.dot(c, c))
    else:
        # masking the zero mode: excluded by convention for s < 0, and it
        # contributes nothing for s > 0 anyway
        mask = ~y.basis._zero_mask
        val = float(np.sum(mu[mask] ** s * c[mask] ** 2))
    out = float(np.sqrt(val))
    if not np.isfinite(out):
        raise FloatingPointError(f"norm_s overflowed for s = {s}")
    return out


def norms_sq_flat(basis: BasisSet, flat: np.ndarray, s: float) -> np.ndarray:
    """Batched squared fractional norm over (..., n_modes) arrays."""
    if s == 0.0:
        return np.sum(flat ** 2, axis=-1)
    mask = ~basis._zero_mask
    w = basis.eigenvalues[mask] ** s
    return np.einsum("...k,k->...", flat[..., mask] ** 2, w)


# --------------------------------------------------------------------------
# collocation transforms
# --------------------------------------------------------------------------

def _default_grid_shape(basis: BasisSet) -> tuple[int, int, int]:
    gh = max(int(np.ceil(1.5 * basis.n_h)), basis.n_h + 1)
    gz = max(int(np.ceil(1.5 * basis.n_z)), basis.n_z + 1, 1)
    return (gh, gh, gz)


def _midpoints(n: int, origin: float) -> np.ndarray:
    return origin + (np.arange(n) + 0.5) / n


@dataclass
class CollocationGrid:
    """Field values on the canonical midpoint tensor grid."""

    nodes_x: np.ndarray
    nodes_y: np.ndarray
    nodes_z: np.ndarray
    values: dict[Field, np.ndarray]
    time: float = 0.0


def to_collocation(y: SpectralState, grid_shape: tuple[int, int, int] | None = None) -> CollocationGrid:
    """Evaluate the state on a midpoint grid (>= 3/2 of the truncation per direction)."""
    basis = y.basis
    shape = _default_grid_shape(basis) if grid_shape is None else tuple(grid_shape)
    _require_dealiased(basis, shape)
    nx = _midpoints(shape[0], 0.0)
    ny = _midpoints(shape[1], 0.0)
    nz = _midpoints(shape[2], -1.0)
    fields = basis.unpack(y.coeffs)
    vals = {fld: basis.engine.to_grid(arr, FIELD_CLASSES[fld], nodes=(nx, ny, nz))
            for fld, arr in fields.items()}
    return CollocationGrid(nx, ny, nz, vals, y.time)


def from_collocation(grid: CollocationGrid, basis: BasisSet) -> SpectralState:
    """Recover the truncated state from canonical-grid samples (exact round trip)."""
    shape = (grid.nodes_x.size, grid.nodes_y.size, grid.nodes_z.size)
    _require_dealiased(basis, shape)
    eng = basis.engine
    out = {}
    for fld, vals in grid.values.items():
        classes = FIELD_CLASSES[fld]
        bw = (basis.n_h, basis.n_h, basis.n_z)
        mats = []
        for ax, (kl, b, g, orig) in enumerate(zip(classes, bw, shape, (0.0, 0.0, -1.0))):
            nodes = _midpoints(g, orig)
            d = eng.direction(ax)
            emat = d.eval_matrix(kl, b, nodes)
            mats.append(emat.T / g)
        out[fld] = np.einsum("xyz,ix,jy,kz->ijk", vals, *mats, optimize=True)
    return SpectralState(basis, basis.pack(out), grid.time)


def _require_dealiased(basis: BasisSet, shape: tuple[int, int, int]):
    need = _default_grid_shape(basis)
    if any(g < n for g, n in zip(shape, need)):
        raise GridTooSmallError(
            f"grid {shape} below the dealiasing minimum {need} for "
            f"truncation ({basis.n_h}, {basis.n_z})")
