"""Galerkin operators: diffusion, advection, rotation/pressure, projections.

Advection is evaluated in skew-symmetrized (Temam) form

    B(Y, Y1) = P_N[ (v . grad) Y1 + Phi(v) dz Y1 + (1/2)(div vbar) Y1 ],

which makes the energy-neutrality identity (B(Y,Y1), Y1) = 0 exact at any
truncation; the counterterm vanishes in the continuum limit where the
barotropic divergence is zero.  All projections are computed exactly
(midpoint analysis of the trig-polynomial products plus closed-form
sine/cosine couplings), so the structural identities hold to round-off.

The divergence constraint int_{-1}^0 div v dz = 0 is imposed weakly against
the 2D cosine pressure space; `project_barotropic` is the corresponding
discrete Leray-type projection and `solve_pb` exposes its multiplier.
"""

from __future__ import annotations

import csv
import time as _time
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import (FIELD_CLASSES, BasisSet, Field, SpectralState,
                    _check_same_basis, norms_sq_flat)
from .engine import (COS, SIN, deriv_cos_to_sin, deriv_sin_to_cos,
                     zint_bottom_cos, zint_top_sin)

_CLS_V = FIELD_CLASSES[Field.V1]
_CLS_T = FIELD_CLASSES[Field.TEMP]

DIVERGENCE_WARN_THRESHOLD = 1e-8


def _mul_classes(ca, cb):
    return tuple(COS if a == b else SIN for a, b in zip(ca, cb))


def _deriv(coeffs, classes, axis):
    """Coefficient-space partial derivative; returns (coeffs, classes)."""
    kl = classes[axis]
    ax = axis - 3
    if kl == SIN:
        out = deriv_sin_to_cos(coeffs, ax)
        new = COS
    else:
        out = deriv_cos_to_sin(coeffs, ax)
        new = SIN
    cl = list(classes)
    cl[axis] = new
    return out, tuple(cl)


# --------------------------------------------------------------------------
# linear pieces
# --------------------------------------------------------------------------

def apply_A_flat(basis: BasisSet, flat: np.ndarray) -> np.ndarray:
    return flat * basis.eigenvalues


def apply_A(y: SpectralState) -> SpectralState:
    """Mode-wise multiplication by the diffusion eigenvalue."""
    out = SpectralState(y.basis, apply_A_flat(y.basis, y.coeffs), y.time)
    _diag_row("apply_A", y, out)
    return out


def coriolis_flat(basis: BasisSet, flat: np.ndarray, f: float) -> np.ndarray:
    """f k x v: exact coefficient swap (-v2, v1) on the shared velocity modes."""
    fields = basis.unpack(flat)
    return basis.pack({
        Field.V1: -f * fields[Field.V2],
        Field.V2: f * fields[Field.V1],
        Field.TEMP: np.zeros_like(fields[Field.TEMP]),
    })


def baroclinic_flat(basis: BasisSet, flat: np.ndarray) -> np.ndarray:
    """Pressure-gradient term from the temperature column: -int_{-1}^z grad T dz'."""
    eng = basis.engine
    nh, nz = basis.n_h, basis.n_z
    t = basis.unpack(flat)[Field.TEMP]
    out_n = (nh, nh, nz)

    def component(axis):
        d = deriv_cos_to_sin(t, axis - 3)          # grad T along that axis
        sine, aff = zint_bottom_cos(d, -1)
        classes = [COS, COS, SIN]
        classes[axis] = SIN
        proj = eng.project(-sine, tuple(classes), _CLS_V, out_n)
        proj += eng.project_affine_z(-aff, tuple(classes[:2]), _CLS_V, out_n)
        return proj

    zeros_t = np.zeros(flat.shape[:-1] + basis._field_shape[Field.TEMP])
    return basis.pack({Field.V1: component(0), Field.V2: component(1),
                       Field.TEMP: zeros_t})


def baroclinic_adjoint_flat(basis: BasisSet, flat: np.ndarray) -> np.ndarray:
    """Transpose of `baroclinic_flat` (velocity coefficients -> temperature)."""
    eng = basis.engine
    nh, nz = basis.n_h, basis.n_z
    z = basis.unpack(flat)
    t_adj = np.zeros(flat.shape[:-1] + basis._field_shape[Field.TEMP])

    for axis, fld in ((0, Field.V1), (1, Field.V2)):
        classes = [COS, COS, SIN]
        classes[axis] = SIN
        zv = z[fld]
        mats = []
        for ax, (kl_in, kl_out) in enumerate(zip(classes[:2], _CLS_V[:2])):
            d = eng.direction(ax)
            n_in = nh if kl_in == SIN else nh
            mats.append(d.coupling(kl_out, nh, kl_in, n_in))
        mz = eng.dz.coupling(COS, nz, SIN, nz)
        az = eng.dz.affine_projection(COS, nz)
        # pull back through the projection: U = -(M_x^T M_y^T M_z^T) zv
        sine_adj = -np.einsum("...IJK,Ii,Jj,Km->...ijm", zv, *mats, mz, optimize=True)
        aff_adj = -np.einsum("...IJK,Ii,Jj,K->...ij", zv, *mats, az, optimize=True)
        # transpose of the bottom antiderivative, then of the derivative
        c = np.zeros(sine_adj.shape[:-1] + (nz + 1,))
        if nz >= 1:
            m = np.arange(1, nz + 1)
            c[..., 1:] = sine_adj / (m * np.pi)
        c[..., 0] = aff_adj
        k = np.arange(1, nh + 1)
        shape = list(c.shape)
        shape[axis - 3] = nh + 1
        back = np.zeros(shape)
        sl = [slice(None)] * c.ndim
        sl[axis - 3] = slice(1, None)
        kshape = [1] * c.ndim
        kshape[axis - 3] = nh
        back[tuple(sl)] = -c * (k * np.pi).reshape(kshape)
        t_adj += back

    fields = {Field.V1: np.zeros(flat.shape[:-1] + basis._field_shape[Field.V1]),
              Field.V2: np.zeros(flat.shape[:-1] + basis._field_shape[Field.V2]),
              Field.TEMP: t_adj}
    return basis.pack(fields)


# --------------------------------------------------------------------------
# barotropic constraint machinery
# --------------------------------------------------------------------------

class _PressureOps:
    """Weak-divergence operator against the 2D cosine pressure space.

    g_mat maps pressure coefficients to the L2 projection of their gradient
    onto the barotropic velocity span.  The cosine space contains spurious
    directions whose projected gradient vanishes (they impose no constraint),
    so the multiplier is defined through the min-norm pseudo-inverse: those
    directions are fixed to zero together with the constant mode.
    """

    def __init__(self, basis: BasisSet):
        nh = basis.n_h
        msc = basis.engine.dh.coupling(SIN, nh, COS, nh)  # (s_b, c_j)
        # component 1: -(i pi) delta_{a,i} (s_b, c_j); component 2 symmetric
        g1 = np.zeros((nh, nh, nh + 1, nh + 1))
        g2 = np.zeros((nh, nh, nh + 1, nh + 1))
        for a in range(1, nh + 1):
            g1[a - 1, :, a, :] = -(a * np.pi) * msc
            g2[:, a - 1, :, a] = -(a * np.pi) * msc
        g = np.concatenate([g1.reshape(nh * nh, -1), g2.reshape(nh * nh, -1)])
        keep = np.ones((nh + 1) ** 2, dtype=bool)
        keep[0] = False  # constant pressure mode fixed to zero
        self.n_h = nh
        self.g_mat = g[:, keep]
        self.keep = keep
        u, s, vt = np.linalg.svd(self.g_mat, full_matrices=False)
        rank = int(np.sum(s > s[0] * 1e-12)) if s.size else 0
        if rank < 1:  # guarded; cannot occur on the box basis
            raise RuntimeError("singular barotropic pressure solve")
        self.range_basis = u[:, :rank]          # orthonormal basis of grad range
        self._vs = vt[:rank].T / s[:rank]       # pseudo-inverse factor

    def gather(self, basis: BasisSet, flat: np.ndarray) -> np.ndarray:
        fields = basis.unpack(flat)
        u = np.concatenate([
            fields[Field.V1][..., 0].reshape(flat.shape[:-1] + (-1,)),
            fields[Field.V2][..., 0].reshape(flat.shape[:-1] + (-1,)),
        ], axis=-1)
        return u

    def weak_divergence(self, basis: BasisSet, flat: np.ndarray) -> np.ndarray:
        return self.gather(basis, flat) @ self.g_mat

    def multiplier(self, u_bar: np.ndarray) -> np.ndarray:
        """Min-norm p with G p = range-projection of u_bar."""
        return (u_bar @ self.range_basis) @ self._vs.T

    def project(self, basis: BasisSet, flat: np.ndarray):
        """Remove the gradient-range part of the barotropic block.

        Returns the projected vector and the min-norm multiplier whose
        projected gradient is the removed part.
        """
        u = self.gather(basis, flat)
        coef = u @ self.range_basis
        du = coef @ self.range_basis.T
        p = coef @ self._vs.T
        nh = self.n_h
        fields = basis.unpack(flat)
        v1 = fields[Field.V1].copy()
        v2 = fields[Field.V2].copy()
        v1[..., 0] -= du[..., :nh * nh].reshape(du.shape[:-1] + (nh, nh))
        v2[..., 0] -= du[..., nh * nh:].reshape(du.shape[:-1] + (nh, nh))
        fields[Field.V1] = v1
        fields[Field.V2] = v2
        return basis.pack(fields), p


def _pressure_ops(basis: BasisSet) -> _PressureOps:
    ops = getattr(basis, "_pressure_ops", None)
    if ops is None:
        ops = _PressureOps(basis)
        basis._pressure_ops = ops
    return ops


@dataclass
class BarotropicPressure:
    """2D cosine-mode pressure (constant mode zero) plus the post-solve residual."""

    coeffs: np.ndarray  # (n_h+1, n_h+1), entry [0,0] fixed to 0
    residual: float


def solve_pb(basis: BasisSet, rhs_bar: np.ndarray) -> BarotropicPressure:
    """Pressure making the given barotropic tendency weakly divergence-free.

    `rhs_bar` holds the sin x sin coefficients of the two vertically averaged
    tendency components, shape (2, n_h, n_h).  The tendency is corrected as
    rhs - grad p_b, so p_b solves the discrete Poisson problem with the weak
    divergence of rhs on the right-hand side.  The constant mode and the
    constraint-free (spurious) cosine directions are set to zero.
    """
    ops = _pressure_ops(basis)
    nh = basis.n_h
    rhs_bar = np.asarray(rhs_bar, dtype=float)
    if rhs_bar.shape != (2, nh, nh):
        raise ValueError(f"rhs must have shape (2, {nh}, {nh})")
    u = rhs_bar.reshape(2 * nh * nh)
    p = ops.multiplier(u)
    resid_vec = (u - p @ ops.g_mat.T) @ ops.g_mat
    scale = max(np.linalg.norm(u), 1e-300)
    coeffs = np.zeros((nh + 1) ** 2)
    coeffs[ops.keep] = p
    return BarotropicPressure(coeffs.reshape(nh + 1, nh + 1),
                              float(np.linalg.norm(resid_vec) / scale))


def project_barotropic_flat(basis: BasisSet, flat: np.ndarray):
    """Discrete Leray-type projection of the barotropic velocity block."""
    return _pressure_ops(basis).project(basis, flat)


def project_barotropic(y: SpectralState) -> SpectralState:
    out, _ = project_barotropic_flat(y.basis, y.coeffs)
    return SpectralState(y.basis, out, y.time)


def divergence_residual(y: SpectralState) -> float:
    """Weak residual of int_{-1}^0 div v dz = 0, relative to the V norm of v."""
    ops = _pressure_ops(y.basis)
    d = ops.weak_divergence(y.basis, y.coeffs)
    fields = y.basis.unpack(y.coeffs)
    vel_sq = 0.0
    for fld in (Field.V1, Field.V2):
        idx = y.basis.field_slice(fld)
        mu = y.basis.eigenvalues[idx]
        vel_sq += float(np.sum(mu * fields[fld] ** 2))
    scale = max(np.sqrt(vel_sq), 1e-300)
    return float(np.linalg.norm(d) / scale)


def split_barotropic(y: SpectralState):
    """(vertical average of v, fluctuation state).

    The average is returned as the pair of m=0 coefficient planes, shape
    (2, n_h, n_h); the fluctuation state keeps the m >= 1 velocity modes and
    zeroes the temperature (it is a velocity decomposition).
    """
    basis = y.basis
    fields = basis.unpack(y.coeffs)
    vbar = np.stack([fields[Field.V1][..., 0], fields[Field.V2][..., 0]])
    v1t = fields[Field.V1].copy()
    v2t = fields[Field.V2].copy()
    v1t[..., 0] = 0.0
    v2t[..., 0] = 0.0
    tilde = basis.pack({Field.V1: v1t, Field.V2: v2t,
                        Field.TEMP: np.zeros_like(fields[Field.TEMP])})
    return vbar, SpectralState(basis, tilde, y.time)


# --------------------------------------------------------------------------
# vertical velocity diagnostic
# --------------------------------------------------------------------------

@dataclass
class DiagnosticField:
    """Phi(v) = -int_{-1}^z div v dz': two sine-in-z parts plus, when the
    column-mean divergence is nonzero, an affine (z+1) profile per piece.

    Vanishes identically at z = -1; at z = 0 only the affine trace survives,
    and its weak projection on the pressure space vanishes after the
    barotropic projection (the pointwise trace need not).
    """

    basis: BasisSet
    sine_a: np.ndarray     # (n_h+1, n_h, n_z): classes (cos, sin, sin)
    affine_a: np.ndarray   # (n_h+1, n_h)
    sine_b: np.ndarray     # (n_h, n_h+1, n_z): classes (sin, cos, sin)
    affine_b: np.ndarray   # (n_h, n_h+1)

    def evaluate(self, nodes_x: np.ndarray, nodes_y: np.ndarray,
                 nodes_z: np.ndarray) -> np.ndarray:
        eng = self.basis.engine
        nodes = (nodes_x, nodes_y, nodes_z)
        out = eng.to_grid(self.sine_a, (COS, SIN, SIN), nodes=nodes)
        out += eng.to_grid(self.sine_b, (SIN, COS, SIN), nodes=nodes)
        zprof = nodes_z + 1.0
        ga = np.einsum("ij,xi,yj->xy", self.affine_a,
                       eng.dh.eval_matrix(COS, self.basis.n_h, nodes_x),
                       eng.dh.eval_matrix(SIN, self.basis.n_h, nodes_y))
        gb = np.einsum("ij,xi,yj->xy", self.affine_b,
                       eng.dh.eval_matrix(SIN, self.basis.n_h, nodes_x),
                       eng.dh.eval_matrix(COS, self.basis.n_h, nodes_y))
        out += (ga + gb)[:, :, None] * zprof[None, None, :]
        return out

    def top_trace_weak_residual(self) -> float:
        """Norm of the pressure-space projection of the z = 0 trace."""
        eng = self.basis.engine
        nh = self.basis.n_h
        pa = np.einsum("ij,Ii,Jj->IJ", self.affine_a,
                       np.eye(nh + 1), eng.dh.coupling(COS, nh, SIN, nh))
        pb = np.einsum("ij,Ii,Jj->IJ", self.affine_b,
                       eng.dh.coupling(COS, nh, SIN, nh), np.eye(nh + 1))
        tot = pa + pb
        tot[0, 0] = 0.0
        return float(np.linalg.norm(tot))


def vertical_velocity(y: SpectralState) -> DiagnosticField:
    """Recover the vertical velocity from incompressibility."""
    basis = y.basis
    fields = basis.unpack(y.coeffs)
    dxv1 = deriv_sin_to_cos(fields[Field.V1], -3)
    sine_a, aff_a = zint_bottom_cos(dxv1, -1)
    dyv2 = deriv_sin_to_cos(fields[Field.V2], -2)
    sine_b, aff_b = zint_bottom_cos(dyv2, -1)
    return DiagnosticField(basis, -sine_a, -aff_a, -sine_b, -aff_b)


# --------------------------------------------------------------------------
# advection (skew-symmetrized) and its first-slot adjoint
# --------------------------------------------------------------------------

def _advecting_grids(basis: BasisSet, y: np.ndarray):
    """Grids of (v1, v2, Phi_a, Phi_b, half-divergence pieces) built from y."""
    eng = basis.engine
    fields = basis.unpack(y)
    v1c, v2c = fields[Field.V1], fields[Field.V2]
    g_v1 = eng.to_grid(v1c, _CLS_V)
    g_v2 = eng.to_grid(v2c, _CLS_V)
    dx_v1 = deriv_sin_to_cos(v1c, -3)
    sa, _ = zint_bottom_cos(dx_v1, -1)
    dy_v2 = deriv_sin_to_cos(v2c, -2)
    sb, _ = zint_bottom_cos(dy_v2, -1)
    g_pa = -eng.to_grid(sa, (COS, SIN, SIN))
    g_pb = -eng.to_grid(sb, (SIN, COS, SIN))
    da = 0.5 * deriv_sin_to_cos(v1c[..., :1], -3)   # z-mean slice only
    db = 0.5 * deriv_sin_to_cos(v2c[..., :1], -2)
    g_da = eng.to_grid(da, (COS, SIN, COS))
    g_db = eng.to_grid(db, (SIN, COS, COS))
    return [
        (g_v1, _CLS_V, "dx"),
        (g_v2, _CLS_V, "dy"),
        (g_pa, (COS, SIN, SIN), "dz"),
        (g_pb, (SIN, COS, SIN), "dz"),
        (g_da, (COS, SIN, COS), "id"),
        (g_db, (SIN, COS, COS), "id"),
    ]


def temam_advection_flat(basis: BasisSet, y: np.ndarray, y1: np.ndarray) -> np.ndarray:
    """Skew-symmetrized advection of y1 by (the velocity of) y, as a dual vector."""
    eng = basis.engine
    bw = (eng.dh.grid_n - 1, eng.dh.grid_n - 1, eng.dz.grid_n - 1)
    out_n = (basis.n_h, basis.n_h, basis.n_z)
    movers = _advecting_grids(basis, y)
    fields1 = basis.unpack(y1)
    result = {}
    for fld, wc in fields1.items():
        cls_w = FIELD_CLASSES[fld]
        variants = {"id": (eng.to_grid(wc, cls_w), cls_w)}
        for key, axis in (("dx", 0), ("dy", 1), ("dz", 2)):
            dc, dcl = _deriv(wc, cls_w, axis)
            variants[key] = (eng.to_grid(dc, dcl), dcl)
        groups: dict[tuple, np.ndarray] = {}
        for g_mov, cls_mov, which in movers:
            g_w, cls_adv = variants[which]
            cls_prod = _mul_classes(cls_mov, cls_adv)
            term = g_mov * g_w
            if cls_prod in groups:
                groups[cls_prod] += term
            else:
                groups[cls_prod] = term
        acc = None
        for cls_prod, grid in groups.items():
            coeffs = eng.analyze(grid, cls_prod, bw)
            proj = eng.project(coeffs, cls_prod, cls_w, out_n)
            acc = proj if acc is None else acc + proj
        result[fld] = acc
    return basis.pack(result)


def advection_adjoint_first_flat(basis: BasisSet, y_at: np.ndarray,
                                 z: np.ndarray) -> np.ndarray:
    """Transpose of d -> B(d, y_at) paired against z.

    Only the velocity of the perturbation enters the advection, so only the
    velocity components of the returned vector are nonzero.  Derived by
    moving the derivatives off the perturbation: the horizontal-transport
    weight field, a Fubini swap of the vertical-velocity integral, and the
    vertical means generated by the skew counterterm.
    """
    eng = basis.engine
    nh, nz = basis.n_h, basis.n_z
    bw = (eng.dh.grid_n - 1, eng.dh.grid_n - 1, eng.dz.grid_n - 1)
    out_n = (nh, nh, nz)
    fy = basis.unpack(y_at)
    fz = basis.unpack(z)

    w1 = w2 = s = r = None
    for fld in (Field.V1, Field.V2, Field.TEMP):
        cls = FIELD_CLASSES[fld]
        zg = eng.to_grid(fz[fld], cls)
        yg = eng.to_grid(fy[fld], cls)
        dxg = eng.to_grid(*_deriv(fy[fld], cls, 0))
        dyg = eng.to_grid(*_deriv(fy[fld], cls, 1))
        dzg = eng.to_grid(*_deriv(fy[fld], cls, 2))
        w1 = dxg * zg if w1 is None else w1 + dxg * zg
        w2 = dyg * zg if w2 is None else w2 + dyg * zg
        s = dzg * zg if s is None else s + dzg * zg
        r = yg * zg if r is None else r + yg * zg

    v1_out = eng.project(eng.analyze(w1, (SIN, COS, COS), bw),
                         (SIN, COS, COS), _CLS_V, out_n)
    v2_out = eng.project(eng.analyze(w2, (COS, SIN, COS), bw),
                         (COS, SIN, COS), _CLS_V, out_n)

    s_coeffs = eng.analyze(s, (COS, COS, SIN), bw)
    s_tilde = zint_top_sin(s_coeffs, -1)
    r_coeffs = eng.analyze(r, (COS, COS, COS), bw)
    # drop the vertical mean of the swapped integral and add the skew term's
    # mean, both acting through horizontal gradients only
    s_tilde[..., 0] = -0.5 * r_coeffs[..., 0]
    cls_c = (COS, COS, COS)
    gx, clx = _deriv(s_tilde, cls_c, 0)
    gy, cly = _deriv(s_tilde, cls_c, 1)
    v1_out = v1_out + eng.project(gx, clx, _CLS_V, out_n)
    v2_out = v2_out + eng.project(gy, cly, _CLS_V, out_n)

    return basis.pack({
        Field.V1: v1_out,
        Field.V2: v2_out,
        Field.TEMP: np.zeros(z.shape[:-1] + basis._field_shape[Field.TEMP]),
    })


# --------------------------------------------------------------------------
# public operator surface
# --------------------------------------------------------------------------

def eval_B(y: SpectralState, y1: SpectralState) -> SpectralState:
    """Advection of y1 by y (skew form), as a coefficient vector.

    Warns when the advecting state violates the barotropic constraint: the
    energy identity stays exact by construction, but the operator then no
    longer approximates the constrained dynamics.
    """
    _check_same_basis(y, y1)
    resid = divergence_residual(y)
    if resid > DIVERGENCE_WARN_THRESHOLD:
        warnings.warn(
            f"advecting velocity violates the barotropic constraint "
            f"(weak residual {resid:.2e}); project it first", stacklevel=2)
    out = SpectralState(y.basis, temam_advection_flat(y.basis, y.coeffs, y1.coeffs),
                        y.time)
    _diag_row("eval_B", y, out, extra={"residual_in": resid})
    return out


def eval_G_flat(basis: BasisSet, flat: np.ndarray, f: float) -> np.ndarray:
    g0 = coriolis_flat(basis, flat, f) + baroclinic_flat(basis, flat)
    out, _ = project_barotropic_flat(basis, g0)
    return out


def eval_G(y: SpectralState, f_coriolis: float = 1.0) -> SpectralState:
    """Coriolis + baroclinic pressure gradient + grad p_b (constraint-neutral)."""
    out = SpectralState(y.basis, eval_G_flat(y.basis, y.coeffs, f_coriolis), y.time)
    _diag_row("eval_G", y, out)
    return out


def eval_G_pressure(y: SpectralState, f_coriolis: float = 1.0) -> BarotropicPressure:
    """The p_b accompanying eval_G: multiplier of its own tendency projection."""
    basis = y.basis
    g0 = coriolis_flat(basis, y.coeffs, f_coriolis) + baroclinic_flat(basis, y.coeffs)
    return solve_pb(basis, -_gather_bar(basis, g0))


def _gather_bar(basis: BasisSet, flat: np.ndarray) -> np.ndarray:
    fields = basis.unpack(flat)
    return np.stack([fields[Field.V1][..., 0], fields[Field.V2][..., 0]])


def g_pairing_flat(basis: BasisSet, flat: np.ndarray, f: float) -> np.ndarray:
    """(G(Y), Y) for ledger monitoring; rotation and pressure pair to zero."""
    return np.einsum("...k,...k->...", eval_G_flat(basis, flat, f), flat)


# --------------------------------------------------------------------------
# optional per-call CSV diagnostics
# --------------------------------------------------------------------------

_DIAG = {"writer": None, "handle": None}


def enable_diagnostics(path):
    handle = open(path, "w", newline="")
    writer = csv.writer(handle)
    writer.writerow(["timestamp", "operator", "in_l2", "in_v", "out_l2", "extra"])
    _DIAG["writer"] = writer
    _DIAG["handle"] = handle


def disable_diagnostics():
    if _DIAG["handle"] is not None:
        _DIAG["handle"].close()
    _DIAG["writer"] = None
    _DIAG["handle"] = None


def _diag_row(op: str, y: SpectralState, out: SpectralState, extra=None):
    w = _DIAG["writer"]
    if w is None:
        return
    in_l2 = float(np.linalg.norm(y.coeffs))
    in_v = float(np.sqrt(norms_sq_flat(y.basis, y.coeffs, 1.0)))
    out_l2 = float(np.linalg.norm(out.coeffs))
    w.writerow([_time.time(), op, repr(in_l2), repr(in_v), repr(out_l2),
                "" if extra is None else repr(extra)])
