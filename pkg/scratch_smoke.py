"""Development smoke checks for the exact-transform machinery."""
import numpy as np

from pesim import basis as B
from pesim import operators as O
from pesim.engine import COS, SIN

rng = np.random.default_rng(0)

bs = B.build_basis(2, 2)
print("n_modes:", bs.n_modes)

# eigenvalue examples
b1 = B.build_basis(1, 0)
vel = [m for m in b1.modes if m.field in (B.Field.V1, B.Field.V2)]
tem = [m for m in b1.modes if m.field is B.Field.TEMP]
print("N_h=1,N_z=0 velocity modes per comp:", len(vel) // 2, "temp:", len(tem))
print("velocity eigenvalue:", vel[0].eigenvalue, "expect", 2 * np.pi ** 2)

# discrete orthogonality of the analysis
eng = bs.engine
for kl in (SIN, COS):
    for d in (eng.dh, eng.dz):
        n = d.grid_n - 1
        E = d.eval_matrix(kl, n)
        G = E.T @ E / d.grid_n
        err = np.max(np.abs(G - np.eye(G.shape[0])))
        print("orthogonality", kl, d.origin, err)

# quadrature check: orthonormality of tensor basis functions via the rule
y = B.SpectralState(bs, rng.standard_normal(bs.n_modes))
y1 = B.SpectralState(bs, rng.standard_normal(bs.n_modes))
qx, qy, qz = eng.quad_grid()
fields_y = bs.unpack(y.coeffs)
fields_y1 = bs.unpack(y1.coeffs)
ip = 0.0
for fld in B.Field:
    gy = eng.to_grid(fields_y[fld], B.FIELD_CLASSES[fld], nodes=(qx, qy, qz))
    gy1 = eng.to_grid(fields_y1[fld], B.FIELD_CLASSES[fld], nodes=(qx, qy, qz))
    ip += eng.quad_integral(gy * gy1)
print("parseval vs quadrature:", abs(ip - B.inner_product(y, y1)))

# round trip
g = B.to_collocation(y)
y_back = B.from_collocation(g, bs)
print("round trip:", np.max(np.abs(y_back.coeffs - y.coeffs)))

# projection + antisymmetry of the advection form
yp = O.project_barotropic(y)
print("div residual before/after:", O.divergence_residual(y), O.divergence_residual(yp))
bv = O.temam_advection_flat(bs, yp.coeffs, y1.coeffs)
pair = float(np.dot(bv, y1.coeffs))
import math
scale = B.norm_s(yp, 1) * B.norm_s(y1, 1) ** 2
print("antisymmetry pairing:", abs(pair) / scale)

# antisymmetry even for unprojected y (skew form is exact):
bv2 = O.temam_advection_flat(bs, y.coeffs, y1.coeffs)
print("antisym unprojected:", abs(np.dot(bv2, y1.coeffs)) / scale)

# bilinearity zero cases
z = np.zeros(bs.n_modes)
print("B(0,y1):", np.max(np.abs(O.temam_advection_flat(bs, z, y1.coeffs))))
print("B(y,0):", np.max(np.abs(O.temam_advection_flat(bs, y.coeffs, z))))

# adjoint-first identity: (B(d, y), z) == (d, adj(y, z))
d = rng.standard_normal(bs.n_modes)
zv = rng.standard_normal(bs.n_modes)
lhs = np.dot(O.temam_advection_flat(bs, d, yp.coeffs), zv)
rhs = np.dot(d, O.advection_adjoint_first_flat(bs, yp.coeffs, zv))
print("adjoint-first:", abs(lhs - rhs) / max(abs(lhs), 1e-12))

# skewness in last two args => (B(y, z))^T pairing
lhs2 = np.dot(O.temam_advection_flat(bs, yp.coeffs, d), zv)
rhs2 = -np.dot(O.temam_advection_flat(bs, yp.coeffs, zv), d)
print("middle-slot skew:", abs(lhs2 - rhs2) / max(abs(lhs2), 1e-12))

# baroclinic adjoint identity
lhs3 = np.dot(O.baroclinic_flat(bs, y.coeffs), zv)
rhs3 = np.dot(y.coeffs, O.baroclinic_adjoint_flat(bs, zv))
print("baroclinic adjoint:", abs(lhs3 - rhs3) / max(abs(lhs3), 1e-12))

# coriolis antisymmetry
print("coriolis pairing:", abs(np.dot(O.coriolis_flat(bs, y.coeffs, 1.3), y.coeffs)))

# pressure orthogonality: (grad pb, v) = 0 for projected v
g0 = O.coriolis_flat(bs, yp.coeffs, 1.0) + O.baroclinic_flat(bs, yp.coeffs)
gproj, p = O.project_barotropic_flat(bs, g0)
print("eval_G vs manual:", np.max(np.abs(gproj - O.eval_G_flat(bs, yp.coeffs, 1.0))))
# (G(Y), Y) should equal the baroclinic pairing alone
pair_g = np.dot(O.eval_G_flat(bs, yp.coeffs, 1.0), yp.coeffs)
pair_bc = np.dot(O.baroclinic_flat(bs, yp.coeffs), yp.coeffs)
print("(G,Y) vs baroclinic pairing:", abs(pair_g - pair_bc))

# solve_pb gradient recovery: rhs = projection of grad q (modulo constraint-free
# directions); single non-spurious mode recovered exactly
ops = O._pressure_ops(bs)
qcoef = rng.standard_normal(ops.g_mat.shape[1])
u = ops.g_mat @ qcoef
nh = bs.n_h
rhs = np.stack([u[:nh * nh].reshape(nh, nh), u[nh * nh:].reshape(nh, nh)])
pb = O.solve_pb(bs, rhs)
rec = pb.coeffs.reshape(-1)[ops.keep]
print("solve_pb gauge recovery:", np.max(np.abs(ops.g_mat @ rec - ops.g_mat @ qcoef)),
      "residual:", pb.residual)
q_single = np.zeros((nh + 1) ** 2)
q_single[(nh + 1) * 1 + 0] = 1.0   # mode (1,0)
u2 = ops.g_mat @ q_single[ops.keep]
rhs2_arr = np.stack([u2[:nh * nh].reshape(nh, nh), u2[nh * nh:].reshape(nh, nh)])
pb2 = O.solve_pb(bs, rhs2_arr)
print("solve_pb single-mode recovery:", abs(pb2.coeffs[1, 0] - 1.0),
      np.max(np.abs(pb2.coeffs - np.where(np.arange((nh+1)**2).reshape(nh+1,nh+1) == (nh+1), 1.0, 0.0))))

# vertical velocity: single mode (1,1,1) closed form vs z-quadrature
mode = B.ModeIndex(1, 1, 1, B.Field.V1)
ym = B.unit_mode_state(b1_2 := B.build_basis(2, 2), mode, 1.0)
phi = O.vertical_velocity(ym)
nzq = np.linspace(-1, 0, 7)
nxq = np.array([0.3])
nyq = np.array([0.7])
vals = phi.evaluate(nxq, nyq, nzq)
# oracle: Phi = -int_-1^z d/dx [sqrt8 sin(pi x) sin(pi y) cos(pi z)] dz
from scipy.integrate import quad
for iz, zv_ in enumerate(nzq):
    val, _ = quad(lambda zp: -np.sqrt(8) * np.pi * np.cos(np.pi * 0.3) *
                  np.sin(np.pi * 0.7) * np.cos(np.pi * zp), -1, zv_)
    assert abs(val - vals[0, 0, iz]) < 1e-12, (val, vals[0, 0, iz])
print("vertical velocity closed form ok; bottom value:",
      abs(phi.evaluate(nxq, nyq, np.array([-1.0]))[0, 0, 0]))
