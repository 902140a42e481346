"""Generalized Ricci flow reduced to left-invariant data on SU(2):
dg/dt = -2 Rc + (1/2) H^2, db/dt = -d*H with H = H0 + db, integrated by RK4."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .frames import default_model
from .tensors import SingularMetric
from .variational import lambda_min


class FlowBlowup(RuntimeError):
    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


_EPS = np.zeros((3, 3, 3))
for _i, _j, _k, _s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1),
                       (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)):
    _EPS[_i, _j, _k] = _s


def _structure_constants():
    m = default_model()
    return np.array([[[float(x) for x in row] for row in plane] for plane in m.c])


_C = _structure_constants()


@dataclass
class FlowState:
    g: np.ndarray
    b: np.ndarray
    H0_coeff: float
    t: float = 0.0

    def __post_init__(self):
        self.g = np.array(self.g, dtype=float)
        self.b = np.array(self.b, dtype=float)

    def torsion(self):
        """H = H0 + db, with db computed from the structure constants."""
        return self.H0_coeff * _EPS + frame_db(self.b)

    def copy_with(self, g, b, t):
        return FlowState(g=g, b=b, H0_coeff=self.H0_coeff, t=t)


@dataclass
class Trajectory:
    samples: list = field(default_factory=list)  # (t, FlowState, lambda, residual)

    def times(self):
        return [s[0] for s in self.samples]

    def lambdas(self):
        return [s[2] for s in self.samples]

    def residuals(self):
        return [s[3] for s in self.samples]


def frame_db(b):
    """Exterior derivative of an invariant 2-form in the invariant frame.

    (db)_{ijk} = -c^m_{ij} b_{mk} + c^m_{ik} b_{mj} - c^m_{jk} b_{mi}.
    For SU(2) with c^k_{ij} = 2 eps_{ijk} this vanishes identically, but the
    formula is kept general.
    """
    t1 = np.einsum("ijm,mk->ijk", _C, b)
    t2 = np.einsum("ikm,mj->ijk", _C, b)
    t3 = np.einsum("jkm,mi->ijk", _C, b)
    return -t1 + t2 - t3


def _lc_gamma(g, ginv):
    """Levi-Civita symbols of an invariant metric (no derivative terms)."""
    a = (np.einsum("mip,pk->mik", _C, g)
         - np.einsum("mkp,ip->mik", _C, g)
         - np.einsum("ikp,mp->mik", _C, g)) / 2.0
    return np.einsum("mik,pk->mip", a, ginv)


def _curvature(gamma, g):
    """Lowered curvature of a connection symbol array (invariant data)."""
    coef = (np.einsum("jkm,iml->ijkl", gamma, gamma)
            - np.einsum("ikm,jml->ijkl", gamma, gamma)
            - np.einsum("ijm,mkl->ijkl", _C, gamma))
    return np.einsum("ijkp,pl->ijkl", coef, g)


def _covd3(gamma, H):
    """Covariant derivative of an invariant 3-tensor, derivative index first."""
    return -(np.einsum("mip,pjk->mijk", gamma, H)
             + np.einsum("mjp,ipk->mijk", gamma, H)
             + np.einsum("mkp,ijp->mijk", gamma, H))


def curvature_quantities(g, H):
    """Rc, H^2, d*H, Rc+ for invariant (g, H), all as frame matrices."""
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(str(exc)) from exc
    gamma = _lc_gamma(g, ginv)
    rc = np.einsum("ijkl,il->jk", _curvature(gamma, g), ginv)
    h2 = np.einsum("ipq,jrs,pr,qs->ij", H, H, ginv, ginv)
    dstar_h = -np.einsum("mnjk,mn->jk", _covd3(gamma, H), ginv)
    hup = np.einsum("mik,pk->mip", H, ginv)
    rcp = np.einsum("ijkl,il->jk", _curvature(gamma + hup / 2.0, g), ginv)
    return {"Rc": rc, "H2": h2, "dstarH": dstar_h, "Rc+": rcp, "ginv": ginv}


def grf_rhs(state):
    """Right side (dg/dt, db/dt) of the flow, checked against the -2 Rc+ path."""
    eig = np.linalg.eigvalsh(state.g)
    if eig.min() <= 0:
        raise SingularMetric("metric is not positive definite")
    H = state.torsion()
    q = curvature_quantities(state.g, H)
    dg = -2.0 * q["Rc"] + 0.5 * q["H2"]
    db = -q["dstarH"]
    return dg, db


def dual_path_residual(state):
    """Max-norm of (dg - db) + 2 Rc+, which must vanish identically."""
    H = state.torsion()
    q = curvature_quantities(state.g, H)
    dg = -2.0 * q["Rc"] + 0.5 * q["H2"]
    db = -q["dstarH"]
    return float(np.abs((dg - db) + 2.0 * q["Rc+"]).max())


def soliton_residual(state):
    """Frobenius norm of Rc - H^2/4 plus the norm of d*H (constant f)."""
    H = state.torsion()
    q = curvature_quantities(state.g, H)
    return float(np.linalg.norm(q["Rc"] - q["H2"] / 4.0) + np.linalg.norm(q["dstarH"]))


def flow_lambda(state, degree=0):
    """lambda of the current state via the exact eigenproblem assembly.

    The potential of invariant data is constant, so degree 0 is exact.
    """
    g = [[Fraction(float(x)) for x in row] for row in state.g]
    H = state.torsion()
    h = np.empty((3, 3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                h[i, j, k] = Fraction(float(H[i, j, k]))
    return lambda_min(g, h, degree).value


def step_rk4(state, dt):
    """One classical fourth-order Runge-Kutta step."""
    g0, b0, t0 = state.g, state.b, state.t

    def rhs(g, b):
        return grf_rhs(state.copy_with(g, b, t0))

    k1g, k1b = rhs(g0, b0)
    k2g, k2b = rhs(g0 + dt / 2 * k1g, b0 + dt / 2 * k1b)
    k3g, k3b = rhs(g0 + dt / 2 * k2g, b0 + dt / 2 * k2b)
    k4g, k4b = rhs(g0 + dt * k3g, b0 + dt * k3b)
    g = g0 + dt / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
    b = b0 + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
    return state.copy_with(g, b, t0 + dt)


def run_flow(initial, dt, steps, sample_every=1, lambda_degree=0):
    """Integrate the flow, sampling (t, state, lambda, soliton residual)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    traj = Trajectory()
    state = initial

    def sample(s):
        traj.samples.append((s.t, s, flow_lambda(s, lambda_degree), soliton_residual(s)))

    sample(state)
    for n in range(1, steps + 1):
        try:
            state = step_rk4(state, dt)
        except SingularMetric:
            raise FlowBlowup(f"metric degenerated at step {n}", traj)
        if np.linalg.eigvalsh(state.g).min() < 1e-10:
            raise FlowBlowup(f"metric degenerated at step {n}", traj)
        if n % sample_every == 0 or n == steps:
            sample(state)
    return traj
