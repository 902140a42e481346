"""The lambda functional, its first variation, the linearization operators
A and B, the Bianchi and Phi operators, and the second-variation form."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import linalg
from .harmonics import canonical_space
from .poly import IntegralValue, Polynomial, as_poly, integrate_s3
from .tensors import Geometry, TensorField, obj_array, tensor, zeros


class SolverError(RuntimeError):
    pass


class InconsistentSource(RuntimeError):
    pass


@dataclass
class LambdaResult:
    value: float
    f: Polynomial
    residual: float

    @property
    def minimizer(self):
        return self.f


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _as_geometry(g, H, f=0):
    if isinstance(g, Geometry):
        return g
    return Geometry(g, H, f)


def schrodinger_potential(geo):
    """The scalar potential R - |H|^2 / 12 of the lambda eigenproblem."""
    suite_r = geo.scalar_curvature(geo.ricci(geo.curvature(geo.gamma)))
    return as_poly(suite_r) - Fraction(1, 12) * as_poly(geo.norm_h_squared())


def lambda_min(g, H, degree=2):
    """Smallest eigenvalue of -4 lap_g + (R - |H|^2/12) on polynomials of degree <= d.

    The matrix of the operator in the harmonic basis is assembled exactly;
    only the final symmetric generalized eigensolve is floating point. The
    minimizer is returned as f = -log(psi^2) for the normalized ground state
    psi, expanded to second order around its mean (exact when psi is constant).
    """
    geo = _as_geometry(g, H)
    space = canonical_space(degree)
    V = schrodinger_potential(geo)
    n = space.dim
    a = [[Fraction(0)] * n for _ in range(n)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for i, phi in enumerate(space.basis):
        lap = np.einsum("mn,mn->", geo.ginv, geo.hessian(phi).comps)
        op = Fraction(-4) * as_poly(lap) + V * phi
        for j, psi in enumerate(space.basis):
            a[i][j] = integrate_s3(op * psi).coeff
            m[i][j] = integrate_s3(phi * psi).coeff
    A = np.array([[float(x) for x in row] for row in a])
    M = np.array([[float(x) for x in row] for row in m])
    A = (A + A.T) / 2
    M = (M + M.T) / 2
    try:
        w, vecs = scipy.linalg.eigh(A, M)
    except scipy.linalg.LinAlgError as exc:
        raise SolverError(str(exc)) from exc
    lam = float(w[0])
    c = vecs[:, 0]
    residual = float(np.linalg.norm(A @ c - lam * (M @ c)) / np.linalg.norm(c))
    # normalize int psi^2 dV_g = 1 and fix the overall sign
    detg = float(_det3([[float(x.constant_value()) if x.is_constant else float("nan")
                         for x in row] for row in geo.g]))
    vol_factor = math.sqrt(detg) * math.pi**2
    norm2 = float(c @ (M @ c)) * vol_factor
    c = c / math.sqrt(norm2)
    if sum(c) < 0:
        c = -c
    c = np.where(np.abs(c) < 1e-12, 0.0, c)
    psi = Polynomial.zero()
    for ci, phi in zip(c, space.basis):
        if ci != 0.0:
            psi = psi + Fraction(float(ci)) * phi
    psi2 = psi * psi
    mean = Fraction(0)
    rest = {}
    for e, cf in psi2.terms.items():
        if sum(e) == 0:
            mean = cf
        else:
            rest[e] = cf
    if mean <= 0:
        raise SolverError("ground state has nonpositive mean square")
    q = Polynomial(rest) * (Fraction(1) / mean)
    f = Polynomial.constant(Fraction(-math.log(float(mean)))) - q + q * q * Fraction(1, 2)
    return LambdaResult(value=lam, f=f, residual=residual)


def _constant_weight(geo):
    """e^{-f} sqrt(det g) for constant f and constant metric, as a float."""
    if not geo.f.is_constant:
        raise ValueError("exact weighting implemented for constant f")
    detg = _det3([[x.constant_value() for x in row] for row in geo.g])
    return math.exp(-float(geo.f.constant_value())) * math.sqrt(float(detg))


def first_variation(g, H, f, gamma):
    """d lambda / dt along gamma: the pairing -int <gamma, Rc^{H,f}> e^{-f} dV_g."""
    geo = _as_geometry(g, H, f)
    rchf = geo.bakry_emery(soliton_normalization=True)
    s = geo.inner(gamma, rchf)
    if geo.f.is_constant:
        return float(integrate_s3(as_poly(s)).coeff) * (-math.pi**2) * _constant_weight(geo)
    # near-constant f: expand the weight to fourth order around the mean
    c = geo.f.terms.get((0, 0, 0, 0), Fraction(0))
    phi = geo.f - Polynomial.constant(c)
    w = Polynomial.constant(1)
    term = Polynomial.constant(1)
    for k in range(1, 5):
        term = term * phi * Fraction(-1, k)
        w = w + term
    detg = _det3([[x.constant_value() for x in row] for row in geo.g])
    scale = math.exp(-float(c)) * math.sqrt(float(detg))
    return float(integrate_s3(as_poly(s) * w).coeff) * (-math.pi**2) * scale


def first_variation_exact(geo, gamma):
    """Exact unweighted pairing -int <gamma, Rc^{H,f}> dV (constant f dropped)."""
    rchf = geo.bakry_emery(soliton_normalization=True)
    return -integrate_s3(as_poly(geo.inner(gamma, rchf)))


def curvature_action(geo, gamma, bismut=True):
    """R-ring action: (R(gamma))_{jk} = R_{ijkl} gamma^{il} with Rm or Rm+."""
    rm = geo.curvature(geo.gamma_p if bismut else geo.gamma).comps
    arr = gamma.comps if isinstance(gamma, TensorField) else gamma
    return TensorField(np.einsum("ijkl,ia,lb,ab->jk", rm, geo.ginv, geo.ginv, arr))


def operator_B(gamma, geo):
    """B(gamma) = -1/2 mixed Laplacian - Bismut curvature action."""
    return Fraction(-1, 2) * geo.mixed_laplacian(gamma) - curvature_action(geo, gamma, bismut=True)


def _poisson_solve_f(geo, rhs, degree):
    """Mean-zero u with laplacian u = rhs; constant f only (drift term vanishes)."""
    if not geo.f.is_constant:
        raise ValueError("the u-solve is implemented for constant f")
    rhs = as_poly(rhs)
    space = canonical_space(max(degree, rhs.degree()))
    coords = space.coords(rhs)
    for c, ev in zip(coords, space.eigenvalue):
        if ev == 0 and c != 0:
            raise InconsistentSource("divergence source has a nonzero mean component")
    return space.poisson_solve(rhs)


def operator_A(gamma, geo, degree=4):
    """A(gamma) = B(gamma) - 1/2 div*_f div_f gamma - 1/2 (nabla+)^2 u.

    u is the exact mean-zero solution of laplacian_f u = pair divergence of
    the twisted divergence of gamma.
    """
    pair = geo.twisted_divergence(gamma)
    out = operator_B(gamma, geo)
    out = out - Fraction(1, 2) * geo.divergence_adjoint(pair)
    rhs = geo.pair_divergence(pair)
    u = _poisson_solve_f(geo, rhs, degree)
    out = out - Fraction(1, 2) * geo.hessian_conn(u, geo.gamma_p)
    return out


def bianchi(gamma, geo):
    """The Bianchi operator: the pair of f-twisted divergences of gamma."""
    return geo.twisted_divergence(gamma)


def _div_f_2tensor(geo, T):
    arr = T.comps if isinstance(T, TensorField) else T
    d = geo.covd(arr, geo.gamma).comps
    out = np.einsum("mnl,mn->l", d, geo.ginv)
    out = out - np.einsum("m,ml->l", geo.grad_up(geo.f), arr)
    return out


def bianchi_contracted_check(g, H, f):
    """Residual of div_f(Rc - H^2/4 + hess f) - grad(R^{H,f})/2 - <d*_f H, H>/4.

    Must vanish identically for every (g, H, f); returned as a rank-1 field.
    """
    geo = _as_geometry(g, H, f)
    rc = geo.ricci(geo.curvature(geo.gamma))
    s = rc - Fraction(1, 4) * geo.h_squared() + geo.hessian(geo.f)
    lhs = _div_f_2tensor(geo, s)
    rhf = geo.generalized_scalar()
    grad_r = obj_array([geo.E(rhf, m) for m in range(3)])
    dsf = geo.dstar_f(geo.H).comps
    hterm = np.einsum("ab,lcd,ac,bd->l", dsf, geo.H, geo.ginv, geo.ginv)
    return TensorField(lhs - grad_r * Fraction(1, 2) - hterm * Fraction(1, 4))


def phi_operator(pair, geo):
    """Phi(u, v) = (-1/2 lap+_f u, -1/2 lap-_f v) on 1-form pairs."""
    u, v = pair

    def lap_pm(w, sign):
        arr = w.comps if isinstance(w, TensorField) else w
        base = geo.rough_laplacian_f(arr).comps
        d = geo.covd(arr, geo.gamma).comps
        t1 = np.einsum("abl,am,bk,mk->l", geo.H, geo.ginv, geo.ginv, d)
        h2 = geo.h_squared().comps
        t2 = np.einsum("jl,ja,a->l", h2, geo.ginv, arr)
        return TensorField(base + sign * t1 - Fraction(1, 4) * t2)

    return (Fraction(-1, 2) * lap_pm(u, 1), Fraction(-1, 2) * lap_pm(v, -1))


def phi_relation_check(gamma, geo):
    """Residual pair of the identity Bianchi(B(gamma)) = Phi(twisted divergence)."""
    lhs = bianchi(operator_B(gamma, geo), geo)
    rhs = phi_operator(geo.twisted_divergence(gamma), geo)
    return (lhs[0] - rhs[0], lhs[1] - rhs[1])


def second_variation_form(gamma1, gamma2, geo, degree=4):
    """The quadratic form -(gamma1, A gamma2), an exact multiple of pi^2.

    Computed with the unweighted round measure; geo.f must be constant (the
    constant weight rescales the form without changing kernel or sign).
    """
    a2 = operator_A(gamma2, geo, degree)
    return -integrate_s3(as_poly(geo.inner(gamma1, a2)))


@dataclass
class OperatorMatrix:
    basis: list
    entries: list  # exact Fractions, coefficients of pi^2

    @property
    def dim(self):
        return len(self.basis)

    @property
    def is_symmetric(self):
        e = self.entries
        return all(e[i][j] == e[j][i] for i in range(self.dim) for j in range(self.dim))

    def eigenvalues(self):
        m = np.array([[float(x) for x in row] for row in self.entries])
        return np.linalg.eigvalsh((m + m.T) / 2)


class TensorSpace:
    """Exact coordinates on rank-2 tensors with coefficients of degree <= d."""

    def __init__(self, d):
        self.d = d
        self.space = canonical_space(d)
        self.n = self.space.dim
        self.dim = 9 * self.n

    def basis_tensor(self, a, b, idx):
        arr = zeros((3, 3))
        arr[a, b] = self.space.basis[idx]
        return TensorField(arr)

    def basis(self):
        return [self.basis_tensor(a, b, i)
                for a in range(3) for b in range(3) for i in range(self.n)]

    def coords(self, T):
        arr = T.comps if isinstance(T, TensorField) else T
        out = []
        for a in range(3):
            for b in range(3):
                out.extend(self.space.coords(arr[a, b]))
        return out

    def from_coords(self, vec):
        arr = zeros((3, 3))
        for a in range(3):
            for b in range(3):
                block = vec[(3 * a + b) * self.n:(3 * a + b + 1) * self.n]
                arr[a, b] = self.space.from_coords(block)
        return TensorField(arr)

    def pair_coords(self, pair):
        """Coordinates of a pair of 1-forms, length 6 * n."""
        out = []
        for w in pair:
            arr = w.comps if isinstance(w, TensorField) else w
            for a in range(3):
                out.extend(self.space.coords(arr[a]))
        return out

    def degree_indices(self):
        """Tensor-coordinate indices grouped by the harmonic degree of the coefficient."""
        groups = {}
        pos = 0
        for a in range(3):
            for b in range(3):
                for i, ev in enumerate(self.space.eigenvalue):
                    k = 0
                    while Fraction(-k * (k + 2)) != ev:
                        k += 1
                    groups.setdefault(k, []).append(pos)
                    pos += 1
        return groups


def second_variation_matrix(basis, geo, degree=4):
    """Exact Gram matrix of the second-variation form on the given basis."""
    images = [operator_A(b, geo, degree) for b in basis]
    n = len(basis)
    entries = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            entries[i][j] = -integrate_s3(as_poly(geo.inner(basis[i], images[j]))).coeff
    return OperatorMatrix(basis=basis, entries=entries)


def slice_tangent_basis(geo, d):
    """Exact basis of {gamma : twisted divergence = 0} at degree <= d."""
    ts = TensorSpace(d)
    basis = ts.basis()
    rows = []
    for b in basis:
        rows.append(ts.pair_coords(geo.twisted_divergence(b)))
    # rows currently index basis vectors; transpose to get equations
    eqs = [[rows[j][i] for j in range(len(basis))] for i in range(len(rows[0]))]
    kernel = linalg.kernel_basis(eqs)
    return [ts.from_coords(v) for v in kernel]
