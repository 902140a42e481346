"""Solitonic deformations of the Bismut-flat 3-sphere: parallel tensors,
the canonical eigenfunction construction, exact kernel computation, the
integral identities, and the second-order integrability obstruction with an
independent jet-based cross-check."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .frames import BadIndex, adjoint_matrix
from .harmonics import canonical_space, harmonic_basis, is_eigenfunction
from .poly import IntegralValue, JetScalar, Polynomial, as_poly, integrate_s3
from .tensors import Geometry, TensorField, obj_array, tensor, zeros
from .variational import curvature_action, operator_B, second_variation_form

MU = Fraction(2)  # Einstein constant of the unit round 3-sphere


class NotEigenfunction(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


_EYE = [[Fraction(1 if i == j else 0) for j in range(3)] for i in range(3)]
_ROUND = None


def round_geometry():
    """The Bismut-flat critical point: round unit S^3 with H = 2 dV, f = 0."""
    global _ROUND
    if _ROUND is None:
        _ROUND = Geometry(_EYE, H=2)
    return _ROUND


@dataclass
class Deformation:
    gamma: TensorField
    provenance: str = ""

    @property
    def h(self):
        return self.gamma.sym()

    @property
    def K(self):
        return -self.gamma.antisym()


def parallel_from_invariant_forms(i, j):
    """The deformation omega^L_i (x) omega^R_j, i, j in 1..3."""
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise BadIndex("form indices must be in 1..3")
    A = adjoint_matrix()
    arr = zeros((3, 3))
    for b in range(3):
        arr[i - 1, b] = A[j - 1][b]
    return Deformation(TensorField(arr), provenance=f"parallel({i},{j})")


def canonical_igsd(u):
    """gamma = 2 mu u g + hess u - (1/2) d*(uH) for an eigenfunction with lap u = -4 mu u."""
    u = as_poly(u)
    if not is_eigenfunction(u, 2):
        raise NotEigenfunction("u must satisfy lap u = -8 u on the unit sphere")
    geo = round_geometry()
    uh = TensorField(np.array([[[u * geo.H[i, j, k] for k in range(3)]
                                for j in range(3)] for i in range(3)], dtype=object))
    gamma = (2 * MU * u) * TensorField(geo.g) + geo.hessian(u) \
        - Fraction(1, 2) * geo.dstar(uh)
    return Deformation(gamma, provenance="canonical(u)")


def igsd_kernel(d):
    """Exact basis of ker B intersected with ker of the twisted divergence.

    Assembled degree-by-degree: every operator involved preserves the
    Laplace eigenspaces (frame fields commute with the Casimir), so the
    kernel splits over harmonic degrees with no truncation error.
    """
    geo = round_geometry()
    out = []
    for k in range(d + 1):
        space = canonical_space(k)
        basis_polys = harmonic_basis(k)
        block = []
        for a in range(3):
            for b in range(3):
                for phi in basis_polys:
                    arr = zeros((3, 3))
                    arr[a, b] = phi
                    block.append(TensorField(arr))
        cols = []
        for t in block:
            bt = operator_B(t, geo)
            u, v = geo.twisted_divergence(t)
            col = []
            for i in range(3):
                for j in range(3):
                    col.extend(space.coords(bt[i, j]))
            for w in (u, v):
                for i in range(3):
                    col.extend(space.coords(w[i]))
            cols.append(col)
        eqs = [[cols[j][i] for j in range(len(block))] for i in range(len(cols[0]))]
        for n, vec in enumerate(linalg.kernel_basis(eqs)):
            arr = zeros((3, 3))
            for c, t in zip(vec, block):
                if c != 0:
                    arr = arr + t.comps * c
            out.append(Deformation(TensorField(arr), provenance=f"kernel(k={k},i={n})"))
    return out


def first_order_system_check(gamma, geo=None):
    """The coupled first-order equations on h = sym(gamma), K = -antisym(gamma):

    nabla_m h_ij = -1/2 (H_mik K_jk + H_mjk K_ik),
    nabla_m K_ij = -1/2 (H_mjk h_ik - H_mik h_jk).
    """
    if geo is None:
        geo = round_geometry()
    d = Deformation(gamma if isinstance(gamma, TensorField) else TensorField(gamma))
    h, K = d.h.comps, d.K.comps
    dh = geo.covd(h, geo.gamma).comps
    dK = geo.covd(K, geo.gamma).comps
    rhs_h = -Fraction(1, 2) * (np.einsum("mia,ab,jb->mij", geo.H, geo.ginv, K)
                               + np.einsum("mja,ab,ib->mij", geo.H, geo.ginv, K))
    rhs_K = -Fraction(1, 2) * (np.einsum("mja,ab,ib->mij", geo.H, geo.ginv, h)
                               - np.einsum("mia,ab,jb->mij", geo.H, geo.ginv, h))
    return TensorField(dh) == TensorField(rhs_h) and TensorField(dK) == TensorField(rhs_K)


def equivalence_check(gamma, geo=None):
    """Evaluate the four equivalent kernel characterizations independently."""
    if geo is None:
        geo = round_geometry()
    g = gamma.gamma if isinstance(gamma, Deformation) else gamma
    if not isinstance(g, TensorField):
        g = TensorField(g)
    u, v = geo.twisted_divergence(g)
    in_slice = u.is_zero and v.is_zero
    cond_a = operator_B(g, geo).is_zero and in_slice
    cond_b = geo.mixed_covd(g).is_zero
    cond_c = first_order_system_check(g, geo)
    cond_d = second_variation_form(g, g, geo).is_zero and in_slice
    report = {
        "kernel_of_B": cond_a,
        "parallel": cond_b,
        "first_order_system": cond_c,
        "second_variation_zero": cond_d,
    }
    report["agree"] = len({cond_a, cond_b, cond_c, cond_d}) == 1
    return report


def _riemann_divergence(geo, T):
    arr = T.comps if isinstance(T, TensorField) else T
    d = geo.covd(arr, geo.gamma).comps
    return TensorField(np.einsum("mnl,mn->l", d, geo.ginv))


def integral_identities(gamma, geo=None):
    """The exact integral identities satisfied by every kernel deformation."""
    if geo is None:
        geo = round_geometry()
    d = gamma if isinstance(gamma, Deformation) else Deformation(
        gamma if isinstance(gamma, TensorField) else TensorField(gamma))
    if not geo.mixed_covd(d.gamma).is_zero:
        raise PreconditionFailed("deformation is not parallel for the mixed connection")
    h, K = d.h, d.K

    def pair(a, b):
        return integrate_s3(as_poly(geo.inner(a, b)))

    rh_h = pair(curvature_action(geo, h, bismut=False), h)
    rk_k = pair(curvature_action(geo, K, bismut=False), K)
    div_h = _riemann_divergence(geo, h)
    div_h2 = pair(div_h, div_h)
    grad_h = geo.covd(h.comps, geo.gamma)
    grad_k = geo.covd(K.comps, geo.gamma)
    nh2 = pair(grad_h, grad_h)
    nk2 = pair(grad_k, grad_k)
    rc = geo.ricci(geo.curvature(geo.gamma)).comps
    rhh = integrate_s3(as_poly(np.einsum(
        "ij,ja,ib,ab->", rc, h.comps, h.comps, geo.ginv)))
    rkk = integrate_s3(as_poly(np.einsum(
        "ij,ja,ib,ab->", rc, K.comps, K.comps, geo.ginv)))
    report = {
        "ring_h": rh_h,
        "ring_K": rk_k,
        "div_h_sq": div_h2,
        "grad_h_sq": nh2,
        "grad_K_sq": nk2,
        "ricci_hh": rhh,
        "ricci_KK": rkk,
    }
    report["chain_holds"] = (rh_h == Fraction(-1, 2) * div_h2 and rh_h == -rk_k)
    report["gradient_norms_equal"] = nh2 == nk2
    report["ricci_identity_holds"] = (rhh - div_h2 == rkk)
    return report


def _check_eigen(u):
    u = as_poly(u)
    if not is_eigenfunction(u, 2):
        raise NotEigenfunction("function must satisfy lap u = -8 u")
    return u


def obstruction(u, w):
    """The second-order integrability pairing -6 mu int u^2 w dV."""
    u, w = _check_eigen(u), _check_eigen(w)
    return IntegralValue(-6 * MU * integrate_s3(u * u * w).coeff)


@dataclass
class ObstructionReport:
    u: Polynomial
    pairings: dict = field(default_factory=dict)
    integrable_order2: bool = False


def integrability_report(u):
    u = _check_eigen(u)
    pairings = {i: obstruction(u, w) for i, w in enumerate(harmonic_basis(2))}
    return ObstructionReport(
        u=u,
        pairings=pairings,
        integrable_order2=all(v.is_zero for v in pairings.values()),
    )


def _grad_down(geo, s):
    return obj_array([geo.E(s, m) for m in range(3)])


def jet_second_variation_check(u, w):
    """Order-2 jet computation of the deformation family g_t = (1+tu)g,
    H_t = (1+2tu)H with the minimizer jet f_t.

    Asserts the first- and second-derivative formulas of every curvature
    quantity componentwise exactly, then pairs the second derivative of the
    Bakry-Emery tensor with w g + (1/(2 mu)) i_{grad w} H and compares the
    integral with the obstruction pairing. Returns a report with the exact
    residual (must be zero) and the individual formula checks.
    """
    u, w = _check_eigen(u), _check_eigen(w)
    geo0 = round_geometry()

    # minimizer jet: f' = u/2 and lap f'' = 7 mu u^2 - (7/4)|grad u|^2, mean zero
    du = _grad_down(geo0, u)
    grad_u2 = as_poly(np.einsum("m,m->", du, du))
    rhs = 7 * MU * (u * u) - Fraction(7, 4) * grad_u2
    f2 = canonical_space(4).poisson_solve(rhs)

    gj = obj_array([[JetScalar(_EYE[i][j], u * _EYE[i][j], 0) for j in range(3)]
                    for i in range(3)])
    hj = np.array([[[JetScalar(geo0.H[i, j, k], 2 * u * geo0.H[i, j, k], 0)
                     for k in range(3)] for j in range(3)] for i in range(3)],
                  dtype=object)
    fj = JetScalar(0, u * Fraction(1, 2), f2)
    geo_t = Geometry(gj, hj, fj)

    g0 = TensorField(geo0.g)
    lap_u = as_poly(-8 * u)
    hess_u = geo0.hessian(u)
    du_du = TensorField(np.einsum("i,j->ij", du, du))
    iuH = geo0.i_grad(u, geo0.H)
    hess_f2 = geo0.hessian(f2)
    if2H = geo0.i_grad(f2, geo0.H)

    rc_t = geo_t.ricci(geo_t.curvature(geo_t.gamma))
    r_t = as_poly(0) + geo_t.scalar_curvature(rc_t)
    h2_t = geo_t.h_squared()
    normh2_t = as_poly(0) + geo_t.norm_h_squared()
    hess_t = geo_t.hessian(geo_t.f)
    dstar_t = geo_t.dstar(geo_t.H)
    igrad_t = geo_t.i_grad(geo_t.f, geo_t.H)
    rchf_t = geo_t.bakry_emery(soliton_normalization=True)

    checks = {
        # first derivatives at t = 0
        "d1 Rc": rc_t.jet_part(1) == Fraction(-1, 2) * lap_u * g0
                  - Fraction(1, 2) * hess_u,
        "d1 R": r_t.c1 == -2 * lap_u - 6 * u,
        "d1 H2": h2_t.jet_part(1) == 2 * u * geo0.h_squared(),
        "d1 |H|2": normh2_t.c1 == 24 * u,
        "d1 d*H": dstar_t.jet_part(1) == Fraction(-1, 2) * iuH,
        "d1 i_gradf H": igrad_t.jet_part(1) == Fraction(1, 2) * iuH,
        # second derivatives at t = 0
        "d2 Rc": rc_t.jet_part(2) ==
                  (Fraction(1, 2) * grad_u2 - 4 * MU * u * u) * g0
                  + Fraction(3, 2) * du_du + u * hess_u,
        "d2 H2": h2_t.jet_part(2) == (-8 * MU * u * u) * g0,
        "d2 hess f": hess_t.jet_part(2) ==
                  -du_du + Fraction(1, 2) * grad_u2 * g0 + hess_f2,
        "d2 d*H": dstar_t.jet_part(2) == (4 * u) * iuH,
        "d2 i_gradf H": igrad_t.jet_part(2) == u * iuH + if2H,
        "d2 Rc^{H,f}": rchf_t.jet_part(2) ==
                  (grad_u2 - 2 * MU * u * u) * g0 + Fraction(1, 2) * du_du
                  + u * hess_u + hess_f2
                  - Fraction(5, 2) * u * iuH - Fraction(1, 2) * if2H,
    }

    gamma_w = w * g0 + (Fraction(1, 2) / MU) * geo0.i_grad(w, geo0.H)
    pairing = integrate_s3(as_poly(geo0.inner(rchf_t.jet_part(2), gamma_w)))
    residual = pairing - obstruction(u, w)
    return {
        "checks": checks,
        "all_formulas_match": all(checks.values()),
        "pairing": pairing,
        "residual": residual,
    }
