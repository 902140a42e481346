"""Laplace eigenspaces on S^3 and exact coordinates in the harmonic basis."""

from fractions import Fraction
from functools import lru_cache

from . import linalg
from .frames import laplacian_scalar
from .poly import Polynomial, as_poly


def _homogeneous_exponents(k):
    out = []
    for a1 in range(k + 1):
        for a2 in range(k + 1 - a1):
            for a3 in range(k + 1 - a1 - a2):
                out.append((a1, a2, a3, k - a1 - a2 - a3))
    return out


@lru_cache(maxsize=None)
def harmonic_basis(k):
    """Basis of the eigenspace for eigenvalue k(k+2), as canonical polynomials.

    Computed as the kernel of the ambient R^4 Laplacian on homogeneous
    degree-k polynomials, then restricted to the sphere. Size (k+1)^2.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if k == 0:
        return (Polynomial.constant(1),)
    exps = _homogeneous_exponents(k)
    lower = _homogeneous_exponents(k - 2) if k >= 2 else []
    lower_index = {e: i for i, e in enumerate(lower)}
    rows = [[Fraction(0)] * len(exps) for _ in lower]
    for col, e in enumerate(exps):
        for mu in range(4):
            a = e[mu]
            if a >= 2:
                tgt = list(e)
                tgt[mu] = a - 2
                rows[lower_index[tuple(tgt)]][col] += a * (a - 1)
    if rows:
        kernel = linalg.kernel_basis(rows)
    else:
        kernel = [[Fraction(1) if i == j else Fraction(0) for j in range(len(exps))]
                  for i in range(len(exps))]
    basis = []
    for vec in kernel:
        basis.append(Polynomial({e: c for e, c in zip(exps, vec) if c != 0}))
    assert len(basis) == (k + 1) ** 2
    return tuple(basis)


def _canonical_exponents(d):
    """All canonical monomial exponents of total degree <= d (x4-power <= 1)."""
    out = []
    for k in range(d + 1):
        for e in _homogeneous_exponents(k):
            if e[3] <= 1:
                out.append(e)
    return out


class CanonicalSpace:
    """Exact coordinates on the span of harmonic_basis(0..d).

    That span equals the full canonical polynomial space of degree <= d,
    so the change-of-basis matrix is square and invertible.
    """

    def __init__(self, d):
        self.d = d
        self.basis = []
        self.eigenvalue = []
        for k in range(d + 1):
            for p in harmonic_basis(k):
                self.basis.append(p)
                self.eigenvalue.append(Fraction(-k * (k + 2)))
        self.exps = _canonical_exponents(d)
        self.exp_index = {e: i for i, e in enumerate(self.exps)}
        assert len(self.exps) == len(self.basis)
        mat = [[Fraction(0)] * len(self.basis) for _ in self.exps]
        for col, p in enumerate(self.basis):
            for e, cf in p.terms.items():
                mat[self.exp_index[e]][col] = cf
        self._inv = linalg.mat_inv(mat)

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, p):
        """Exact coordinate vector of p in the harmonic basis."""
        p = as_poly(p)
        vec = [Fraction(0)] * len(self.exps)
        for e, cf in p.terms.items():
            idx = self.exp_index.get(e)
            if idx is None:
                raise ValueError(f"polynomial degree exceeds truncation d={self.d}")
            vec[idx] = cf
        return linalg.mat_vec(self._inv, vec)

    def from_coords(self, vec):
        out = Polynomial.zero()
        for c, p in zip(vec, self.basis):
            if c != 0:
                out = out + c * p
        return out

    def poisson_solve(self, rhs):
        """Exact mean-zero solution u of (sum_i E_iE_i) u = rhs.

        The right side must have zero mean (no harmonic-degree-0 component).
        """
        c = self.coords(rhs)
        u = [Fraction(0)] * len(c)
        for i, (ci, ev) in enumerate(zip(c, self.eigenvalue)):
            if ev == 0:
                if ci != 0:
                    raise ValueError("right side has a nonzero mean component")
                continue
            u[i] = ci / ev
        return self.from_coords(u)


@lru_cache(maxsize=None)
def canonical_space(d):
    return CanonicalSpace(d)


def is_eigenfunction(u, k, frame=None):
    """True iff laplacian(u) = -k(k+2) u exactly."""
    u = as_poly(u)
    return laplacian_scalar(u, frame) == Fraction(-k * (k + 2)) * u
