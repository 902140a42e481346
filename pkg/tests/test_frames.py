from fractions import Fraction

import pytest

from grflab.frames import (BadIndex, LieGroupModel, NotBiInvariant, adjoint_matrix,
                           apply_vector, default_frame, default_model, frame_derive,
                           laplacian_scalar, su2_model, torsion_form,
                           validate_structure, vector_bracket)
from grflab.poly import JetScalar, Polynomial, integrate_s3

X = [Polynomial.variable(i) for i in (1, 2, 3, 4)]
NORM = sum((x * x for x in X), Polynomial.zero())


def test_frames_are_tangent():
    # every frame field annihilates |x|^2, so it is tangent to the sphere
    fr = default_frame()
    raw_norm = Polynomial({(2, 0, 0, 0): 1, (0, 2, 0, 0): 1,
                           (0, 0, 2, 0): 1}, reduce=False) + Polynomial({(0, 0, 0, 2): 1}, reduce=False)
    for rows in (fr.left, fr.right):
        for coeffs in rows:
            val = Polynomial.zero()
            for mu in range(4):
                val = val + coeffs[mu] * raw_norm.diff(mu + 1)
            assert val.is_zero


def test_frames_euclidean_orthonormal():
    fr = default_frame()
    for rows in (fr.left, fr.right):
        for i in range(3):
            for j in range(3):
                dot = sum((rows[i][mu] * rows[j][mu] for mu in range(4)),
                          Polynomial.zero())
                assert dot == (NORM if i == j else Polynomial.zero())


def test_bracket_structure_constants():
    # oracle: brute-force commutator of the ambient vector fields
    m, fr = su2_model()
    for i in range(3):
        for j in range(3):
            br = vector_bracket(fr.left[i], fr.left[j])
            for mu in range(4):
                want = Polynomial.zero()
                for k in range(3):
                    want = want + m.c[i][j][k] * fr.left[k][mu]
                # bracket coefficients agree modulo the sphere relation
                assert br[mu] * NORM == want


def test_left_and_right_frames_commute():
    fr = default_frame()
    for i in range(3):
        for j in range(3):
            br = vector_bracket(fr.left[i], fr.right[j])
            for mu in range(4):
                assert (br[mu] * NORM).is_zero or br[mu].is_zero


def test_orientation_flip():
    m_plus, _ = su2_model(1)
    m_minus, _ = su2_model(-1)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                assert m_minus.c[i][j][k] == -m_plus.c[i][j][k]
    assert not validate_structure(m_minus)
    with pytest.raises(ValueError):
        su2_model(0)


def test_validate_structure_flags_violations():
    assert validate_structure(default_model()) == []
    bad = LieGroupModel(n=2, c=(((0, 1), (1, 0)), ((0, 0), (0, 0))),
                        g0=((1, 0), (0, 1)))
    assert any("antisymmetry" in v for v in validate_structure(bad))


def test_torsion_form():
    H = torsion_form(default_model())
    assert H[0][1][2] == 2
    assert H[1][0][2] == -2
    assert H[0][0][1] == 0
    # non-ad-invariant metric gives a non-antisymmetric candidate
    m = default_model()
    bad = LieGroupModel(n=3, c=m.c, g0=((2, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(NotBiInvariant):
        torsion_form(bad)


def test_frame_derive_basics():
    assert frame_derive(X[0], 1) == X[3]  # E_1 x1 = x4
    with pytest.raises(BadIndex):
        frame_derive(X[0], 4)
    with pytest.raises(ValueError):
        frame_derive(X[0], 1, "middle")
    j = frame_derive(JetScalar(X[0], X[1], 0), 1)
    assert j.c0 == X[3]


def test_laplacian_spectrum_on_coordinates():
    for x in X:
        assert laplacian_scalar(x) == Fraction(-3) * x
    assert laplacian_scalar(X[0] * X[1]) == Fraction(-8) * (X[0] * X[1])
    assert laplacian_scalar(Polynomial.constant(5)).is_zero


def test_stokes_frame_derivatives_integrate_to_zero():
    p = X[0] * X[1] * X[2] + X[3] * X[3] * X[0]
    for i in (1, 2, 3):
        assert integrate_s3(frame_derive(p, i)).is_zero
        assert integrate_s3(frame_derive(p, i, "right")).is_zero


def test_integration_by_parts():
    p, q = X[0] * X[1], X[2] + X[0] * X[0]
    for i in (1, 2, 3):
        lhs = integrate_s3(frame_derive(p, i) * q)
        rhs = -integrate_s3(p * frame_derive(q, i))
        assert lhs == rhs


def test_adjoint_matrix_is_orthogonal():
    A = adjoint_matrix()
    for i in range(3):
        for j in range(3):
            dot = sum((A[i][a] * A[j][a] for a in range(3)), Polynomial.zero())
            assert dot == (Polynomial.constant(1) if i == j else Polynomial.zero())


def test_model_json_roundtrip():
    m = default_model()
    assert LieGroupModel.from_json(m.to_json()) == m
