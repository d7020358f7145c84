#include <gtest/gtest.h>

#include "icpovm/errors.hpp"
#include "icpovm/matrix_core.hpp"
#include "icpovm/random.hpp"
#include "test_support.hpp"

using namespace icpovm;
using namespace icpovm::testing;

TEST(Vectorize, IdentityIsSumOfDiagonalProducts) {
  const auto v = vectorize(OperatorMatrix::identity(2));
  ASSERT_EQ(v.entries().size(), 4);
  EXPECT_EQ(v.entries()(0), Complex(1.0));
  EXPECT_EQ(v.entries()(1), Complex(0.0));
  EXPECT_EQ(v.entries()(2), Complex(0.0));
  EXPECT_EQ(v.entries()(3), Complex(1.0));
}

TEST(Vectorize, MatrixUnitLandsAtRowMajorIndex) {
  ComplexMatrix e01 = ComplexMatrix::Zero(2, 2);
  e01(0, 1) = 1.0;
  const auto v = vectorize(OperatorMatrix(e01));
  EXPECT_EQ(v.entries(), flatten(e01));
  EXPECT_EQ(v.entries()(1), Complex(1.0));
}

TEST(Vectorize, RoundTripIsExactAndPreservesInnerProduct) {
  Rng rng(7);
  for (int d : {1, 2, 3, 5}) {
    for (int trial = 0; trial < 10; ++trial) {
      const OperatorMatrix a(random_operator(d, rng));
      const OperatorMatrix b(random_operator(d, rng));
      EXPECT_EQ(devectorize(vectorize(a)).matrix(), a.matrix());
      const Complex lhs = inner(vectorize(a), vectorize(b));
      const Complex rhs = (a.matrix().adjoint() * b.matrix()).trace();
      EXPECT_LE(std::abs(lhs - rhs), 1e-13);
    }
  }
}

TEST(DoubledVector, RejectsWrongLength) {
  EXPECT_THROW(DoubledVector(2, ComplexVector::Zero(3)), DimensionError);
}

TEST(HsInner, KnownValues) {
  EXPECT_EQ(hs_inner(OperatorMatrix::identity(2), OperatorMatrix::identity(2)), Complex(2.0));
  EXPECT_EQ(hs_inner(OperatorMatrix(pauli_x()), OperatorMatrix(pauli_z())), Complex(0.0));
}

TEST(HsInner, MatchesEntrywiseSumAndIsConjugateSymmetric) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const OperatorMatrix a(random_operator(3, rng));
    const OperatorMatrix b(random_operator(3, rng));
    EXPECT_LE(std::abs(hs_inner(a, b) - entrywise_inner(a.matrix(), b.matrix())), 1e-13);
    EXPECT_LE(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))), 1e-13);
  }
}

TEST(HsInner, DimensionMismatchThrows) {
  EXPECT_THROW(hs_inner(OperatorMatrix::identity(2), OperatorMatrix::identity(3)), DimensionError);
}

TEST(Sandwich, IdentitySandwichIsVectorize) {
  Rng rng(3);
  const OperatorMatrix c(random_operator(3, rng));
  const auto id = OperatorMatrix::identity(3);
  EXPECT_EQ(sandwich_vectorized(id, id, c).entries(), vectorize(c).entries());
}

TEST(Sandwich, AgreesWithDenseKroneckerBothModes) {
  Rng rng(5);
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix a = random_operator(d, rng);
      const ComplexMatrix b = random_operator(d, rng);
      const ComplexMatrix c = random_operator(d, rng);
      const ComplexVector expected_t = dense_kron(a, b) * flatten(c);
      const ComplexVector expected_a = dense_kron(a, b.adjoint()) * flatten(c);
      const auto got_t = sandwich_vectorized(OperatorMatrix(a), OperatorMatrix(b), OperatorMatrix(c));
      const auto got_a = sandwich_vectorized(OperatorMatrix(a), OperatorMatrix(b), OperatorMatrix(c),
                                             SandwichMode::adjoint);
      EXPECT_LE((got_t.entries() - expected_t).cwiseAbs().maxCoeff(), 1e-12) << "d=" << d;
      EXPECT_LE((got_a.entries() - expected_a).cwiseAbs().maxCoeff(), 1e-12) << "d=" << d;
    }
  }
}

TEST(Sandwich, UnitaryConjugationOfIdentity) {
  Rng rng(9);
  const ComplexMatrix u = unitary_from_generator(random_hermitian(3, rng).matrix());
  const auto out = sandwich_vectorized(OperatorMatrix(u), OperatorMatrix(ComplexMatrix(u.conjugate())),
                                       OperatorMatrix::identity(3));
  EXPECT_LE((out.entries() - flatten(ComplexMatrix::Identity(3, 3))).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(EigHermitian, KnownSpectra) {
  ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 2.0;
  auto e = eig_hermitian(OperatorMatrix(diag));
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 2.0, 1e-14);
  e = eig_hermitian(OperatorMatrix(pauli_x()));
  EXPECT_NEAR(e.values(0), -1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
}

TEST(EigHermitian, ResidualAndReassemblyUpToSixteen) {
  Rng rng(13);
  for (int d : {2, 3, 5, 8, 12, 16}) {
    const ComplexMatrix a = random_hermitian(d, rng).matrix();
    const auto e = eig_hermitian(a);
    const ComplexMatrix lambda = e.values.cast<Complex>().asDiagonal();
    EXPECT_LE(max_abs_diff(a * e.vectors, e.vectors * lambda), 1e-10) << "d=" << d;
    EXPECT_LE(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::Identity(d, d)), 1e-10);
    EXPECT_LE(max_abs_diff(e.vectors * lambda * e.vectors.adjoint(), a), 1e-10);
    for (int k = 1; k < d; ++k) EXPECT_LE(e.values(k - 1), e.values(k));
  }
}

TEST(EigHermitian, RejectsNonHermitian) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(eig_hermitian(a), InvalidInputError);
}

TEST(IsPsd, Examples) {
  EXPECT_TRUE(is_psd(OperatorMatrix::identity(2)));
  EXPECT_FALSE(is_psd(OperatorMatrix(pauli_z())));
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector psi = random_state_vector(4, rng) * 1.7;
    EXPECT_TRUE(is_psd(OperatorMatrix(psi * psi.adjoint())));
  }
}

TEST(InvSqrtPsd, Examples) {
  EXPECT_LE(max_abs_diff(inv_sqrt_psd(OperatorMatrix::identity(3)).matrix(), ComplexMatrix::Identity(3, 3)),
            1e-14);
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 0) = 4.0;
  s(1, 1) = 9.0;
  const auto r = inv_sqrt_psd(OperatorMatrix(s));
  EXPECT_NEAR(r(0, 0).real(), 0.5, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-14);
}

TEST(InvSqrtPsd, ReassemblesToIdentityOnRandomPositive) {
  Rng rng(19);
  for (int d : {2, 3, 6}) {
    const ComplexMatrix g = random_operator(d, rng);
    const ComplexMatrix s = g * g.adjoint() + 0.1 * ComplexMatrix::Identity(d, d);
    const ComplexMatrix b = inv_sqrt_psd(OperatorMatrix(s)).matrix();
    EXPECT_LE(max_abs_diff(b * s * b, ComplexMatrix::Identity(d, d)), 1e-10);
  }
}

TEST(InvSqrtPsd, SingularThrows) {
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 0) = 1.0;
  EXPECT_THROW(inv_sqrt_psd(OperatorMatrix(s)), PreconditionError);
}

TEST(OperatorMatrix, RoleValidation) {
  EXPECT_THROW(OperatorMatrix(ComplexMatrix::Zero(2, 3)), DimensionError);
  ComplexMatrix upper = ComplexMatrix::Zero(2, 2);
  upper(0, 1) = 1.0;
  EXPECT_THROW(OperatorMatrix(upper, OperatorRole::observable), InvalidInputError);
  EXPECT_THROW(OperatorMatrix(ComplexMatrix::Identity(2, 2), OperatorRole::density), InvalidInputError);
  EXPECT_THROW(OperatorMatrix(2.0 * ComplexMatrix::Identity(2, 2), OperatorRole::unitary), InvalidInputError);
  EXPECT_NO_THROW(OperatorMatrix(0.5 * ComplexMatrix::Identity(2, 2), OperatorRole::density));
  EXPECT_NO_THROW(OperatorMatrix(pauli_y(), OperatorRole::unitary));
  EXPECT_EQ(role_from_string(to_string(OperatorRole::povm_element)), OperatorRole::povm_element);
}
