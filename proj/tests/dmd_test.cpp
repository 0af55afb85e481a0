#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <random>

#include "dmdbg/dmd.hpp"
#include "dmdbg/error.hpp"
#include "oracles.hpp"

namespace dmdbg {
namespace {

using cplx = std::complex<double>;

Eigen::MatrixXd static_snapshots(Index rows, Index frames, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(1.0, 255.0);
  Eigen::VectorXd frame(rows);
  for (Index i = 0; i < rows; ++i) frame(i) = std::round(dist(rng));
  return frame.replicate(1, frames);
}

void expect_svd_contract(const ThinSvd& svd, const Eigen::MatrixXd& p1, double rank_tol) {
  const Index r = svd.rank();
  ASSERT_GT(r, 0);
  EXPECT_LE((svd.U.transpose() * svd.U - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((svd.V.transpose() * svd.V - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((p1 - svd.U * svd.S.asDiagonal() * svd.V.transpose()).norm(), 1e-8 * p1.norm());
  for (Index i = 0; i < r; ++i) {
    EXPECT_GT(svd.S(i), rank_tol * svd.S(0));
    if (i > 0) EXPECT_LE(svd.S(i), svd.S(i - 1));
  }
}

TEST(SplitSnapshots, ShiftsColumns) {
  Eigen::MatrixXd p(1, 3);
  p << 1, 2, 3;
  const SnapshotSplit split = split_snapshots(p);
  ASSERT_EQ(split.p1.cols(), 2);
  EXPECT_EQ(split.p1(0, 0), 1);
  EXPECT_EQ(split.p1(0, 1), 2);
  EXPECT_EQ(split.p2(0, 0), 2);
  EXPECT_EQ(split.p2(0, 1), 3);
}

TEST(SplitSnapshots, MinimalAndTooShort) {
  Eigen::MatrixXd two = Eigen::MatrixXd::Random(4, 2);
  const SnapshotSplit split = split_snapshots(two);
  EXPECT_EQ(split.p1.cols(), 1);
  EXPECT_EQ(split.p2.cols(), 1);

  Eigen::MatrixXd one = Eigen::MatrixXd::Random(4, 1);
  try {
    split_snapshots(one);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::sequence_too_short);
  }
}

TEST(SplitSnapshots, RecombinationIsBitExact) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 6;
    const Eigen::MatrixXd p = oracle::random_matrix(9, n, rng);
    const SnapshotSplit split = split_snapshots(p);
    Eigen::MatrixXd rebuilt(p.rows(), n);
    rebuilt.leftCols(n - 1) = split.p1;
    rebuilt.col(n - 1) = split.p2.col(n - 2);
    EXPECT_TRUE((rebuilt.array() == p.array()).all());
    EXPECT_TRUE((split.p2.leftCols(n - 2).array() == split.p1.rightCols(n - 2).array()).all());
  }
}

TEST(SnapshotSvd, Identity) {
  const Eigen::MatrixXd p1 = Eigen::MatrixXd::Identity(2, 2);
  const ThinSvd svd = snapshot_svd(p1);
  ASSERT_EQ(svd.rank(), 2);
  EXPECT_NEAR(svd.S(0), 1.0, 1e-14);
  EXPECT_NEAR(svd.S(1), 1.0, 1e-14);
}

TEST(SnapshotSvd, RankDeficientIsTruncated) {
  Eigen::MatrixXd p1(2, 2);
  p1 << 1, 2, 2, 4;
  const ThinSvd svd = snapshot_svd(p1);
  ASSERT_EQ(svd.rank(), 1);
  EXPECT_NEAR(svd.S(0), 5.0, 1e-12);
  expect_svd_contract(svd, p1, kDefaultRankTol);
}

TEST(SnapshotSvd, AllZeroIsDegenerate) {
  try {
    snapshot_svd(Eigen::MatrixXd::Zero(5, 3));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_input);
  }
}

TEST(SnapshotSvd, RejectsBadTolerance) {
  EXPECT_THROW(snapshot_svd(Eigen::MatrixXd::Identity(3, 3), 0.0), Error);
  EXPECT_THROW(snapshot_svd(Eigen::MatrixXd::Identity(3, 3), 1.0), Error);
}

TEST(SnapshotSvd, MatchesJacobiOracle) {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd p1 = oracle::random_matrix(12, 5, rng);
    const ThinSvd svd = snapshot_svd(p1);
    const oracle::JacobiSvd ref = oracle::jacobi_svd(p1);
    ASSERT_EQ(svd.rank(), 5);
    EXPECT_LE((svd.S - ref.S).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd mine = svd.U * svd.S.asDiagonal() * svd.V.transpose();
    const Eigen::MatrixXd theirs = ref.U * ref.S.asDiagonal() * ref.V.transpose();
    EXPECT_LE((mine - theirs).norm(), 1e-10 * p1.norm());
    expect_svd_contract(svd, p1, kDefaultRankTol);
  }
}

TEST(SnapshotSvd, SkippingLeftVectorsKeepsSpectrum) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd p1 = oracle::random_matrix(30, 6, rng);
  const ThinSvd full = snapshot_svd(p1);
  const ThinSvd thin = snapshot_svd(p1, kDefaultRankTol, LeftVectors::skip);
  EXPECT_FALSE(thin.has_left_vectors());
  EXPECT_TRUE((full.S.array() == thin.S.array()).all());
  EXPECT_THROW(reduced_operator(thin, p1), Error);
}

TEST(ReducedOperator, StaticSequenceIsIdentity) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd p = static_snapshots(15, 6, rng);
  const SnapshotSplit split = split_snapshots(p);
  const ThinSvd svd = snapshot_svd(split.p1);
  ASSERT_EQ(svd.rank(), 1);
  const Eigen::MatrixXd h = reduced_operator(svd, split.p2);
  ASSERT_EQ(h.rows(), 1);
  EXPECT_NEAR(h(0, 0), 1.0, 1e-10);
}

TEST(ReducedOperator, ScalarDoubling) {
  Eigen::MatrixXd p(1, 4);
  p << 1, 2, 4, 8;
  const SnapshotSplit split = split_snapshots(p);
  const ThinSvd svd = snapshot_svd(split.p1);
  const Eigen::MatrixXd h = reduced_operator(svd, split.p2);
  ASSERT_EQ(h.rows(), 1);
  EXPECT_NEAR(h(0, 0), 2.0, 1e-12);

  const Eigenpairs pairs = eigen_reduced(h);
  const Eigen::MatrixXcd psi = dynamic_modes(split.p2, svd, pairs.vectors);
  ASSERT_EQ(psi.rows(), 1);
  EXPECT_GT(std::abs(psi(0, 0)), 0.0);
}

TEST(ReducedOperator, ShapeMismatch) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd p1 = oracle::random_matrix(10, 4, rng);
  const ThinSvd svd = snapshot_svd(p1);
  const Eigen::MatrixXd wrong = oracle::random_matrix(9, 4, rng);
  try {
    reduced_operator(svd, wrong);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(ReducedOperator, EigenvaluesMatchPseudoinverseOperator) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd p = oracle::random_matrix(12, 6, rng);
    const SnapshotSplit split = split_snapshots(p);
    const ThinSvd svd = snapshot_svd(split.p1);
    const Eigen::MatrixXd h = reduced_operator(svd, split.p2);

    const Eigen::MatrixXd a = Eigen::MatrixXd(split.p2) * oracle::pinv(split.p1);
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    const auto reference = oracle::largest(oracle::to_vector(es.eigenvalues()), static_cast<std::size_t>(svd.rank()));
    const auto mine = oracle::to_vector(eigen_reduced(h).values);
    EXPECT_LE(oracle::match_distance(mine, reference), 1e-8);
  }
}

TEST(ReducedOperator, GramRouteAgreesWithLeftVectorRoute) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd p = oracle::random_matrix(40, 7, rng);
  const SnapshotSplit split = split_snapshots(p);
  const ThinSvd svd = snapshot_svd(split.p1);
  const Eigen::MatrixXd direct = reduced_operator(svd, split.p2);
  const Eigen::MatrixXd via_gram = reduced_operator_from_cross_gram(svd, cross_gram(split.p1, split.p2));
  EXPECT_LE((direct - via_gram).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EigenReduced, Scalar) {
  const Eigenpairs pairs = eigen_reduced(Eigen::MatrixXd::Ones(1, 1));
  ASSERT_EQ(pairs.values.size(), 1);
  EXPECT_NEAR(std::abs(pairs.values(0) - cplx(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(pairs.vectors(0, 0)), 1.0, 1e-15);
}

TEST(EigenReduced, RotationSpectrum) {
  Eigen::MatrixXd h(2, 2);
  h << 0, -1, 1, 0;
  const Eigenpairs pairs = eigen_reduced(h);
  EXPECT_LE(oracle::match_distance(oracle::to_vector(pairs.values), {cplx(0, 1), cplx(0, -1)}), 1e-14);
}

TEST(EigenReduced, MatchesCharacteristicPolynomialRoots) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd h = oracle::random_matrix(6, 6, rng);
    const Eigenpairs pairs = eigen_reduced(h);
    const auto roots = oracle::polynomial_roots(oracle::characteristic_polynomial(h));
    EXPECT_LE(oracle::match_distance(oracle::to_vector(pairs.values), roots), 1e-8) << "trial " << trial;
  }
}

TEST(EigenReduced, ResidualsNormsAndOrdering) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd h = oracle::random_matrix(8, 8, rng);
    const Eigenpairs pairs = eigen_reduced(h);
    const Eigen::MatrixXcd hc = h.cast<cplx>();
    for (Index j = 0; j < pairs.values.size(); ++j) {
      EXPECT_NEAR(pairs.vectors.col(j).norm(), 1.0, 1e-12);
      EXPECT_LE((hc * pairs.vectors.col(j) - pairs.values(j) * pairs.vectors.col(j)).norm(), 1e-8);
      if (j > 0) EXPECT_LE(std::abs(pairs.values(j)), std::abs(pairs.values(j - 1)));
    }
  }
}

TEST(EigenReduced, RejectsNonSquare) {
  EXPECT_THROW(eigen_reduced(Eigen::MatrixXd::Ones(2, 3)), Error);
}

TEST(DynamicModes, StaticSequenceModeIsParallelToFrame) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd p = static_snapshots(30, 5, rng);
  const SnapshotSplit split = split_snapshots(p);
  const ThinSvd svd = snapshot_svd(split.p1);
  const Eigenpairs pairs = eigen_reduced(reduced_operator(svd, split.p2));
  const Eigen::MatrixXcd psi = dynamic_modes(split.p2, svd, pairs.vectors);
  ASSERT_EQ(psi.cols(), 1);
  const Eigen::VectorXd mag = psi.col(0).cwiseAbs();
  const double cosine = mag.dot(p.col(0)) / (mag.norm() * p.col(0).norm());
  EXPECT_GE(cosine, 1.0 - 1e-10);
}

TEST(DynamicModes, AreEigenvectorsOfPseudoinverseOperator) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd p = oracle::random_matrix(12, 6, rng);
    const SnapshotSplit split = split_snapshots(p);
    const ThinSvd svd = snapshot_svd(split.p1);
    const Eigenpairs pairs = eigen_reduced(reduced_operator(svd, split.p2));
    const Eigen::MatrixXcd psi = dynamic_modes(split.p2, svd, pairs.vectors);
    const Eigen::MatrixXcd a = (Eigen::MatrixXd(split.p2) * oracle::pinv(split.p1)).cast<cplx>();
    for (Index j = 0; j < psi.cols(); ++j) {
      const Eigen::VectorXcd lhs = a * psi.col(j);
      const Eigen::VectorXcd rhs = pairs.values(j) * psi.col(j);
      EXPECT_LE((lhs - rhs).norm(), 1e-6 * psi.col(j).norm() * std::max(1.0, std::abs(pairs.values(j))));
    }
  }
}

TEST(FourierFrequencies, KnownValues) {
  Eigen::VectorXcd sigma(4);
  sigma << cplx(1, 0), cplx(std::numbers::e, 0), cplx(0, 1), cplx(0, 0);
  const auto mu = fourier_frequencies(sigma, 1.0);
  ASSERT_TRUE(mu[0] && mu[1] && mu[2]);
  EXPECT_EQ(*mu[0], cplx(0, 0));
  EXPECT_NEAR(std::abs(*mu[1] - cplx(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(*mu[2] - cplx(0, std::numbers::pi / 2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(*mu[2]), std::numbers::pi / 2, 1e-15);
  EXPECT_FALSE(mu[3].has_value());
}

TEST(FourierFrequencies, TimeStepScalesAndPrincipalBranch) {
  Eigen::VectorXcd sigma(2);
  sigma << cplx(-1, 0), cplx(-1, -0.0);
  const auto mu = fourier_frequencies(sigma, 0.5);
  EXPECT_NEAR(mu[0]->imag(), 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(mu[1]->imag(), 2 * std::numbers::pi, 1e-14);
  EXPECT_THROW(fourier_frequencies(sigma, 0.0), Error);
}

TEST(SelectBackgroundMode, ExactZero) {
  const std::vector<FourierFrequency> mu{cplx(0, 0), cplx(0, 1.2), cplx(0.5, 0)};
  EXPECT_EQ(select_background_index(mu), 0);
  const std::vector<FourierFrequency> later{cplx(0, 1.2), cplx(0.5, 0), cplx(0, 0)};
  EXPECT_EQ(select_background_index(later), 2);
}

TEST(SelectBackgroundMode, TieGoesToFirst) {
  const std::vector<FourierFrequency> mu{cplx(0.1, 0), cplx(0, -0.1)};
  EXPECT_EQ(select_background_index(mu), 0);
}

TEST(SelectBackgroundMode, InvalidFrequencyExcluded) {
  const std::vector<FourierFrequency> mu{cplx(0.3, 0), std::nullopt, cplx(0.2, 0)};
  EXPECT_EQ(select_background_index(mu), 2);
  const std::vector<FourierFrequency> none{std::nullopt, std::nullopt};
  try {
    select_background_index(none);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_background_mode);
  }
}

TEST(CompanionOracle, StaticSequenceHasUnitEigenvalue) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd p = static_snapshots(10, 5, rng);
  const CompanionResult c = companion_oracle(split_snapshots(p));
  EXPECT_LE((Eigen::MatrixXd(split_snapshots(p).p1) * c.coefficients - p.col(4)).norm(), 1e-8 * p.col(4).norm());
  double closest = 1e9;
  for (Index i = 0; i < c.eigenvalues.size(); ++i) closest = std::min(closest, std::abs(c.eigenvalues(i) - 1.0));
  EXPECT_LE(closest, 1e-8);
}

TEST(CompanionOracle, StructureAndPrecondition) {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd p = oracle::random_matrix(20, 5, rng);
  const CompanionResult c = companion_oracle(split_snapshots(p));
  ASSERT_EQ(c.h.rows(), 4);
  for (Index i = 1; i < 4; ++i) EXPECT_EQ(c.h(i, i - 1), 1.0);
  EXPECT_TRUE((c.h.col(3).array() == c.coefficients.array()).all());

  const Eigen::MatrixXd two = oracle::random_matrix(20, 2, rng);
  EXPECT_THROW(companion_oracle(split_snapshots(two)), Error);
}

TEST(CompanionOracle, SpectrumMatchesReducedOperator) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd p = oracle::random_matrix(15, 5 + trial % 3, rng);
    const SnapshotSplit split = split_snapshots(p);
    const ThinSvd svd = snapshot_svd(split.p1);
    const auto reduced = oracle::to_vector(eigen_reduced(reduced_operator(svd, split.p2)).values);
    const auto companion = oracle::to_vector(companion_oracle(split).eigenvalues);
    EXPECT_LE(oracle::match_distance(reduced, companion), 1e-6);
  }
}

TEST(Decompose, StaticLaw) {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd p = static_snapshots(3 * 48 * 64, 20, rng);
  const DmdResult dmd = decompose(p);
  ASSERT_EQ(dmd.rank(), 1);
  EXPECT_LE(std::abs(dmd.sigma(0) - 1.0), 1e-10);
  ASSERT_TRUE(dmd.mu[0]);
  EXPECT_LE(std::abs(*dmd.mu[0]), 1e-10);
  const ModeSelection sel = select_background_mode(dmd);
  const Eigen::VectorXd mag = sel.background_vector.cwiseAbs();
  EXPECT_GE(mag.dot(p.col(0)) / (mag.norm() * p.col(0).norm()), 1.0 - 1e-10);
}

TEST(Decompose, MatchesStepByStepRoute) {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd p = oracle::random_matrix(50, 8, rng);
  const DmdResult dmd = decompose(p);
  const SnapshotSplit split = split_snapshots(p);
  const ThinSvd svd = snapshot_svd(split.p1);
  const Eigen::MatrixXd h = reduced_operator(svd, split.p2);
  EXPECT_LE((dmd.h_tilde - h).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(oracle::match_distance(oracle::to_vector(dmd.sigma), oracle::to_vector(eigen_reduced(h).values)), 1e-10);

  ASSERT_TRUE(dmd.psi.has_value());
  const ModeSelection full = select_background_mode(dmd);
  const DmdResult lean = decompose(p, DmdOptions{kDefaultRankTol, kDefaultDeltaT, false});
  EXPECT_FALSE(lean.psi.has_value());
  const ModeSelection streamed = select_background_mode(lean, split);
  EXPECT_EQ(full.index, streamed.index);
  EXPECT_LE((full.background_vector - streamed.background_vector).norm(), 1e-12 * full.background_vector.norm());
  EXPECT_THROW(select_background_mode(lean), Error);
}

TEST(Decompose, SelectionInvariantUnderIntensityScaling) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd p = oracle::random_matrix(30, 7, rng).cwiseAbs();
    const DmdResult base = decompose(p);
    const DmdResult scaled = decompose(p * 3.7);
    EXPECT_EQ(select_background_index(base.mu), select_background_index(scaled.mu));
  }
}

TEST(Decompose, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(51);
  // Tall enough to span several row blocks.
  const Eigen::MatrixXd p = oracle::random_matrix(40000, 9, rng);
  ::setenv("DMDBG_THREADS", "1", 1);
  const DmdResult one = decompose(p);
  const DmdResult again = decompose(p);
  ::setenv("DMDBG_THREADS", "4", 1);
  const DmdResult four = decompose(p);
  ::unsetenv("DMDBG_THREADS");

  EXPECT_TRUE((one.h_tilde.array() == again.h_tilde.array()).all());
  EXPECT_TRUE((one.sigma.array() == again.sigma.array()).all());
  EXPECT_TRUE((one.h_tilde.array() == four.h_tilde.array()).all());
  EXPECT_TRUE((one.sigma.array() == four.sigma.array()).all());
  EXPECT_TRUE((one.psi->array() == four.psi->array()).all());
}

TEST(Decompose, RejectsShortAndNonFinite) {
  EXPECT_THROW(decompose(Eigen::MatrixXd::Ones(5, 1)), Error);
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(5, 3);
  p(2, 1) = std::nan("");
  try {
    decompose(p);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite);
  }
}

}  // namespace
}  // namespace dmdbg
