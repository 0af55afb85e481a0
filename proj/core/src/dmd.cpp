#include "dmdbg/dmd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dmdbg/error.hpp"
#include "dmdbg/parallel.hpp"

namespace dmdbg {

namespace {

// Rows per block for the streamed products. Fixed so results never depend on
// the worker count.
constexpr Index kRowBlock = 8192;

Index block_count(Index rows) { return (rows + kRowBlock - 1) / kRowBlock; }

std::pair<Index, Index> block_range(Index block, Index rows) {
  const Index begin = block * kRowBlock;
  return {begin, std::min(kRowBlock, rows - begin)};
}

// Sums per-block contributions in block order. With one worker the partials
// are folded as they are produced; the summation order is the same.
template <typename Partial, typename Compute>
Partial reduce_blocks(Index rows, Partial zero, Compute compute) {
  const Index blocks = block_count(rows);
  if (thread_count() <= 1 || blocks <= 1) {
    Partial total = zero;
    for (Index b = 0; b < blocks; ++b) total += compute(b);
    return total;
  }
  std::vector<Partial> partials(static_cast<std::size_t>(blocks));
  parallel_for(static_cast<std::size_t>(blocks),
               [&](std::size_t b) { partials[b] = compute(static_cast<Index>(b)); });
  Partial total = zero;
  for (const auto& p : partials) total += p;
  return total;
}

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::non_finite, std::string(what) + " contains non-finite values");
  }
}

std::string shape(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

SnapshotSplit split_snapshots(const Eigen::MatrixXd& snapshots) {
  const Index n = snapshots.cols();
  if (n < 2) {
    throw Error(ErrorCode::sequence_too_short,
                "need at least 2 snapshots, got " + std::to_string(n));
  }
  const Index rows = snapshots.rows();
  return SnapshotSplit{
      Eigen::Map<const Eigen::MatrixXd>(snapshots.data(), rows, n - 1),
      Eigen::Map<const Eigen::MatrixXd>(snapshots.data() + rows, rows, n - 1)};
}

SnapshotSplit split_snapshots(const SnapshotMatrix& snapshots) {
  return split_snapshots(snapshots.values);
}

Eigen::MatrixXd cross_gram(const Eigen::Ref<const Eigen::MatrixXd>& a,
                           const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "cross_gram: row counts differ (" + shape(a.rows(), a.cols()) + " vs " +
                    shape(b.rows(), b.cols()) + ")");
  }
  const Index rows = a.rows();
  return reduce_blocks<Eigen::MatrixXd>(
      rows, Eigen::MatrixXd::Zero(a.cols(), b.cols()), [&](Index block) {
        auto [begin, len] = block_range(block, rows);
        Eigen::MatrixXd partial = a.middleRows(begin, len).transpose() * b.middleRows(begin, len);
        return partial;
      });
}

ThinSvd snapshot_svd_from_gram(const Eigen::Ref<const Eigen::MatrixXd>& p1,
                               const Eigen::MatrixXd& gram, double rank_tol,
                               LeftVectors left) {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
    throw Error(ErrorCode::usage, "rank tolerance must lie in (0, 1)");
  }
  const Index k = p1.cols();
  if (k == 0 || p1.rows() == 0) {
    throw Error(ErrorCode::degenerate_input, "snapshot_svd: empty matrix");
  }
  if (gram.rows() != k || gram.cols() != k) {
    throw Error(ErrorCode::dimension_mismatch,
                "snapshot_svd: gram is " + shape(gram.rows(), gram.cols()) + ", expected " +
                    shape(k, k));
  }
  require_finite(gram, "snapshot gram matrix");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::eigen_failure,
                "snapshot_svd: symmetric eigensolver did not converge on a " + shape(k, k) +
                    " gram matrix");
  }
  // Eigenvalues come back ascending.
  Eigen::MatrixXd v = eig.eigenvectors().rowwise().reverse();

  const Index rows = p1.rows();
  Eigen::VectorXd norms2 = reduce_blocks<Eigen::VectorXd>(
      rows, Eigen::VectorXd::Zero(k), [&](Index block) {
        auto [begin, len] = block_range(block, rows);
        Eigen::VectorXd partial = (p1.middleRows(begin, len) * v).colwise().squaredNorm().transpose();
        return partial;
      });
  Eigen::VectorXd s = norms2.cwiseSqrt();

  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a) > s(b); });

  const double s_max = s(order.front());
  if (!(s_max > 0.0) || !std::isfinite(s_max)) {
    throw Error(ErrorCode::degenerate_input,
                "snapshot_svd: no retainable singular value (all-zero snapshots?)");
  }
  Index rank = 0;
  while (rank < k && s(order[static_cast<std::size_t>(rank)]) > rank_tol * s_max) ++rank;

  ThinSvd svd;
  svd.S.resize(rank);
  svd.V.resize(k, rank);
  for (Index j = 0; j < rank; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    svd.S(j) = s(src);
    svd.V.col(j) = v.col(src);
  }

  if (left == LeftVectors::compute) {
    const Eigen::MatrixXd w = svd.V * svd.S.cwiseInverse().asDiagonal();
    svd.U.resize(rows, rank);
    parallel_for(static_cast<std::size_t>(block_count(rows)), [&](std::size_t b) {
      auto [begin, len] = block_range(static_cast<Index>(b), rows);
      svd.U.middleRows(begin, len).noalias() = p1.middleRows(begin, len) * w;
    });
  }
  return svd;
}

ThinSvd snapshot_svd(const Eigen::Ref<const Eigen::MatrixXd>& p1, double rank_tol,
                     LeftVectors left) {
  require_finite(p1, "snapshot matrix");
  return snapshot_svd_from_gram(p1, cross_gram(p1, p1), rank_tol, left);
}

Eigen::MatrixXd reduced_operator(const ThinSvd& svd,
                                 const Eigen::Ref<const Eigen::MatrixXd>& p2) {
  if (!svd.has_left_vectors()) {
    throw Error(ErrorCode::dimension_mismatch, "reduced_operator: SVD has no left vectors");
  }
  if (p2.rows() != svd.U.rows() || p2.cols() != svd.V.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "reduced_operator: p2 is " + shape(p2.rows(), p2.cols()) + ", expected " +
                    shape(svd.U.rows(), svd.V.rows()));
  }
  const Eigen::MatrixXd ut_p2 = cross_gram(svd.U, p2);
  return ut_p2 * svd.V * svd.S.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd reduced_operator_from_cross_gram(const ThinSvd& svd,
                                                 const Eigen::MatrixXd& p1_t_p2) {
  const Index k = svd.V.rows();
  if (p1_t_p2.rows() != k || p1_t_p2.cols() != k) {
    throw Error(ErrorCode::dimension_mismatch,
                "reduced_operator: cross gram is " + shape(p1_t_p2.rows(), p1_t_p2.cols()) +
                    ", expected " + shape(k, k));
  }
  const Eigen::VectorXd inv_s = svd.S.cwiseInverse();
  return inv_s.asDiagonal() * (svd.V.transpose() * p1_t_p2 * svd.V) * inv_s.asDiagonal();
}

Eigenpairs eigen_reduced(const Eigen::MatrixXd& h_tilde) {
  if (h_tilde.rows() != h_tilde.cols() || h_tilde.rows() == 0) {
    throw Error(ErrorCode::dimension_mismatch,
                "eigen_reduced: expected a non-empty square matrix, got " +
                    shape(h_tilde.rows(), h_tilde.cols()));
  }
  require_finite(h_tilde, "reduced operator");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(h_tilde, true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigen_reduced: eigensolver did not converge (size " << h_tilde.rows()
        << ", Frobenius norm " << h_tilde.norm() << ")";
    throw Error(ErrorCode::eigen_failure, msg.str());
  }
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();

  const Index r = values.size();
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(values(a)) > std::abs(values(b)); });

  Eigenpairs out;
  out.values.resize(r);
  out.vectors.resize(r, r);
  for (Index j = 0; j < r; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = values(src);
    const double norm = vectors.col(src).norm();
    out.vectors.col(j) = norm > 0.0 ? Eigen::VectorXcd(vectors.col(src) / norm)
                                    : Eigen::VectorXcd(vectors.col(src));
  }
  return out;
}

Eigen::MatrixXcd apply_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& p2,
                                    const Eigen::MatrixXcd& coefficients) {
  if (p2.cols() != coefficients.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "mode synthesis: p2 is " + shape(p2.rows(), p2.cols()) + ", coefficients are " +
                    shape(coefficients.rows(), coefficients.cols()));
  }
  const Eigen::MatrixXd re = coefficients.real();
  const Eigen::MatrixXd im = coefficients.imag();
  const Index rows = p2.rows();
  Eigen::MatrixXcd out(rows, coefficients.cols());
  parallel_for(static_cast<std::size_t>(block_count(rows)), [&](std::size_t b) {
    auto [begin, len] = block_range(static_cast<Index>(b), rows);
    const auto block = p2.middleRows(begin, len);
    out.middleRows(begin, len).real() = block * re;
    out.middleRows(begin, len).imag() = block * im;
  });
  return out;
}

Eigen::MatrixXcd dynamic_modes(const Eigen::Ref<const Eigen::MatrixXd>& p2,
                               const ThinSvd& svd, const Eigen::MatrixXcd& omega) {
  if (omega.rows() != svd.rank() || p2.cols() != svd.V.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "dynamic_modes: inconsistent shapes (p2 " + shape(p2.rows(), p2.cols()) +
                    ", V " + shape(svd.V.rows(), svd.V.cols()) + ", omega " +
                    shape(omega.rows(), omega.cols()) + ")");
  }
  const Eigen::MatrixXcd coefficients =
      (svd.V * svd.S.cwiseInverse().asDiagonal()).cast<std::complex<double>>() * omega;
  return apply_coefficients(p2, coefficients);
}

std::vector<FourierFrequency> fourier_frequencies(const Eigen::VectorXcd& sigma,
                                                  double delta_t) {
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
    throw Error(ErrorCode::usage, "time step must be positive and finite");
  }
  std::vector<FourierFrequency> mu;
  mu.reserve(static_cast<std::size_t>(sigma.size()));
  for (Index j = 0; j < sigma.size(); ++j) {
    const std::complex<double> s = sigma(j);
    if (s == std::complex<double>(0.0, 0.0)) {
      mu.emplace_back(std::nullopt);
      continue;
    }
    // std::arg is the principal argument in [-π, π]; the negative end only
    // occurs for a signed-zero imaginary part, which is folded onto +π.
    double angle = std::arg(s);
    if (angle == -std::numbers::pi) angle = std::numbers::pi;
    mu.emplace_back(std::complex<double>(std::log(std::abs(s)), angle) / delta_t);
  }
  return mu;
}

DmdResult decompose(const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
                    const DmdOptions& options) {
  const Index n = snapshots.cols();
  if (n < 2) {
    throw Error(ErrorCode::sequence_too_short,
                "need at least 2 snapshots, got " + std::to_string(n));
  }
  if (!(options.delta_t > 0.0)) throw Error(ErrorCode::usage, "time step must be positive");
  require_finite(snapshots, "snapshot matrix");

  const auto p1 = snapshots.leftCols(n - 1);
  const auto p2 = snapshots.rightCols(n - 1);

  // One pass over the data gives both p1ᵀp1 and p1ᵀp2.
  const Eigen::MatrixXd gram = cross_gram(snapshots, snapshots);
  const Eigen::MatrixXd gram11 = gram.topLeftCorner(n - 1, n - 1);
  const Eigen::MatrixXd gram12 = gram.block(0, 1, n - 1, n - 1);

  const ThinSvd svd = snapshot_svd_from_gram(p1, gram11, options.rank_tol, LeftVectors::skip);

  DmdResult out;
  out.delta_t = options.delta_t;
  out.singular_values = svd.S;
  out.h_tilde = reduced_operator_from_cross_gram(svd, gram12);
  Eigenpairs pairs = eigen_reduced(out.h_tilde);
  out.sigma = std::move(pairs.values);
  out.omega = std::move(pairs.vectors);
  out.mu = fourier_frequencies(out.sigma, options.delta_t);
  out.mode_coefficients =
      (svd.V * svd.S.cwiseInverse().asDiagonal()).cast<std::complex<double>>() * out.omega;
  if (options.materialize_modes) out.psi = apply_coefficients(p2, out.mode_coefficients);
  return out;
}

DmdResult decompose(const SnapshotMatrix& snapshots, const DmdOptions& options) {
  return decompose(snapshots.values, options);
}

Index select_background_index(const std::vector<FourierFrequency>& mu) {
  Index best = -1;
  double best_abs = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!mu[j]) continue;
    const double a = std::abs(*mu[j]);
    if (best < 0 || a < best_abs) {
      best = static_cast<Index>(j);
      best_abs = a;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::no_background_mode,
                "no mode with a defined Fourier frequency (every eigenvalue is zero)");
  }
  return best;
}

ModeSelection select_background_mode(const DmdResult& dmd) {
  if (!dmd.psi) {
    throw Error(ErrorCode::dimension_mismatch,
                "select_background_mode: modes were not materialised; pass the snapshot split");
  }
  ModeSelection sel;
  sel.index = select_background_index(dmd.mu);
  sel.abs_mu = std::abs(*dmd.mu[static_cast<std::size_t>(sel.index)]);
  sel.background_vector = dmd.psi->col(sel.index);
  return sel;
}

ModeSelection select_background_mode(const DmdResult& dmd, const SnapshotSplit& split) {
  ModeSelection sel;
  sel.index = select_background_index(dmd.mu);
  sel.abs_mu = std::abs(*dmd.mu[static_cast<std::size_t>(sel.index)]);
  sel.background_vector =
      apply_coefficients(split.p2, dmd.mode_coefficients.col(sel.index)).col(0);
  return sel;
}

CompanionResult companion_oracle(const SnapshotSplit& split) {
  const Index k = split.p1.cols();
  if (k < 2) {
    throw Error(ErrorCode::sequence_too_short,
                "companion matrix needs at least 3 snapshots, got " + std::to_string(k + 1));
  }
  const Eigen::MatrixXd p1 = split.p1;
  const Eigen::VectorXd last = split.p2.col(k - 1);

  CompanionResult out;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(p1);
  out.coefficients = cod.solve(last);

  out.h = Eigen::MatrixXd::Zero(k, k);
  for (Index i = 1; i < k; ++i) out.h(i, i - 1) = 1.0;
  out.h.col(k - 1) = out.coefficients;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(out.h, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::eigen_failure, "companion_oracle: eigensolver did not converge");
  }
  out.eigenvalues = solver.eigenvalues();
  return out;
}

}  // namespace dmdbg
