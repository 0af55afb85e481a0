#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dmdbg {

using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kDefaultDeltaT = 1.0;

/// Stacked-RGB snapshot matrix. Column k is frame k vectorised as
/// [R plane; G plane; B plane], each plane in row-major scanline order,
/// so the matrix has 3·rows·cols rows.
struct SnapshotMatrix {
  Eigen::MatrixXd values;
  int rows = 0;
  int cols = 0;

  Index pixels() const { return Index{rows} * cols; }
  Index frames() const { return values.cols(); }
};

/// Zero-copy views of the first N-1 (p1) and last N-1 (p2) snapshot columns.
/// The viewed matrix must outlive the split.
struct SnapshotSplit {
  Eigen::Map<const Eigen::MatrixXd> p1;
  Eigen::Map<const Eigen::MatrixXd> p2;
};

SnapshotSplit split_snapshots(const Eigen::MatrixXd& snapshots);
SnapshotSplit split_snapshots(const SnapshotMatrix& snapshots);
SnapshotSplit split_snapshots(Eigen::MatrixXd&&) = delete;
SnapshotSplit split_snapshots(SnapshotMatrix&&) = delete;

/// Thin SVD p1 ≈ U·diag(S)·Vᵀ truncated to the retained rank. U is left
/// empty when the decomposition was requested without left vectors.
struct ThinSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;

  Index rank() const { return S.size(); }
  bool has_left_vectors() const { return U.cols() == S.size() && U.rows() > 0; }
};

enum class LeftVectors { compute, skip };

/// aᵀ·b accumulated over fixed row blocks. Block partials are reduced in
/// block order, so the result is bit-identical for every DMDBG_THREADS value.
Eigen::MatrixXd cross_gram(const Eigen::Ref<const Eigen::MatrixXd>& a,
                           const Eigen::Ref<const Eigen::MatrixXd>& b);

/// Method-of-snapshots SVD: V from the eigenvectors of p1ᵀp1, singular values
/// re-measured as ‖p1·vⱼ‖ (which keeps them accurate to machine precision
/// relative to s_max instead of its square root), then truncated to
/// s > rank_tol·s_max.
ThinSvd snapshot_svd(const Eigen::Ref<const Eigen::MatrixXd>& p1,
                     double rank_tol = kDefaultRankTol,
                     LeftVectors left = LeftVectors::compute);

/// Same as snapshot_svd but reuses a precomputed gram = p1ᵀp1.
ThinSvd snapshot_svd_from_gram(const Eigen::Ref<const Eigen::MatrixXd>& p1,
                               const Eigen::MatrixXd& gram, double rank_tol,
                               LeftVectors left);

/// Ĥ = Uᵀ·p2·V·diag(S)⁻¹. Requires left vectors.
Eigen::MatrixXd reduced_operator(const ThinSvd& svd,
                                 const Eigen::Ref<const Eigen::MatrixXd>& p2);

/// Ĥ from the cross gram p1ᵀp2, using U = p1·V·diag(S)⁻¹ implicitly.
Eigen::MatrixXd reduced_operator_from_cross_gram(const ThinSvd& svd,
                                                 const Eigen::MatrixXd& p1_t_p2);

struct Eigenpairs {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // unit 2-norm columns
};

/// Full eigendecomposition ordered by descending |σ|; equal magnitudes keep
/// the solver's order.
Eigenpairs eigen_reduced(const Eigen::MatrixXd& h_tilde);

/// Ψ = p2·V·diag(S)⁻¹·ω
Eigen::MatrixXcd dynamic_modes(const Eigen::Ref<const Eigen::MatrixXd>& p2,
                               const ThinSvd& svd, const Eigen::MatrixXcd& omega);

/// Product of a real tall matrix with complex coefficients, evaluated over
/// fixed row blocks.
Eigen::MatrixXcd apply_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& p2,
                                    const Eigen::MatrixXcd& coefficients);

/// Empty optional marks σ = 0, whose frequency is undefined.
using FourierFrequency = std::optional<std::complex<double>>;

/// μⱼ = ln(σⱼ)/δt on the principal branch.
std::vector<FourierFrequency> fourier_frequencies(const Eigen::VectorXcd& sigma,
                                                  double delta_t = kDefaultDeltaT);

struct DmdOptions {
  double rank_tol = kDefaultRankTol;
  double delta_t = kDefaultDeltaT;
  /// Form the full 3mn × r mode matrix. Background extraction only needs one
  /// column and turns this off.
  bool materialize_modes = true;
};

struct DmdResult {
  Eigen::MatrixXd h_tilde;
  Eigen::VectorXcd sigma;
  Eigen::MatrixXcd omega;
  std::vector<FourierFrequency> mu;
  double delta_t = kDefaultDeltaT;
  Eigen::VectorXd singular_values;
  /// V·diag(S)⁻¹·ω, so that Ψ = p2 · mode_coefficients.
  Eigen::MatrixXcd mode_coefficients;
  std::optional<Eigen::MatrixXcd> psi;

  Index rank() const { return singular_values.size(); }
};

DmdResult decompose(const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
                    const DmdOptions& options = {});
DmdResult decompose(const SnapshotMatrix& snapshots, const DmdOptions& options = {});

struct ModeSelection {
  Index index = -1;
  double abs_mu = 0.0;
  Eigen::VectorXcd background_vector;
};

/// Index of the valid mode with the smallest |μ|; the lowest index wins ties.
Index select_background_index(const std::vector<FourierFrequency>& mu);

/// Uses dmd.psi; throws if the modes were not materialised.
ModeSelection select_background_mode(const DmdResult& dmd);
/// Reconstructs only the selected column from p2.
ModeSelection select_background_mode(const DmdResult& dmd, const SnapshotSplit& split);

struct CompanionResult {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd h;
  Eigen::VectorXcd eigenvalues;
};

/// Shift-matrix formulation: the last snapshot as a minimum-norm
/// least-squares combination of p1, assembled into a companion matrix.
/// Intended for small instances (testing).
CompanionResult companion_oracle(const SnapshotSplit& split);

}  // namespace dmdbg
