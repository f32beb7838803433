#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asds/image.hpp"
#include "asds/patch_grid.hpp"
#include "asds/training.hpp"

namespace asds {

// Cluster index per grid patch.
using PatchAssignment = std::vector<int>;

// Non-local similar patches of one host patch: center-pixel indices of the
// selected patches, their squared distances (ascending) and the normalized
// weights. The host patch itself is excluded.
struct NLRow {
    std::vector<int> centers;
    std::vector<double> distances;
    std::vector<double> weights;
};

struct NLConfig {
    int count = 10;         // L
    int search_radius = 12; // anchors within +/- radius, a 25x25 window
    double cutoff = -1.0;   // optional hard distance threshold; < 0 disables
};

// argmin_k || Phi_c * highpass(patch) - Phi_c * centroid_k ||, ties toward
// the smaller index.
int select_cluster(const Eigen::VectorXd& patch, const LearnedModel& model);

// Same argmin against pre-projected centroids (the per-iteration hot path).
int select_cluster_projected(const Eigen::VectorXd& projected_feature,
                             const Eigen::MatrixXd& projected_centroids);

// Scans all stride-1 patch positions within search_radius of patch i's
// anchor, excluding i itself; keeps the `count` smallest squared distances
// (after the optional cutoff). Weights are left empty.
NLRow find_similar(const Image& estimate, const PatchGrid& grid, int center_patch,
                   const NLConfig& cfg);

// exp(-e/h) normalized to sum 1, with the adaptive bandwidth
// h = max(mean(distances), 1e-8).
std::vector<double> nl_weights(const std::vector<double>& distances);
std::vector<double> nl_weights_fixed(const std::vector<double>& distances, double h);

// Minimal row-major sparse matrix; rows hold (column, value) pairs.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<std::pair<int, double>>> entries;

    SparseMatrix() = default;
    SparseMatrix(int r, int c) : rows(r), cols(c), entries(r) {}

    void add(int r, int c, double v);
    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> apply_transpose(const std::vector<double>& x) const;
    Eigen::MatrixXd dense() const;
};

// (I - M) x for the pixel-level regularizers.
std::vector<double> residual_apply(const SparseMatrix& m, const std::vector<double>& x);
// (I - M)^T z.
std::vector<double> residual_apply_transpose(const SparseMatrix& m, const std::vector<double>& z);

// Grid patch whose center is nearest to pixel (px, py); ties resolve to the
// first patch in scan order.
int nearest_patch_index(const PatchGrid& grid, int px, int py);

// Pixel-level AR regularization matrix: row i carries the 8 coefficients of
// the AR model assigned to the pixel's host patch, at the pixel's 8 neighbors
// (periodic indexing at the borders).
SparseMatrix build_A(const PatchAssignment& assignment, const LearnedModel& model,
                     const PatchGrid& grid);

// Pixel-level non-local matrix: row i carries the host patch's similar-patch
// weights at those patches' center pixels. Rows sum to 1.
SparseMatrix build_B(const std::vector<NLRow>& neighborhoods, const PatchGrid& grid);

// Per-coefficient population standard deviation across the code vectors of
// the similar patches.
Eigen::VectorXd estimate_sigma(const std::vector<Eigen::VectorXd>& codes_of_similars);

// lambda = 2*sqrt(2)*sigma_n^2 / (sigma_hat + eps), elementwise.
Eigen::VectorXd compute_lambda(const Eigen::VectorXd& sigma_hat, double sigma_n, double eps);

} // namespace asds
