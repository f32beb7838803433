#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "asds/image.hpp"

namespace asds {

// Example patches kept for learning; columns of `patches` are raw patches,
// columns of `features` their high-pass filtered versions. Only patches with
// population variance above `variance_threshold` are stored.
struct PatchDataset {
    int patch_size = 0;
    Eigen::MatrixXd patches;  // n x M
    Eigen::MatrixXd features; // n x M
    double variance_threshold = 0.0;

    int patch_area() const { return patch_size * patch_size; }
    int count() const { return static_cast<int>(patches.cols()); }
};

// Patch minus its Gaussian-smoothed version (sigma 1, 5x5 taps, reflective
// padding inside the patch).
Eigen::VectorXd highpass(const Eigen::VectorXd& patch, int patch_size);

double population_variance(const Eigen::VectorXd& v);

PatchDataset harvest_patches(const std::vector<Image>& images, int patch_size, double delta,
                             int max_patches, uint64_t seed);

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids; // n x K
    std::vector<double> sse_history;
    int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding; runs to an assignment fixpoint or
// max_iters. Empty clusters are re-seeded with the point farthest from its
// centroid.
KMeansResult kmeans(const Eigen::MatrixXd& features, int K, uint64_t seed, int max_iters = 100);

struct Cluster {
    std::vector<int> members;
    Eigen::VectorXd centroid; // feature-space mean of members
    int count() const { return static_cast<int>(members.size()); }
};

std::vector<Cluster> make_clusters(const std::vector<int>& labels, const Eigen::MatrixXd& features, int K);

// Repeatedly folds the smallest under-size cluster into the one with the
// nearest centroid until every cluster has >= min_size members (or one
// cluster remains). The absorbing centroid is recomputed as the member mean.
std::vector<Cluster> merge_small_clusters(std::vector<Cluster> clusters,
                                          const Eigen::MatrixXd& features, int min_size);

// First r_o principal components of the (uncentered) patch covariance; r_o
// minimizes ||S - Phi_r Phi_r^T S||_F^2 + lambda_rank * ||Phi_r^T S||_1 with
// ties resolved toward the smaller rank.
struct SubDictionary {
    Eigen::MatrixXd atoms; // n x rank, orthonormal columns
    int rank = 0;
};

SubDictionary learn_subdictionary(const Eigen::MatrixXd& cluster_patches, double lambda_rank);

// Order-8 autoregressive predictor of a pixel from its 3x3 neighbors, in
// row-major order excluding the center.
struct ARModel {
    std::array<double, 8> coeffs{};
};

// Offsets (dy,dx) of the 8 neighbors in coefficient order.
extern const std::array<std::pair<int, int>, 8> kArNeighborOffsets;

// Pools (center, neighbors) pairs from every interior pixel of every patch
// and solves the damped 8x8 normal equations.
ARModel learn_ar_model(const Eigen::MatrixXd& cluster_patches, int patch_size);

// PCA of the mean-centered centroid set; keeps the smallest row count whose
// cumulative eigenvalue fraction reaches energy_fraction, clamped to
// [3, min(16, K-1, n)]. Rows are orthonormal.
Eigen::MatrixXd build_projector(const Eigen::MatrixXd& centroids, double energy_fraction);

struct LearnedModel {
    int patch_size = 0;
    std::vector<Eigen::VectorXd> centroids;
    std::vector<SubDictionary> dictionaries;
    std::vector<ARModel> ar_models;
    Eigen::MatrixXd projector; // c x n

    int cluster_count() const { return static_cast<int>(centroids.size()); }
    int patch_area() const { return patch_size * patch_size; }
};

struct TrainConfig {
    int patch_size = 7;
    double delta = 16.0;
    int clusters = 200;
    int min_cluster_size = 300;
    double lambda_rank = 0.5;
    double energy_fraction = 0.95;
    int max_patches = 100000;
    int kmeans_max_iters = 100;
    uint64_t seed = 0;
};

struct TrainResult {
    LearnedModel model;
    int patches_used = 0;
};

TrainResult train(const std::vector<Image>& images, const TrainConfig& cfg);

} // namespace asds
