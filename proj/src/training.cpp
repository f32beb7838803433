#include "asds/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "asds/kernel.hpp"
#include "asds/patch_grid.hpp"

namespace asds {

double population_variance(const Eigen::VectorXd& v) {
    double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

Eigen::VectorXd highpass(const Eigen::VectorXd& patch, int patch_size) {
    if (patch_size * patch_size != patch.size())
        throw std::invalid_argument("highpass: patch is not square");
    static const Kernel smooth = make_gaussian_kernel(1.0, 5);
    int r = smooth.radius();
    // Reflective padding: index -1 maps to 0, -2 to 1, and symmetrically at
    // the far edge.
    auto reflect = [patch_size](int i) {
        if (i < 0) i = -i - 1;
        if (i >= patch_size) i = 2 * patch_size - 1 - i;
        return i;
    };
    Eigen::VectorXd out(patch.size());
    for (int y = 0; y < patch_size; ++y)
        for (int x = 0; x < patch_size; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    acc += smooth.tap(dy, dx) * patch[reflect(y + dy) * patch_size + reflect(x + dx)];
            out[y * patch_size + x] = patch[y * patch_size + x] - acc;
        }
    return out;
}

PatchDataset harvest_patches(const std::vector<Image>& images, int patch_size, double delta,
                             int max_patches, uint64_t seed) {
    if (images.empty())
        throw std::invalid_argument("harvest_patches: no images");
    if (patch_size < 3)
        throw std::invalid_argument("harvest_patches: patch_size must be >= 3");
    if (max_patches < 1)
        throw std::invalid_argument("harvest_patches: max_patches must be >= 1");

    struct Position {
        int image, x, y;
    };
    std::vector<Position> positions;
    for (size_t im = 0; im < images.size(); ++im) {
        const Image& img = images[im];
        if (img.width < patch_size || img.height < patch_size) continue;
        for (int y = 0; y + patch_size <= img.height; ++y)
            for (int x = 0; x + patch_size <= img.width; ++x)
                positions.push_back({static_cast<int>(im), x, y});
    }
    std::mt19937_64 rng(seed);
    std::shuffle(positions.begin(), positions.end(), rng);

    int n = patch_size * patch_size;
    std::vector<Eigen::VectorXd> kept;
    kept.reserve(std::min<size_t>(positions.size(), max_patches));
    for (const Position& pos : positions) {
        Eigen::VectorXd p = extract_patch_at(images[pos.image], patch_size, pos.x, pos.y);
        if (population_variance(p) > delta) {
            kept.push_back(std::move(p));
            if (static_cast<int>(kept.size()) >= max_patches) break;
        }
    }
    if (kept.empty())
        throw std::invalid_argument("harvest_patches: no qualifying patches (variance threshold too high?)");

    PatchDataset ds;
    ds.patch_size = patch_size;
    ds.variance_threshold = delta;
    ds.patches.resize(n, kept.size());
    ds.features.resize(n, kept.size());
    for (size_t j = 0; j < kept.size(); ++j) {
        ds.patches.col(j) = kept[j];
        ds.features.col(j) = highpass(kept[j], patch_size);
    }
    return ds;
}

// ---------------------------------------------------------------------------
// k-means

static double sq_dist(const Eigen::MatrixXd& pts, int j, const Eigen::VectorXd& c) {
    return (pts.col(j) - c).squaredNorm();
}

static Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& pts, int K, std::mt19937_64& rng) {
    int M = static_cast<int>(pts.cols());
    Eigen::MatrixXd centroids(pts.rows(), K);
    std::uniform_int_distribution<int> uni(0, M - 1);
    centroids.col(0) = pts.col(uni(rng));
    std::vector<double> d2(M);
    for (int j = 0; j < M; ++j)
        d2[j] = sq_dist(pts, j, centroids.col(0));
    for (int k = 1; k < K; ++k) {
        double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        int pick;
        if (total > 0.0) {
            std::discrete_distribution<int> dist(d2.begin(), d2.end());
            pick = dist(rng);
        } else {
            pick = uni(rng);
        }
        centroids.col(k) = pts.col(pick);
        for (int j = 0; j < M; ++j)
            d2[j] = std::min(d2[j], sq_dist(pts, j, centroids.col(k)));
    }
    return centroids;
}

KMeansResult kmeans(const Eigen::MatrixXd& features, int K, uint64_t seed, int max_iters) {
    int M = static_cast<int>(features.cols());
    if (K < 1 || K > M)
        throw std::invalid_argument("kmeans: K must be in [1, sample count]");

    std::mt19937_64 rng(seed);
    KMeansResult res;
    res.centroids = kmeanspp_seed(features, K, rng);
    res.labels.assign(M, -1);

    // Squared distances to all centroids via the expansion
    // ||f - c||^2 = ||f||^2 + ||c||^2 - 2 f.c; the ||f||^2 part is constant
    // per point and can be dropped for the argmin but is needed for the SSE.
    Eigen::VectorXd feat_sq = features.colwise().squaredNorm();

    for (int iter = 0; iter < max_iters; ++iter) {
        Eigen::VectorXd cent_sq = res.centroids.colwise().squaredNorm();
        Eigen::MatrixXd dots = res.centroids.transpose() * features; // K x M
        bool changed = false;
        double sse = 0.0;
        for (int j = 0; j < M; ++j) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                double d = cent_sq[k] - 2.0 * dots(k, j);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            sse += std::max(0.0, best_d + feat_sq[j]);
            if (res.labels[j] != best) {
                res.labels[j] = best;
                changed = true;
            }
        }

        // Re-seed empty clusters with the point farthest from its centroid.
        std::vector<int> counts(K, 0);
        for (int lab : res.labels)
            counts[lab]++;
        for (int k = 0; k < K; ++k) {
            if (counts[k] > 0) continue;
            int far_j = -1;
            double far_d = -1.0;
            for (int j = 0; j < M; ++j) {
                if (counts[res.labels[j]] <= 1) continue;
                double d = sq_dist(features, j, res.centroids.col(res.labels[j]));
                if (d > far_d) {
                    far_d = d;
                    far_j = j;
                }
            }
            if (far_j < 0) continue;
            counts[res.labels[far_j]]--;
            res.labels[far_j] = k;
            counts[k] = 1;
            changed = true;
        }

        res.sse_history.push_back(sse);
        res.iterations = iter + 1;
        if (!changed) break;

        res.centroids.setZero();
        for (int j = 0; j < M; ++j)
            res.centroids.col(res.labels[j]) += features.col(j);
        for (int k = 0; k < K; ++k)
            res.centroids.col(k) /= static_cast<double>(counts[k]);
    }
    return res;
}

std::vector<Cluster> make_clusters(const std::vector<int>& labels, const Eigen::MatrixXd& features, int K) {
    std::vector<Cluster> clusters(K);
    for (Cluster& c : clusters)
        c.centroid = Eigen::VectorXd::Zero(features.rows());
    for (size_t j = 0; j < labels.size(); ++j) {
        clusters[labels[j]].members.push_back(static_cast<int>(j));
        clusters[labels[j]].centroid += features.col(static_cast<int>(j));
    }
    std::vector<Cluster> nonempty;
    for (Cluster& c : clusters) {
        if (c.members.empty()) continue;
        c.centroid /= static_cast<double>(c.members.size());
        nonempty.push_back(std::move(c));
    }
    return nonempty;
}

std::vector<Cluster> merge_small_clusters(std::vector<Cluster> clusters,
                                          const Eigen::MatrixXd& features, int min_size) {
    if (clusters.empty())
        throw std::invalid_argument("merge_small_clusters: no clusters");
    while (clusters.size() > 1) {
        int smallest = -1;
        for (size_t k = 0; k < clusters.size(); ++k)
            if (clusters[k].count() < min_size &&
                (smallest < 0 || clusters[k].count() < clusters[smallest].count()))
                smallest = static_cast<int>(k);
        if (smallest < 0) break;

        int nearest = -1;
        double nearest_d = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < clusters.size(); ++k) {
            if (static_cast<int>(k) == smallest) continue;
            double d = (clusters[k].centroid - clusters[smallest].centroid).norm();
            if (d < nearest_d) {
                nearest_d = d;
                nearest = static_cast<int>(k);
            }
        }
        Cluster& dst = clusters[nearest];
        Cluster& src = clusters[smallest];
        dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
        dst.centroid.setZero();
        for (int j : dst.members)
            dst.centroid += features.col(j);
        dst.centroid /= static_cast<double>(dst.members.size());
        clusters.erase(clusters.begin() + smallest);
    }
    return clusters;
}

// ---------------------------------------------------------------------------
// Per-cluster learning

SubDictionary learn_subdictionary(const Eigen::MatrixXd& cluster_patches, double lambda_rank) {
    int n = static_cast<int>(cluster_patches.rows());
    int m = static_cast<int>(cluster_patches.cols());
    if (m < 1)
        throw std::invalid_argument("learn_subdictionary: empty cluster");

    Eigen::MatrixXd cov = cluster_patches * cluster_patches.transpose() / static_cast<double>(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("learn_subdictionary: eigendecomposition failed");

    // Eigen returns ascending eigenvalues; reorder to descending.
    Eigen::MatrixXd basis(n, n);
    for (int j = 0; j < n; ++j)
        basis.col(j) = eig.eigenvectors().col(n - 1 - j);

    // F(r) via Parseval: the residual of keeping r components is the total
    // energy minus the energy captured by the first r coefficient rows.
    Eigen::MatrixXd coeffs = basis.transpose() * cluster_patches; // n x m
    double total_energy = cluster_patches.squaredNorm();
    double captured = 0.0, l1 = 0.0;
    int best_r = 1;
    double best_f = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= n; ++r) {
        captured += coeffs.row(r - 1).squaredNorm();
        l1 += coeffs.row(r - 1).cwiseAbs().sum();
        double f = std::max(0.0, total_energy - captured) + lambda_rank * l1;
        if (f < best_f) {
            best_f = f;
            best_r = r;
        }
    }

    SubDictionary d;
    d.rank = best_r;
    d.atoms = basis.leftCols(best_r);
    return d;
}

const std::array<std::pair<int, int>, 8> kArNeighborOffsets = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

ARModel learn_ar_model(const Eigen::MatrixXd& cluster_patches, int patch_size) {
    if (patch_size < 3)
        throw std::invalid_argument("learn_ar_model: patch_size must be >= 3");
    if (patch_size * patch_size != cluster_patches.rows())
        throw std::invalid_argument("learn_ar_model: patch size mismatch");

    Eigen::Matrix<double, 8, 8> gram = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 1> q;
    for (int j = 0; j < cluster_patches.cols(); ++j) {
        for (int y = 1; y + 1 < patch_size; ++y)
            for (int x = 1; x + 1 < patch_size; ++x) {
                for (int t = 0; t < 8; ++t) {
                    auto [dy, dx] = kArNeighborOffsets[t];
                    q[t] = cluster_patches((y + dy) * patch_size + (x + dx), j);
                }
                double center = cluster_patches(y * patch_size + x, j);
                gram.noalias() += q * q.transpose();
                rhs.noalias() += q * center;
            }
    }

    ARModel model;
    double damping = 1e-6 * gram.trace() / 8.0;
    if (damping <= 0.0)
        return model; // all-zero data: keep the zero predictor
    gram.diagonal().array() += damping;
    Eigen::Matrix<double, 8, 1> a = gram.ldlt().solve(rhs);
    for (int t = 0; t < 8; ++t)
        model.coeffs[t] = a[t];
    return model;
}

Eigen::MatrixXd build_projector(const Eigen::MatrixXd& centroids, double energy_fraction) {
    int n = static_cast<int>(centroids.rows());
    int K = static_cast<int>(centroids.cols());
    if (K < 2)
        throw std::invalid_argument("build_projector: need at least 2 centroids");

    Eigen::VectorXd mean = centroids.rowwise().mean();
    Eigen::MatrixXd centered = centroids.colwise() - mean;
    Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(K);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("build_projector: eigendecomposition failed");

    Eigen::VectorXd evals(n);
    for (int j = 0; j < n; ++j)
        evals[j] = std::max(0.0, eig.eigenvalues()[n - 1 - j]);
    double total = evals.sum();

    int ceiling = std::min({16, K - 1, n});
    int c;
    if (energy_fraction >= 1.0 || total <= 0.0) {
        c = ceiling;
    } else {
        c = n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            acc += evals[j];
            if (acc >= energy_fraction * total) {
                c = j + 1;
                break;
            }
        }
    }
    c = std::clamp(c, std::min(3, ceiling), ceiling);

    Eigen::MatrixXd proj(c, n);
    for (int j = 0; j < c; ++j)
        proj.row(j) = eig.eigenvectors().col(n - 1 - j).transpose();
    return proj;
}

TrainResult train(const std::vector<Image>& images, const TrainConfig& cfg) {
    PatchDataset ds = harvest_patches(images, cfg.patch_size, cfg.delta, cfg.max_patches, cfg.seed);

    int K = std::min(cfg.clusters, ds.count());
    KMeansResult km = kmeans(ds.features, K, cfg.seed, cfg.kmeans_max_iters);
    std::vector<Cluster> clusters = make_clusters(km.labels, ds.features, K);
    clusters = merge_small_clusters(std::move(clusters), ds.features, cfg.min_cluster_size);

    LearnedModel model;
    model.patch_size = cfg.patch_size;
    for (const Cluster& c : clusters) {
        Eigen::MatrixXd sub(ds.patch_area(), c.count());
        for (int j = 0; j < c.count(); ++j)
            sub.col(j) = ds.patches.col(c.members[j]);
        model.centroids.push_back(c.centroid);
        model.dictionaries.push_back(learn_subdictionary(sub, cfg.lambda_rank));
        model.ar_models.push_back(learn_ar_model(sub, cfg.patch_size));
    }

    Eigen::MatrixXd centroid_mat(ds.patch_area(), model.cluster_count());
    for (int k = 0; k < model.cluster_count(); ++k)
        centroid_mat.col(k) = model.centroids[k];
    if (model.cluster_count() >= 2) {
        model.projector = build_projector(centroid_mat, cfg.energy_fraction);
    } else {
        // Degenerate single-cluster model: selection is trivial, project onto
        // the full space.
        model.projector = Eigen::MatrixXd::Identity(ds.patch_area(), ds.patch_area());
    }

    return TrainResult{std::move(model), ds.count()};
}

} // namespace asds
