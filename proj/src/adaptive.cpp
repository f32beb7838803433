#include "asds/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asds {

int select_cluster_projected(const Eigen::VectorXd& projected_feature,
                             const Eigen::MatrixXd& projected_centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < projected_centroids.cols(); ++k) {
        double d = (projected_feature - projected_centroids.col(k)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

int select_cluster(const Eigen::VectorXd& patch, const LearnedModel& model) {
    if (patch.size() != model.patch_area())
        throw std::invalid_argument("select_cluster: patch size mismatch");
    Eigen::VectorXd feature = model.projector * highpass(patch, model.patch_size);
    Eigen::MatrixXd proj_centroids(model.projector.rows(), model.cluster_count());
    for (int k = 0; k < model.cluster_count(); ++k)
        proj_centroids.col(k) = model.projector * model.centroids[k];
    return select_cluster_projected(feature, proj_centroids);
}

NLRow find_similar(const Image& estimate, const PatchGrid& grid, int center_patch,
                   const NLConfig& cfg) {
    if (center_patch < 0 || center_patch >= grid.patch_count())
        throw std::invalid_argument("find_similar: patch index out of range");
    if (cfg.count < 1)
        throw std::invalid_argument("find_similar: neighbor count must be >= 1");
    if (cfg.search_radius < grid.patch_size)
        throw std::invalid_argument("find_similar: search radius must be >= patch size");

    int p = grid.patch_size;
    int ax = grid.anchor_x(center_patch), ay = grid.anchor_y(center_patch);
    Eigen::VectorXd ref = extract_patch_at(estimate, p, ax, ay);

    int x0 = std::max(0, ax - cfg.search_radius), x1 = std::min(grid.width - p, ax + cfg.search_radius);
    int y0 = std::max(0, ay - cfg.search_radius), y1 = std::min(grid.height - p, ay + cfg.search_radius);

    struct Candidate {
        double dist;
        int scan; // row-major candidate order, the tie-break key
        int anchor_x, anchor_y;
    };
    std::vector<Candidate> cands;
    cands.reserve(static_cast<size_t>(x1 - x0 + 1) * (y1 - y0 + 1));
    int scan = 0;
    for (int qy = y0; qy <= y1; ++qy)
        for (int qx = x0; qx <= x1; ++qx, ++scan) {
            if (qx == ax && qy == ay) continue;
            double d = (extract_patch_at(estimate, p, qx, qy) - ref).squaredNorm();
            if (cfg.cutoff >= 0.0 && d > cfg.cutoff) continue;
            cands.push_back({d, scan, qx, qy});
        }
    if (cands.empty()) {
        // Cutoff rejected everything: fall back to the single closest patch.
        double best_d = std::numeric_limits<double>::infinity();
        Candidate best{0.0, 0, ax, ay};
        scan = 0;
        for (int qy = y0; qy <= y1; ++qy)
            for (int qx = x0; qx <= x1; ++qx, ++scan) {
                if (qx == ax && qy == ay) continue;
                double d = (extract_patch_at(estimate, p, qx, qy) - ref).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = {d, scan, qx, qy};
                }
            }
        cands.push_back(best);
    }

    size_t keep = std::min<size_t>(cfg.count, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                          return a.dist != b.dist ? a.dist < b.dist : a.scan < b.scan;
                      });

    NLRow row;
    int half = p / 2;
    for (size_t i = 0; i < keep; ++i) {
        row.centers.push_back((cands[i].anchor_y + half) * grid.width + (cands[i].anchor_x + half));
        row.distances.push_back(cands[i].dist);
    }
    return row;
}

std::vector<double> nl_weights_fixed(const std::vector<double>& distances, double h) {
    std::vector<double> w(distances.size());
    double sum = 0.0;
    for (size_t i = 0; i < distances.size(); ++i) {
        w[i] = std::exp(-distances[i] / h);
        sum += w[i];
    }
    for (double& v : w)
        v /= sum;
    return w;
}

std::vector<double> nl_weights(const std::vector<double>& distances) {
    if (distances.empty())
        throw std::invalid_argument("nl_weights: empty distance list");
    double mean = 0.0;
    for (double d : distances) {
        if (d < 0.0)
            throw std::invalid_argument("nl_weights: negative distance");
        mean += d;
    }
    mean /= static_cast<double>(distances.size());
    return nl_weights_fixed(distances, std::max(mean, 1e-8));
}

void SparseMatrix::add(int r, int c, double v) {
    for (auto& [col, val] : entries[r]) {
        if (col == c) {
            val += v;
            return;
        }
    }
    entries[r].push_back({c, v});
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols)
        throw std::invalid_argument("SparseMatrix::apply: size mismatch");
    std::vector<double> out(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (const auto& [c, v] : entries[r])
            acc += v * x[c];
        out[r] = acc;
    }
    return out;
}

std::vector<double> SparseMatrix::apply_transpose(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != rows)
        throw std::invalid_argument("SparseMatrix::apply_transpose: size mismatch");
    std::vector<double> out(cols, 0.0);
    for (int r = 0; r < rows; ++r)
        for (const auto& [c, v] : entries[r])
            out[c] += v * x[r];
    return out;
}

Eigen::MatrixXd SparseMatrix::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (const auto& [c, v] : entries[r])
            m(r, c) += v;
    return m;
}

std::vector<double> residual_apply(const SparseMatrix& m, const std::vector<double>& x) {
    std::vector<double> out = m.apply(x);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = x[i] - out[i];
    return out;
}

std::vector<double> residual_apply_transpose(const SparseMatrix& m, const std::vector<double>& z) {
    std::vector<double> out = m.apply_transpose(z);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = z[i] - out[i];
    return out;
}

// Nearest anchor per coordinate; the grid is separable so the nearest center
// decomposes per axis, and per-axis smaller-index ties give the first patch
// in scan order.
static std::vector<int> nearest_anchor_lut(const std::vector<int>& anchors, int extent, int half) {
    std::vector<int> lut(extent);
    for (int p = 0; p < extent; ++p) {
        int best = 0, best_d = std::numeric_limits<int>::max();
        for (size_t a = 0; a < anchors.size(); ++a) {
            int d = std::abs(anchors[a] + half - p);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(a);
            }
        }
        lut[p] = best;
    }
    return lut;
}

int nearest_patch_index(const PatchGrid& grid, int px, int py) {
    int half = grid.patch_size / 2;
    int best = -1;
    long best_d = std::numeric_limits<long>::max();
    for (int i = 0; i < grid.patch_count(); ++i) {
        long dy = grid.anchor_y(i) + half - py;
        long dx = grid.anchor_x(i) + half - px;
        long d = dy * dy + dx * dx;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

SparseMatrix build_A(const PatchAssignment& assignment, const LearnedModel& model,
                     const PatchGrid& grid) {
    if (static_cast<int>(assignment.size()) != grid.patch_count())
        throw std::invalid_argument("build_A: assignment size mismatch");
    int w = grid.width, h = grid.height, half = grid.patch_size / 2;
    std::vector<int> lut_x = nearest_anchor_lut(grid.anchors_x, w, half);
    std::vector<int> lut_y = nearest_anchor_lut(grid.anchors_y, h, half);

    SparseMatrix A(w * h, w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int host = lut_y[y] * grid.nx() + lut_x[x];
            const ARModel& ar = model.ar_models[assignment[host]];
            int row = y * w + x;
            A.entries[row].reserve(8);
            for (int t = 0; t < 8; ++t) {
                auto [dy, dx] = kArNeighborOffsets[t];
                int ny = (y + dy + h) % h, nx = (x + dx + w) % w;
                A.add(row, ny * w + nx, ar.coeffs[t]);
            }
        }
    return A;
}

SparseMatrix build_B(const std::vector<NLRow>& neighborhoods, const PatchGrid& grid) {
    if (static_cast<int>(neighborhoods.size()) != grid.patch_count())
        throw std::invalid_argument("build_B: neighborhood count mismatch");
    int w = grid.width, h = grid.height, half = grid.patch_size / 2;
    std::vector<int> lut_x = nearest_anchor_lut(grid.anchors_x, w, half);
    std::vector<int> lut_y = nearest_anchor_lut(grid.anchors_y, h, half);

    SparseMatrix B(w * h, w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int host = lut_y[y] * grid.nx() + lut_x[x];
            const NLRow& row = neighborhoods[host];
            if (row.weights.size() != row.centers.size())
                throw std::invalid_argument("build_B: neighborhood weights missing");
            int r = y * w + x;
            B.entries[r].reserve(row.centers.size());
            for (size_t l = 0; l < row.centers.size(); ++l)
                B.add(r, row.centers[l], row.weights[l]);
        }
    return B;
}

Eigen::VectorXd estimate_sigma(const std::vector<Eigen::VectorXd>& codes) {
    if (codes.empty())
        throw std::invalid_argument("estimate_sigma: no codes");
    Eigen::Index dim = codes[0].size();
    if (codes.size() < 2)
        return Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const Eigen::VectorXd& c : codes)
        mean += c;
    mean /= static_cast<double>(codes.size());
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (const Eigen::VectorXd& c : codes)
        var += (c - mean).cwiseAbs2();
    var /= static_cast<double>(codes.size());
    return var.cwiseSqrt();
}

Eigen::VectorXd compute_lambda(const Eigen::VectorXd& sigma_hat, double sigma_n, double eps) {
    if (eps <= 0.0)
        throw std::invalid_argument("compute_lambda: eps must be positive");
    if ((sigma_hat.array() < 0.0).any())
        throw std::invalid_argument("compute_lambda: negative sigma estimate");
    double num = 2.0 * std::sqrt(2.0) * sigma_n * sigma_n;
    return num / (sigma_hat.array() + eps);
}

} // namespace asds
