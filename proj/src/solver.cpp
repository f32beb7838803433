#include "asds/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "asds/resample.hpp"

namespace asds {

SolverConfig deblur_preset() {
    SolverConfig cfg;
    cfg.gamma = 0.0775;
    cfg.eta = 0.1414;
    cfg.tau_rule = TauRule::MapWeighted;
    cfg.tau_divisor = 4.7;
    return cfg;
}

SolverConfig sr_noiseless_preset() {
    SolverConfig cfg;
    cfg.gamma = 0.0894;
    cfg.eta = 0.2;
    cfg.tau_rule = TauRule::FixedNumerator;
    cfg.tau_numerator = 0.18;
    return cfg;
}

SolverConfig sr_noisy_preset() {
    SolverConfig cfg;
    cfg.gamma = 0.2828;
    cfg.eta = 0.5;
    cfg.tau_rule = TauRule::MapWeighted;
    cfg.tau_divisor = 16.6;
    return cfg;
}

void Diagnostics::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << "iteration,objective,change,refreshed\n";
    for (const IterationRecord& r : history)
        out << r.iteration << "," << r.objective << "," << r.change << ","
            << (r.refreshed ? 1 : 0) << "\n";
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

double soft(double v, double tau) {
    double m = std::abs(v) - tau;
    if (m <= 0.0) return 0.0;
    return v < 0.0 ? -m : m;
}

Image initialize(const Image& y, const Degradation& d, Initializer init) {
    if (init == Initializer::Auto)
        init = d.scale > 1 ? Initializer::Bicubic : Initializer::Observed;
    if (init == Initializer::Observed) {
        if (d.scale != 1)
            throw std::invalid_argument("initialize: observed initializer requires scale 1");
        return y;
    }
    return bicubic_upsample(y, d.scale);
}

// K^T (y~ - K x) for the stacked operator K = [DH; gamma(I-A); eta(I-B)],
// y~ = [y; 0; 0]. The zero blocks make this (DH)^T(y - DHx) minus the two
// weighted regularizer normal terms.
static Image objective_gradient(const Image& x, const Image& y, const Degradation& d,
                                double gamma, double eta, const SparseMatrix& A,
                                const SparseMatrix& B) {
    Image low = apply_DH(x, d);
    require_same_dims(low, y, "gradient_step");
    for (size_t i = 0; i < low.data.size(); ++i)
        low.data[i] = y.data[i] - low.data[i];
    Image g = apply_DH_adjoint(low, d);
    if (gamma != 0.0) {
        std::vector<double> za = residual_apply(A, x.data);
        std::vector<double> ta = residual_apply_transpose(A, za);
        for (size_t i = 0; i < g.data.size(); ++i)
            g.data[i] -= gamma * gamma * ta[i];
    }
    if (eta != 0.0) {
        std::vector<double> zb = residual_apply(B, x.data);
        std::vector<double> tb = residual_apply_transpose(B, zb);
        for (size_t i = 0; i < g.data.size(); ++i)
            g.data[i] -= eta * eta * tb[i];
    }
    return g;
}

Image gradient_step(const Image& x, const Image& y, const Degradation& d, double gamma,
                    double eta, const SparseMatrix& A, const SparseMatrix& B) {
    Image g = objective_gradient(x, y, d, gamma, eta, A, B);
    Image out = x;
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] += g.data[i];
    return out;
}

ShrinkResult shrink_patches(const Image& x_half, const PatchAssignment& assignment,
                            const LearnedModel& model,
                            const std::vector<Eigen::VectorXd>& taus, const PatchGrid& grid) {
    int N = grid.patch_count();
    if (static_cast<int>(assignment.size()) != N || static_cast<int>(taus.size()) != N)
        throw std::invalid_argument("shrink_patches: per-patch data size mismatch");

    ShrinkResult res;
    res.codes.resize(N);
    std::vector<Eigen::VectorXd> rebuilt(N);
    for (int i = 0; i < N; ++i) {
        const Eigen::MatrixXd& atoms = model.dictionaries[assignment[i]].atoms;
        Eigen::VectorXd alpha = atoms.transpose() * extract_patch(x_half, grid, i);
        if (taus[i].size() != alpha.size())
            throw std::invalid_argument("shrink_patches: threshold size mismatch");
        for (Eigen::Index j = 0; j < alpha.size(); ++j)
            alpha[j] = soft(alpha[j], taus[i][j]);
        rebuilt[i] = atoms * alpha;
        res.codes[i] = std::move(alpha);
    }
    res.image = assemble_image(rebuilt, grid);
    return res;
}

double objective(const Image& x, const Image& y, const Degradation& d, double gamma, double eta,
                 const SparseMatrix& A, const SparseMatrix& B,
                 const std::vector<Eigen::VectorXd>& lambdas,
                 const std::vector<Eigen::VectorXd>& codes) {
    Image low = apply_DH(x, d);
    require_same_dims(low, y, "objective");
    double fidelity = 0.0;
    for (size_t i = 0; i < low.data.size(); ++i) {
        double r = y.data[i] - low.data[i];
        fidelity += r * r;
    }
    double reg = 0.0;
    if (gamma != 0.0) {
        std::vector<double> za = residual_apply(A, x.data);
        double s = 0.0;
        for (double v : za)
            s += v * v;
        reg += gamma * gamma * s;
    }
    if (eta != 0.0) {
        std::vector<double> zb = residual_apply(B, x.data);
        double s = 0.0;
        for (double v : zb)
            s += v * v;
        reg += eta * eta * s;
    }
    if (lambdas.size() != codes.size())
        throw std::invalid_argument("objective: lambda/code count mismatch");
    double sparsity = 0.0;
    for (size_t i = 0; i < codes.size(); ++i)
        sparsity += (lambdas[i].array() * codes[i].array().abs()).sum();
    return fidelity + reg + sparsity;
}

double spectral_bound(const std::function<std::vector<double>(const std::vector<double>&)>& op,
                      int dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& e : v) {
        e = gauss(rng);
        norm += e * e;
    }
    norm = std::sqrt(norm);
    for (double& e : v)
        e /= norm;

    double rayleigh = 0.0;
    for (int it = 0; it < 50; ++it) {
        std::vector<double> w = op(v);
        rayleigh = 0.0;
        double wn = 0.0;
        for (int i = 0; i < dim; ++i) {
            rayleigh += v[i] * w[i];
            wn += w[i] * w[i];
        }
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        for (int i = 0; i < dim; ++i)
            v[i] = w[i] / wn;
    }
    return rayleigh;
}

// ---------------------------------------------------------------------------
// Adaptive state handling

namespace {

struct AdaptiveState {
    PatchAssignment assignment;
    std::vector<NLRow> neighborhoods;
    SparseMatrix A, B;
    std::vector<Eigen::VectorXd> lambdas; // MAP weights, for the objective
    std::vector<Eigen::VectorXd> taus;    // thresholds per the configured rule
};

AdaptiveState refresh_adaptive(const Image& est, const LearnedModel& model, const PatchGrid& grid,
                               double sigma_n, const SolverConfig& cfg,
                               const Eigen::MatrixXd& proj_centroids) {
    int N = grid.patch_count();
    int half = grid.patch_size / 2;
    AdaptiveState st;
    st.assignment.resize(N);
    st.neighborhoods.resize(N);
    st.lambdas.resize(N);
    st.taus.resize(N);

    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd patch = extract_patch(est, grid, i);
        Eigen::VectorXd feature = model.projector * highpass(patch, model.patch_size);
        st.assignment[i] = select_cluster_projected(feature, proj_centroids);

        NLRow row = find_similar(est, grid, i, cfg.nl);
        row.weights = nl_weights(row.distances);

        const Eigen::MatrixXd& atoms = model.dictionaries[st.assignment[i]].atoms;
        std::vector<Eigen::VectorXd> codes;
        codes.reserve(row.centers.size());
        for (int center : row.centers) {
            int cy = center / grid.width, cx = center % grid.width;
            codes.push_back(atoms.transpose() *
                            extract_patch_at(est, grid.patch_size, cx - half, cy - half));
        }
        Eigen::VectorXd sigma_hat = estimate_sigma(codes);
        st.lambdas[i] = compute_lambda(sigma_hat, sigma_n, cfg.eps);
        if (cfg.tau_rule == TauRule::MapWeighted)
            st.taus[i] = st.lambdas[i] / cfg.tau_divisor;
        else
            st.taus[i] = cfg.tau_numerator / (sigma_hat.array() + cfg.eps);
        st.neighborhoods[i] = std::move(row);
    }
    st.A = build_A(st.assignment, model, grid);
    st.B = build_B(st.neighborhoods, grid);
    return st;
}

std::vector<Eigen::VectorXd> analyze_patches(const Image& x, const PatchAssignment& assignment,
                                             const LearnedModel& model, const PatchGrid& grid) {
    std::vector<Eigen::VectorXd> alphas(grid.patch_count());
    for (int i = 0; i < grid.patch_count(); ++i)
        alphas[i] = model.dictionaries[assignment[i]].atoms.transpose() * extract_patch(x, grid, i);
    return alphas;
}

Image synthesize_patches(const std::vector<Eigen::VectorXd>& alphas,
                         const PatchAssignment& assignment, const LearnedModel& model,
                         const PatchGrid& grid) {
    std::vector<Eigen::VectorXd> rebuilt(grid.patch_count());
    for (int i = 0; i < grid.patch_count(); ++i)
        rebuilt[i] = model.dictionaries[assignment[i]].atoms * alphas[i];
    return assemble_image(rebuilt, grid);
}

// True adjoint of the averaging synthesis: divide by cover counts, then
// analyze with the assigned dictionaries.
std::vector<Eigen::VectorXd> synthesis_adjoint(const Image& z, const PatchAssignment& assignment,
                                               const LearnedModel& model, const PatchGrid& grid,
                                               const std::vector<int>& counts) {
    Image scaled = z;
    for (int i = 0; i < scaled.pixel_count(); ++i)
        scaled.data[i] /= counts[i];
    return analyze_patches(scaled, assignment, model, grid);
}

double per_pixel_change(const Image& a, const Image& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / a.pixel_count();
}

void check_finite(const Image& x, int iteration) {
    if (!x.all_finite())
        throw std::runtime_error("restore: non-finite values at iteration " +
                                 std::to_string(iteration));
}

} // namespace

RestoreResult restore(const Image& y, const Degradation& d, const LearnedModel& model,
                      const SolverConfig& cfg) {
    if (model.cluster_count() < 1)
        throw std::invalid_argument("restore: empty model");
    if (cfg.max_iter < 1 || cfg.refresh_period < 1 || cfg.tol <= 0.0)
        throw std::invalid_argument("restore: bad solver configuration");
    if (cfg.gamma < 0.0 || cfg.eta < 0.0)
        throw std::invalid_argument("restore: gamma and eta must be >= 0");

    Image x = initialize(y, d, cfg.init);
    if (x.width < model.patch_size || x.height < model.patch_size)
        throw std::invalid_argument("restore: image smaller than model patch size");
    PatchGrid grid(model.patch_size, cfg.stride, x.width, x.height);
    std::vector<int> counts = cover_counts(grid);

    Eigen::MatrixXd proj_centroids(model.projector.rows(), model.cluster_count());
    for (int k = 0; k < model.cluster_count(); ++k)
        proj_centroids.col(k) = model.projector * model.centroids[k];

    AdaptiveState st = refresh_adaptive(x, model, grid, d.noise_sigma, cfg, proj_centroids);

    RestoreResult res;
    res.diagnostics.refresh_count = 0;

    if (!cfg.safe_step) {
        // Algorithm as stated: full gradient step, analyze, threshold, average.
        for (int k = 1; k <= cfg.max_iter; ++k) {
            Image x_half = gradient_step(x, y, d, cfg.gamma, cfg.eta, st.A, st.B);
            ShrinkResult sr = shrink_patches(x_half, st.assignment, model, st.taus, grid);
            check_finite(sr.image, k);

            double change = per_pixel_change(sr.image, x);
            double obj = objective(sr.image, y, d, cfg.gamma, cfg.eta, st.A, st.B, st.lambdas,
                                   sr.codes);
            x = std::move(sr.image);

            bool done = change <= cfg.tol || k == cfg.max_iter;
            bool refreshed = false;
            if (!done && k % cfg.refresh_period == 0) {
                st = refresh_adaptive(x, model, grid, d.noise_sigma, cfg, proj_centroids);
                refreshed = true;
                res.diagnostics.refresh_count++;
            }
            res.diagnostics.history.push_back({k, obj, change, refreshed});
            res.diagnostics.iterations = k;
            if (done) break;
        }
        res.image = std::move(x);
        return res;
    }

    // Certified mode: ISTA on the coefficients with the true synthesis
    // adjoint, step 1/c and thresholds lambda/(2c) for c above the spectral
    // norm of (K S)^T K S. The objective is then non-increasing between
    // refreshes up to rounding.
    std::vector<Eigen::VectorXd> alpha = analyze_patches(x, st.assignment, model, grid);
    x = synthesize_patches(alpha, st.assignment, model, grid);

    auto pack_dim = [&]() {
        int dim = 0;
        for (const Eigen::VectorXd& a : alpha)
            dim += static_cast<int>(a.size());
        return dim;
    };
    auto estimate_c = [&]() {
        int dim = pack_dim();
        auto op = [&](const std::vector<double>& v) {
            std::vector<Eigen::VectorXd> av(alpha.size());
            int off = 0;
            for (size_t i = 0; i < alpha.size(); ++i) {
                av[i] = Eigen::Map<const Eigen::VectorXd>(v.data() + off, alpha[i].size());
                off += static_cast<int>(alpha[i].size());
            }
            Image sx = synthesize_patches(av, st.assignment, model, grid);
            Image zero_y(y.width, y.height, 0.0);
            Image g = objective_gradient(sx, zero_y, d, cfg.gamma, cfg.eta, st.A, st.B);
            // objective_gradient(x, 0) = -K^T K x; flip the sign.
            for (double& e : g.data)
                e = -e;
            std::vector<Eigen::VectorXd> out =
                synthesis_adjoint(g, st.assignment, model, grid, counts);
            std::vector<double> packed(v.size());
            off = 0;
            for (const Eigen::VectorXd& o : out) {
                Eigen::Map<Eigen::VectorXd>(packed.data() + off, o.size()) = o;
                off += static_cast<int>(o.size());
            }
            return packed;
        };
        return std::max(1.05 * spectral_bound(op, dim, cfg.seed), 1e-8);
    };

    double c = estimate_c();
    for (int k = 1; k <= cfg.max_iter; ++k) {
        Image g = objective_gradient(x, y, d, cfg.gamma, cfg.eta, st.A, st.B);
        std::vector<Eigen::VectorXd> g_alpha = synthesis_adjoint(g, st.assignment, model, grid, counts);
        for (size_t i = 0; i < alpha.size(); ++i)
            for (Eigen::Index j = 0; j < alpha[i].size(); ++j)
                alpha[i][j] = soft(alpha[i][j] + g_alpha[i][j] / c, st.lambdas[i][j] / (2.0 * c));

        Image x_next = synthesize_patches(alpha, st.assignment, model, grid);
        check_finite(x_next, k);

        double change = per_pixel_change(x_next, x);
        double obj = objective(x_next, y, d, cfg.gamma, cfg.eta, st.A, st.B, st.lambdas, alpha);
        x = std::move(x_next);

        bool done = change <= cfg.tol || k == cfg.max_iter;
        bool refreshed = false;
        if (!done && k % cfg.refresh_period == 0) {
            st = refresh_adaptive(x, model, grid, d.noise_sigma, cfg, proj_centroids);
            alpha = analyze_patches(x, st.assignment, model, grid);
            x = synthesize_patches(alpha, st.assignment, model, grid);
            c = estimate_c();
            refreshed = true;
            res.diagnostics.refresh_count++;
        }
        res.diagnostics.history.push_back({k, obj, change, refreshed});
        res.diagnostics.iterations = k;
        if (done) break;
    }
    res.image = std::move(x);
    return res;
}

} // namespace asds
