#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "asds/adaptive.hpp"
#include "asds/degradation.hpp"
#include "asds/image.hpp"
#include "asds/patch_grid.hpp"
#include "asds/training.hpp"

namespace asds {

enum class TauRule {
    MapWeighted,    // tau = lambda / tau_divisor, lambda from the MAP weights
    FixedNumerator, // tau = tau_numerator / (sigma_hat + eps), for noiseless SR
};

enum class Initializer {
    Auto,     // observed image for scale 1, bicubic otherwise
    Observed,
    Bicubic,
};

struct SolverConfig {
    double gamma = 0.0775;
    double eta = 0.1414;
    TauRule tau_rule = TauRule::MapWeighted;
    double tau_divisor = 4.7;  // r in tau = lambda / r
    double tau_numerator = 0.18;
    double eps = 0.1;          // stabilizer in the weight formulas
    int refresh_period = 100;  // P
    double tol = 1e-4;         // e, threshold on ||x_k - x_{k+1}||^2 / N
    int max_iter = 1000;
    int stride = 2;
    Initializer init = Initializer::Auto;
    bool safe_step = false;    // certified step size + monotone objective
    NLConfig nl{};
    uint64_t seed = 0;         // power-iteration start when safe_step is on
};

// Parameter regimes for the three restoration settings.
SolverConfig deblur_preset();
SolverConfig sr_noiseless_preset();
SolverConfig sr_noisy_preset();

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double change = 0.0; // per-pixel squared change
    bool refreshed = false;
};

struct Diagnostics {
    std::vector<IterationRecord> history;
    int iterations = 0;
    int refresh_count = 0;

    void write_csv(const std::string& path) const;
};

struct RestoreResult {
    Image image;
    Diagnostics diagnostics;
};

double soft(double v, double tau);

Image initialize(const Image& y, const Degradation& d, Initializer init);

// x + (DH)^T(y - DHx) - gamma^2 (I-A)^T(I-A)x - eta^2 (I-B)^T(I-B)x.
Image gradient_step(const Image& x, const Image& y, const Degradation& d, double gamma,
                    double eta, const SparseMatrix& A, const SparseMatrix& B);

struct ShrinkResult {
    Image image;
    std::vector<Eigen::VectorXd> codes; // post-threshold coefficients per patch
};

// Analyze each patch with its assigned sub-dictionary, soft-threshold, then
// synthesize and average.
ShrinkResult shrink_patches(const Image& x_half, const PatchAssignment& assignment,
                            const LearnedModel& model,
                            const std::vector<Eigen::VectorXd>& taus, const PatchGrid& grid);

// ||y - DHx||^2 + gamma^2 ||(I-A)x||^2 + eta^2 ||(I-B)x||^2 + sum lambda|alpha|.
double objective(const Image& x, const Image& y, const Degradation& d, double gamma, double eta,
                 const SparseMatrix& A, const SparseMatrix& B,
                 const std::vector<Eigen::VectorXd>& lambdas,
                 const std::vector<Eigen::VectorXd>& codes);

// Power-iteration estimate (50 iterations, seeded start) of the top
// eigenvalue of a symmetric PSD operator. The Rayleigh quotient never
// overshoots the true norm.
double spectral_bound(const std::function<std::vector<double>(const std::vector<double>&)>& op,
                      int dim, uint64_t seed = 0x5eed);

RestoreResult restore(const Image& y, const Degradation& d, const LearnedModel& model,
                      const SolverConfig& cfg);

} // namespace asds
