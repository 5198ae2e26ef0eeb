#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "subwave/hill.hpp"
#include "subwave/perturbation.hpp"

namespace subwave {

// Thm 4.4 edge-pair data for a 6L-resonator supercell chain.
struct EdgePairReport {
    double lambda = 0.0;                 // (C v1)_2
    Eigen::VectorXd v1, v2;              // (-1, 1, 0.., 1, -1) and (-1, 1, 0.., -1, 1)
    Eigen::VectorXd resid1, resid2;      // (C - lambda Id) v_i
    double resid1_max = 0.0, resid2_max = 0.0;
    double eta = 0.0;                    // gap between the two eigenvalues closest to lambda
    // L=1 pattern letters (a, b, c, d, e, f, h, k) when N = 6
    std::optional<std::array<double, 8>> letters;
    double lambda_prime = 0.0;           // a - c + b - h, L=1 only
};
EdgePairReport detect_edge_pair(const Eigen::MatrixXd& C);

struct LocalizationProfile {
    Eigen::VectorXd magnitudes;          // normalized to max 1
    double left_mass = 0.0;              // l2 mass on the leftmost trimer
    double right_mass = 0.0;
    double participation_ratio = 0.0;
    bool left_localized = false;
};
LocalizationProfile localization_metrics(const Eigen::VectorXcd& mode);

struct ModeComparison {
    std::vector<int> pairing;            // predicted i -> numeric pairing[i]
    std::vector<double> rel_l2_error;    // after optimal global-phase alignment
};
ModeComparison compare_modes(const std::vector<Eigen::VectorXcd>& predicted,
                             const std::vector<Eigen::VectorXcd>& numeric);

struct BandTable {
    Eigen::VectorXd alphas;
    Eigen::MatrixXd static_bands;        // unfolded omega, n per alpha column
    Eigen::MatrixXd modulated_folded;    // folded quasifrequencies, 2n per column (empty if unmodulated)
    double gap_plus = 0.0, gap_minus = 0.0;   // zone-edge gap of the middle pair
    double static_gap_edge = 0.0;        // max intra-doublet separation at the zone edge
    double nonreciprocity = 0.0;         // |gap_plus - gap_minus|
    double integration_tolerance = 0.0;  // max per-alpha Richardson estimate
    double max_band_asymmetry = 0.0;     // max |omega(alpha) - omega(-alpha)| over the grid
};
BandTable band_sweep(const ResonatorSystem& unit_cell, double period,
                     const Eigen::VectorXd& alpha_grid, const std::optional<Modulation>& mod,
                     int trunc = 10000, int steps = 3000);

Eigen::VectorXd symmetric_alpha_grid(int points, double period);

enum class RobustnessEngine { perturbative, monodromy };

struct RobustnessProfile {
    double mu = 0.0;
    Eigen::VectorXd averaged_left;       // mean aligned magnitude profile, max 1
    Eigen::VectorXd averaged_right;
    double l2_deviation_left = 0.0;      // vs the unperturbed profile
    double l2_deviation_right = 0.0;
    double max_deviation = 0.0;          // max per-resonator deviation, either side
    int resampled = 0;                   // draws rejected for |eps_i| >= 1
};

struct RobustnessReport {
    Eigen::VectorXd unperturbed_left, unperturbed_right;
    std::vector<RobustnessProfile> per_mu;
    int trials = 0;
    std::uint64_t seed = 0;
};

RobustnessReport robustness_study(const ResonatorSystem& system, const CapacitanceMatrix& C,
                                  const Modulation& base_mod, const std::vector<double>& mu_list,
                                  double sigma, int trials, std::uint64_t seed,
                                  RobustnessEngine engine = RobustnessEngine::perturbative,
                                  int monodromy_steps = 400);

// Deterministic per-trial normal deviates: mt19937_64 keyed on (seed, trial),
// explicit Box-Muller so the stream does not depend on the standard library.
Eigen::VectorXd normal_array(std::uint64_t seed, std::uint64_t trial, int n, double mean,
                             double sigma);

}  // namespace subwave
