#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "subwave/geometry.hpp"

namespace subwave {

inline constexpr double kCapUnitSphere = 4.0 * 3.14159265358979323846;  // Cap_B of the unit sphere

struct CapacitanceMatrix {
    Eigen::MatrixXd entries;                 // symmetric, units of length
    std::string backend;                     // "dilute" | "boundary"
    double asymmetry = 0.0;                  // pre-symmetrization max |C - C^T|
    bool diluteness_warning = false;         // dilute regime stretched thin

    int size() const { return static_cast<int>(entries.rows()); }
};

// Thm 4.3 closed form: C_ii = Cap_B, C_ij = -gamma Cap_B^2 / (4 pi |z_i - z_j|)
// with the stored centers as the z_j and B the unit sphere.
CapacitanceMatrix dilute_capacitance(const ResonatorSystem& system);

// Collocation solve of S_D[psi_j] = chi_{dD_j} on the physical geometry
// gamma^{-1}·centers with sphere radius R. Product Gauss-Legendre x azimuth
// nodes; the weakly singular self patch uses S[1] = -R on the sphere surface.
CapacitanceMatrix boundary_capacitance(const ResonatorSystem& system, int quad_order);

struct QuasiperiodicCapacitance {
    Eigen::MatrixXcd entries;    // Hermitian
    double alpha = 0.0;          // Bloch parameter, rad / length
    double period = 0.0;
    int trunc = 0;
    double tail_bound = 0.0;     // estimate of the neglected lattice-sum tail
};

// Dilute quasiperiodic capacitance of a 1D-periodic chain of unit cells along
// e_x. Axis-aligned terms are summed in closed form via
// sum_{m>=1} cos(m t)/m = -log(2 sin(t/2)); the off-axis tail is accelerated
// by subtracting that series term-wise.
QuasiperiodicCapacitance quasiperiodic_capacitance(const ResonatorSystem& unit_cell,
                                                   double alpha, double period,
                                                   int trunc = 10000);

struct SymmetryCheckReport {
    double max_deviation = 0.0;
    bool pass = false;
};

// Thm 4.2: C_{sigma(i), sigma(j)} = C_{i,j}.
SymmetryCheckReport check_symmetry_pattern(const Eigen::MatrixXd& C,
                                           const SymmetryPermutation& sigma, double tol);

}  // namespace subwave
