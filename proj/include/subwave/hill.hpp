#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <optional>

#include "subwave/capacitance.hpp"
#include "subwave/geometry.hpp"
#include "subwave/modulation.hpp"

namespace subwave {

using Complex = std::complex<double>;

// Hill system  Psi'' + M(t) Psi = 0  with
//   M(t) = (delta kappa_r / rho_r) W1(t) C W2(t) + W3(t),
// first-order form  y' = A(t) y,  A = [[0, Id], [-M, 0]].
// M0 is the unmodulated coefficient matrix (delta kappa_r / (rho_r |D|)) C;
// complex entries cover the quasiperiodic backend.
class HillSystem {
  public:
    HillSystem(Eigen::MatrixXcd M0, Modulation mod);

    static HillSystem from_capacitance(const CapacitanceMatrix& C, const ResonatorSystem& sys,
                                       Modulation mod);
    static HillSystem from_quasiperiodic(const QuasiperiodicCapacitance& C,
                                         const ResonatorSystem& sys, Modulation mod);

    int size() const { return n_; }
    double period() const { return mod_.period(); }
    const Modulation& modulation() const { return mod_; }
    const Eigen::MatrixXcd& M0() const { return M0_; }

    Eigen::MatrixXcd M_at(double t) const;   // assemble_M
    Eigen::MatrixXcd A_at(double t) const;

    // y' = A(t) y applied to the columns of Y, written into out (2N rows).
    void apply_A(double t, const Eigen::MatrixXcd& Y, Eigen::MatrixXcd& out) const;

  private:
    int n_;
    Eigen::MatrixXcd M0_;
    Modulation mod_;
};

// delta kappa_r / (rho_r |D_1|): the scale factor carrying the |D_i| volume.
double hill_scale(const ResonatorSystem& sys);

// Harmonic content of M(t) = M0 + M^{(1)}(t) + M^{(2)}(t) + O(amp^3) with the
// modulation amplitudes folded in. Keys are the harmonic indices m; only
// m = +1 (first order) and m = 0, +2 (second order) are stored, the negative
// harmonics being complex conjugates for real M0.
struct ModulationHarmonics {
    std::map<int, Eigen::MatrixXcd> first;    // {+1}
    std::map<int, Eigen::MatrixXcd> second;   // {0, +2}
};
ModulationHarmonics modulation_harmonics(const Eigen::MatrixXcd& M0, const Modulation& mod);

// Spec-normalized epsilon-expansion blocks for uniform amplitude: M(t) =
// M0 + eps M1(t) + eps^2 M2(t) + O(eps^3). Throws on non-uniform amplitudes.
struct FourierBlocks {
    Eigen::MatrixXcd M1_p1;   // e^{+i Omega t} coefficient of M1
    Eigen::MatrixXcd M2_0;    // constant coefficient of M2
    Eigen::MatrixXcd M2_p2;   // e^{+2i Omega t} coefficient of M2
};
FourierBlocks epsilon_fourier_blocks(const CapacitanceMatrix& C, const ResonatorSystem& sys,
                                     const Modulation& mod);

struct StaticSpectrum {
    Eigen::VectorXd omega;     // sqrt(lambda_j * scale), ascending
    Eigen::VectorXd lambda;    // eigenvalues of C
    Eigen::MatrixXd vectors;   // orthonormal eigenvectors, columns
    double scale = 0.0;        // delta kappa_r / (rho_r |D|)
};
StaticSpectrum static_spectrum(const CapacitanceMatrix& C, const ResonatorSystem& sys);

struct MonodromyResult {
    Eigen::MatrixXcd X;            // fundamental solution at t = T
    double T = 0.0;
    int steps = 0;
    double richardson_error = 0.0; // ||X_h - X_{2h}|| / 15
};

// Fixed-step classical RK4 for X' = A(t) X, X(0) = Id, with a half-resolution
// rerun for the error estimate. Throws if the estimate exceeds tol (relative
// to ||X||).
MonodromyResult monodromy(const HillSystem& hill, int steps, double tol = 1e-6);

// General dense linear periodic ODE version (used by oracles and toy systems).
MonodromyResult integrate_monodromy(const std::function<Eigen::MatrixXcd(double)>& A, double T,
                                    int steps);

struct FoldResult {
    double omega0;   // in [-Omega/2, Omega/2)
    long folding;    // m with omega = omega0 + m Omega
};
FoldResult fold(double omega, double Omega);

struct Quasifrequency {
    Complex omega;          // log(mu)/(i T), real part folded
    Complex mu;             // monodromy eigenvalue
};
std::vector<Quasifrequency> quasifrequencies(const Eigen::MatrixXcd& X, double T, double Omega);

// Circular distance of folded real parts.
double folded_distance(double a, double b, double Omega);

struct EigenpairSelector {
    std::optional<double> target_omega;   // folded target
    std::optional<int> index;             // direct eigenvalue index
    double cluster_tol = 1e-6;            // relative to Omega
    std::optional<int> cluster_rank;      // pick within a cluster
};

struct FloquetResult {
    Complex omega;
    Complex mu;
    Eigen::VectorXcd y0;               // monodromy eigenvector, 2N
    Eigen::VectorXd times;
    Eigen::MatrixXcd psi;              // N x samples, first block of y(t)
    Eigen::MatrixXcd u;                // psi / sqrt(kappa_i(t)), normalized
};

FloquetResult bloch_envelopes(const HillSystem& hill, const MonodromyResult& mono,
                              const EigenpairSelector& which, int time_samples);

}  // namespace subwave
