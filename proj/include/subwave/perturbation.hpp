#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>

#include "subwave/hill.hpp"

namespace subwave {

// Static first-order system diagonalized: columns of V are the normalized
// eigenvectors (v_j, +/- i omega_j v_j), A0 = diag(+/- i omega_j); F0 carries
// the same values with imaginary parts folded into [-Omega/2, Omega/2).
// Columns 0..N-1 hold the + branch, N..2N-1 the - branch, both in ascending
// omega order.
struct DiagonalizedStatic {
    Eigen::MatrixXcd V, Vinv;
    Eigen::VectorXcd A0, F0;
    Eigen::VectorXi folding;
    double Omega = 0.0;
    // static eigendata kept for the closed-form harmonic transform
    Eigen::MatrixXcd static_vectors;   // orthonormal eigenvectors of C (real values)
    Eigen::VectorXd omega;             // sqrt(lambda * scale)
    Eigen::VectorXd col_norm;          // |(v, +-i w v)| = sqrt(1 + w^2)

    int dim() const { return static_cast<int>(A0.size()); }
};

DiagonalizedStatic diagonalize_static(const StaticSpectrum& spec, double Omega);

// Lift the M-harmonics to A = [[0,Id],[-M,0]] and conjugate into the
// diagonalized basis. Negative harmonics are reconstructed from the real-M
// conjugation symmetry A^{-m} = conj(A^{+m}) before transforming.
struct TransformedHarmonics {
    std::map<int, Eigen::MatrixXcd> A1;   // m in {-1, +1}
    std::map<int, Eigen::MatrixXcd> A2;   // m in {-2, 0, +2}
};
TransformedHarmonics transform_harmonics(const DiagonalizedStatic& diag,
                                         const ModulationHarmonics& harmonics);

// Thm 2.5 first-order Floquet matrix. Throws on a small denominator
// |i m Omega + (A0)_ll - (A0)_kk| < 1e-8 Omega for a needed term.
// degeneracy_tol (units of Omega) decides when two folded diagonal entries are
// treated as equal; the two branches agree continuously at the crossover.
Eigen::MatrixXcd floquet_F1(const DiagonalizedStatic& diag,
                            const std::map<int, Eigen::MatrixXcd>& A1,
                            double degeneracy_tol = 1e-3);

// Thm 2.5 second-order entry, valid when (F0)_kk = (F0)_ll.
Complex floquet_F2_entry(const DiagonalizedStatic& diag,
                         const std::map<int, Eigen::MatrixXcd>& A1,
                         const std::map<int, Eigen::MatrixXcd>& A2,
                         const Eigen::MatrixXcd& F1, int k, int l,
                         double degeneracy_tol = 1e-3);

struct SplitPrediction {
    int k = -1, l = -1;                  // degenerate pair coordinates (+branch)
    Complex nu0;                         // degenerate value (pair mean)
    Eigen::Matrix2cd B;                  // Thm 4.8 block, at the given amplitudes
    Complex nu2_w, nu2_q;                // eigenvalues of B
    Eigen::Matrix2cd B_detuned;          // diag(static offsets) + B
    Complex nu_w, nu_q;                  // nu0 + eigenvalues of B_detuned
    Eigen::Vector2cd beta_w, beta_q;     // eigenvectors of B_detuned, unit norm
    Eigen::VectorXcd w0, q0, w1, q1;     // coordinates in the diagonalized basis
    Eigen::VectorXcd w_red, q_red;       // physical N-vectors, max-normalized

    // internals needed to assemble modes
    Eigen::MatrixXcd F1;
    Eigen::VectorXcd G;                  // diagonal of (nu0 Id - F0)^{-1} (1 - P)
};

// Locate the near-degenerate pair on the + branch. If thm44_vectors is set the
// pair is picked by overlap with Thm 4.4's v1, v2, otherwise by clustering the
// folded diagonal.
std::pair<int, int> find_degenerate_pair(const DiagonalizedStatic& diag,
                                         const StaticSpectrum& spec, bool thm44_vectors,
                                         double cluster_tol = 1e-6);

// B = (P F1 G F1 P + P F2 P)|_{E_nu0} with G = (nu0 Id - F0)^{-1} (1 - P).
// The harmonics carry the modulation amplitudes, so B is "at amplitude"; for
// uniform amplitude eps, B scales as eps^2 and F1 as eps.
SplitPrediction effective_block_B(const DiagonalizedStatic& diag,
                                  const TransformedHarmonics& th, std::pair<int, int> pair);

// Completes the prediction: splits B_detuned, forms w0/q0 from its
// eigenvectors, first-order corrections w1 = G F1 w0 (sign fixed against a
// numerical Floquet-matrix oracle), and the physical modes w_red, q_red.
SplitPrediction split_eigenvectors(SplitPrediction pred, const DiagonalizedStatic& diag);

// One-call pipeline used by experiments: harmonics -> transform -> B -> modes.
SplitPrediction split_prediction(const DiagonalizedStatic& diag, const Eigen::MatrixXcd& M0,
                                 const Modulation& mod, bool thm44_vectors = true);

// Max-normalize with the largest-magnitude entry rotated positive real.
Eigen::VectorXcd normalize_mode(const Eigen::VectorXcd& mode);

}  // namespace subwave
