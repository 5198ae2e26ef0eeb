#include "subwave/perturbation.hpp"

#include <cmath>
#include <stdexcept>

namespace subwave {

namespace {
const Complex kI(0.0, 1.0);
}

DiagonalizedStatic diagonalize_static(const StaticSpectrum& spec, double Omega) {
    const int n = static_cast<int>(spec.omega.size());
    DiagonalizedStatic d;
    d.Omega = Omega;
    d.V.resize(2 * n, 2 * n);
    d.A0.resize(2 * n);
    d.F0.resize(2 * n);
    d.folding.resize(2 * n);
    for (int j = 0; j < n; ++j) {
        const double w = spec.omega[j];
        Eigen::VectorXcd up(2 * n), dn(2 * n);
        up.head(n) = spec.vectors.col(j).cast<Complex>();
        up.tail(n) = kI * w * spec.vectors.col(j).cast<Complex>();
        dn.head(n) = spec.vectors.col(j).cast<Complex>();
        dn.tail(n) = -kI * w * spec.vectors.col(j).cast<Complex>();
        d.V.col(j) = up / up.norm();
        d.V.col(n + j) = dn / dn.norm();
        d.A0[j] = kI * w;
        d.A0[n + j] = -kI * w;
        const FoldResult fp = fold(w, Omega);
        const FoldResult fm = fold(-w, Omega);
        d.F0[j] = kI * fp.omega0;
        d.F0[n + j] = kI * fm.omega0;
        d.folding[j] = static_cast<int>(fp.folding);
        d.folding[n + j] = static_cast<int>(fm.folding);
    }
    d.Vinv = d.V.partialPivLu().inverse();
    d.static_vectors = spec.vectors.cast<Complex>();
    d.omega = spec.omega;
    d.col_norm = (spec.omega.array().square() + 1.0).sqrt();
    return d;
}

TransformedHarmonics transform_harmonics(const DiagonalizedStatic& diag,
                                         const ModulationHarmonics& harmonics) {
    const int n2 = diag.dim();
    const int n = n2 / 2;
    // Vinv [[0,0],[-M,0]] V in closed form: with columns (v_k, +-i w_k v_k)/n_k
    // and dual rows (n_j/2) v_j^T -+ (n_j / 2 i w_j) v_j^T, the lifted harmonic
    // transforms to blocks -+ (n_j / (2 i w_j)) G_jk / n_k with G = V^T M V.
    auto lift_and_transform = [&](const Eigen::MatrixXcd& M) {
        const Eigen::MatrixXcd G = diag.static_vectors.adjoint() * (M * diag.static_vectors);
        Eigen::MatrixXcd A(n2, n2);
        for (int j = 0; j < n; ++j) {
            const Complex sj = diag.col_norm[j] / (Complex(0, 2.0 * diag.omega[j]));
            for (int k = 0; k < n; ++k) {
                const Complex e = sj * G(j, k) / diag.col_norm[k];
                A(j, k) = -e;
                A(j, n + k) = -e;
                A(n + j, k) = e;
                A(n + j, n + k) = e;
            }
        }
        return A;
    };
    TransformedHarmonics t;
    for (const auto& [m, M] : harmonics.first) {
        t.A1[m] = lift_and_transform(M);
        t.A1[-m] = lift_and_transform(M.conjugate());
    }
    for (const auto& [m, M] : harmonics.second) {
        t.A2[m] = lift_and_transform(M);
        if (m != 0) t.A2[-m] = lift_and_transform(M.conjugate());
    }
    return t;
}

Eigen::MatrixXcd floquet_F1(const DiagonalizedStatic& diag,
                            const std::map<int, Eigen::MatrixXcd>& A1,
                            double degeneracy_tol) {
    const int n2 = diag.dim();
    const double Om = diag.Omega;
    // Quasi-degenerate entries take the resonant branch; the two branches agree
    // continuously as (F0)_ll -> (F0)_kk, so the threshold only avoids 0/0.
    Eigen::MatrixXcd F1 = Eigen::MatrixXcd::Zero(n2, n2);
    for (int k = 0; k < n2; ++k) {
        for (int l = 0; l < n2; ++l) {
            if (std::abs(diag.F0[k] - diag.F0[l]) < degeneracy_tol * Om) {
                const int m = diag.folding[k] - diag.folding[l];
                const auto it = A1.find(m);
                if (it != A1.end()) F1(k, l) = it->second(k, l);
            } else {
                Complex s = 0.0;
                for (const auto& [m, Am] : A1) {
                    const Complex den = kI * (Om * m) + diag.A0[l] - diag.A0[k];
                    if (std::abs(den) < 1e-8 * Om)
                        throw std::runtime_error("floquet_F1: small denominator (resonant modulation)");
                    s += Am(k, l) / den;
                }
                F1(k, l) = (diag.F0[l] - diag.F0[k]) * s;
            }
        }
    }
    return F1;
}

Complex floquet_F2_entry(const DiagonalizedStatic& diag,
                         const std::map<int, Eigen::MatrixXcd>& A1,
                         const std::map<int, Eigen::MatrixXcd>& A2,
                         const Eigen::MatrixXcd& F1, int k, int l,
                         double degeneracy_tol) {
    const int n2 = diag.dim();
    const double Om = diag.Omega;
    if (std::abs(diag.F0[k] - diag.F0[l]) > degeneracy_tol * Om)
        throw std::invalid_argument("floquet_F2_entry: (F0)_kk must equal (F0)_ll");

    Complex total = 0.0;
    // first double sum: intermediate A1 products
    for (int j = 0; j < n2; ++j) {
        for (const auto& [m, Am] : A1) {
            if (m == diag.folding[j] - diag.folding[l]) continue;
            Complex num = 0.0;
            const auto a = A1.find(diag.folding[k] - diag.folding[l] - m);
            if (a != A1.end()) num += a->second(k, j);
            const auto b = A1.find(diag.folding[k] - diag.folding[j]);
            if (b != A1.end()) num -= b->second(k, j);
            if (num == 0.0) continue;
            const Complex den = kI * (Om * m) + diag.A0[l] - diag.A0[j];
            if (std::abs(den) < 1e-8 * Om)
                throw std::runtime_error("floquet_F2: small denominator in first sum");
            total += num * Am(j, l) / den;
        }
    }
    // second double sum: A1 against F1
    for (int j = 0; j < n2; ++j) {
        for (const auto& [m, Am] : A1) {
            if (m == diag.folding[k] - diag.folding[j]) continue;
            if (Am(k, j) == 0.0 || F1(j, l) == 0.0) continue;
            const Complex den = kI * (Om * m) + diag.A0[j] - diag.A0[k];
            if (std::abs(den) < 1e-8 * Om)
                throw std::runtime_error("floquet_F2: small denominator in second sum");
            total += Am(k, j) * F1(j, l) / den;
        }
    }
    const auto c = A2.find(diag.folding[k] - diag.folding[l]);
    if (c != A2.end()) total += c->second(k, l);
    return total;
}

std::pair<int, int> find_degenerate_pair(const DiagonalizedStatic& diag,
                                         const StaticSpectrum& spec, bool thm44_vectors,
                                         double cluster_tol) {
    const int n = static_cast<int>(spec.omega.size());
    if (thm44_vectors && n >= 6 && n % 6 == 0) {
        Eigen::VectorXd v1 = Eigen::VectorXd::Zero(n), v2 = Eigen::VectorXd::Zero(n);
        v1[0] = -1; v1[1] = 1; v1[n - 2] = 1; v1[n - 1] = -1;
        v2[0] = -1; v2[1] = 1; v2[n - 2] = -1; v2[n - 1] = 1;
        std::vector<std::pair<double, int>> overlap;
        for (int j = 0; j < n; ++j) {
            const double o1 = spec.vectors.col(j).dot(v1);
            const double o2 = spec.vectors.col(j).dot(v2);
            overlap.push_back({o1 * o1 + o2 * o2, j});
        }
        std::sort(overlap.rbegin(), overlap.rend());
        int a = overlap[0].second, b = overlap[1].second;
        if (a > b) std::swap(a, b);
        return {a, b};
    }
    // clustering of the + branch folded diagonal
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double d = std::abs(diag.F0[a].imag() - diag.F0[b].imag());
            if (d < best) {
                best = d;
                best_a = a;
                best_b = b;
            }
        }
    if (best > cluster_tol * std::abs(diag.F0[best_a].imag()) + cluster_tol * diag.Omega)
        throw std::runtime_error("find_degenerate_pair: no near-degenerate pair within tolerance");
    return {best_a, best_b};
}

SplitPrediction effective_block_B(const DiagonalizedStatic& diag,
                                  const TransformedHarmonics& th, std::pair<int, int> pair) {
    const int n2 = diag.dim();
    const auto [k, l] = pair;
    SplitPrediction p;
    p.k = k;
    p.l = l;
    p.nu0 = 0.5 * (diag.F0[k] + diag.F0[l]);
    p.F1 = floquet_F1(diag, th.A1);

    p.G = Eigen::VectorXcd::Zero(n2);
    for (int j = 0; j < n2; ++j) {
        if (j == k || j == l) continue;
        p.G[j] = 1.0 / (p.nu0 - diag.F0[j]);
    }

    const int idx[2] = {k, l};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Complex s = 0.0;
            for (int j = 0; j < n2; ++j) s += p.F1(idx[a], j) * p.G[j] * p.F1(j, idx[b]);
            p.B(a, b) = s + floquet_F2_entry(diag, th.A1, th.A2, p.F1, idx[a], idx[b]);
        }

    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(p.B);
    p.nu2_w = es.eigenvalues()[0];
    p.nu2_q = es.eigenvalues()[1];

    p.B_detuned = p.B;
    p.B_detuned(0, 0) += diag.F0[k] - p.nu0;
    p.B_detuned(1, 1) += diag.F0[l] - p.nu0;
    return p;
}

Eigen::VectorXcd normalize_mode(const Eigen::VectorXcd& mode) {
    int bi = 0;
    double best = 0.0;
    for (int i = 0; i < mode.size(); ++i)
        if (std::abs(mode[i]) > best) {
            best = std::abs(mode[i]);
            bi = i;
        }
    if (best == 0.0) throw std::runtime_error("normalize_mode: zero vector");
    return mode * (std::abs(mode[bi]) / mode[bi]) / best;
}

SplitPrediction split_eigenvectors(SplitPrediction pred, const DiagonalizedStatic& diag) {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(pred.B_detuned);
    const double sep = std::abs(es.eigenvalues()[0] - es.eigenvalues()[1]);
    if (sep <= 1e-10 * pred.B.cwiseAbs().maxCoeff())
        throw std::runtime_error("split_eigenvectors: effective block is degenerate at second order");

    const int n2 = diag.dim();
    const int n = n2 / 2;
    auto build = [&](int which, Eigen::VectorXcd& w0, Eigen::VectorXcd& w1,
                     Eigen::VectorXcd& red, Complex& nu, Eigen::Vector2cd& beta) {
        beta = es.eigenvectors().col(which);
        // convention: unit norm, first nonzero component positive real
        const Complex lead = std::abs(beta[0]) > 1e-12 ? beta[0] : beta[1];
        beta *= std::abs(lead) / lead;
        nu = pred.nu0 + es.eigenvalues()[which];
        w0 = Eigen::VectorXcd::Zero(n2);
        w0[pred.k] = beta[0];
        w0[pred.l] = beta[1];
        w1 = pred.G.asDiagonal() * (pred.F1 * w0);
        red = normalize_mode((diag.V * (w0 + w1)).head(n));
    };
    build(0, pred.w0, pred.w1, pred.w_red, pred.nu_w, pred.beta_w);
    build(1, pred.q0, pred.q1, pred.q_red, pred.nu_q, pred.beta_q);
    return pred;
}

SplitPrediction split_prediction(const DiagonalizedStatic& diag, const Eigen::MatrixXcd& M0,
                                 const Modulation& mod, bool thm44_vectors) {
    if (M0.imag().cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("split_prediction: expansion assumes a real capacitance matrix");
    const auto harmonics = modulation_harmonics(M0, mod);
    const auto th = transform_harmonics(diag, harmonics);
    StaticSpectrum spec;  // only vectors/omega used by pair finding
    spec.omega = diag.omega;
    spec.vectors = diag.static_vectors.real();
    const auto pair = find_degenerate_pair(diag, spec, thm44_vectors);
    return split_eigenvectors(effective_block_B(diag, th, pair), diag);
}

}  // namespace subwave
