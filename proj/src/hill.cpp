#include "subwave/hill.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace subwave {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);
}  // namespace

Eigen::VectorXd supercell_phases(int n) {
    const double p[6] = {2 * kPi / 3, 4 * kPi / 3, 0.0, 2 * kPi / 3, 0.0, 4 * kPi / 3};
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = p[i % 6];
    return out;
}

Eigen::VectorXd supercell_reversed_phases(int n) {
    const double p[6] = {2 * kPi / 3, 4 * kPi / 3, 0.0, 4 * kPi / 3, 0.0, 2 * kPi / 3};
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = p[i % 6];
    return out;
}

Eigen::VectorXd ssh_phases(int n) {
    const double p[3] = {2 * kPi / 3, 4 * kPi / 3, 0.0};
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = p[i % 3];
    return out;
}

Eigen::VectorXd mirrored_phases(const Eigen::VectorXd& half, int n_total) {
    Eigen::VectorXd out(n_total);
    const int h = static_cast<int>(half.size());
    if (2 * h != n_total) throw std::invalid_argument("mirrored_phases: need n_total = 2*half size");
    for (int i = 0; i < h; ++i) {
        out[i] = half[i];
        out[n_total - 1 - i] = half[i];
    }
    return out;
}

double hill_scale(const ResonatorSystem& sys) {
    return sys.materials.delta * sys.materials.kappa_r / (sys.materials.rho_r * sys.volume());
}

HillSystem::HillSystem(Eigen::MatrixXcd M0, Modulation mod)
    : n_(static_cast<int>(M0.rows())), M0_(std::move(M0)), mod_(std::move(mod)) {
    mod_.validate();
    if (mod_.size() != n_) throw std::invalid_argument("hill system: modulation size mismatch");
}

HillSystem HillSystem::from_capacitance(const CapacitanceMatrix& C, const ResonatorSystem& sys,
                                        Modulation mod) {
    return HillSystem(hill_scale(sys) * C.entries.cast<Complex>(), std::move(mod));
}

HillSystem HillSystem::from_quasiperiodic(const QuasiperiodicCapacitance& C,
                                          const ResonatorSystem& sys, Modulation mod) {
    return HillSystem(hill_scale(sys) * C.entries, std::move(mod));
}

Eigen::MatrixXcd HillSystem::M_at(double t) const {
    Eigen::MatrixXcd M(n_, n_);
    Eigen::VectorXd rho(n_), sk(n_);
    for (int i = 0; i < n_; ++i) {
        rho[i] = mod_.rho(i, t);
        sk[i] = std::sqrt(mod_.kappa(i, t));
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            M(i, j) = M0_(i, j) * sk[i] * sk[j] * rho[i] / rho[j];
    if (mod_.kappa_modulated()) {
        // W3 = (sqrt(k)/2) d/dt (k' k^{-3/2}) = k''/(2k) - (3/4)(k'/k)^2
        for (int i = 0; i < n_; ++i) {
            const double k = mod_.kappa(i, t);
            const double dk = mod_.dkappa(i, t);
            const double ddk = mod_.ddkappa(i, t);
            M(i, i) += ddk / (2.0 * k) - 0.75 * (dk / k) * (dk / k);
        }
    }
    return M;
}

Eigen::MatrixXcd HillSystem::A_at(double t) const {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * n_, 2 * n_);
    A.topRightCorner(n_, n_).setIdentity();
    A.bottomLeftCorner(n_, n_) = -M_at(t);
    return A;
}

void HillSystem::apply_A(double t, const Eigen::MatrixXcd& Y, Eigen::MatrixXcd& out) const {
    out.topRows(n_) = Y.bottomRows(n_);
    out.bottomRows(n_).noalias() = -M_at(t) * Y.topRows(n_);
}

ModulationHarmonics modulation_harmonics(const Eigen::MatrixXcd& M0, const Modulation& mod) {
    if (mod.kappa_modulated())
        throw std::invalid_argument("modulation harmonics: kappa modulation not covered by the expansion");
    const int n = static_cast<int>(M0.rows());
    Eigen::VectorXcd e(n);
    for (int i = 0; i < n; ++i) e[i] = mod.amplitudes[i] * std::exp(kI * mod.phases[i]);

    ModulationHarmonics h;
    Eigen::MatrixXcd m1(n, n), m20(n, n), m2p(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m1(i, j) = M0(i, j) * (e[j] - e[i]) / 2.0;
            // (eps_i c_i)^2 - eps_i c_i eps_j c_j, DC and +2 harmonics
            m20(i, j) = M0(i, j) * (std::norm(e[i]) - (e[i] * std::conj(e[j])).real()) / 2.0;
            m2p(i, j) = M0(i, j) * (e[i] * e[i] - e[i] * e[j]) / 4.0;
        }
    }
    h.first[1] = std::move(m1);
    h.second[0] = std::move(m20);
    h.second[2] = std::move(m2p);
    return h;
}

FourierBlocks epsilon_fourier_blocks(const CapacitanceMatrix& C, const ResonatorSystem& sys,
                                     const Modulation& mod) {
    if (!mod.uniform_amplitude())
        throw std::invalid_argument("epsilon_fourier_blocks: amplitudes must be uniform");
    const Eigen::MatrixXcd M0 = hill_scale(sys) * C.entries.cast<Complex>();
    const int n = static_cast<int>(M0.rows());
    Eigen::VectorXcd e(n);
    for (int i = 0; i < n; ++i) e[i] = std::exp(kI * mod.phases[i]);
    FourierBlocks b;
    b.M1_p1.resize(n, n);
    b.M2_0.resize(n, n);
    b.M2_p2.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            b.M1_p1(i, j) = M0(i, j) * (e[j] - e[i]) / 2.0;
            b.M2_0(i, j) = M0(i, j) * (1.0 - std::cos(mod.phases[i] - mod.phases[j])) / 2.0;
            b.M2_p2(i, j) = M0(i, j) * (e[i] * e[i] - e[i] * e[j]) / 4.0;
        }
    return b;
}

StaticSpectrum static_spectrum(const CapacitanceMatrix& C, const ResonatorSystem& sys) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C.entries);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("static spectrum: eigendecomposition failed");
    StaticSpectrum s;
    s.scale = hill_scale(sys);
    s.lambda = es.eigenvalues();
    if (s.lambda.minCoeff() <= 0.0)
        throw std::runtime_error("static spectrum: capacitance matrix is not positive definite");
    s.vectors = es.eigenvectors();
    s.omega = (s.lambda * s.scale).cwiseSqrt();
    return s;
}

namespace {

Eigen::MatrixXcd rk4_monodromy(const HillSystem& hill, int steps) {
    const int n2 = 2 * hill.size();
    const double T = hill.period();
    const double h = T / steps;
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Identity(n2, n2);
    Eigen::MatrixXcd k1(n2, n2), k2(n2, n2), k3(n2, n2), k4(n2, n2), tmp(n2, n2);
    double t = 0.0;
    for (int s = 0; s < steps; ++s) {
        hill.apply_A(t, X, k1);
        tmp = X + 0.5 * h * k1;
        hill.apply_A(t + 0.5 * h, tmp, k2);
        tmp = X + 0.5 * h * k2;
        hill.apply_A(t + 0.5 * h, tmp, k3);
        tmp = X + h * k3;
        hill.apply_A(t + h, tmp, k4);
        X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return X;
}

}  // namespace

MonodromyResult monodromy(const HillSystem& hill, int steps, double tol) {
    if (steps < 100) throw std::invalid_argument("monodromy: steps must be >= 100");
    MonodromyResult r;
    r.T = hill.period();
    r.steps = steps;
    r.X = rk4_monodromy(hill, steps);
    const Eigen::MatrixXcd coarse = rk4_monodromy(hill, steps / 2);
    r.richardson_error = (r.X - coarse).cwiseAbs().maxCoeff() / 15.0;
    const double scale = r.X.cwiseAbs().maxCoeff();
    if (r.richardson_error > tol * std::max(1.0, scale))
        throw std::runtime_error("monodromy: Richardson error estimate exceeds tolerance");
    return r;
}

MonodromyResult integrate_monodromy(const std::function<Eigen::MatrixXcd(double)>& A, double T,
                                    int steps) {
    const Eigen::MatrixXcd A0 = A(0.0);
    const int n = static_cast<int>(A0.rows());
    auto run = [&](int st) {
        const double h = T / st;
        Eigen::MatrixXcd X = Eigen::MatrixXcd::Identity(n, n);
        double t = 0.0;
        for (int s = 0; s < st; ++s) {
            const Eigen::MatrixXcd k1 = A(t) * X;
            const Eigen::MatrixXcd k2 = A(t + 0.5 * h) * (X + 0.5 * h * k1);
            const Eigen::MatrixXcd k3 = A(t + 0.5 * h) * (X + 0.5 * h * k2);
            const Eigen::MatrixXcd k4 = A(t + h) * (X + h * k3);
            X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        return X;
    };
    MonodromyResult r;
    r.T = T;
    r.steps = steps;
    r.X = run(steps);
    r.richardson_error = (r.X - run(steps / 2)).cwiseAbs().maxCoeff() / 15.0;
    return r;
}

FoldResult fold(double omega, double Omega) {
    const long m = static_cast<long>(std::floor(omega / Omega + 0.5));
    return {omega - m * Omega, m};
}

std::vector<Quasifrequency> quasifrequencies(const Eigen::MatrixXcd& X, double T, double Omega) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(X);
    if (es.info() != Eigen::Success) throw std::runtime_error("quasifrequencies: eigensolver failed");
    std::vector<Quasifrequency> out;
    out.reserve(X.rows());
    for (int i = 0; i < X.rows(); ++i) {
        const Complex mu = es.eigenvalues()[i];
        double re = std::arg(mu) / T;                  // in (-Omega/2, Omega/2]
        if (re >= Omega / 2.0) re -= Omega;            // half-open convention
        const double im = -std::log(std::abs(mu)) / T;
        out.push_back({Complex(re, im), mu});
    }
    std::sort(out.begin(), out.end(),
              [](const Quasifrequency& a, const Quasifrequency& b) {
                  return a.omega.real() < b.omega.real();
              });
    return out;
}

double folded_distance(double a, double b, double Omega) {
    double d = std::fmod(std::abs(a - b), Omega);
    return std::min(d, Omega - d);
}

FloquetResult bloch_envelopes(const HillSystem& hill, const MonodromyResult& mono,
                              const EigenpairSelector& which, int time_samples) {
    const int n = hill.size();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mono.X);
    if (es.info() != Eigen::Success) throw std::runtime_error("bloch envelopes: eigensolver failed");
    const double Omega = hill.modulation().Omega;

    int pick = -1;
    if (which.index) {
        pick = *which.index;
        if (pick < 0 || pick >= 2 * n) throw std::invalid_argument("bloch envelopes: index out of range");
    } else if (which.target_omega) {
        std::vector<int> order(2 * n);
        for (int i = 0; i < 2 * n; ++i) order[i] = i;
        auto dist = [&](int i) {
            double re = std::arg(es.eigenvalues()[i]) / mono.T;
            if (re >= Omega / 2.0) re -= Omega;
            return folded_distance(re, *which.target_omega, Omega);
        };
        std::sort(order.begin(), order.end(), [&](int a, int b) { return dist(a) < dist(b); });
        pick = order[0];
        if (order.size() > 1 && dist(order[1]) - dist(order[0]) < which.cluster_tol * Omega) {
            if (!which.cluster_rank)
                throw std::runtime_error("bloch envelopes: eigenvalue cluster is ambiguous, pass a cluster rank");
            pick = order[std::min<std::size_t>(*which.cluster_rank, order.size() - 1)];
        }
    } else {
        throw std::invalid_argument("bloch envelopes: selector needs an index or a target");
    }

    FloquetResult res;
    res.mu = es.eigenvalues()[pick];
    double re = std::arg(res.mu) / mono.T;
    if (re >= Omega / 2.0) re -= Omega;
    res.omega = Complex(re, -std::log(std::abs(res.mu)) / mono.T);
    res.y0 = es.eigenvectors().col(pick);

    // propagate y(0) over one period, sampling as we go
    const int steps_per = std::max(1, mono.steps / std::max(1, time_samples - 1));
    const int steps = steps_per * (time_samples - 1);
    const double h = mono.T / steps;
    res.times.resize(time_samples);
    res.psi.resize(n, time_samples);
    res.u.resize(n, time_samples);
    Eigen::MatrixXcd y = res.y0;
    Eigen::MatrixXcd k1(2 * n, 1), k2(2 * n, 1), k3(2 * n, 1), k4(2 * n, 1), tmp(2 * n, 1);
    int sample = 0;
    double t = 0.0;
    auto record = [&](double tt) {
        res.times[sample] = tt;
        res.psi.col(sample) = y.topRows(n);
        for (int i = 0; i < n; ++i)
            res.u(i, sample) = y(i, 0) / std::sqrt(hill.modulation().kappa(i, tt));
        ++sample;
    };
    record(0.0);
    for (int s = 0; s < steps; ++s) {
        hill.apply_A(t, y, k1);
        tmp = y + 0.5 * h * k1;
        hill.apply_A(t + 0.5 * h, tmp, k2);
        tmp = y + 0.5 * h * k2;
        hill.apply_A(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        hill.apply_A(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        if ((s + 1) % steps_per == 0) record(t);
    }

    // normalize: max |u| over resonators and samples equals 1, attained sample
    // rotated to the positive real axis
    int bi = 0, bs = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < time_samples; ++s)
            if (std::abs(res.u(i, s)) > best) {
                best = std::abs(res.u(i, s));
                bi = i;
                bs = s;
            }
    if (best == 0.0) throw std::runtime_error("bloch envelopes: zero mode");
    const Complex phase = std::abs(res.u(bi, bs)) / res.u(bi, bs);
    res.psi *= phase / best;
    res.u *= phase / best;
    res.y0 *= phase / best;
    return res;
}

}  // namespace subwave
