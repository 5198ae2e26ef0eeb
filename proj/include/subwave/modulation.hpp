#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace subwave {

// rho_i(t) = 1 / (1 + eps_i cos(Omega t + phi_i)); kappa_i(t) = 1 + sum_k
// kappa_cos[i][k-1] cos(k Omega t) (empty = unmodulated kappa).
struct Modulation {
    double Omega = 1.0;
    Eigen::VectorXd amplitudes;
    Eigen::VectorXd phases;
    std::vector<Eigen::VectorXd> kappa_cos;

    double period() const { return 2.0 * std::numbers::pi / Omega; }
    int size() const { return static_cast<int>(amplitudes.size()); }

    bool uniform_amplitude() const {
        for (int i = 1; i < size(); ++i)
            if (amplitudes[i] != amplitudes[0]) return false;
        return size() > 0;
    }
    bool kappa_modulated() const {
        for (const auto& k : kappa_cos)
            if (k.size() > 0 && k.cwiseAbs().maxCoeff() > 0.0) return true;
        return false;
    }

    void validate() const {
        if (phases.size() != amplitudes.size())
            throw std::invalid_argument("modulation: phases/amplitudes size mismatch");
        if (amplitudes.size() > 0 && amplitudes.cwiseAbs().maxCoeff() >= 1.0)
            throw std::runtime_error("modulation: |eps_i| >= 1 makes rho_i singular");
        if (Omega <= 0.0) throw std::invalid_argument("modulation: Omega must be positive");
    }

    double rho(int i, double t) const {
        return 1.0 / (1.0 + amplitudes[i] * std::cos(Omega * t + phases[i]));
    }
    double kappa(int i, double t) const {
        double k = 1.0;
        if (i < static_cast<int>(kappa_cos.size()))
            for (int m = 0; m < kappa_cos[i].size(); ++m)
                k += kappa_cos[i][m] * std::cos((m + 1) * Omega * t);
        return k;
    }
    double dkappa(int i, double t) const {
        double dk = 0.0;
        if (i < static_cast<int>(kappa_cos.size()))
            for (int m = 0; m < kappa_cos[i].size(); ++m)
                dk -= kappa_cos[i][m] * (m + 1) * Omega * std::sin((m + 1) * Omega * t);
        return dk;
    }
    double ddkappa(int i, double t) const {
        double ddk = 0.0;
        if (i < static_cast<int>(kappa_cos.size()))
            for (int m = 0; m < kappa_cos[i].size(); ++m) {
                const double w = (m + 1) * Omega;
                ddk -= kappa_cos[i][m] * w * w * std::cos(w * t);
            }
        return ddk;
    }

    static Modulation unmodulated(int n, double Omega) {
        Modulation m;
        m.Omega = Omega;
        m.amplitudes = Eigen::VectorXd::Zero(n);
        m.phases = Eigen::VectorXd::Zero(n);
        return m;
    }
    static Modulation uniform(int n, double Omega, double eps, const Eigen::VectorXd& phases) {
        Modulation m;
        m.Omega = Omega;
        m.amplitudes = Eigen::VectorXd::Constant(n, eps);
        m.phases = phases;
        m.validate();
        return m;
    }
};

// Paper phase presets. `supercell` repeats with period 6, `ssh` with period 3,
// `supercell_reversed` flips the second trimer's orientation, `mirrored`
// reflects the first half onto the second.
Eigen::VectorXd supercell_phases(int n);
Eigen::VectorXd supercell_reversed_phases(int n);
Eigen::VectorXd ssh_phases(int n);
Eigen::VectorXd mirrored_phases(const Eigen::VectorXd& half, int n_total);

}  // namespace subwave
