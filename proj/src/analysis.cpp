#include "subwave/analysis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace subwave {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);
}  // namespace

EdgePairReport detect_edge_pair(const Eigen::MatrixXd& C) {
    const int n = static_cast<int>(C.rows());
    if (n < 6 || n % 6 != 0)
        throw std::invalid_argument("detect_edge_pair: supercell enumeration needs N = 6L");

    EdgePairReport r;
    r.v1 = Eigen::VectorXd::Zero(n);
    r.v2 = Eigen::VectorXd::Zero(n);
    r.v1[0] = -1; r.v1[1] = 1; r.v1[n - 2] = 1; r.v1[n - 1] = -1;
    r.v2[0] = -1; r.v2[1] = 1; r.v2[n - 2] = -1; r.v2[n - 1] = 1;

    const Eigen::VectorXd w = C * r.v1;
    r.lambda = w[1];
    r.resid1 = C * r.v1 - r.lambda * r.v1;
    r.resid2 = C * r.v2 - r.lambda * r.v2;
    r.resid1_max = r.resid1.cwiseAbs().maxCoeff();
    r.resid2_max = r.resid2.cwiseAbs().maxCoeff();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    std::vector<double> d(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(d.begin(), d.end(), [&](double a, double b) {
        return std::abs(a - r.lambda) < std::abs(b - r.lambda);
    });
    r.eta = std::abs(d[0] - d[1]);

    if (n == 6) {
        // pattern letters per the single-supercell capacitance layout
        r.letters = std::array<double, 8>{C(0, 0), C(0, 4), C(0, 1), C(0, 3),
                                          C(2, 2), C(2, 3), C(0, 5), C(0, 2)};
        const auto& L = *r.letters;  // a b c d e f h k
        r.lambda_prime = L[0] - L[2] + L[1] - L[6];
    }
    return r;
}

LocalizationProfile localization_metrics(const Eigen::VectorXcd& mode) {
    const int n = static_cast<int>(mode.size());
    if (n < 3) throw std::invalid_argument("localization metrics: mode too short");
    const double nrm2 = mode.squaredNorm();
    if (nrm2 == 0.0) throw std::invalid_argument("localization metrics: zero vector");

    LocalizationProfile p;
    p.magnitudes = mode.cwiseAbs();
    p.magnitudes /= p.magnitudes.maxCoeff();
    p.left_mass = mode.head(3).squaredNorm() / nrm2;
    p.right_mass = mode.tail(3).squaredNorm() / nrm2;
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += std::pow(std::abs(mode[i]), 4);
    p.participation_ratio = nrm2 * nrm2 / (n * q);
    p.left_localized = p.left_mass > p.right_mass;
    return p;
}

namespace {

double aligned_rel_error(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const Eigen::VectorXcd an = a / a.norm();
    const Eigen::VectorXcd bn = b / b.norm();
    const Complex ip = bn.dot(an);  // conj(bn) . an
    if (std::abs(ip) == 0.0) return std::sqrt(2.0);
    return (an - bn * (ip / std::abs(ip))).norm();
}

}  // namespace

ModeComparison compare_modes(const std::vector<Eigen::VectorXcd>& predicted,
                             const std::vector<Eigen::VectorXcd>& numeric) {
    if (predicted.size() != numeric.size() || predicted.empty())
        throw std::invalid_argument("compare_modes: need matching nonempty mode sets");
    const int m = static_cast<int>(predicted.size());
    Eigen::MatrixXd overlap(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            overlap(i, j) = std::abs(numeric[j].normalized().dot(predicted[i].normalized()));
    if (std::abs(overlap.determinant()) < 1e-6)
        throw std::runtime_error("compare_modes: overlap matrix near-singular, pairing ambiguous");

    ModeComparison out;
    out.pairing.assign(m, -1);
    std::vector<bool> used(m, false);
    for (int i = 0; i < m; ++i) {
        int best = -1;
        for (int j = 0; j < m; ++j)
            if (!used[j] && (best < 0 || overlap(i, j) > overlap(i, best))) best = j;
        used[best] = true;
        out.pairing[i] = best;
        out.rel_l2_error.push_back(aligned_rel_error(predicted[i], numeric[best]));
    }
    return out;
}

Eigen::VectorXd symmetric_alpha_grid(int points, double period) {
    Eigen::VectorXd g(points);
    const double a_max = kPi / period;
    for (int i = 0; i < points; ++i)
        g[i] = -a_max + 2.0 * a_max * i / (points - 1);
    return g;
}

BandTable band_sweep(const ResonatorSystem& unit_cell, double period,
                     const Eigen::VectorXd& alpha_grid, const std::optional<Modulation>& mod,
                     int trunc, int steps) {
    const int n = unit_cell.size();
    const int pts = static_cast<int>(alpha_grid.size());
    const double scale = hill_scale(unit_cell);

    BandTable t;
    t.alphas = alpha_grid;
    t.static_bands.resize(n, pts);
    if (mod) t.modulated_folded.resize(2 * n, pts);

    const double Omega = mod ? mod->Omega : 1.0;
    double worst_tol = 0.0;

    auto zone_edge_gap = [&](const QuasiperiodicCapacitance& qc,
                             const Eigen::VectorXd& omegas) -> double {
        // folded target: the middle statically-degenerate pair
        const double target = 0.5 * (omegas[n / 2 - 1] + omegas[n / 2]);
        if (!mod) return omegas[n / 2] - omegas[n / 2 - 1];
        HillSystem hill = HillSystem::from_quasiperiodic(qc, unit_cell, *mod);
        MonodromyResult mres = monodromy(hill, steps, 1e-5);
        worst_tol = std::max(worst_tol, mres.richardson_error);
        const auto qf = quasifrequencies(mres.X, mres.T, Omega);
        const double tf = fold(target, Omega).omega0;
        std::vector<double> dist;
        std::vector<int> order(qf.size());
        for (std::size_t i = 0; i < qf.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return folded_distance(qf[a].omega.real(), tf, Omega) <
                   folded_distance(qf[b].omega.real(), tf, Omega);
        });
        return folded_distance(qf[order[0]].omega.real(), qf[order[1]].omega.real(), Omega);
    };

    for (int p = 0; p < pts; ++p) {
        const double alpha = alpha_grid[p];
        const auto qc = quasiperiodic_capacitance(unit_cell, alpha, period, trunc);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(qc.entries);
        const Eigen::VectorXd omegas = (es.eigenvalues() * scale).cwiseSqrt();
        t.static_bands.col(p) = omegas;

        if (mod) {
            HillSystem hill = HillSystem::from_quasiperiodic(qc, unit_cell, *mod);
            MonodromyResult mres = monodromy(hill, steps, 1e-5);
            worst_tol = std::max(worst_tol, mres.richardson_error);
            const auto qf = quasifrequencies(mres.X, mres.T, Omega);
            for (int i = 0; i < 2 * n; ++i) t.modulated_folded(i, p) = qf[i].omega.real();
        }

        const bool at_edge = std::abs(std::abs(alpha) - kPi / period) < 1e-9;
        if (at_edge) {
            double intra = 0.0;
            for (int d = 0; d + 1 < n; d += 2) intra = std::max(intra, omegas[d + 1] - omegas[d]);
            t.static_gap_edge = std::max(t.static_gap_edge, intra);
            const double g = zone_edge_gap(qc, omegas);
            if (alpha > 0)
                t.gap_plus = g;
            else
                t.gap_minus = g;
        }
    }

    // band asymmetry on the symmetric grid
    for (int p = 0; p < pts; ++p) {
        const int q = pts - 1 - p;
        if (std::abs(alpha_grid[p] + alpha_grid[q]) > 1e-12) continue;
        double d = (t.static_bands.col(p) - t.static_bands.col(q)).cwiseAbs().maxCoeff();
        if (mod) {
            Eigen::VectorXd a = t.modulated_folded.col(p), b = t.modulated_folded.col(q);
            std::sort(a.data(), a.data() + a.size());
            std::sort(b.data(), b.data() + b.size());
            d = std::max(d, (a - b).cwiseAbs().maxCoeff());
        }
        t.max_band_asymmetry = std::max(t.max_band_asymmetry, d);
    }
    t.nonreciprocity = std::abs(t.gap_plus - t.gap_minus);
    t.integration_tolerance = worst_tol;
    return t;
}

Eigen::VectorXd normal_array(std::uint64_t seed, std::uint64_t trial, int n, double mean,
                             double sigma) {
    // splitmix-style key mixing, then explicit Box-Muller
    std::uint64_t key = seed ^ (0x9e3779b97f4a7c15ULL + trial * 0xbf58476d1ce4e5b9ULL);
    key ^= key >> 30;
    key *= 0x94d049bb133111ebULL;
    key ^= key >> 31;
    std::mt19937_64 gen(key);
    auto uniform = [&gen]() {
        return (static_cast<double>(gen() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; i += 2) {
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = mean + sigma * r * std::cos(2.0 * kPi * u2);
        if (i + 1 < n) out[i + 1] = mean + sigma * r * std::sin(2.0 * kPi * u2);
    }
    return out;
}

namespace {

struct TrialModes {
    Eigen::VectorXcd left, right;   // normalized physical modes
    bool ok = false;
};

// Split edge modes for one amplitude vector, via the quasi-degenerate
// second-order prediction (fast path) or full monodromy.
TrialModes trial_modes(const DiagonalizedStatic& diag, const Eigen::MatrixXcd& M0,
                       const HillSystem& base_hill, const Modulation& mod,
                       RobustnessEngine engine, int mono_steps,
                       const Eigen::VectorXcd& ref_left) {
    TrialModes tm;
    if (engine == RobustnessEngine::perturbative) {
        const auto pred = split_prediction(diag, M0, mod, true);
        const auto pl = localization_metrics(pred.w_red);
        tm.left = pl.left_localized ? pred.w_red : pred.q_red;
        tm.right = pl.left_localized ? pred.q_red : pred.w_red;
    } else {
        HillSystem hill(M0, mod);
        const MonodromyResult mres = monodromy(hill, mono_steps, 1e-4);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mres.X);
        const int n2 = static_cast<int>(mres.X.rows());
        const int n = n2 / 2;
        // two eigenvectors with max overlap on the reference mode's subspace
        std::vector<std::pair<double, int>> score;
        for (int i = 0; i < n2; ++i) {
            const Eigen::VectorXcd head = es.eigenvectors().col(i).head(n).normalized();
            score.push_back({std::abs(head.dot(ref_left.normalized())), i});
        }
        std::sort(score.rbegin(), score.rend());
        const Eigen::VectorXcd m0 = normalize_mode(es.eigenvectors().col(score[0].second).head(n));
        const Eigen::VectorXcd m1 = normalize_mode(es.eigenvectors().col(score[1].second).head(n));
        const bool first_left = localization_metrics(m0).left_localized;
        tm.left = first_left ? m0 : m1;
        tm.right = first_left ? m1 : m0;
    }
    tm.ok = true;
    return tm;
}

void phase_align(Eigen::VectorXcd& u, const Eigen::VectorXcd& ref) {
    const Complex ip = ref.dot(u);
    if (std::abs(ip) > 0.0) u *= std::conj(ip) / std::abs(ip);
}

}  // namespace

RobustnessReport robustness_study(const ResonatorSystem& system, const CapacitanceMatrix& C,
                                  const Modulation& base_mod, const std::vector<double>& mu_list,
                                  double sigma, int trials, std::uint64_t seed,
                                  RobustnessEngine engine, int monodromy_steps) {
    if (trials < 1) throw std::invalid_argument("robustness study: trials must be >= 1");
    const int n = system.size();
    const Eigen::MatrixXcd M0 = hill_scale(system) * C.entries.cast<Complex>();
    const StaticSpectrum spec = static_spectrum(C, system);
    const DiagonalizedStatic diag = diagonalize_static(spec, base_mod.Omega);
    const HillSystem base_hill(M0, base_mod);

    // unperturbed reference
    const auto pred0 = split_prediction(diag, M0, base_mod, true);
    const auto loc0 = localization_metrics(pred0.w_red);
    Eigen::VectorXcd ref_left = loc0.left_localized ? pred0.w_red : pred0.q_red;
    Eigen::VectorXcd ref_right = loc0.left_localized ? pred0.q_red : pred0.w_red;
    if (engine == RobustnessEngine::monodromy) {
        const auto tm = trial_modes(diag, M0, base_hill, base_mod, engine, monodromy_steps, ref_left);
        ref_left = tm.left;
        ref_right = tm.right;
    }

    RobustnessReport rep;
    rep.trials = trials;
    rep.seed = seed;
    rep.unperturbed_left = ref_left.cwiseAbs();
    rep.unperturbed_left /= rep.unperturbed_left.maxCoeff();
    rep.unperturbed_right = ref_right.cwiseAbs();
    rep.unperturbed_right /= rep.unperturbed_right.maxCoeff();

    for (double mu : mu_list) {
        RobustnessProfile prof;
        prof.mu = mu;
        Eigen::VectorXd acc_left = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd acc_right = Eigen::VectorXd::Zero(n);
        for (int tr = 0; tr < trials; ++tr) {
            Eigen::VectorXd eps;
            std::uint64_t attempt = 0;
            for (;;) {
                eps = base_mod.amplitudes +
                      normal_array(seed, static_cast<std::uint64_t>(tr) * 1000003ULL +
                                             attempt + static_cast<std::uint64_t>(mu * 1e6) * 7919ULL,
                                   n, mu, sigma);
                if (eps.cwiseAbs().maxCoeff() < 1.0) break;
                ++prof.resampled;
                if (++attempt > 64)
                    throw std::runtime_error("robustness study: amplitude overflow, resampling failed");
            }
            Modulation mod = base_mod;
            mod.amplitudes = eps;
            auto tm = trial_modes(diag, M0, base_hill, mod, engine, monodromy_steps, ref_left);
            phase_align(tm.left, ref_left);
            phase_align(tm.right, ref_right);
            acc_left += tm.left.cwiseAbs();
            acc_right += tm.right.cwiseAbs();
        }
        acc_left /= trials;
        acc_right /= trials;
        prof.averaged_left = acc_left / acc_left.maxCoeff();
        prof.averaged_right = acc_right / acc_right.maxCoeff();
        prof.l2_deviation_left =
            (prof.averaged_left - rep.unperturbed_left).norm() / rep.unperturbed_left.norm();
        prof.l2_deviation_right =
            (prof.averaged_right - rep.unperturbed_right).norm() / rep.unperturbed_right.norm();
        prof.max_deviation =
            std::max((prof.averaged_left - rep.unperturbed_left).cwiseAbs().maxCoeff(),
                     (prof.averaged_right - rep.unperturbed_right).cwiseAbs().maxCoeff());
        rep.per_mu.push_back(std::move(prof));
    }
    return rep;
}

}  // namespace subwave
