#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subwave/analysis.hpp"
#include "subwave/capacitance.hpp"
#include "subwave/geometry.hpp"

using namespace subwave;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("detect_edge_pair: L=1 letters give lambda = a - c - b + h exactly") {
    auto sys = build_supercell_chain(1, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    const auto rep = detect_edge_pair(C.entries);
    REQUIRE(rep.letters.has_value());
    const auto& L = *rep.letters;  // a b c d e f h k
    CHECK(rep.lambda == doctest::Approx(L[0] - L[2] - L[1] + L[6]).epsilon(1e-14));
    // C v1 = lambda v1 exactly for one supercell
    CHECK(rep.resid1_max < 1e-13);
    // eta = |lambda - lambda'| = 2 |b - h|
    CHECK(rep.eta == doctest::Approx(2.0 * std::abs(L[1] - L[6])).epsilon(1e-8));
    CHECK(rep.v1.dot(rep.v2) == 0.0);
}

TEST_CASE("detect_edge_pair: residual scales linearly in gamma") {
    for (int L : {2, 4}) {
        auto sys = build_supercell_chain(L, 0.1);
        std::vector<double> res;
        for (double g : {0.05, 0.025, 0.0125}) {
            sys.gamma = g;
            res.push_back(detect_edge_pair(dilute_capacitance(sys).entries).resid1_max);
        }
        // halving gamma halves the residual within 30 percent
        CHECK(std::abs(res[0] / res[1] - 2.0) < 0.6);
        CHECK(std::abs(res[1] / res[2] - 2.0) < 0.6);
    }
}

TEST_CASE("detect_edge_pair: decoupled matrix hits the eigenvalue exactly") {
    const double c = 3.7;
    Eigen::MatrixXd C = c * Eigen::MatrixXd::Identity(12, 12);
    const auto rep = detect_edge_pair(C);
    CHECK(rep.lambda == c);
    CHECK(rep.resid1_max == 0.0);
    CHECK(rep.resid2_max == 0.0);
    CHECK_THROWS(detect_edge_pair(Eigen::MatrixXd::Identity(8, 8)));
}

TEST_CASE("localization metrics on canonical vectors") {
    const int n = 12;
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(n);
    e1[0] = 1.0;
    auto p = localization_metrics(e1);
    CHECK(p.left_mass == doctest::Approx(1.0));
    CHECK(p.right_mass == doctest::Approx(0.0));
    CHECK(p.participation_ratio == doctest::Approx(1.0 / n));
    CHECK(p.left_localized);

    Eigen::VectorXcd uni = Eigen::VectorXcd::Constant(n, 1.0);
    p = localization_metrics(uni);
    CHECK(p.left_mass == doctest::Approx(3.0 / n));
    CHECK(p.right_mass == doctest::Approx(3.0 / n));
    CHECK(p.participation_ratio == doctest::Approx(1.0));

    Eigen::VectorXcd v1 = Eigen::VectorXcd::Zero(n);
    v1[0] = -1; v1[1] = 1; v1[n - 2] = 1; v1[n - 1] = -1;
    p = localization_metrics(v1);
    CHECK(p.left_mass == doctest::Approx(0.5));
    CHECK(p.right_mass == doctest::Approx(0.5));

    CHECK_THROWS(localization_metrics(Eigen::VectorXcd::Zero(n)));
}

TEST_CASE("compare_modes pairs by overlap and scores phase-aligned error") {
    Eigen::VectorXcd a = Eigen::VectorXcd::Random(8);
    Eigen::VectorXcd b = Eigen::VectorXcd::Random(8);
    // numeric set = predicted set, crossed order, random global phases
    const Complex ph = std::exp(Complex(0, 1.234));
    const auto cmp = compare_modes({a, b}, {b * ph, a * std::exp(Complex(0, -0.7))});
    CHECK(cmp.pairing[0] == 1);
    CHECK(cmp.pairing[1] == 0);
    CHECK(cmp.rel_l2_error[0] < 1e-14);
    CHECK(cmp.rel_l2_error[1] < 1e-14);

    CHECK_THROWS(compare_modes({a, a}, {a, a}));  // ambiguous pairing
}

TEST_CASE("band sweep: static reciprocity and glide doublets at the zone edge") {
    auto cell = build_supercell_chain(1, 0.1);
    cell.gamma = 0.05;
    const double ell = std::sqrt(3.0);
    const auto grid = symmetric_alpha_grid(8, ell);
    const auto table = band_sweep(cell, ell, grid, std::nullopt, 3000);
    CHECK(table.max_band_asymmetry < 1e-8);
    CHECK(table.static_gap_edge < 1e-10);
    // bands are positive and ordered
    for (int p = 0; p < 8; ++p)
        for (int i = 0; i + 1 < 6; ++i)
            CHECK(table.static_bands(i, p) <= table.static_bands(i + 1, p) + 1e-15);
}

TEST_CASE("band sweep: reversed-orientation modulation opens a real zone-edge gap") {
    auto cell = build_supercell_chain(1, 0.1);
    cell.gamma = 0.05;
    const double ell = std::sqrt(3.0);
    Eigen::VectorXd grid(2);
    grid << -kPi / ell, kPi / ell;
    Modulation mod = Modulation::uniform(6, 0.2, 0.2, supercell_reversed_phases(6));
    const auto table = band_sweep(cell, ell, grid, mod, 3000, 2000);
    CHECK(table.gap_plus > 1e-4);
    CHECK(table.gap_minus > 1e-4);
}

TEST_CASE("normal_array is deterministic and respects moments") {
    const auto a = normal_array(42, 7, 1000, 0.02, 0.01);
    const auto b = normal_array(42, 7, 1000, 0.02, 0.01);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    const auto c = normal_array(42, 8, 1000, 0.02, 0.01);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    CHECK(std::abs(a.mean() - 0.02) < 2e-3);
    const double sd = std::sqrt((a.array() - a.mean()).square().sum() / (a.size() - 1));
    CHECK(std::abs(sd - 0.01) < 2e-3);
}

TEST_CASE("robustness study: zero noise reproduces the unperturbed profile") {
    auto sys = build_supercell_chain(2, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    const auto mod = Modulation::uniform(12, 2.0, 0.2, supercell_phases(12));
    const auto one = robustness_study(sys, C, mod, {0.0}, 0.0, 1, 99);
    CHECK((one.per_mu[0].averaged_left - one.unperturbed_left).cwiseAbs().maxCoeff() == 0.0);
    CHECK((one.per_mu[0].averaged_right - one.unperturbed_right).cwiseAbs().maxCoeff() == 0.0);
    const auto rep = robustness_study(sys, C, mod, {0.0}, 0.0, 3, 99);
    CHECK(rep.per_mu[0].l2_deviation_left < 1e-14);  // averaging round-off only
    CHECK(rep.per_mu[0].l2_deviation_right < 1e-14);
}

TEST_CASE("robustness study is bitwise reproducible under a fixed seed") {
    auto sys = build_supercell_chain(2, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    const auto mod = Modulation::uniform(12, 2.0, 0.2, supercell_phases(12));
    const auto r1 = robustness_study(sys, C, mod, {0.01}, 0.01, 8, 123);
    const auto r2 = robustness_study(sys, C, mod, {0.01}, 0.01, 8, 123);
    CHECK((r1.per_mu[0].averaged_left - r2.per_mu[0].averaged_left).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r1.per_mu[0].l2_deviation_left == r2.per_mu[0].l2_deviation_left);
    const auto r3 = robustness_study(sys, C, mod, {0.01}, 0.01, 8, 124);
    CHECK((r1.per_mu[0].averaged_left - r3.per_mu[0].averaged_left).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("perturbative trial modes span the monodromy pair subspace") {
    // classification of left vs right is noise-sensitive on small chains, so
    // compare the engines on the invariant: the 2D mode subspace per trial
    auto sys = build_supercell_chain(2, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    const Eigen::MatrixXcd M0 = hill_scale(sys) * C.entries.cast<Complex>();
    const auto spec = static_spectrum(C, sys);
    const auto diag = diagonalize_static(spec, 2.0);
    for (std::uint64_t trial : {0ull, 1ull, 2ull}) {
        Modulation mod = Modulation::uniform(12, 2.0, 0.2, supercell_phases(12));
        mod.amplitudes += normal_array(7, trial, 12, 0.0, 0.005);
        const auto pred = split_prediction(diag, M0, mod, true);

        HillSystem h(M0, mod);
        const auto mres = monodromy(h, 800);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mres.X);
        // two monodromy modes nearest the predicted quasifrequencies
        std::vector<std::pair<double, int>> rank;
        for (int i = 0; i < 24; ++i) {
            double re = std::arg(es.eigenvalues()[i]) / mres.T;
            if (re >= 1.0) re -= 2.0;
            rank.push_back({std::abs(re - pred.nu_w.imag()), i});
        }
        std::sort(rank.begin(), rank.end());
        Eigen::MatrixXcd num(12, 2);
        num.col(0) = es.eigenvectors().col(rank[0].second).head(12);
        num.col(1) = es.eigenvectors().col(rank[1].second).head(12);
        Eigen::MatrixXcd prd(12, 2);
        prd.col(0) = pred.w_red;
        prd.col(1) = pred.q_red;
        const Eigen::MatrixXcd Qn = Eigen::HouseholderQR<Eigen::MatrixXcd>(num)
                                        .householderQ() * Eigen::MatrixXcd::Identity(12, 2);
        const Eigen::MatrixXcd Qp = Eigen::HouseholderQR<Eigen::MatrixXcd>(prd)
                                        .householderQ() * Eigen::MatrixXcd::Identity(12, 2);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Qn.adjoint() * Qp);
        CHECK(svd.singularValues().minCoeff() > 0.995);  // subspaces coincide
    }
}

TEST_CASE("robustness study counts amplitude-overflow resamples") {
    auto sys = build_supercell_chain(1, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    Modulation mod = Modulation::uniform(6, 2.0, 0.9, supercell_phases(6));
    const auto rep = robustness_study(sys, C, mod, {0.0}, 0.08, 20, 5);
    CHECK(rep.per_mu[0].resampled > 0);
}
