#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subwave/capacitance.hpp"
#include "subwave/geometry.hpp"

using namespace subwave;

namespace {

constexpr double kPi = std::numbers::pi;

ResonatorSystem spheres(std::vector<Eigen::Vector3d> centers, double R, double gamma = 1.0) {
    ResonatorSystem s;
    s.centers = std::move(centers);
    s.radius = R;
    s.gamma = gamma;
    return s;
}

// Image-charge construction for two spheres held at potentials (1, 0): total
// charges give the capacitance coefficients c11, c21 (times 4 pi in our
// normalization where an isolated sphere has capacity 4 pi R).
std::pair<double, double> image_charge_pair(double Ra, double Rb, double dist, int iters) {
    struct Q { double q, x; };          // x measured from sphere A center
    std::vector<Q> last = {{Ra, 0.0}};
    double QA = Ra, QB = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<Q> next;
        if (it % 2 == 0) {              // image in B
            for (const auto& c : last) {
                const double s = dist - c.x;
                next.push_back({-c.q * Rb / s, dist - Rb * Rb / s});
                QB += next.back().q;
            }
        } else {                        // image in A
            for (const auto& c : last) {
                next.push_back({-c.q * Ra / c.x, Ra * Ra / c.x});
                QA += next.back().q;
            }
        }
        last = std::move(next);
    }
    return {4.0 * kPi * QA, 4.0 * kPi * QB};
}

}  // namespace

TEST_CASE("dilute: single unit sphere") {
    const auto C = dilute_capacitance(spheres({{0, 0, 0}}, 1.0));
    REQUIRE(C.size() == 1);
    CHECK(C.entries(0, 0) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
}

TEST_CASE("dilute: two-sphere off-diagonal from the Thm 4.3 formula") {
    const auto C = dilute_capacitance(spheres({{0, 0, 0}, {2, 0, 0}}, 1.0, 0.1));
    CHECK(C.entries(0, 1) == doctest::Approx(-0.2 * kPi).epsilon(1e-14));
    CHECK(C.entries(1, 0) == C.entries(0, 1));
    CHECK(C.entries(0, 0) == doctest::Approx(4.0 * kPi));
}

TEST_CASE("dilute: coincident centers rejected, thin-regime warning") {
    CHECK_THROWS(dilute_capacitance(spheres({{0, 0, 0}, {0, 0, 0}}, 0.1)));
    auto sys = build_supercell_chain(1, 0.1);
    sys.gamma = 1.0;  // far outside the dilute regime
    CHECK(dilute_capacitance(sys).diluteness_warning);
    sys.gamma = 0.05;
    CHECK(!dilute_capacitance(sys).diluteness_warning);
}

TEST_CASE("dilute supercell reproduces the single-cell letter pattern") {
    auto sys = build_supercell_chain(1, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    for (const auto& s : enumerate_symmetries(sys)) {
        const auto rep = check_symmetry_pattern(C.entries, s, 1e-10);
        CHECK(rep.pass);
    }
    // spot checks from the sigma_1 consequence list
    CHECK(C.entries(0, 0) == doctest::Approx(C.entries(1, 1)).epsilon(1e-14));
    CHECK(C.entries(0, 2) == doctest::Approx(C.entries(1, 2)).epsilon(1e-14));
    CHECK(C.entries(0, 4) == doctest::Approx(C.entries(1, 5)).epsilon(1e-14));
    CHECK(C.entries(0, 5) == doctest::Approx(C.entries(1, 4)).epsilon(1e-14));
}

TEST_CASE("every dilute matrix in range is symmetric positive definite") {
    for (int L : {1, 2, 4}) {
        auto sys = build_supercell_chain(L, 0.1);
        sys.gamma = 0.05;
        const auto C = dilute_capacitance(sys);
        CHECK((C.entries - C.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C.entries);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        for (int i = 0; i < C.size(); ++i)
            for (int j = 0; j < C.size(); ++j)
                CHECK((i == j ? C.entries(i, j) > 0 : C.entries(i, j) < 0));
    }
}

TEST_CASE("boundary: sphere capacity is 4 pi R") {
    for (double R : {1.0, 0.1}) {
        const auto C = boundary_capacitance(spheres({{0, 0, 0}}, R), 4);
        CHECK(C.entries(0, 0) == doctest::Approx(4.0 * kPi * R).epsilon(1e-10));
    }
}

TEST_CASE("boundary: two-sphere coefficients match the image-charge series") {
    const auto [c11, c12] = image_charge_pair(1.0, 1.0, 4.0, 60);
    const auto C = boundary_capacitance(spheres({{0, 0, 0}, {4, 0, 0}}, 1.0), 8);
    CHECK(std::abs(C.entries(0, 0) - c11) / c11 < 5e-3);
    CHECK(std::abs(C.entries(0, 1) - c12) / std::abs(c12) < 5e-3);
    CHECK(C.asymmetry < 1e-10);
}

TEST_CASE("boundary vs dilute deviation shrinks like gamma^2") {
    // fixed z-distance 2, physical centers z/gamma with unit spheres
    std::vector<double> gammas = {0.1, 0.05, 0.025};
    std::vector<double> devs;
    for (double g : gammas) {
        const auto sys = spheres({{0, 0, 0}, {2, 0, 0}}, 1.0, g);
        const auto Cb = boundary_capacitance(sys, 6);
        const auto Cd = dilute_capacitance(sys);
        devs.push_back((Cb.entries - Cd.entries).cwiseAbs().maxCoeff());
    }
    const double slope = std::log(devs[0] / devs[2]) / std::log(gammas[0] / gammas[2]);
    CHECK(slope > 1.6);
    CHECK(slope < 2.6);
}

TEST_CASE("boundary supercell keeps the letter pattern to machine level") {
    const auto sys = build_supercell_chain(1, 0.1);
    const auto C = boundary_capacitance(sys, 5);
    for (const auto& s : enumerate_symmetries(sys)) {
        const auto rep = check_symmetry_pattern(C.entries, s, 1e-10 * C.entries(0, 0));
        CHECK(rep.pass);
    }
}

TEST_CASE("quasiperiodic: alternating series closed form at the zone edge") {
    const auto cell = spheres({{0, 0, 0}}, 1.0, 0.05);
    const double ell = 2.0;
    const auto qc = quasiperiodic_capacitance(cell, kPi / ell, ell, 2000);
    // sum_{m != 0} (-1)^m / (|m| ell) = -(2/ell) log 2
    const double expected =
        4.0 * kPi - 0.05 * std::pow(4.0 * kPi, 2) / (4.0 * kPi) * (-2.0 / ell * std::log(2.0));
    CHECK(qc.entries(0, 0).real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(qc.entries(0, 0).imag()) < 1e-14);
}

TEST_CASE("quasiperiodic closed-form diagonal matches a brute-force sum") {
    const auto cell = spheres({{0, 0, 0}}, 1.0, 0.05);
    const double ell = 2.0, alpha = 0.37 * kPi / ell;
    const auto qc = quasiperiodic_capacitance(cell, alpha, ell, 100);
    double s = 0.0;
    const int M = 2000000;
    for (int m = M; m >= 1; --m) s += 2.0 * std::cos(m * alpha * ell) / (m * ell);
    const double pref = 0.05 * std::pow(4.0 * kPi, 2) / (4.0 * kPi);
    CHECK(qc.entries(0, 0).real() == doctest::Approx(4.0 * kPi - pref * s).epsilon(1e-5));
}

TEST_CASE("quasiperiodic: Hermitian, conjugate under alpha flip, reciprocal spectrum") {
    auto cell = build_supercell_chain(1, 0.1);
    cell.gamma = 0.05;
    const double ell = std::sqrt(3.0);
    const double alpha = 0.6 * kPi / ell;
    const auto qp = quasiperiodic_capacitance(cell, alpha, ell, 4000);
    const auto qm = quasiperiodic_capacitance(cell, -alpha, ell, 4000);
    CHECK((qp.entries - qp.entries.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((qm.entries - qp.entries.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ep(qp.entries), em(qm.entries);
    CHECK((ep.eigenvalues() - em.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("quasiperiodic: divergence guard near alpha = 0") {
    const auto cell = spheres({{0, 0, 0}}, 1.0, 0.05);
    CHECK_THROWS(quasiperiodic_capacitance(cell, 1e-5, 2.0, 1000));
}

TEST_CASE("check_symmetry_pattern identity and mismatch") {
    auto sys = build_supercell_chain(1, 0.1);
    sys.gamma = 0.05;
    const auto C = dilute_capacitance(sys);
    SymmetryPermutation id;
    id.perm = {0, 1, 2, 3, 4, 5};
    CHECK(check_symmetry_pattern(C.entries, id, 0.0).max_deviation == 0.0);
    SymmetryPermutation bad;
    bad.perm = {0, 1, 2, 3, 4};
    CHECK_THROWS(check_symmetry_pattern(C.entries, bad, 1e-10));
}
