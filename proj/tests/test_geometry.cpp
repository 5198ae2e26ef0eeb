#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subwave/geometry.hpp"

using namespace subwave;

namespace {

constexpr double kPi = std::numbers::pi;

bool contains_perm(const std::vector<SymmetryPermutation>& syms, const std::vector<int>& p) {
    for (const auto& s : syms)
        if (s.perm == p) return true;
    return false;
}

}  // namespace

TEST_CASE("supercell chain matches the closed-form centers") {
    const auto sys = build_supercell_chain(1, 0.1);
    REQUIRE(sys.size() == 6);
    // c1 = (sqrt3/2, 1/2) + 0.3 (cos 5pi/6, sin 5pi/6) = (0.7 sqrt3/2, 0.65)
    CHECK(sys.centers[0].x() == doctest::Approx(0.7 * std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(sys.centers[0].y() == doctest::Approx(0.65).epsilon(1e-14));
    CHECK(sys.centers[0].z() == 0.0);
    // enumerated left to right
    for (int i = 0; i + 1 < 6; ++i) CHECK(sys.centers[i].x() < sys.centers[i + 1].x());
}

TEST_CASE("supercell chain periodic extension") {
    const auto s3 = build_supercell_chain(3, 0.1);
    REQUIRE(s3.size() == 18);
    const auto s1 = build_supercell_chain(1, 0.1);
    const Eigen::Vector3d expect = s1.centers[0] + Eigen::Vector3d(std::sqrt(3.0), 0.0, 0.0);
    CHECK((s3.centers[6] - expect).norm() < 1e-14);
    CHECK(build_supercell_chain(4, 0.1).size() == 24);
}

TEST_CASE("supercell minimum distance is min(3 sqrt3 R, 1 - 6R)") {
    for (double R : {0.05, 0.1, 0.12}) {
        for (int L : {1, 2, 4}) {
            const auto sys = build_supercell_chain(L, R);
            const double expect = std::min(3.0 * std::sqrt(3.0) * R, 1.0 - 6.0 * R);
            CHECK(sys.min_pair_distance() == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("supercell argument validation") {
    CHECK_THROWS_AS(build_supercell_chain(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(build_supercell_chain(2, 0.2), std::invalid_argument);  // R >= 1/6
    CHECK_THROWS(build_supercell_chain(2, 0.13));                            // overlap, R >= 1/8
}

TEST_CASE("ssh chain layout") {
    const auto sys = build_ssh_chain(13, 0.1, 0.4, 0.1);
    REQUIRE(sys.size() == 13);
    // collinear on the x axis
    for (const auto& c : sys.centers) {
        CHECK(c.y() == 0.0);
        CHECK(c.z() == 0.0);
    }
    // mirror symmetric about the middle resonator
    const double mid = sys.centers[6].x();
    for (int i = 0; i < 13; ++i)
        CHECK(std::abs((mid - sys.centers[i].x()) - (sys.centers[12 - i].x() - mid)) < 1e-12);

    CHECK(build_ssh_chain(41, 0.1, 0.4, 0.1).size() == 41);
    CHECK_THROWS_AS(build_ssh_chain(12, 0.1, 0.4, 0.1), std::invalid_argument);
}

TEST_CASE("ssh chain equal gaps is equispaced") {
    const auto sys = build_ssh_chain(7, 0.2, 0.2, 0.1);
    for (int i = 0; i + 1 < 7; ++i)
        CHECK(sys.centers[i + 1].x() - sys.centers[i].x() == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("mirror interface geometry") {
    const auto m1 = build_mirror_interface(1, 0.1);
    REQUIRE(m1.size() == 12);
    CHECK(build_mirror_interface(3, 0.1).size() == 36);

    // the set is invariant under the interface reflection
    double cx = 0.0;
    for (const auto& c : m1.centers) cx += c.x();
    cx /= m1.size();
    for (const auto& c : m1.centers) {
        bool found = false;
        for (const auto& d : m1.centers)
            if (std::abs(2.0 * cx - c.x() - d.x()) < 1e-12 && std::abs(c.y() - d.y()) < 1e-12)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("enumerate_symmetries finds the single-supercell permutations") {
    const auto sys = build_supercell_chain(1, 0.1);
    const auto syms = enumerate_symmetries(sys);
    CHECK(contains_perm(syms, {1, 0, 2, 3, 5, 4}));  // (1 2)(5 6)
    CHECK(contains_perm(syms, {4, 5, 3, 2, 0, 1}));  // (1 5)(2 6)(3 4)
    CHECK(contains_perm(syms, {5, 4, 3, 2, 1, 0}));  // (1 6)(2 5)(3 4)
}

TEST_CASE("pi-rotation permutation for longer chains") {
    for (int L : {2, 4}) {
        const auto sys = build_supercell_chain(L, 0.1);
        const int n = sys.size();
        std::vector<int> rot(n);
        for (int i = 0; i < n; ++i) rot[i] = n - 1 - i;
        CHECK(contains_perm(enumerate_symmetries(sys), rot));
    }
}

TEST_CASE("single sphere has the identity only") {
    ResonatorSystem sys;
    sys.radius = 1.0;
    sys.centers.push_back({0.3, -0.4, 0.0});
    const auto syms = enumerate_symmetries(sys);
    REQUIRE(!syms.empty());
    for (const auto& s : syms) CHECK(s.perm == std::vector<int>{0});
}

TEST_CASE("symmetries verified by re-application") {
    const auto sys = build_supercell_chain(2, 0.1);
    for (const auto& s : enumerate_symmetries(sys)) {
        for (int i = 0; i < sys.size(); ++i) {
            const Eigen::Vector3d img = s.isometry.apply(sys.centers[i]);
            CHECK((img - sys.centers[s.perm[i]]).norm() <= 1e-12 * std::max(1.0, sys.radius));
        }
    }
}

TEST_CASE("mirror reflection permutation is a fix-free involution") {
    const auto sys = build_mirror_interface(2, 0.1);
    const int n = sys.size();
    std::vector<int> refl(n);
    for (int i = 0; i < n; ++i) refl[i] = n - 1 - i;  // x-sorted mirror pairs
    const auto syms = enumerate_symmetries(sys);
    CHECK(contains_perm(syms, refl));
    bool found = false;
    for (const auto& s : syms) {
        if (s.isometry.kind != IsometryDescriptor::Kind::reflection) continue;
        if (s.perm == refl && !s.fixes_any() && s.is_involution()) found = true;
    }
    CHECK(found);
}

TEST_CASE("geometry JSON round trip") {
    const auto sys = build_supercell_chain(2, 0.1);
    const auto back = system_from_json(to_json(sys));
    REQUIRE(back.size() == sys.size());
    for (int i = 0; i < sys.size(); ++i)
        CHECK((back.centers[i] - sys.centers[i]).norm() < 1e-15);
    CHECK(back.radius == sys.radius);
    CHECK(back.materials.delta == sys.materials.delta);
}
