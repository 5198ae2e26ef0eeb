#include "subwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace subwave {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector3d planar(double x, double y) { return {x, y, 0.0}; }

}  // namespace

double ResonatorSystem::volume() const {
    return 4.0 / 3.0 * kPi * radius * radius * radius;
}

double ResonatorSystem::min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            best = std::min(best, (centers[i] - centers[j]).norm());
    return best;
}

void ResonatorSystem::check_disjoint() const {
    if (centers.size() >= 2 && min_pair_distance() <= 2.0 * radius)
        throw std::runtime_error("resonators overlap: pairwise center distance <= 2R");
}

ResonatorSystem build_supercell_chain(int n_supercells, double radius) {
    if (n_supercells < 1) throw std::invalid_argument("supercell count must be >= 1");
    if (!(radius > 0.0 && radius < 1.0 / 6.0))
        throw std::invalid_argument("supercell radius must satisfy 0 < R < 1/6");

    const double s3 = std::sqrt(3.0);
    const Eigen::Vector3d base1 = planar(s3 / 2.0, 0.5);
    const Eigen::Vector3d base2 = planar(s3, 1.0);
    const double a1[3] = {5.0 * kPi / 6.0, 3.0 * kPi / 2.0, kPi / 6.0};
    const double a2[3] = {7.0 * kPi / 6.0, kPi / 2.0, 11.0 * kPi / 6.0};

    ResonatorSystem sys;
    sys.radius = radius;
    sys.centers.reserve(6 * n_supercells);
    for (int j = 0; j < n_supercells; ++j) {
        const Eigen::Vector3d shift = planar(j * s3, 0.0);
        for (double a : a1)
            sys.centers.push_back(base1 + 3.0 * radius * planar(std::cos(a), std::sin(a)) + shift);
        for (double a : a2)
            sys.centers.push_back(base2 + 3.0 * radius * planar(std::cos(a), std::sin(a)) + shift);
    }
    sys.check_disjoint();
    return sys;
}

ResonatorSystem build_ssh_chain(int n_resonators, double intra_gap,
                                double inter_gap, double radius) {
    if (n_resonators < 3 || n_resonators % 2 == 0)
        throw std::invalid_argument("SSH chain needs an odd resonator count >= 3");
    if (radius <= 0.0 || intra_gap <= 0.0 || inter_gap <= 0.0)
        throw std::invalid_argument("SSH chain gaps and radius must be positive");

    // Palindromic gap sequence: dimers on both sides of a middle resonator.
    const int half = (n_resonators - 1) / 2;
    std::vector<double> gaps;
    gaps.reserve(n_resonators - 1);
    for (int i = 0; i < half; ++i) gaps.push_back(i % 2 == 0 ? intra_gap : inter_gap);
    for (int i = half - 1; i >= 0; --i) gaps.push_back(gaps[i]);

    ResonatorSystem sys;
    sys.radius = radius;
    double x = 0.0;
    sys.centers.push_back(planar(0.0, 0.0));
    for (double g : gaps) {
        x += g + 2.0 * radius;
        sys.centers.push_back(planar(x, 0.0));
    }
    sys.check_disjoint();
    return sys;
}

ResonatorSystem build_mirror_interface(int n_supercells, double radius) {
    ResonatorSystem left = build_supercell_chain(n_supercells, radius);
    double x_max = 0.0;
    for (const auto& c : left.centers) x_max = std::max(x_max, c.x());
    // Seam clearance 3R keeps the interface bond weaker than the bulk bonds, so
    // the interface modes stay bound in the gap.
    const double x_plane = x_max + 3.0 * radius;

    std::vector<Eigen::Vector3d> right = left.centers;
    for (auto& c : right) c.x() = 2.0 * x_plane - c.x();
    std::sort(right.begin(), right.end(),
              [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return a.x() < b.x(); });

    ResonatorSystem sys = left;
    sys.centers.insert(sys.centers.end(), right.begin(), right.end());
    sys.check_disjoint();
    return sys;
}

Eigen::Vector3d IsometryDescriptor::apply(const Eigen::Vector3d& x) const {
    switch (kind) {
        case Kind::identity:
            return x;
        case Kind::rotation_pi:
            return {2.0 * point.x() - x.x(), 2.0 * point.y() - x.y(), x.z()};
        case Kind::reflection: {
            const double c = std::cos(axis_angle), s = std::sin(axis_angle);
            const double dx = x.x() - point.x(), dy = x.y() - point.y();
            // reflect (dx, dy) about the line with direction (c, s)
            const double rx = (c * c - s * s) * dx + 2.0 * c * s * dy;
            const double ry = 2.0 * c * s * dx - (c * c - s * s) * dy;
            return {point.x() + rx, point.y() + ry, x.z()};
        }
    }
    return x;
}

std::string IsometryDescriptor::describe() const {
    switch (kind) {
        case Kind::identity: return "identity";
        case Kind::rotation_pi: return "pi-rotation about centroid";
        case Kind::reflection: return "reflection, axis angle " + std::to_string(axis_angle);
    }
    return {};
}

bool SymmetryPermutation::is_involution() const {
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[perm[i]] != static_cast<int>(i)) return false;
    return true;
}

bool SymmetryPermutation::fixes_any() const {
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[i] == static_cast<int>(i)) return true;
    return false;
}

namespace {

// Matches isometry-mapped centers back onto the center set. Empty optional if
// some image has no partner within tol.
std::optional<std::vector<int>> induced_permutation(const std::vector<Eigen::Vector3d>& centers,
                                                    const IsometryDescriptor& iso, double tol) {
    const int n = static_cast<int>(centers.size());
    std::vector<int> perm(n, -1);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d img = iso.apply(centers[i]);
        int best = -1;
        double best_d = tol;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            const double d = (img - centers[j]).norm();
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < 0) return std::nullopt;
        perm[i] = best;
        used[best] = true;
    }
    return perm;
}

}  // namespace

std::vector<SymmetryPermutation> enumerate_symmetries(const ResonatorSystem& system) {
    const int n = system.size();
    std::vector<SymmetryPermutation> out;
    if (n == 0) return out;

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& c : system.centers) centroid += c;
    centroid /= n;

    const double tol = 1e-12 * std::max(system.radius, 1.0) +
                       1e-12 * (system.centers.front() - centroid).norm();

    std::vector<IsometryDescriptor> candidates;
    candidates.push_back({IsometryDescriptor::Kind::identity, 0.0, centroid});
    candidates.push_back({IsometryDescriptor::Kind::rotation_pi, 0.0, centroid});

    // Reflection axes through the centroid: directions of point-centroid lines
    // and perpendicular bisector directions of all pairs, deduped modulo pi.
    std::vector<double> angles;
    auto push_angle = [&angles](double a) {
        a = std::fmod(a, kPi);
        if (a < 0) a += kPi;
        for (double b : angles)
            if (std::abs(b - a) < 1e-9 || std::abs(std::abs(b - a) - kPi) < 1e-9) return;
        angles.push_back(a);
    };
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d d = system.centers[i] - centroid;
        if (d.head<2>().norm() > tol) push_angle(std::atan2(d.y(), d.x()));
        for (int j = i + 1; j < n; ++j) {
            const Eigen::Vector3d e = system.centers[j] - system.centers[i];
            if (e.head<2>().norm() > tol) push_angle(std::atan2(e.y(), e.x()) + kPi / 2.0);
        }
    }
    for (double a : angles)
        candidates.push_back({IsometryDescriptor::Kind::reflection, a, centroid});

    for (const auto& iso : candidates) {
        auto perm = induced_permutation(system.centers, iso, std::max(tol, 1e-12 * system.radius));
        if (!perm) continue;
        bool seen = false;
        for (const auto& s : out)
            if (s.perm == *perm) { seen = true; break; }
        if (!seen) out.push_back({std::move(*perm), iso});
    }
    return out;
}

std::string to_json(const ResonatorSystem& system) {
    nlohmann::json j;
    auto& arr = j["centers"] = nlohmann::json::array();
    for (const auto& c : system.centers) arr.push_back({c.x(), c.y(), c.z()});
    j["radius"] = system.radius;
    j["gamma"] = system.gamma;
    j["materials"] = {{"delta", system.materials.delta},
                      {"kappa_r", system.materials.kappa_r},
                      {"rho_r", system.materials.rho_r},
                      {"kappa_0", system.materials.kappa_0},
                      {"rho_0", system.materials.rho_0}};
    return j.dump(2);
}

ResonatorSystem system_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ResonatorSystem sys;
    sys.radius = j.at("radius").get<double>();
    sys.gamma = j.value("gamma", 1.0);
    if (j.contains("materials")) {
        const auto& m = j["materials"];
        sys.materials.delta = m.value("delta", sys.materials.delta);
        sys.materials.kappa_r = m.value("kappa_r", 1.0);
        sys.materials.rho_r = m.value("rho_r", 1.0);
        sys.materials.kappa_0 = m.value("kappa_0", 1.0);
        sys.materials.rho_0 = m.value("rho_0", 1.0);
    }
    for (const auto& c : j.at("centers"))
        sys.centers.push_back({c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()});
    sys.check_disjoint();
    return sys;
}

}  // namespace subwave
