#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace subwave {

struct Materials {
    double delta = 1e-4;   // contrast rho_r/rho_0
    double kappa_r = 1.0;
    double rho_r = 1.0;
    double kappa_0 = 1.0;
    double rho_0 = 1.0;
};

// A collection of equal-radius spherical resonators. Planar structures are
// embedded at z = 0. `gamma` is the dilute scale: the dilute capacitance
// formulas read the stored centers as the z_j of positions gamma^{-1} z_j.
struct ResonatorSystem {
    std::vector<Eigen::Vector3d> centers;
    double radius = 0.1;
    double gamma = 1.0;
    Materials materials;

    int size() const { return static_cast<int>(centers.size()); }
    double volume() const;                 // |D_i| of one resonator
    double min_pair_distance() const;
    bool subwavelength_regime() const { return materials.delta <= 1e-2; }

    // throws std::runtime_error if any two spheres intersect
    void check_disjoint() const;
};

ResonatorSystem build_supercell_chain(int n_supercells, double radius);

// Dimerized chain with a single resonator in the middle (mirror-symmetric gap
// sequence). Gaps are surface clearances; center spacing = gap + 2R.
ResonatorSystem build_ssh_chain(int n_resonators, double intra_gap,
                                double inter_gap, double radius);

ResonatorSystem build_mirror_interface(int n_supercells, double radius);

struct IsometryDescriptor {
    enum class Kind { identity, rotation_pi, reflection };
    Kind kind = Kind::identity;
    double axis_angle = 0.0;      // reflection axis angle in the z=0 plane
    Eigen::Vector3d point = Eigen::Vector3d::Zero();  // centroid

    Eigen::Vector3d apply(const Eigen::Vector3d& x) const;
    std::string describe() const;
};

struct SymmetryPermutation {
    std::vector<int> perm;        // sigma: index i -> perm[i]
    IsometryDescriptor isometry;

    bool is_involution() const;
    bool fixes_any() const;
};

// All permutations induced by in-plane candidate isometries (identity,
// pi-rotation about the centroid, reflections about centroid lines) that map
// the center set to itself within 1e-12 * radius.
std::vector<SymmetryPermutation> enumerate_symmetries(const ResonatorSystem& system);

// JSON round trip per the external interface.
std::string to_json(const ResonatorSystem& system);
ResonatorSystem system_from_json(const std::string& text);

}  // namespace subwave
