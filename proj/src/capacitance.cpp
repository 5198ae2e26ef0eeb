#include "subwave/capacitance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace subwave {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * xi * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (xi * p0 - p1) / (xi * xi - 1.0);
            const double dx = p0 / pp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        x[i] = -xi;
        x[n - 1 - i] = xi;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
    }
}

}  // namespace

CapacitanceMatrix dilute_capacitance(const ResonatorSystem& system) {
    const int n = system.size();
    CapacitanceMatrix cap;
    cap.backend = "dilute";
    cap.entries = Eigen::MatrixXd::Zero(n, n);
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        cap.entries(i, i) = kCapUnitSphere;
        for (int j = i + 1; j < n; ++j) {
            const double d = (system.centers[i] - system.centers[j]).norm();
            if (d == 0.0) throw std::runtime_error("dilute capacitance: coincident centers");
            min_dist = std::min(min_dist, d);
            const double off = -system.gamma * kCapUnitSphere * kCapUnitSphere / (4.0 * kPi * d);
            cap.entries(i, j) = cap.entries(j, i) = off;
        }
    }
    if (n >= 2 && system.gamma * kCapUnitSphere / min_dist >= kCapUnitSphere / 2.0)
        cap.diluteness_warning = true;
    return cap;
}

CapacitanceMatrix boundary_capacitance(const ResonatorSystem& system, int quad_order) {
    if (quad_order < 2) throw std::invalid_argument("boundary capacitance: quad_order must be >= 2");
    if (system.size() >= 2 &&
        system.min_pair_distance() / system.gamma <= 2.0 * system.radius)
        throw std::runtime_error("boundary capacitance: spheres overlap in the physical layout");

    const int ns = system.size();
    const double R = system.radius;

    // Node set on the unit sphere; azimuth count a multiple of 6 so the
    // discretization shares the structures' reflection/rotation symmetries.
    std::vector<double> gl_x, gl_w;
    gauss_legendre(quad_order, gl_x, gl_w);
    const int n_az = 6 * ((2 * quad_order + 5) / 6);
    const int per_sphere = quad_order * n_az;

    std::vector<Eigen::Vector3d> unit_nodes;
    std::vector<double> unit_w;
    unit_nodes.reserve(per_sphere);
    for (int p = 0; p < quad_order; ++p) {
        const double cu = gl_x[p];
        const double su = std::sqrt(std::max(0.0, 1.0 - cu * cu));
        for (int q = 0; q < n_az; ++q) {
            const double phi = 2.0 * kPi * q / n_az;
            unit_nodes.emplace_back(su * std::cos(phi), su * std::sin(phi), cu);
            unit_w.push_back(gl_w[p] * 2.0 * kPi / n_az);
        }
    }

    const int total = ns * per_sphere;
    Eigen::MatrixXd pts(total, 3);
    Eigen::VectorXd wts(total);
    for (int a = 0; a < ns; ++a) {
        const Eigen::Vector3d c = system.centers[a] / system.gamma;
        for (int k = 0; k < per_sphere; ++k) {
            pts.row(a * per_sphere + k) = (c + R * unit_nodes[k]).transpose();
            wts(a * per_sphere + k) = unit_w[k] * R * R;
        }
    }

    Eigen::MatrixXd S(total, total);
    for (int i = 0; i < total; ++i) {
        for (int j = 0; j < total; ++j) {
            if (i == j) {
                S(i, j) = 0.0;
                continue;
            }
            const double d = (pts.row(i) - pts.row(j)).norm();
            S(i, j) = -wts(j) / (4.0 * kPi * d);
        }
    }
    // Self-sphere correction: S[psi](x_i) = sum w_j G (psi_j - psi_i) + psi_i (-R).
    for (int a = 0; a < ns; ++a) {
        for (int i = 0; i < per_sphere; ++i) {
            const int row = a * per_sphere + i;
            double rowsum = 0.0;
            for (int j = 0; j < per_sphere; ++j)
                if (j != i) rowsum += S(row, a * per_sphere + j);
            S(row, row) = -R - rowsum;
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
    if (lu.rcond() < 1e-12)
        throw std::runtime_error("boundary capacitance: discretized single-layer system is ill-conditioned");

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(total, ns);
    for (int a = 0; a < ns; ++a) rhs.block(a * per_sphere, a, per_sphere, 1).setOnes();
    const Eigen::MatrixXd psi = lu.solve(rhs);

    Eigen::MatrixXd C(ns, ns);
    for (int a = 0; a < ns; ++a)
        C.row(a) = -(wts.segment(a * per_sphere, per_sphere).transpose() *
                     psi.middleRows(a * per_sphere, per_sphere));

    CapacitanceMatrix cap;
    cap.backend = "boundary";
    cap.asymmetry = (C - C.transpose()).cwiseAbs().maxCoeff();
    cap.entries = 0.5 * (C + C.transpose());
    return cap;
}

QuasiperiodicCapacitance quasiperiodic_capacitance(const ResonatorSystem& unit_cell,
                                                   double alpha, double period, int trunc) {
    const double ell = period;
    const double alpha_min = 1e-3 * kPi / ell;
    if (!(std::abs(alpha) >= alpha_min && std::abs(alpha) <= kPi / ell + 1e-12))
        throw std::runtime_error("quasiperiodic capacitance: alpha outside punctured Brillouin zone");
    if (trunc < 10) throw std::invalid_argument("quasiperiodic capacitance: trunc too small");

    const int n = unit_cell.size();
    const double theta = alpha * ell;
    // sum_{m != 0} e^{i m theta} / (|m| ell) in closed form
    const double axis_sum = -2.0 / ell * std::log(2.0 * std::sin(std::abs(theta) / 2.0));
    const double pref = unit_cell.gamma * kCapUnitSphere * kCapUnitSphere / (4.0 * kPi);

    QuasiperiodicCapacitance qc;
    qc.alpha = alpha;
    qc.period = ell;
    qc.trunc = trunc;
    qc.entries = Eigen::MatrixXcd::Zero(n, n);

    double tail = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::complex<double> lattice_sum;
            if (i == j) {
                lattice_sum = axis_sum;  // exact, images offset by m ell e_x only
            } else {
                const Eigen::Vector3d d = unit_cell.centers[i] - unit_cell.centers[j];
                std::complex<double> s = 1.0 / d.norm();
                for (int m = 1; m <= trunc; ++m) {
                    const std::complex<double> ph(std::cos(m * theta), std::sin(m * theta));
                    const double rp = std::hypot(d.x() - m * ell, d.y());
                    const double rm = std::hypot(d.x() + m * ell, d.y());
                    s += ph * (1.0 / rp - 1.0 / (m * ell));
                    s += std::conj(ph) * (1.0 / rm - 1.0 / (m * ell));
                }
                s += axis_sum;
                lattice_sum = s;
                // first neglected term, damped by the oscillation factor
                const double a_next =
                    (std::abs(d.x()) + ell) / ((double(trunc) * ell) * (double(trunc) * ell));
                tail = std::max(tail, pref * a_next / std::abs(std::sin(theta / 2.0)));
            }
            qc.entries(i, j) = (i == j ? kCapUnitSphere : 0.0) - pref * lattice_sum;
        }
    }
    qc.tail_bound = tail;
    return qc;
}

SymmetryCheckReport check_symmetry_pattern(const Eigen::MatrixXd& C,
                                           const SymmetryPermutation& sigma, double tol) {
    const int n = static_cast<int>(C.rows());
    if (static_cast<int>(sigma.perm.size()) != n)
        throw std::invalid_argument("symmetry check: permutation size does not match matrix");
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dev = std::max(dev, std::abs(C(sigma.perm[i], sigma.perm[j]) - C(i, j)));
    return {dev, dev <= tol};
}

}  // namespace subwave
