#include "subwave/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace subwave {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& meta,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (const auto& m : meta) out += "# " + m + "\n";
    out += "#";
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : " ") + columns[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += format_double(row[i]);
        }
        out += "\n";
    }
    write_text(path, out);
}

void write_capacitance_csv(const std::string& path, const CapacitanceMatrix& C) {
    std::string out =
        "# capacitance N=" + std::to_string(C.size()) + " backend=" + C.backend + "\n";
    for (int i = 0; i < C.size(); ++i) {
        for (int j = 0; j < C.size(); ++j) {
            if (j) out += ",";
            out += format_double(C.entries(i, j));
        }
        out += "\n";
    }
    write_text(path, out);
}

std::string quasifrequencies_to_json(const std::vector<Quasifrequency>& qf, double Omega) {
    nlohmann::json j;
    j["Omega"] = Omega;
    auto& arr = j["quasifrequencies"] = nlohmann::json::array();
    for (const auto& q : qf) {
        // real parts are already folded into [-Omega/2, Omega/2)
        arr.push_back({{"omega_re", q.omega.real()},
                       {"omega_im", q.omega.imag()},
                       {"mu_re", q.mu.real()},
                       {"mu_im", q.mu.imag()}});
    }
    return j.dump(2);
}

void write_envelope_csv(const std::string& path, const FloquetResult& env,
                        const std::vector<std::string>& meta) {
    const int n = static_cast<int>(env.u.rows());
    std::vector<std::string> cols = {"t"};
    for (int i = 0; i < n; ++i) {
        cols.push_back("re_u" + std::to_string(i + 1));
        cols.push_back("im_u" + std::to_string(i + 1));
    }
    std::vector<std::vector<double>> rows;
    for (int s = 0; s < env.times.size(); ++s) {
        std::vector<double> row = {env.times[s]};
        for (int i = 0; i < n; ++i) {
            row.push_back(env.u(i, s).real());
            row.push_back(env.u(i, s).imag());
        }
        rows.push_back(std::move(row));
    }
    auto m = meta;
    m.push_back("omega_re=" + format_double(env.omega.real()));
    m.push_back("omega_im=" + format_double(env.omega.imag()));
    write_csv(path, m, cols, rows);
}

std::string split_prediction_to_json(const SplitPrediction& pred) {
    nlohmann::json j;
    auto cpx = [](Complex z) { return nlohmann::json{z.real(), z.imag()}; };
    j["nu0"] = cpx(pred.nu0);
    j["B"] = {cpx(pred.B(0, 0)), cpx(pred.B(0, 1)), cpx(pred.B(1, 0)), cpx(pred.B(1, 1))};
    j["nu2_w"] = cpx(pred.nu2_w);
    j["nu2_q"] = cpx(pred.nu2_q);
    j["nu_w"] = cpx(pred.nu_w);
    j["nu_q"] = cpx(pred.nu_q);
    j["beta_w"] = {cpx(pred.beta_w[0]), cpx(pred.beta_w[1])};
    j["beta_q"] = {cpx(pred.beta_q[0]), cpx(pred.beta_q[1])};
    auto vec = [&cpx](const Eigen::VectorXcd& v) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < v.size(); ++i) a.push_back(cpx(v[i]));
        return a;
    };
    j["w_red"] = vec(pred.w_red);
    j["q_red"] = vec(pred.q_red);
    j["pair"] = {pred.k, pred.l};
    return j.dump(2);
}

void write_band_csv(const std::string& path, const BandTable& table,
                    const std::vector<std::string>& meta) {
    auto m = meta;
    m.push_back("gap_plus=" + format_double(table.gap_plus));
    m.push_back("gap_minus=" + format_double(table.gap_minus));
    m.push_back("nonreciprocity=" + format_double(table.nonreciprocity));
    m.push_back("static_gap_edge=" + format_double(table.static_gap_edge));
    m.push_back("integration_tolerance=" + format_double(table.integration_tolerance));
    m.push_back("max_band_asymmetry=" + format_double(table.max_band_asymmetry));

    std::vector<std::string> cols = {"alpha"};
    const int nb = static_cast<int>(table.static_bands.rows());
    for (int i = 0; i < nb; ++i) cols.push_back("omega" + std::to_string(i + 1));
    const int nm = static_cast<int>(table.modulated_folded.rows());
    for (int i = 0; i < nm; ++i) cols.push_back("nu" + std::to_string(i + 1));

    std::vector<std::vector<double>> rows;
    for (int p = 0; p < table.alphas.size(); ++p) {
        std::vector<double> row = {table.alphas[p]};
        for (int i = 0; i < nb; ++i) row.push_back(table.static_bands(i, p));
        for (int i = 0; i < nm; ++i) row.push_back(table.modulated_folded(i, p));
        rows.push_back(std::move(row));
    }
    write_csv(path, m, cols, rows);
}

}  // namespace subwave
