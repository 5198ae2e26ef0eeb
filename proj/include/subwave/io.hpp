#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "subwave/analysis.hpp"
#include "subwave/hill.hpp"
#include "subwave/perturbation.hpp"

namespace subwave {

// Shortest representation that round-trips a double.
std::string format_double(double v);

// CSV with '#'-prefixed metadata lines, then a '#'-prefixed column header.
void write_csv(const std::string& path, const std::vector<std::string>& meta,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_capacitance_csv(const std::string& path, const CapacitanceMatrix& C);

std::string quasifrequencies_to_json(const std::vector<Quasifrequency>& qf, double Omega);

// Envelope CSV: t, then Re/Im of u_i per resonator.
void write_envelope_csv(const std::string& path, const FloquetResult& env,
                        const std::vector<std::string>& meta = {});

std::string split_prediction_to_json(const SplitPrediction& pred);

void write_band_csv(const std::string& path, const BandTable& table,
                    const std::vector<std::string>& meta = {});

void write_text(const std::string& path, const std::string& text);

}  // namespace subwave
