#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "core/density.hpp"
#include "core/graph.hpp"
#include "core/measure.hpp"
#include "core/sde.hpp"

namespace erdiff::io {

/// Shortest text that round-trips the double ("%.17g").
std::string fmt(double x);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Text edge list: header line "n p seed", then one "i j" line per edge.
std::string graph_to_text(const ErGraph& g);
ErGraph graph_from_text(const std::string& text);

/// Binary edge list: magic "ERDG", u64 n, f64 p, u64 seed, u64 edge count,
/// then u32 pairs (little-endian).
std::string graph_to_binary(const ErGraph& g);
ErGraph graph_from_binary(const std::string& bytes);

/// Picks the binary format for a ".bin" extension, text otherwise.
void write_graph(const std::filesystem::path& path, const ErGraph& g);
ErGraph read_graph(const std::filesystem::path& path);

/// t,s_n,delta per stored time.
std::string diagnostics_csv(const CouplingDiagnostics& diag);

/// theta,value per cell.
std::string density_csv(const DensityGrid& dens);

/// One sample per line under a "theta" header.
std::string empirical_csv(const EmpiricalMeasure& emp);
std::vector<double> samples_from_csv(const std::string& text);

/// Symmetric matrix with a leading label column.
std::string matrix_csv(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& m);

/// Writes <stem>.bin (float64 little-endian: times, then theta and theta_bar
/// as stored-time-major blocks) and <stem>.json describing the layout.
void write_paths(const std::filesystem::path& stem, const CoupledPaths& paths, std::size_t stride,
                 const std::string& model_name, std::uint64_t graph_seed);

}  // namespace erdiff::io
