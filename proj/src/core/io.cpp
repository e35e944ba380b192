#include "core/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace erdiff::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian");

constexpr char kGraphMagic[4] = {'E', 'R', 'D', 'G'};

template <class T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("binary graph file is truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

bool is_blank_or_comment(const std::string& line) {
  for (const char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string graph_to_text(const ErGraph& g) {
  std::string out = std::to_string(g.n()) + " " + fmt(g.p()) + " " + std::to_string(g.seed()) + "\n";
  for (std::size_t i = 0; i < g.n(); ++i)
    for (const auto j : g.out_neighbors(i)) {
      out += std::to_string(i);
      out += ' ';
      out += std::to_string(j);
      out += '\n';
    }
  return out;
}

ErGraph graph_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0;
  double p = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<ErGraph::Index, ErGraph::Index>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    std::istringstream fields(line);
    if (!have_header) {
      if (!(fields >> n >> p >> seed))
        throw IoError("graph header must be 'n p seed' (line " + std::to_string(line_no) + ")");
      have_header = true;
      continue;
    }
    long long i = -1, j = -1;
    if (!(fields >> i >> j) || i < 0 || j < 0 || static_cast<std::size_t>(i) >= n ||
        static_cast<std::size_t>(j) >= n)
      throw IoError("bad edge on line " + std::to_string(line_no));
    edges.emplace_back(static_cast<ErGraph::Index>(i), static_cast<ErGraph::Index>(j));
  }
  if (!have_header) throw IoError("graph file has no header");
  return ErGraph::from_edges(n, p, seed, edges);
}

std::string graph_to_binary(const ErGraph& g) {
  std::string out(kGraphMagic, sizeof kGraphMagic);
  put<std::uint64_t>(out, g.n());
  put<double>(out, g.p());
  put<std::uint64_t>(out, g.seed());
  put<std::uint64_t>(out, g.edge_count());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (const auto j : g.out_neighbors(i)) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(i));
      put<std::uint32_t>(out, j);
    }
  return out;
}

ErGraph graph_from_binary(const std::string& bytes) {
  if (bytes.size() < sizeof kGraphMagic || std::memcmp(bytes.data(), kGraphMagic, sizeof kGraphMagic) != 0)
    throw IoError("not a binary graph file");
  std::size_t pos = sizeof kGraphMagic;
  const auto n = take<std::uint64_t>(bytes, pos);
  const auto p = take<double>(bytes, pos);
  const auto seed = take<std::uint64_t>(bytes, pos);
  const auto count = take<std::uint64_t>(bytes, pos);
  if (count > (bytes.size() - pos) / 8) throw IoError("binary graph file is truncated");
  std::vector<std::pair<ErGraph::Index, ErGraph::Index>> edges(count);
  for (auto& e : edges) {
    e.first = take<std::uint32_t>(bytes, pos);
    e.second = take<std::uint32_t>(bytes, pos);
    if (e.first >= n || e.second >= n) throw IoError("edge index out of range in binary graph file");
  }
  return ErGraph::from_edges(n, p, seed, edges);
}

void write_graph(const std::filesystem::path& path, const ErGraph& g) {
  write_file(path, path.extension() == ".bin" ? graph_to_binary(g) : graph_to_text(g));
}

ErGraph read_graph(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (path.extension() == ".bin") return graph_from_binary(bytes);
  return graph_from_text(bytes);
}

std::string diagnostics_csv(const CouplingDiagnostics& diag) {
  std::string out = "t,s_n,delta\n";
  for (std::size_t r = 0; r < diag.times.size(); ++r)
    out += fmt(diag.times[r]) + "," + fmt(diag.s_n[r]) + "," + fmt(diag.delta_path[r]) + "\n";
  return out;
}

std::string density_csv(const DensityGrid& dens) {
  std::string out = "theta,value\n";
  for (std::size_t k = 0; k < dens.cells(); ++k) out += fmt(dens.center(k)) + "," + fmt(dens.values[k]) + "\n";
  return out;
}

std::string empirical_csv(const EmpiricalMeasure& emp) {
  std::string out = "theta\n";
  for (const double x : emp.samples()) out += fmt(x) + "\n";
  return out;
}

std::vector<double> samples_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    char* end = nullptr;
    const double x = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) {
      if (line_no == 1) continue;  // header
      throw IoError("not a number on line " + std::to_string(line_no));
    }
    out.push_back(x);
  }
  return out;
}

std::string matrix_csv(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& m) {
  std::string out = "label";
  for (const auto& l : labels) out += "," + l;
  out += "\n";
  for (std::size_t r = 0; r < m.size(); ++r) {
    out += labels.at(r);
    for (const double v : m[r]) out += "," + fmt(v);
    out += "\n";
  }
  return out;
}

void write_paths(const std::filesystem::path& stem, const CoupledPaths& paths, std::size_t stride,
                 const std::string& model_name, std::uint64_t graph_seed) {
  std::string bin;
  bin.reserve(8 * (paths.times.size() + paths.theta.size() + paths.theta_bar.size()));
  for (const double t : paths.times) put<double>(bin, t);
  for (const double x : paths.theta) put<double>(bin, x);
  for (const double x : paths.theta_bar) put<double>(bin, x);
  auto bin_path = stem;
  bin_path += ".bin";
  write_file(bin_path, bin);

  nlohmann::ordered_json meta;
  meta["format"] = "float64-le";
  meta["columns"] = {"times", "theta", "theta_bar"};
  meta["layout"] = "times[stored], then theta[stored][n], then theta_bar[stored][n]";
  meta["n"] = paths.n;
  meta["stored"] = paths.stored();
  meta["stride"] = stride;
  meta["model"] = model_name;
  meta["graph_seed"] = graph_seed;
  meta["times"] = paths.times;
  auto json_path = stem;
  json_path += ".json";
  write_file(json_path, meta.dump(2) + "\n");
}

}  // namespace erdiff::io
