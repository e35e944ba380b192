#include "core/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/graph.hpp"
#include "core/io.hpp"
#include "core/ldp.hpp"
#include "core/measure.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace erdiff {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::uint64_t kGraphTag = 0x6772617068ull;
constexpr std::uint64_t kNoiseTag = 0x6e6f697365ull;
constexpr std::uint64_t kCheckTag = 0x636865636bull;

std::size_t line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort line of a JSON pointer: each key is searched after the previous one.
std::size_t line_of_pointer(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  bool found_any = false;
  std::stringstream ss(pointer);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (part.empty() || std::all_of(part.begin(), part.end(), ::isdigit)) continue;
    const auto hit = text.find("\"" + part + "\"", pos);
    if (hit == std::string::npos) break;
    pos = hit;
    found_any = true;
  }
  return found_any ? line_at_offset(text, pos) : 1;
}

std::string anchored(const std::string& origin, const std::string& text, const std::string& what,
                     const std::string& pointer) {
  std::string msg = origin + ":" + std::to_string(line_of_pointer(text, pointer)) + ": " + what;
  if (!pointer.empty()) msg += " (at " + pointer + ")";
  return msg;
}

class Section {
 public:
  Section(const json& node, std::string path, std::vector<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("section must be an object", path_);
    for (const auto& item : node_.items())
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
        throw ConfigError("unknown key '" + item.key() + "'", path_ + "/" + item.key());
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  const json& raw(const std::string& key) const { return node_.at(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "'", at(key));
    }
    const auto& v = node_.at(key);
    if (!v.is_number()) throw ConfigError("expected a number", at(key));
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("expected a finite number", at(key));
    return x;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError("must be positive", at(key));
    return x;
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "'", at(key));
    }
    return as_count(node_.at(key), at(key));
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError("expected true or false", at(key));
    return v.get<bool>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "'", at(key));
    }
    const auto& v = node_.at(key);
    if (!v.is_string()) throw ConfigError("expected a string", at(key));
    return v.get<std::string>();
  }

  static std::size_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x >= 0.0 && x == std::floor(x) && x < 9e15) return static_cast<std::size_t>(x);
    }
    throw ConfigError("expected a nonnegative integer", path);
  }

 private:
  const json& node_;
  std::string path_;
};

std::vector<std::size_t> count_list(const json& v, const std::string& path) {
  std::vector<std::size_t> out;
  if (v.is_array()) {
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(Section::as_count(v[k], path + "/" + std::to_string(k)));
  } else {
    out.push_back(Section::as_count(v, path));
  }
  if (out.empty()) throw ConfigError("list must not be empty", path);
  return out;
}

void parse_model(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("model")) throw ConfigError("missing required section 'model'", "/model");
  Section s(root.at("model"), "/model", {"name", "params"});
  cfg.model_name = s.text("name");
  cfg.model_params.clear();
  if (s.has("params")) {
    Section params(s.raw("params"), "/model/params", {"K", "sigma", "a"});
    for (const auto& item : s.raw("params").items())
      cfg.model_params[item.key()] = params.number(item.key());
  }
  try {
    (void)parse_builtin_name(cfg.model_name);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "/model/name");
  }
  (void)builtin_model(cfg.model_name, cfg.model_params);
}

void parse_graph(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("graph")) return;
  Section s(root.at("graph"), "/graph", {"schedule", "c", "p", "self_loops", "no_self_loops", "import", "K"});
  const std::string schedule = s.text("schedule", "log");
  if (schedule == "fixed") {
    cfg.graph.schedule = Schedule::Fixed;
    cfg.graph.p = s.number("p");
  } else if (schedule == "log") {
    cfg.graph.schedule = Schedule::Log;
    cfg.graph.c = s.positive("c", 2.0);
  } else if (schedule == "sqrt") {
    cfg.graph.schedule = Schedule::Sqrt;
    cfg.graph.c = s.positive("c", 2.0);
  } else {
    throw ConfigError("schedule must be fixed, log or sqrt", "/graph/schedule");
  }
  cfg.graph.self_loops = s.flag("self_loops", true);
  if (s.flag("no_self_loops", false)) cfg.graph.self_loops = false;
  if (s.has("import")) cfg.graph.import = fs::path(s.text("import"));
  if (s.has("K")) {
    const auto& v = s.raw("K");
    cfg.graph.K.clear();
    if (v.is_array()) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number()) throw ConfigError("expected a number", "/graph/K/" + std::to_string(k));
        cfg.graph.K.push_back(v[k].get<double>());
      }
    } else {
      cfg.graph.K.push_back(s.positive("K"));
    }
    for (std::size_t k = 0; k < cfg.graph.K.size(); ++k)
      if (!(cfg.graph.K[k] > 0.0) || !std::isfinite(cfg.graph.K[k]))
        throw ConfigError("K must be positive", "/graph/K");
    if (cfg.graph.K.empty()) throw ConfigError("list must not be empty", "/graph/K");
  }
}

void parse_sweep(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("sweep")) throw ConfigError("missing required section 'sweep'", "/sweep");
  Section s(root.at("sweep"), "/sweep", {"n", "seeds", "replicas"});
  if (!s.has("n")) throw ConfigError("missing required key 'n'", "/sweep/n");
  cfg.sweep.n = count_list(s.raw("n"), "/sweep/n");
  for (const auto n : cfg.sweep.n)
    if (n == 0 || n > 0xffffffffull) throw ConfigError("n must be in [1, 2^32)", "/sweep/n");
  if (s.has("seeds")) {
    const auto& v = s.raw("seeds");
    cfg.sweep.seeds.clear();
    if (v.is_array()) {
      for (std::size_t k = 0; k < v.size(); ++k)
        cfg.sweep.seeds.push_back(Section::as_count(v[k], "/sweep/seeds/" + std::to_string(k)));
    } else {
      const std::size_t count = Section::as_count(v, "/sweep/seeds");
      for (std::size_t k = 1; k <= count; ++k) cfg.sweep.seeds.push_back(k);
    }
    if (cfg.sweep.seeds.empty()) throw ConfigError("need at least one seed", "/sweep/seeds");
  }
  cfg.sweep.replicas = s.count("replicas", 1);
  if (cfg.sweep.replicas == 0) throw ConfigError("replicas must be positive", "/sweep/replicas");
}

void parse_sim(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("sim")) throw ConfigError("missing required section 'sim'", "/sim");
  Section s(root.at("sim"), "/sim", {"dt", "T", "stride", "qv", "gronwall_tol"});
  cfg.sim.dt = s.positive("dt", 1e-3);
  cfg.sim.T = s.positive("T", 1.0);
  if (cfg.sim.dt > cfg.sim.T) throw ConfigError("dt must not exceed T", "/sim/dt");
  cfg.sim.store_stride = s.count("stride", 1);
  if (cfg.sim.store_stride == 0) throw ConfigError("stride must be positive", "/sim/stride");
  const std::string qv = s.text("qv", "auto");
  if (qv == "auto") {
    cfg.sim.qv = QvMode::Auto;
  } else if (qv == "required") {
    cfg.sim.qv = QvMode::Required;
  } else if (qv == "off") {
    cfg.sim.qv = QvMode::Off;
  } else {
    throw ConfigError("qv must be auto, required or off", "/sim/qv");
  }
  cfg.gronwall_tol = s.number("gronwall_tol", 0.05);
  if (cfg.gronwall_tol < 0.0) throw ConfigError("tolerance must be nonnegative", "/sim/gronwall_tol");
}

void parse_init(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("init")) return;
  Section s(root.at("init"), "/init", {"kind", "kappa", "mean", "sd", "mode"});
  const std::string kind = s.text("kind", "von_mises");
  if (kind == "von_mises") {
    cfg.init.kind = InitKind::VonMises;
  } else if (kind == "gaussian") {
    cfg.init.kind = InitKind::Gaussian;
  } else if (kind == "uniform") {
    cfg.init.kind = InitKind::Uniform;
  } else {
    throw ConfigError("kind must be von_mises, gaussian or uniform", "/init/kind");
  }
  cfg.init.kappa = s.number("kappa", 1.0);
  if (cfg.init.kappa < 0.0) throw ConfigError("kappa must be nonnegative", "/init/kappa");
  cfg.init.mean = s.number("mean", 0.0);
  cfg.init.sd = s.positive("sd", 0.5);
  const std::string mode = s.text("mode", "stratified");
  if (mode != "stratified" && mode != "adversarial")
    throw ConfigError("mode must be stratified or adversarial", "/init/mode");
  cfg.init.adversarial = mode == "adversarial";
}

void parse_pde(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("pde")) return;
  Section s(root.at("pde"), "/pde", {"m", "dt", "scheme", "box", "snapshot_every", "refine_factor"});
  cfg.pde.m = s.count("m", 512);
  if (cfg.pde.m < 2) throw ConfigError("m must be at least 2", "/pde/m");
  cfg.pde.dt = s.positive("dt", 1e-4);
  const std::string scheme = s.text("scheme", "upwind-explicit");
  if (scheme == "upwind-explicit") {
    cfg.pde.scheme = PdeScheme::UpwindExplicit;
  } else if (scheme == "upwind-semi-implicit") {
    cfg.pde.scheme = PdeScheme::UpwindSemiImplicit;
  } else {
    throw ConfigError("scheme must be upwind-explicit or upwind-semi-implicit", "/pde/scheme");
  }
  if (s.has("box")) {
    const auto& box = s.raw("box");
    if (!box.is_array() || box.size() != 2 || !box[0].is_number() || !box[1].is_number())
      throw ConfigError("box must be [lo, hi]", "/pde/box");
    cfg.pde.lo = box[0].get<double>();
    cfg.pde.hi = box[1].get<double>();
    if (!(cfg.pde.hi > cfg.pde.lo)) throw ConfigError("box must satisfy lo < hi", "/pde/box");
  }
  cfg.pde.snapshot_every = s.count("snapshot_every", 0);
  cfg.pde.refine_factor = s.count("refine_factor", 0);
  if (cfg.pde.refine_factor == 1) throw ConfigError("refine_factor must be 0 or at least 2", "/pde/refine_factor");
}

void parse_ldp(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("ldp")) return;
  Section s(root.at("ldp"), "/ldp", {"graph_replicas", "path_replicas"});
  cfg.ldp.graph_replicas = s.count("graph_replicas", 50);
  cfg.ldp.path_replicas = s.count("path_replicas", 20);
  if (cfg.ldp.graph_replicas == 0) throw ConfigError("must be positive", "/ldp/graph_replicas");
  if (cfg.ldp.path_replicas == 0) throw ConfigError("must be positive", "/ldp/path_replicas");
}

void parse_compare(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("compare")) return;
  Section s(root.at("compare"), "/compare", {"dictionary_size"});
  cfg.dictionary_size = s.count("dictionary_size", 64);
}

void parse_outputs(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("outputs")) return;
  Section s(root.at("outputs"), "/outputs", {"directory", "formats", "paths", "graph"});
  cfg.outputs.directory = s.text("directory", "out");
  if (s.has("formats")) {
    const auto& v = s.raw("formats");
    if (!v.is_array()) throw ConfigError("formats must be a list", "/outputs/formats");
    cfg.outputs.csv = cfg.outputs.json = false;
    for (const auto& f : v) {
      if (f == "csv") {
        cfg.outputs.csv = true;
      } else if (f == "json") {
        cfg.outputs.json = true;
      } else {
        throw ConfigError("formats accepts csv and json", "/outputs/formats");
      }
    }
  }
  cfg.outputs.paths = s.flag("paths", false);
  cfg.outputs.graph = s.flag("graph", false);
}

void refresh_hashes(ExperimentConfig& cfg, const std::string& override_text) {
  cfg.config_hash = sha256_hex(override_text.empty() ? cfg.source_text : cfg.source_text + '\0' + override_text);
  cfg.input_digest = git_blob_sha1(cfg.source_text + cfg.import_bytes);
}

bool has_section(const ExperimentConfig& cfg, const std::string& name) {
  return std::find(cfg.sections.begin(), cfg.sections.end(), name) != cfg.sections.end();
}

void require_section(const ExperimentConfig& cfg, const std::string& name, const std::string& command) {
  if (!has_section(cfg, name))
    throw ConfigError("subcommand '" + command + "' needs a '" + name + "' section", "/" + name);
}

ErGraph graph_for(const ExperimentConfig& cfg, std::size_t n, double p, std::uint64_t graph_seed) {
  if (cfg.graph.import) {
    const ErGraph g = cfg.graph.import->extension() == ".bin" ? io::graph_from_binary(cfg.import_bytes)
                                                              : io::graph_from_text(cfg.import_bytes);
    if (g.n() != n)
      throw ConfigError("imported graph has n = " + std::to_string(g.n()) + ", sweep asks for " + std::to_string(n),
                        "/graph/import");
    return g;
  }
  return sample_er(n, p, graph_seed, cfg.graph.self_loops);
}

PdeConfig pde_config(const ExperimentConfig& cfg) {
  PdeConfig pc;
  pc.m = cfg.pde.m;
  pc.dt = cfg.pde.dt;
  pc.T = cfg.sim.T;
  pc.scheme = cfg.pde.scheme;
  pc.snapshot_every = cfg.pde.snapshot_every;
  return pc;
}

// Unnormalized initial pdf; on the circle the Gaussian is wrapped.
std::function<double(double)> init_pdf(const ExperimentConfig& cfg, const ModelSpec& model) {
  const InitSection init = cfg.init;
  const Geometry geom = model.geometry;
  switch (init.kind) {
    case InitKind::VonMises:
      if (!geom.is_circle()) throw ConfigError("von_mises initial data needs a circle model", "/init/kind");
      return [init, geom](double x) {
        return std::exp(init.kappa * (std::cos(2.0 * std::numbers::pi * (x - init.mean) / geom.period) - 1.0));
      };
    case InitKind::Gaussian:
      return [init, geom](double x) {
        const auto bump = [&](double y) {
          const double z = (y - init.mean) / init.sd;
          return std::exp(-0.5 * z * z);
        };
        if (!geom.is_circle()) return bump(x);
        double acc = 0.0;
        for (int k = -4; k <= 4; ++k) acc += bump(x + k * geom.period);
        return acc;
      };
    case InitKind::Uniform:
      return [](double) { return 1.0; };
  }
  return [](double) { return 1.0; };
}

struct Point {
  std::size_t n;
  std::uint64_t seed;
};

std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
  std::vector<Point> pts;
  for (const auto n : cfg.sweep.n)
    for (const auto seed : cfg.sweep.seeds) pts.push_back({n, seed});
  return pts;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Artifacts {
  fs::path dir;
  std::vector<fs::path> written;

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    io::write_file(path, content);
    written.push_back(path);
  }
  void write_json(const std::string& name, const ojson& j) { write(name, j.dump(2) + "\n"); }
};

ojson provenance(const ExperimentConfig& cfg) {
  ojson j;
  j["config_hash"] = cfg.config_hash;
  j["input_digest"] = cfg.input_digest;
  return j;
}

ojson json_number(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

// Coupled run at one (n, seed) with the diagnostics the subcommands report.
struct CoupledRun {
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t graph_seed = 0;
  ErGraph graph;
  SimResult sim;
  DegreeReport degrees;
  double K = 0.0;
  GronwallReport gronwall;
};

CoupledRun coupled_run(const ExperimentConfig& cfg, const ModelSpec& model, const DensityGrid& mu0, std::size_t n,
                       std::uint64_t seed) {
  CoupledRun run;
  run.n = n;
  run.seed = seed;
  run.graph_seed = rng::derive_seed(seed, kGraphTag, n);
  run.p = cfg.graph.import ? 0.0 : schedule_p(cfg.graph, n);
  run.graph = graph_for(cfg, n, run.p, run.graph_seed);
  run.p = run.graph.p();
  if (cfg.graph.import) run.graph_seed = run.graph.seed();
  const auto init = initial_positions(cfg, mu0, n);
  SimConfig sc = cfg.sim;
  sc.n = n;
  sc.seed = rng::derive_seed(seed, kNoiseTag, n);
  run.sim = simulate_coupled(model, run.graph, init, sc);
  run.degrees = degree_report(run.graph);
  run.K = gronwall_degree_constant(n, run.p, run.degrees.max_disc);
  run.gronwall = gronwall_check(run.sim.diagnostics, model, run.K, cfg.gronwall_tol);
  return run;
}

EmpiricalMeasure final_measure(const CoupledPaths& paths, bool annealed) {
  const std::size_t last = paths.stored() - 1;
  const auto row = annealed ? paths.theta_bar_at(last) : paths.theta_at(last);
  return EmpiricalMeasure(std::vector<double>(row.begin(), row.end()), paths.geometry);
}

RunOutcome cmd_simulate(const ExperimentConfig& cfg, Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec model = builtin_model(cfg.model_name, cfg.model_params);
  const DensityGrid mu0 = initial_density(cfg, model);
  const auto run = coupled_run(cfg, model, mu0, cfg.sweep.n.front(), cfg.sweep.seeds.front());
  const auto& diag = run.sim.diagnostics;
  const auto q = final_measure(run.sim.paths, false);
  const auto a = final_measure(run.sim.paths, true);
  const double w1_qa = w1(q, a);

  if (cfg.outputs.csv) {
    out.write("simulate_diagnostics.csv", io::diagnostics_csv(diag));
    out.write("simulate_theta_T.csv", io::empirical_csv(q));
    out.write("simulate_theta_bar_T.csv", io::empirical_csv(a));
  }
  if (cfg.outputs.paths) {
    io::write_paths(out.dir / "simulate_paths", run.sim.paths, cfg.sim.store_stride, model.name, run.graph_seed);
    out.written.push_back(out.dir / "simulate_paths.bin");
    out.written.push_back(out.dir / "simulate_paths.json");
  }
  if (cfg.outputs.graph) out.write("simulate_graph.txt", io::graph_to_text(run.graph));
  if (cfg.outputs.json) {
    ojson j = provenance(cfg);
    j["n"] = run.n;
    j["p"] = run.p;
    j["seed"] = run.seed;
    j["graph_seed"] = run.graph_seed;
    j["T"] = cfg.sim.T;
    j["s_n_T"] = diag.s_n.back();
    j["delta_integral"] = diag.delta_integral;
    j["qv"] = diag.qv ? ojson(*diag.qv) : ojson(nullptr);
    j["w1_quenched_annealed_T"] = w1_qa;
    j["sqrt_s_n_T"] = std::sqrt(diag.s_n.back());
    j["max_disc"] = run.degrees.max_disc;
    j["gronwall"] = {{"K", run.K},
                     {"rate", gronwall_rate(model, run.K)},
                     {"tol", cfg.gronwall_tol},
                     {"worst_ratio", json_number(run.gronwall.worst_ratio)},
                     {"worst_time", run.gronwall.worst_time},
                     {"passes", run.gronwall.passes}};
    out.write_json("simulate_summary.json", j);
  }
  out.write_json("simulate_meta.json", {{"wall_seconds", seconds_since(start)}});
  RunOutcome r;
  r.message = "simulate: S_n(T) = " + io::fmt(diag.s_n.back());
  return r;
}

ojson fit_json(const FitResult& f) {
  ojson j;
  j["fittable"] = f.fittable;
  if (!f.fittable) {
    j["reason"] = f.reason;
    return j;
  }
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["band"] = {f.band_lo, f.band_hi};
  j["points"] = f.points;
  return j;
}

RunOutcome cmd_sweep(const ExperimentConfig& cfg, Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  const SweepResult sweep = run_sweep(cfg);
  if (cfg.outputs.csv) out.write("sweep.csv", sweep_csv(sweep));
  if (cfg.outputs.json) {
    ojson j = provenance(cfg);
    ojson per_n = ojson::array();
    bool all_pass = true;
    std::vector<double> x_np, y_delta, x_n, y_s, y_wq;
    for (const auto n : cfg.sweep.n) {
      std::vector<double> s, d, wq, wa;
      double p = 0.0;
      for (const auto& row : sweep.rows)
        if (row.n == n) {
          p = row.p;
          s.push_back(row.s_n_T);
          d.push_back(row.delta_integral);
          wq.push_back(row.w1_quenched_pde);
          wa.push_back(row.w1_annealed_pde);
          all_pass = all_pass && row.gronwall_pass;
          x_np.push_back(static_cast<double>(n) * row.p);
          y_delta.push_back(row.delta_integral);
          x_n.push_back(static_cast<double>(n));
          y_s.push_back(row.s_n_T);
          y_wq.push_back(row.w1_quenched_pde);
        }
      per_n.push_back({{"n", n},
                       {"p", p},
                       {"median_s_n_T", median(s)},
                       {"median_delta_integral", median(d)},
                       {"median_w1_quenched_pde", median(wq)},
                       {"median_w1_annealed_pde", median(wa)}});
    }
    j["per_n"] = per_n;
    j["gronwall_all_pass"] = all_pass;
    const std::uint64_t boot_seed = cfg.sweep.seeds.front();
    j["fit_delta_integral_vs_np"] = fit_json(fit_rate(x_np, y_delta, 500, boot_seed));
    j["fit_s_n_vs_n"] = fit_json(fit_rate(x_n, y_s, 500, boot_seed));
    j["fit_w1_quenched_pde_vs_n"] = fit_json(fit_rate(x_n, y_wq, 500, boot_seed));
    out.write_json("sweep_summary.json", j);
  }
  ojson meta;
  meta["wall_seconds"] = seconds_since(start);
  ojson rows = ojson::array();
  for (const auto& row : sweep.rows) rows.push_back({{"n", row.n}, {"seed", row.seed}, {"wall_seconds", row.wall_seconds}});
  meta["rows"] = rows;
  out.write_json("sweep_meta.json", meta);
  RunOutcome r;
  r.message = "sweep: " + std::to_string(sweep.rows.size()) + " runs";
  return r;
}

RunOutcome cmd_graph_check(const ExperimentConfig& cfg, Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t master = cfg.sweep.seeds.front();
  const std::size_t R = cfg.sweep.replicas;
  std::string csv =
      "n,p,replicas,K,bernstein_bound,slack,freq_row0,freq_any_row,within_bound,condition_frac,k_c,C_n,"
      "median_max_disc,config_hash,digest\n";
  ojson summary = provenance(cfg);
  ojson per_n = ojson::array();
  for (const auto n : cfg.sweep.n) {
    const double p = cfg.graph.import ? 0.0 : schedule_p(cfg.graph, n);
    const std::uint64_t n_seed = rng::derive_seed(master, kCheckTag, n);
    std::vector<DegreeReport> reports(R);
    std::vector<double> row0(R);
    double p_used = p;
    parallel::for_each_index(
        R,
        [&](std::size_t r) {
          const ErGraph g = graph_for(cfg, n, p, rng::derive_seed(n_seed, kCheckTag, r));
          reports[r] = degree_report(g);
          row0[r] = reports[r].row_disc[0];
        },
        1);
    if (cfg.graph.import) p_used = graph_for(cfg, n, p, 0).p();
    if (cfg.outputs.graph) out.write("graph_n" + std::to_string(n) + ".txt",
                                     io::graph_to_text(graph_for(cfg, n, p, rng::derive_seed(n_seed, kCheckTag, 0))));
    std::vector<double> max_discs;
    for (const auto& rep : reports) max_discs.push_back(rep.max_disc);
    const double C_n = n > 1 ? static_cast<double>(n) * p_used / std::log(static_cast<double>(n)) : kInfinity;
    const double kc = k_c(C_n);
    ojson per_K = ojson::array();
    for (const double K : cfg.graph.K) {
      const double threshold = K * static_cast<double>(n);
      std::size_t hit_row0 = 0, hit_any = 0, holds = 0;
      for (std::size_t r = 0; r < R; ++r) {
        hit_row0 += row0[r] >= threshold ? 1 : 0;
        const auto& rep = reports[r];
        hit_any += std::any_of(rep.row_disc.begin(), rep.row_disc.end(), [&](double d) { return d >= threshold; }) ? 1 : 0;
        holds += rep.max_disc <= K ? 1 : 0;
      }
      const double freq0 = static_cast<double>(hit_row0) / static_cast<double>(R);
      const double freq_any = static_cast<double>(hit_any) / static_cast<double>(R);
      const double frac = static_cast<double>(holds) / static_cast<double>(R);
      std::string bound_s, slack_s, within_s;
      ojson entry = {{"K", K}, {"freq_row0", freq0}, {"freq_any_row", freq_any}, {"condition_frac", frac}};
      if (K > 2.0) {
        const double bound = bernstein_bound(K, p_used, n);
        const double slack = 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(R));
        const bool within = freq0 <= bound + slack;
        bound_s = io::fmt(bound);
        slack_s = io::fmt(slack);
        within_s = within ? "1" : "0";
        entry["bernstein_bound"] = bound;
        entry["slack"] = slack;
        entry["within_bound"] = within;
      }
      per_K.push_back(entry);
      csv += std::to_string(n) + "," + io::fmt(p_used) + "," + std::to_string(R) + "," + io::fmt(K) + "," + bound_s +
             "," + slack_s + "," + io::fmt(freq0) + "," + io::fmt(freq_any) + "," + within_s + "," + io::fmt(frac) +
             "," + io::fmt(kc) + "," + io::fmt(C_n) + "," + io::fmt(median(max_discs)) + "," + cfg.config_hash +
             "," + cfg.input_digest + "\n";
    }
    per_n.push_back({{"n", n},
                     {"p", p_used},
                     {"C_n", json_number(C_n)},
                     {"k_c", kc},
                     {"max_disc_replica0", reports.front().max_disc},
                     {"median_max_disc", median(max_discs)},
                     {"K", per_K}});
  }
  summary["per_n"] = per_n;
  if (cfg.outputs.csv) out.write("graph_check.csv", csv);
  if (cfg.outputs.json) out.write_json("graph_check_summary.json", summary);
  out.write_json("graph_check_meta.json", {{"wall_seconds", seconds_since(start)}});
  RunOutcome r;
  r.message = "graph-check: " + std::to_string(cfg.sweep.n.size()) + " sizes";
  return r;
}

RunOutcome cmd_pde(const ExperimentConfig& cfg, Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec model = builtin_model(cfg.model_name, cfg.model_params);
  const DensityGrid mu0 = initial_density(cfg, model);
  const PdeSolution sol = solve_mckean_vlasov(model, mu0, pde_config(cfg));
  ojson j = provenance(cfg);
  ojson snaps = ojson::array();
  for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
    const std::string name = "pde_snapshot_" + std::to_string(k) + ".csv";
    if (cfg.outputs.csv) out.write(name, io::density_csv(sol.snapshots[k]));
    snaps.push_back({{"index", k}, {"t", sol.snapshots[k].time}, {"file", name}});
  }
  j["m"] = cfg.pde.m;
  j["dt"] = cfg.pde.dt;
  j["T"] = cfg.sim.T;
  j["steps"] = sol.steps;
  j["snapshots"] = snaps;
  j["max_mass_error"] = sol.max_mass_error;
  j["clip_events"] = sol.clip_events;
  if (!mu0.geometry.is_circle()) j["max_boundary_mass"] = sol.max_boundary_mass;
  if (cfg.pde.refine_factor >= 2) {
    const double e1 = grid_refinement_error(model, mu0.geometry, mu0.lo, mu0.hi, init_pdf(cfg, model),
                                            pde_config(cfg), cfg.pde.refine_factor);
    j["refinement_error"] = e1;
  }
  if (cfg.outputs.json) out.write_json("pde_summary.json", j);
  out.write_json("pde_meta.json", {{"wall_seconds", seconds_since(start)}});
  RunOutcome r;
  r.message = "pde: " + std::to_string(sol.snapshots.size()) + " snapshots";
  return r;
}

RunOutcome cmd_ldp_check(const ExperimentConfig& cfg, Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec model = builtin_model(cfg.model_name, cfg.model_params);
  if (!(model.sigma_lower > 0.0))
    throw ConfigError("ldp-check requires sigma bounded below by a positive constant", "/model/params/sigma");
  const DensityGrid mu0 = initial_density(cfg, model);
  std::string csv =
      "n,p,seed,graph,graph_seed,C_n,delta_n,statistic,exceeds,mean_qv,sd_qv,config_hash,digest\n";
  ojson summary = provenance(cfg);
  ojson per_n = ojson::array();
  for (const auto n : cfg.sweep.n) {
    const double p = schedule_p(cfg.graph, n);
    std::vector<double> freqs;
    ojson per_seed = ojson::array();
    LdpProbe last;
    for (const auto seed : cfg.sweep.seeds) {
      LdpProbe probe = make_probe(n, p, cfg.ldp.graph_replicas, cfg.ldp.path_replicas, seed);
      probe.self_loops = cfg.graph.self_loops;
      probe = estimate_omega_frequency(model, probe, cfg.sim, mu0);
      for (std::size_t g = 0; g < probe.graphs.size(); ++g) {
        const auto& st = probe.graphs[g];
        csv += std::to_string(n) + "," + io::fmt(p) + "," + std::to_string(seed) + "," + std::to_string(g) + "," +
               std::to_string(st.graph_seed) + "," + io::fmt(probe.C) + "," + io::fmt(probe.delta) + "," +
               io::fmt(st.statistic) + "," + (st.exceeds ? "1" : "0") + "," + io::fmt(st.mean_qv) + "," +
               io::fmt(st.sd_qv) + "," + cfg.config_hash + "," + cfg.input_digest + "\n";
      }
      freqs.push_back(probe.omega_frequency);
      per_seed.push_back({{"seed", seed}, {"omega_frequency", probe.omega_frequency}});
      last = probe;
    }
    per_n.push_back({{"n", n},
                     {"p", p},
                     {"C_n", last.C},
                     {"delta_n", last.delta},
                     {"per_seed", per_seed},
                     {"median_omega_frequency", median(freqs)}});
  }
  summary["per_n"] = per_n;
  if (cfg.outputs.csv) out.write("ldp.csv", csv);
  if (cfg.outputs.json) out.write_json("ldp_summary.json", summary);
  out.write_json("ldp_meta.json", {{"wall_seconds", seconds_since(start)}});
  RunOutcome r;
  r.message = "ldp-check: " + std::to_string(cfg.sweep.n.size()) + " sizes";
  return r;
}

RunOutcome cmd_compare(const ExperimentConfig& cfg, Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  const ModelSpec model = builtin_model(cfg.model_name, cfg.model_params);
  const DensityGrid mu0 = initial_density(cfg, model);
  const PdeSolution pde = solve_mckean_vlasov(model, mu0, pde_config(cfg));
  const auto points = sweep_points(cfg);
  std::vector<CoupledRun> runs(points.size());
  parallel::for_each_index(
      points.size(), [&](std::size_t k) { runs[k] = coupled_run(cfg, model, mu0, points[k].n, points[k].seed); }, 1);

  std::string csv =
      "n,seed,t,w1_quenched_pde,w1_annealed_pde,w1_quenched_annealed,sqrt_s_n,dbl_lower,dbl_upper,config_hash,"
      "digest\n";
  const double tol = 1e-9 * std::max(1.0, cfg.sim.T);
  std::vector<std::string> labels;
  std::vector<EmpiricalMeasure> finals;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& paths = runs[k].sim.paths;
    const auto& diag = runs[k].sim.diagnostics;
    for (const auto& snap : pde.snapshots) {
      std::size_t row = paths.stored();
      for (std::size_t r = 0; r < paths.stored(); ++r)
        if (std::fabs(paths.times[r] - snap.time) <= tol) row = r;
      if (row == paths.stored()) continue;
      const auto q = paths.theta_at(row);
      const auto a = paths.theta_bar_at(row);
      const EmpiricalMeasure eq(std::vector<double>(q.begin(), q.end()), paths.geometry);
      const EmpiricalMeasure ea(std::vector<double>(a.begin(), a.end()), paths.geometry);
      const auto sandwich = dbl_sandwich(eq, ea, cfg.dictionary_size, points[k].seed);
      csv += std::to_string(points[k].n) + "," + std::to_string(points[k].seed) + "," + io::fmt(paths.times[row]) +
             "," + io::fmt(w1_to_density(eq, snap)) + "," + io::fmt(w1_to_density(ea, snap)) + "," +
             io::fmt(w1(eq, ea)) + "," + io::fmt(std::sqrt(diag.s_n[row])) + "," + io::fmt(sandwich.lower) + "," +
             io::fmt(sandwich.upper) + "," + cfg.config_hash + "," + cfg.input_digest + "\n";
    }
    const std::string tag = "_n" + std::to_string(points[k].n) + "_s" + std::to_string(points[k].seed);
    labels.push_back("quenched" + tag);
    finals.push_back(final_measure(paths, false));
    labels.push_back("annealed" + tag);
    finals.push_back(final_measure(paths, true));
  }
  labels.push_back("pde");
  const std::size_t L = labels.size();
  std::vector<std::vector<double>> matrix(L, std::vector<double>(L, 0.0));
  parallel::for_each_index(
      L - 1,
      [&](std::size_t r) {
        for (std::size_t c = r + 1; c < L - 1; ++c) matrix[r][c] = w1(finals[r], finals[c]);
        matrix[r][L - 1] = w1_to_density(finals[r], pde.final());
      },
      1);
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < r; ++c) matrix[r][c] = matrix[c][r];
  if (cfg.outputs.csv) {
    out.write("convergence.csv", csv);
    out.write("w1_matrix.csv", io::matrix_csv(labels, matrix));
  }
  if (cfg.outputs.json) {
    ojson j = provenance(cfg);
    j["runs"] = runs.size();
    j["pde_max_mass_error"] = pde.max_mass_error;
    out.write_json("compare_summary.json", j);
  }
  out.write_json("compare_meta.json", {{"wall_seconds", seconds_since(start)}});
  RunOutcome r;
  r.message = "compare: " + std::to_string(runs.size()) + " runs";
  return r;
}

std::string anchored_config_error(const ExperimentConfig* cfg, const std::string& origin, const ConfigError& e) {
  const std::string what = e.what();
  if (!cfg || cfg->source_text.empty()) return what.rfind(origin + ":", 0) == 0 ? what : origin + ": " + what;
  if (what.rfind(cfg->origin + ":", 0) == 0) return what;
  return anchored(cfg->origin, cfg->source_text, what, e.path());
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.origin = origin;
  cfg.source_text = text;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_at_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                      ": not valid JSON: " + e.what());
  }
  try {
    if (!root.is_object()) throw ConfigError("configuration must be a JSON object", "");
    static const std::vector<std::string> known = {"model", "graph", "sweep", "sim", "init",
                                                   "pde",   "ldp",   "compare", "outputs"};
    for (const auto& item : root.items()) {
      if (std::find(known.begin(), known.end(), item.key()) == known.end())
        throw ConfigError("unknown section '" + item.key() + "'", "/" + item.key());
      cfg.sections.push_back(item.key());
    }
    parse_model(root, cfg);
    parse_graph(root, cfg);
    parse_sweep(root, cfg);
    parse_sim(root, cfg);
    parse_init(root, cfg);
    parse_pde(root, cfg);
    parse_ldp(root, cfg);
    parse_compare(root, cfg);
    parse_outputs(root, cfg);
    if (!cfg.graph.import)
      for (const auto n : cfg.sweep.n) (void)schedule_p(cfg.graph, n);
    const ModelSpec model = builtin_model(cfg.model_name, cfg.model_params);
    if (cfg.init.kind == InitKind::VonMises && !model.geometry.is_circle())
      throw ConfigError("von_mises initial data needs a circle model", "/init/kind");
  } catch (const ConfigError& e) {
    throw ConfigError(anchored(origin, text, e.what(), e.path()), e.path());
  }
  refresh_hashes(cfg, "");
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  ExperimentConfig cfg;
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  cfg = parse_config(text, path.filename().string());
  cfg.base_dir = path.parent_path();
  if (cfg.graph.import) {
    fs::path import = *cfg.graph.import;
    if (import.is_relative()) import = cfg.base_dir / import;
    try {
      cfg.import_bytes = io::read_file(import);
      (void)(import.extension() == ".bin" ? io::graph_from_binary(cfg.import_bytes)
                                          : io::graph_from_text(cfg.import_bytes));
    } catch (const IoError& e) {
      throw ConfigError(anchored(cfg.origin, text, e.what(), "/graph/import"), "/graph/import");
    }
    cfg.graph.import = import;
  }
  if (cfg.outputs.directory.is_relative()) cfg.outputs.directory = cfg.base_dir / cfg.outputs.directory;
  refresh_hashes(cfg, "");
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides) {
  std::string text;
  if (overrides.seed) {
    cfg.sweep.seeds = {*overrides.seed};
    text += "seed=" + std::to_string(*overrides.seed) + "\n";
  }
  if (overrides.out) cfg.outputs.directory = *overrides.out;
  refresh_hashes(cfg, text);
}

double schedule_p(const GraphSection& graph, std::size_t n) {
  const double nn = static_cast<double>(n);
  double p = graph.p;
  std::string where = "/graph/p";
  switch (graph.schedule) {
    case Schedule::Fixed:
      break;
    case Schedule::Log:
      p = graph.c * std::log(nn) / nn;
      where = "/graph/c";
      break;
    case Schedule::Sqrt:
      p = graph.c / std::sqrt(nn);
      where = "/graph/c";
      break;
  }
  if (!(p > 0.0) || p > 1.0)
    throw ConfigError("schedule gives p = " + io::fmt(p) + " outside (0, 1] for n = " + std::to_string(n), where);
  return p;
}

DensityGrid initial_density(const ExperimentConfig& cfg, const ModelSpec& model) {
  return discretize_density(model.geometry, cfg.pde.lo, cfg.pde.hi, cfg.pde.m, init_pdf(cfg, model));
}

std::vector<double> initial_positions(const ExperimentConfig& cfg, const DensityGrid& mu0, std::size_t n) {
  std::vector<double> sorted = sample_from_density(mu0, n);
  if (!cfg.init.adversarial) return sorted;
  std::vector<double> out(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) out[i] = i % 2 == 0 ? sorted[i / 2] : sorted[half + i / 2];
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  const ModelSpec model = builtin_model(cfg.model_name, cfg.model_params);
  const DensityGrid mu0 = initial_density(cfg, model);
  const PdeSolution pde = solve_mckean_vlasov(model, mu0, pde_config(cfg));
  SweepResult result;
  result.pde_final = pde.final();
  result.config_hash = cfg.config_hash;
  result.input_digest = cfg.input_digest;
  const auto points = sweep_points(cfg);
  result.rows.resize(points.size());
  parallel::for_each_index(
      points.size(),
      [&](std::size_t k) {
        const auto start = std::chrono::steady_clock::now();
        const auto run = coupled_run(cfg, model, mu0, points[k].n, points[k].seed);
        const auto& diag = run.sim.diagnostics;
        const auto q = final_measure(run.sim.paths, false);
        const auto a = final_measure(run.sim.paths, true);
        SweepRow& row = result.rows[k];
        row.n = run.n;
        row.p = run.p;
        row.seed = run.seed;
        row.graph_seed = run.graph_seed;
        row.s_n_T = diag.s_n.back();
        row.delta_integral = diag.delta_integral;
        row.qv = diag.qv;
        row.w1_quenched_pde = w1_to_density(q, result.pde_final);
        row.w1_annealed_pde = w1_to_density(a, result.pde_final);
        row.w1_quenched_annealed = w1(q, a);
        const auto sandwich = dbl_sandwich(q, a, cfg.dictionary_size, run.seed);
        row.dbl_lower = sandwich.lower;
        row.dbl_upper = sandwich.upper;
        row.max_disc = run.degrees.max_disc;
        row.gronwall_K = run.K;
        row.gronwall_ratio = run.gronwall.worst_ratio;
        row.gronwall_pass = run.gronwall.passes;
        const auto& paths = run.sim.paths;
        for (std::size_t r = 0; r < paths.stored(); ++r) {
          const auto qr = paths.theta_at(r);
          const auto ar = paths.theta_bar_at(r);
          const double W = w1(EmpiricalMeasure({qr.begin(), qr.end()}, paths.geometry),
                              EmpiricalMeasure({ar.begin(), ar.end()}, paths.geometry));
          const double root = std::sqrt(diag.s_n[r]);
          if (W > root * (1.0 + 1e-9)) row.w1_within_sqrt_s = false;
          const double ratio = root > 0.0 ? W / root : (W > 0.0 ? kInfinity : 0.0);
          row.w1_sqrt_s_ratio = std::max(row.w1_sqrt_s_ratio, ratio);
        }
        row.wall_seconds = seconds_since(start);
      },
      1);
  return result;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out =
      "n,p,seed,graph_seed,s_n_T,delta_integral,qv,w1_quenched_pde,w1_annealed_pde,w1_quenched_annealed,dbl_lower,"
      "dbl_upper,max_disc,gronwall_K,gronwall_ratio,gronwall_pass,config_hash,digest\n";
  for (const auto& r : sweep.rows) {
    out += std::to_string(r.n) + "," + io::fmt(r.p) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.graph_seed) + "," + io::fmt(r.s_n_T) + "," + io::fmt(r.delta_integral) + "," +
           (r.qv ? io::fmt(*r.qv) : std::string()) + "," + io::fmt(r.w1_quenched_pde) + "," +
           io::fmt(r.w1_annealed_pde) + "," + io::fmt(r.w1_quenched_annealed) + "," + io::fmt(r.dbl_lower) + "," +
           io::fmt(r.dbl_upper) + "," + io::fmt(r.max_disc) + "," + io::fmt(r.gronwall_K) + "," +
           io::fmt(r.gronwall_ratio) + "," + (r.gronwall_pass ? "1" : "0") + "," + sweep.config_hash + "," +
           sweep.input_digest + "\n";
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 == 1 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

namespace {

bool ols(const std::vector<double>& lx, const std::vector<double>& ly, double& slope, double& intercept) {
  const double nx = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) return false;
  slope = sxy / sxx;
  intercept = my - slope * mx;
  return true;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

FitResult fit_rate(const std::vector<double>& x, const std::vector<double>& y, std::size_t bootstrap,
                   std::uint64_t seed) {
  FitResult fit;
  if (x.size() != y.size()) {
    fit.reason = "x and y differ in length";
    return fit;
  }
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(x[k] > 0.0) || !(y[k] > 0.0) || !std::isfinite(x[k]) || !std::isfinite(y[k])) {
      fit.reason = "non-positive or non-finite value";
      return fit;
    }
  std::vector<double> xs = x;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 3) {
    fit.reason = "fewer than 3 distinct x values";
    return fit;
  }
  std::vector<std::vector<double>> groups(xs.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto g = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x[k]) - xs.begin());
    groups[g].push_back(y[k]);
  }
  std::vector<double> lx(xs.size()), ly(xs.size());
  for (std::size_t g = 0; g < xs.size(); ++g) {
    lx[g] = std::log(xs[g]);
    ly[g] = std::log(median(groups[g]));
  }
  if (!ols(lx, ly, fit.slope, fit.intercept)) {
    fit.reason = "degenerate x values";
    return fit;
  }
  fit.fittable = true;
  fit.points = xs.size();
  fit.band_lo = fit.band_hi = fit.slope;
  if (bootstrap == 0) return fit;
  std::vector<double> slopes;
  slopes.reserve(bootstrap);
  std::vector<double> sample;
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& group = groups[g];
      sample.resize(group.size());
      for (std::size_t j = 0; j < group.size(); ++j) {
        const double u = rng::uniform(seed, rng::Domain::Bootstrap, b, g * 0x100000000ull + j);
        sample[j] = group[std::min(group.size() - 1, static_cast<std::size_t>(u * static_cast<double>(group.size())))];
      }
      ly[g] = std::log(median(sample));
    }
    double s = 0.0, icpt = 0.0;
    if (ols(lx, ly, s, icpt)) slopes.push_back(s);
  }
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    fit.band_lo = quantile_sorted(slopes, 0.025);
    fit.band_hi = quantile_sorted(slopes, 0.975);
  }
  return fit;
}

double gronwall_degree_constant(std::size_t n, double p, double max_disc) {
  const double C = n > 1 ? static_cast<double>(n) * p / std::log(static_cast<double>(n)) : kInfinity;
  return std::max(k_c(C), max_disc);
}

RunOutcome run_subcommand(const std::string& name, const fs::path& config_path, const RunOverrides& overrides) {
  static const std::vector<std::string> commands = {"simulate", "sweep", "graph-check", "pde", "ldp-check", "compare"};
  RunOutcome outcome;
  if (std::find(commands.begin(), commands.end(), name) == commands.end()) {
    outcome.exit_code = 2;
    outcome.message = "unknown subcommand '" + name + "'";
    return outcome;
  }
  std::optional<ExperimentConfig> cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(*cfg, overrides);
    if (name == "pde" || name == "compare") require_section(*cfg, "pde", name);
    if (name == "ldp-check") require_section(*cfg, "ldp", name);
    std::optional<parallel::ThreadLimit> limit;
    if (overrides.threads) limit.emplace(*overrides.threads);
    Artifacts out{cfg->outputs.directory, {}};
    RunOutcome r;
    if (name == "simulate") r = cmd_simulate(*cfg, out);
    if (name == "sweep") r = cmd_sweep(*cfg, out);
    if (name == "graph-check") r = cmd_graph_check(*cfg, out);
    if (name == "pde") r = cmd_pde(*cfg, out);
    if (name == "ldp-check") r = cmd_ldp_check(*cfg, out);
    if (name == "compare") r = cmd_compare(*cfg, out);
    r.artifacts = out.written;
    return r;
  } catch (const ConfigError& e) {
    outcome.exit_code = 2;
    outcome.message = anchored_config_error(cfg ? &*cfg : nullptr, config_path.filename().string(), e);
  } catch (const IoError& e) {
    outcome.exit_code = 2;
    outcome.message = e.what();
  } catch (const IntegrationError& e) {
    outcome.exit_code = 3;
    outcome.message = std::string(e.what()) + " (step " + std::to_string(e.step()) + ", index " +
                      std::to_string(e.index()) + ")";
  } catch (const std::exception& e) {
    outcome.exit_code = 3;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace erdiff
