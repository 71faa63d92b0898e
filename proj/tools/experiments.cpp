#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ea/barrier.hpp"
#include "ea/ground_state.hpp"
#include "ea/io.hpp"
#include "ea/ou_flow.hpp"
#include "ea/parallel.hpp"
#include "ea/rng.hpp"
#include "ea/spectral.hpp"

#ifndef EATOOL_VERSION
#define EATOOL_VERSION "0.0.0-unknown"
#endif

namespace eatool {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ea;

std::string tool_version() { return EATOOL_VERSION; }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "ground-state", "census", "line-mass", "barrier-verify",
      "lower-bound", "decorrelate", "columns-check"};
  return names;
}

namespace {

// --- artifact writing -------------------------------------------------------

json metadata_object(const RunContext& ctx) {
  json cfg = json::object();
  for (const auto& [k, v] : ctx.cfg.effective()) cfg[k] = v;
  return {{"tool", "eatool"},
          {"version", tool_version()},
          {"experiment", ctx.experiment},
          {"config", cfg}};
}

void write_file(RunContext& ctx, const std::string& name, const std::string& content) {
  std::ofstream os(ctx.out / name, std::ios::binary);
  if (!os) throw IoError("cannot write '" + (ctx.out / name).string() + "'");
  os << content;
  if (!os) throw IoError("failed writing '" + (ctx.out / name).string() + "'");
  ctx.artifacts.push_back(name);
}

void write_json(RunContext& ctx, const std::string& name, json body) {
  body["metadata"] = metadata_object(ctx);
  write_file(ctx, name, body.dump(2) + "\n");
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  Csv& operator<<(const std::string& s) { return cell(s); }
  Csv& operator<<(const char* s) { return cell(s); }
  Csv& operator<<(double x) { return cell(format_double(x)); }
  Csv& operator<<(int x) { return cell(std::to_string(x)); }
  Csv& operator<<(long x) { return cell(std::to_string(x)); }
  Csv& operator<<(std::uint64_t x) { return cell(std::to_string(x)); }
  Csv& operator<<(bool b) { return cell(b ? "true" : "false"); }

  std::string render(const RunContext& ctx) const {
    std::ostringstream os;
    os << "# tool=eatool\n# version=" << tool_version() << "\n# experiment=" << ctx.experiment
       << "\n";
    for (const auto& [k, v] : ctx.cfg.effective()) os << "# " << k << "=" << v << "\n";
    for (size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& row : rows_) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    return os.str();
  }

 private:
  Csv& cell(std::string s) {
    if (rows_.empty() || rows_.back().size() == columns_.size()) rows_.emplace_back();
    rows_.back().push_back(std::move(s));
    return *this;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// --- shared config readers ----------------------------------------------------

struct GridChoice {
  GridGraph graph{1, 1};
  TerminalPair pair;
};

TerminalPair read_pair(Config& cfg, const GridGraph& graph) {
  const bool strict = cfg.get_bool("strict", false);
  const CanonicalPair canon = canonical_pair(graph);
  TerminalPair pair = canon.pair;
  const bool explicit_pair = cfg.has("u") || cfg.has("v");
  if (!explicit_pair && canon.odd_row_adjusted) {
    if (strict) {
      throw ConfigError("canonical pair needs an even row count (n_rows = " +
                        std::to_string(graph.n_rows()) + ") in strict mode");
    }
  }
  const auto u = cfg.get_int_list("u", {pair.u.x, pair.u.y});
  const auto v = cfg.get_int_list("v", {pair.v.x, pair.v.y});
  if (u.size() != 2 || v.size() != 2) throw ConfigError("u and v must be 'x,y' pairs");
  pair.u = {static_cast<int>(u[0]), static_cast<int>(u[1])};
  pair.v = {static_cast<int>(v[0]), static_cast<int>(v[1])};
  if (!graph.contains(pair.u) || !graph.contains(pair.v)) {
    throw ConfigError("terminal pair lies outside the grid");
  }
  if (pair.u == pair.v) throw ConfigError("u and v must differ");
  if (canon.odd_row_adjusted && pair.u == canon.pair.u && pair.v == canon.pair.v) {
    cfg.record("odd_row_adjusted", "true");
  }
  return pair;
}

GridGraph make_grid(long n_cols, long n_rows) {
  try {
    return GridGraph(static_cast<int>(n_cols), static_cast<int>(n_rows));
  } catch (const SizingError& e) {
    throw ConfigError(e.what());
  }
}

GridChoice read_grid(Config& cfg, long default_n) {
  const long n = cfg.get_count("n", default_n);
  const long cols = cfg.get_count("n_cols", n);
  const long rows = cfg.get_count("n_rows", n);
  GridChoice g;
  g.graph = make_grid(cols, rows);
  g.pair = read_pair(cfg, g.graph);
  return g;
}

SolverOptions read_solver(Config& cfg) {
  SolverOptions opts;
  const std::string s = cfg.get_string("solver", "auto");
  if (s == "auto") opts.kind = SolverKind::automatic;
  else if (s == "enumeration") opts.kind = SolverKind::enumeration;
  else if (s == "transfer") opts.kind = SolverKind::transfer_matrix;
  else throw ConfigError("solver must be auto, enumeration or transfer");
  return opts;
}

void check_capable(const GridGraph& graph, const SolverOptions& solver) {
  try {
    check_solver_capable(graph, solver);
  } catch (const SizingError& e) {
    throw ConfigError(e.what());
  }
}

std::string pair_text(const TerminalPair& p) {
  std::ostringstream os;
  os << "(" << p.u.x << "," << p.u.y << ")-(" << p.v.x << "," << p.v.y << ")";
  return os.str();
}

// --- experiments ------------------------------------------------------------

void ground_state_demo(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const GridChoice g = read_grid(cfg, 4);
  SolverOptions solver = read_solver(cfg);
  solver.track_gap = true;
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  check_capable(g.graph, solver);

  auto rng = StreamSeeder(seed).engine({0, 0, tag(Stream::initial)});
  const CouplingField J = gaussian_field(g.graph, rng);
  const GroundStateResult r = solve(g.graph, J, solver);
  json body = {{"couplings", io::to_json(J)},
               {"spins", io::to_json(r.spins)},
               {"energy", r.energy},
               {"degeneracy_gap", r.degeneracy_gap ? json(*r.degeneracy_gap) : json(nullptr)},
               {"near_tie", r.near_tie()},
               {"pair", pair_text(g.pair)},
               {"relative_spin", relative_spin(g.graph, r.spins, g.pair)}};
  write_json(ctx, "ground_state.json", body);
}

void census(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const GridChoice g = read_grid(cfg, 2);
  const long D = cfg.get_int("degree_cap", 9);
  const long q = cfg.get_count("quadrature_order", 12);
  if (D < 0 || D > 32) throw ConfigError("degree_cap must lie in [0, 32]");
  if (q > kMaxQuadratureOrder) throw ConfigError("quadrature_order must lie in [1, 64]");
  if (g.graph.num_edges() > kMaxCensusEdges) {
    throw ConfigError("census needs a graph with at most 5 edges");
  }
  const Census c = spectral_support_census(g.graph, g.pair, static_cast<int>(D),
                                           static_cast<int>(q));
  json violations = json::array();
  for (const auto& entry : c.entries) {
    if (entry.alpha_sq > 1e-8 && !entry.support_connects) violations.push_back(describe(entry.k));
  }
  json body = io::to_json(g.graph, c);
  body["pair"] = pair_text(g.pair);
  body["violations"] = violations;
  write_json(ctx, "census.json", body);
  if (!violations.empty()) ctx.status = kExitCounterexample;
}

void line_mass_sweep(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const auto ns = cfg.get_int_list("n_list", {4, 6, 8});
  SubsetMassOptions opts;
  opts.outer = static_cast<int>(cfg.get_count("outer", 2000));
  opts.inner = static_cast<int>(cfg.get_count("inner", 200));
  opts.antithetic = cfg.get_bool("antithetic", false);
  opts.run.solver = read_solver(cfg);
  opts.run.threads = ctx.threads;
  const bool strict = cfg.get_bool("strict", false);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  if (opts.inner < 2) throw ConfigError("inner must be at least 2");

  std::vector<GridGraph> grids;
  for (long n : ns) {
    if (n < 2) throw ConfigError("line-mass needs n >= 2");
    if (n % 2 == 1 && strict) {
      throw ConfigError("odd n = " + std::to_string(n) + " has no canonical row in strict mode");
    }
    grids.push_back(make_grid(n, n));
    SolverOptions s = opts.run.solver;
    s.track_gap = true;
    check_capable(grids.back(), s);
  }

  Csv csv({"n", "S", "estimate", "stderr", "N_outer", "M_inner", "antithetic", "excluded",
           "odd_row_adjusted", "seed"});
  for (size_t i = 0; i < ns.size(); ++i) {
    const CanonicalPair cp = canonical_pair(grids[i]);
    const StreamSeeder seeder(
        StreamSeeder(seed).key({static_cast<std::uint64_t>(ns[i]), tag(Stream::subset)}));
    const SubsetMassEstimate m = line_mass(grids[i], cp.pair, opts, seeder);
    csv << ns[i] << "L" << m.mass_hat << m.stderr_ << m.outer_samples << m.inner_samples
        << m.antithetic << m.excluded << cp.odd_row_adjusted << seed;
  }
  write_file(ctx, "line_mass.csv", csv.render(ctx));
}

void barrier_verify(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const GridChoice g = read_grid(cfg, 7);
  const double low = cfg.get_double("low_threshold", 0.2);
  const double high = cfg.get_double("high_threshold", 5.0);
  const long instances = cfg.get_count("instances", 200);
  const SolverOptions solver = read_solver(cfg);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  check_capable(g.graph, solver);
  if (g.pair.u.y != g.pair.v.y) throw ConfigError("barrier-verify needs u and v on one row");

  const std::vector<int> sites = barrier_sites(g.graph, g.pair);
  if (sites.empty()) throw ConfigError("no barrier template fits between u and v");
  const long centre_x =
      cfg.get_int("center_x", g.graph.vertex(g.graph.edge(sites.front()).a).x);
  BarrierSpec spec;
  try {
    spec = build_barrier_spec(g.graph, g.graph.horizontal_edge(static_cast<int>(centre_x), g.pair.u.y),
                              g.pair, low, high);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("barrier template: ") + e.what());
  }

  const StreamSeeder seeder(seed);
  struct Outcome {
    BarrierReport report;
    CouplingField J;
    std::pair<int, int> flip;
  };
  std::vector<Outcome> out(static_cast<size_t>(instances));
  parallel_for(out.size(), ctx.threads, [&](size_t i) {
    auto rng = seeder.engine({i, 0, tag(Stream::barrier)});
    const CouplingField base = gaussian_field(g.graph, rng);
    out[i].J = sample_barrier_couplings(spec, base, rng);
    out[i].report = verify_barrier_obliviousness(g.graph, g.pair, out[i].J, spec, solver);
    out[i].flip = flip_all_but_center(g.graph, g.pair, out[i].J, spec, solver);
  });

  Csv csv({"instance", "relative_plus", "relative_minus", "walk_positive_plus",
           "walk_positive_minus", "flip_negates", "passed"});
  long passed = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    const BarrierReport& r = out[i].report;
    const bool flip_ok = out[i].flip.second == -out[i].flip.first;
    const bool ok = r.passed() && flip_ok;
    if (ok) ++passed;
    csv << static_cast<long>(i) << r.relative_plus << r.relative_minus << r.walk_positive_plus
        << r.walk_positive_minus << flip_ok << ok;
    if (!ok && spec.gap_condition()) {
      json bundle = io::barrier_counterexample(g.graph, out[i].J, spec, r);
      bundle["instance"] = i;
      write_json(ctx, "counterexample_" + std::to_string(i) + ".json", bundle);
    }
  }
  write_file(ctx, "barrier_verify.csv", csv.render(ctx));

  const BarrierProbability p = barrier_probability(spec);
  const BarrierSpec default_spec =
      build_barrier_spec(g.graph, spec.center_edge, g.pair, 1.0, 100.0);
  const BarrierProbability p_default = barrier_probability(default_spec);
  json summary = {{"instances", instances},
                  {"passed", passed},
                  {"gap_margin", spec.gap_margin()},
                  {"gap_condition", spec.gap_condition()},
                  {"low_edges", spec.low_edges.size()},
                  {"high_edges", spec.high_edges.size()},
                  {"log10_probability", p.log10_p},
                  {"log10_probability_default_thresholds", p_default.log10_p},
                  {"spec", io::to_json(g.graph, spec)}};
  write_json(ctx, "barrier_summary.json", summary);
  if (passed != instances && spec.gap_condition()) ctx.status = kExitCounterexample;
}

void lower_bound(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const auto ns = cfg.get_int_list("n_list", {4, 6, 8});
  const long instances = cfg.get_count("instances", 1);
  const long resamples = cfg.get_count("resamples", 1000);
  const SolverOptions solver = read_solver(cfg);
  const bool strict = cfg.get_bool("strict", false);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  std::vector<GridGraph> grids;
  for (long n : ns) {
    if (n < 2) throw ConfigError("lower-bound needs n >= 2");
    if (n % 2 == 1 && strict) {
      throw ConfigError("odd n = " + std::to_string(n) + " has no canonical row in strict mode");
    }
    grids.push_back(make_grid(n, n));
    check_capable(grids.back(), solver);
  }

  const StreamSeeder seeder(seed);
  struct Job {
    size_t grid;
    std::uint64_t instance;
    LowerBoundReport report;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < grids.size(); ++i) {
    for (long k = 0; k < instances; ++k) {
      jobs.push_back({i, (static_cast<std::uint64_t>(ns[i]) << 32) | static_cast<std::uint64_t>(k), {}});
    }
  }
  parallel_for(jobs.size(), ctx.threads, [&](size_t j) {
    const GridGraph& graph = grids[jobs[j].grid];
    const TerminalPair pair = canonical_pair(graph).pair;
    auto rng = seeder.engine({jobs[j].instance, 0, tag(Stream::barrier)});
    const CouplingField J = build_lower_bound_field(graph, pair, rng);
    jobs[j].report = check_lower_bound(graph, pair, J, static_cast<int>(resamples),
                                       jobs[j].instance, seeder, solver);
  });

  Csv csv({"n", "instance", "relative_spin", "resamples", "agreeing", "line_aligned", "passed"});
  bool all = true;
  for (const Job& job : jobs) {
    const LowerBoundReport& r = job.report;
    all = all && r.passed();
    csv << ns[job.grid] << static_cast<long>(job.instance & 0xffffffffULL) << r.relative_spin
        << r.resamples << r.agreeing << r.line_aligned << r.passed();
  }
  write_file(ctx, "lower_bound.csv", csv.render(ctx));
  if (!all) ctx.status = kExitCounterexample;
}

void decorrelate(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const GridChoice g = read_grid(cfg, 4);
  const auto ts = cfg.get_double_list("t_grid", {0.0, 0.25, 0.5, 1.0, 2.0});
  const long replicas = cfg.get_count("replicas", 1000);
  RunOptions run;
  run.solver = read_solver(cfg);
  run.threads = ctx.threads;
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const bool tiny = g.graph.num_edges() <= kMaxCensusEdges;
  const long D = tiny ? cfg.get_int("degree_cap", 9) : 0;
  const long q = tiny ? cfg.get_count("quadrature_order", 12) : 0;
  for (double t : ts) {
    if (!(t >= 0)) throw ConfigError("t_grid entries must be nonnegative");
  }
  check_capable(g.graph, run.solver);
  const StreamSeeder seeder(seed);

  const auto rows =
      decorrelation_experiment(g.graph, g.pair, ts, static_cast<int>(replicas), seeder, run);
  Csv csv({"t", "n", "replicas", "mean_R2", "stderr_R2", "mean_cov", "stderr", "seed"});
  for (const auto& r : rows) {
    csv << r.t << static_cast<long>(g.graph.n_cols()) << r.replicas << r.mean_r2 << r.stderr_r2
        << r.mean_cov << r.stderr_cov << seed;
  }
  write_file(ctx, "decorrelation.csv", csv.render(ctx));

  if (tiny) {
    const auto id = decorrelation_identity_check(g.graph, g.pair, ts, static_cast<int>(D),
                                                 static_cast<int>(q), static_cast<int>(replicas),
                                                 seeder, run);
    Csv check({"t", "mc_cov", "stderr", "spectral_sum", "tail_bound", "agrees"});
    for (const auto& r : id) {
      check << r.t << r.mc_cov << r.mc_stderr << r.spectral_sum << r.tail_bound << r.agrees;
    }
    write_file(ctx, "decorrelation_identity.csv", check.render(ctx));
  }
}

void columns_check(RunContext& ctx) {
  Config& cfg = ctx.cfg;
  const long steps = cfg.get_count("steps", 40);
  const long rows = cfg.get_count("n_rows", steps + 1);
  const long width = cfg.get_count("width", 5);
  const double eps = cfg.get_double("epsilon", 0.02);
  const long samples = cfg.get_count("samples", 10000);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  if (steps % width != 0) throw ConfigError("width must divide steps");
  if (!(eps >= 0)) throw ConfigError("epsilon must be nonnegative");
  const GridGraph graph = make_grid(steps + 1, rows);
  const CanonicalPair cp = canonical_pair(graph);
  if (cp.odd_row_adjusted) cfg.record("odd_row_adjusted", "true");

  const StreamSeeder seeder(seed);
  struct Sample {
    EdgeSet S;
    double theta = 0;
    bool contained = false;
  };
  std::vector<Sample> out(static_cast<size_t>(samples));
  parallel_for(out.size(), ctx.threads, [&](size_t i) {
    auto rng = seeder.engine({i, 0, tag(Stream::path)});
    out[i].S = sample_short_connecting_set(graph, cp.pair, eps, rng);
    const ColumnClass cls = straight_columns(graph, out[i].S, static_cast<int>(width));
    out[i].theta = cls.straight_fraction();
    out[i].contained = out[i].S.is_subset_of(envelope(graph, cls));
  });

  const double bound = 1.0 - eps * static_cast<double>(width);
  Csv csv({"sample", "size", "theta", "bound_ok", "contained"});
  json counterexamples = json::array();
  double min_theta = 1.0;
  long violations = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    const bool ok = out[i].theta >= bound;
    min_theta = std::min(min_theta, out[i].theta);
    csv << static_cast<long>(i) << out[i].S.size() << out[i].theta << ok << out[i].contained;
    if (!ok || !out[i].contained) {
      ++violations;
      counterexamples.push_back({{"sample", i}, {"S", io::to_json(graph, out[i].S)}});
    }
  }
  write_file(ctx, "columns.csv", csv.render(ctx));
  json summary = {{"samples", samples}, {"bound", bound},          {"min_theta", min_theta},
                  {"violations", violations}, {"counterexamples", counterexamples}};
  write_json(ctx, "columns_summary.json", summary);
  if (violations > 0) ctx.status = kExitCounterexample;
}

// --- replay helpers -----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

Table read_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.columns.empty()) t.columns = std::move(cells);
    else t.rows.push_back(std::move(cells));
  }
  return t;
}

// Compares estimate columns of two runs that differ only in seed.
bool statistically_consistent(const std::string& name, const std::string& a,
                              const std::string& b) {
  const Table ta = read_csv(a);
  const Table tb = read_csv(b);
  std::string value_col;
  std::string err_col = "stderr";
  if (ta.column("estimate") >= 0) value_col = "estimate";
  else if (ta.column("mean_cov") >= 0) value_col = "mean_cov";
  if (value_col.empty() || ta.column(err_col) < 0 || ta.rows.size() != tb.rows.size()) {
    std::cout << name << ": no estimate columns to compare\n";
    return true;
  }
  const int vi = ta.column(value_col);
  const int ei = ta.column(err_col);
  bool ok = true;
  for (size_t r = 0; r < ta.rows.size(); ++r) {
    const double x = std::stod(ta.rows[r][static_cast<size_t>(vi)]);
    const double y = std::stod(tb.rows[r][static_cast<size_t>(vi)]);
    const double se = std::hypot(std::stod(ta.rows[r][static_cast<size_t>(ei)]),
                                 std::stod(tb.rows[r][static_cast<size_t>(ei)]));
    const bool row_ok = std::abs(x - y) <= 6 * se;
    std::cout << name << " row " << r << ": " << x << " vs " << y << " (6 se = " << 6 * se
              << ") " << (row_ok ? "consistent" : "INCONSISTENT") << "\n";
    ok = ok && row_ok;
  }
  return ok;
}

}  // namespace

int run_experiment(RunContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw IoError("cannot create output directory '" + ctx.out.string() + "'");

  if (ctx.experiment == "ground-state") ground_state_demo(ctx);
  else if (ctx.experiment == "census") census(ctx);
  else if (ctx.experiment == "line-mass") line_mass_sweep(ctx);
  else if (ctx.experiment == "barrier-verify") barrier_verify(ctx);
  else if (ctx.experiment == "lower-bound") lower_bound(ctx);
  else if (ctx.experiment == "decorrelate") decorrelate(ctx);
  else if (ctx.experiment == "columns-check") columns_check(ctx);
  else throw ConfigError("unknown experiment '" + ctx.experiment + "'");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json meta = metadata_object(ctx);
  meta["artifacts"] = ctx.artifacts;
  meta["threads"] = ctx.threads;
  meta["wall_time_seconds"] = wall;
  meta["exit_status"] = ctx.status;
  std::ofstream os(ctx.out / "metadata.json");
  if (!os) throw IoError("cannot write metadata.json");
  os << meta.dump(2) << "\n";
  return ctx.status;
}

int replay(const fs::path& metadata, const fs::path& out, int threads,
           const std::string& seed_override) {
  if (!fs::exists(metadata)) throw IoError("metadata file '" + metadata.string() + "' not found");
  json meta;
  try {
    meta = json::parse(slurp(metadata));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed metadata: ") + e.what());
  }
  const std::string version = meta.value("version", "");
  if (version != tool_version()) {
    throw ConfigError("metadata written by version '" + version + "', this is '" +
                      tool_version() + "'; refusing to replay");
  }

  RunContext ctx;
  ctx.experiment = meta.at("experiment").get<std::string>();
  for (const auto& [k, v] : meta.at("config").items()) ctx.cfg.set(k, v.get<std::string>());
  const std::string original_seed = ctx.cfg.has("seed") ? ctx.cfg.raw().at("seed") : "";
  const bool reseeded = !seed_override.empty() && seed_override != original_seed;
  if (!seed_override.empty()) ctx.cfg.set("seed", seed_override);
  ctx.out = out.empty() ? metadata.parent_path() / "replay" : out;
  ctx.threads = threads;
  const int status = run_experiment(ctx);
  (void)status;

  const fs::path original_dir = metadata.parent_path();
  bool ok = true;
  for (const auto& name : meta.at("artifacts")) {
    const std::string file = name.get<std::string>();
    const std::string a = slurp(original_dir / file);
    const fs::path replayed = ctx.out / file;
    if (!fs::exists(replayed)) {
      std::cout << file << ": missing from replay\n";
      ok = false;
      continue;
    }
    const std::string b = slurp(replayed);
    if (reseeded) {
      if (file.size() > 4 && file.substr(file.size() - 4) == ".csv") {
        ok = statistically_consistent(file, a, b) && ok;
      }
    } else {
      const bool same = a == b;
      std::cout << file << ": " << (same ? "identical" : "DIFFERS") << "\n";
      ok = ok && same;
    }
  }
  return ok ? kExitOk : kExitCounterexample;
}

}  // namespace eatool
