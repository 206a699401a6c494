// Command-line driver: each subcommand reads one JSON config (--config FILE
// or --json TEXT) and writes a point set, CSV rows or a JSON document.
//
// Exit codes: 0 success, 2 validation error, 3 budget exceeded,
// 4 acceptance failure (or a violated verdict under --expect-holds).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndqmc/ndqmc.hpp"

namespace {

using namespace ndqmc;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitAcceptance = 4;

struct Common {
  std::string config_path;
  std::string json_text;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool expect_holds = false;
  bool oracle = false;
};

Json load_config(const Common& c) {
  if (!c.config_path.empty() && !c.json_text.empty()) {
    throw ValidationError("give either --config or --json, not both");
  }
  std::string text = c.json_text;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ValidationError("cannot open config " + c.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) return Json::object();
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::uint64_t seed_of(const Json& cfg, const Common& c) {
  if (c.seed) return *c.seed;
  return ndqmc::detail::get_field_or<std::uint64_t>(cfg, "seed", 0, "config");
}

std::size_t threads_of(const Json& cfg, const Common& c) {
  if (c.threads) return *c.threads;
  return ndqmc::detail::get_field_or<std::size_t>(cfg, "threads", default_threads(), "config");
}

/// A field that may be a scalar or an array of scalars.
template <class T>
std::vector<T> list_field(const Json& cfg, const char* key, std::vector<T> fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& v = cfg.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config: field \"") + key + "\" has the wrong type");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  return os;
}

/// CSV to --out (plus OUT.schema.json) or to stdout.
void emit_table(const CsvTable& table, const std::string& out, const std::string& name) {
  if (out.empty()) {
    table.write(std::cout);
    return;
  }
  auto os = open_out(out);
  table.write(os);
  auto schema = open_out(out + ".schema.json");
  schema << table.schema(name).dump(2) << '\n';
}

void emit_json(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  auto os = open_out(out);
  os << j.dump(2) << '\n';
}

PointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open point set " + path);
  return read_text(in);
}

/// Points from "input" (a PointSet file) or drawn from scheme/n/d.
PointSet points_from(const Json& cfg, std::uint64_t seed) {
  if (cfg.contains("input")) return load_points(ndqmc::detail::get_field<std::string>(cfg, "input", "config"));
  if (!cfg.contains("scheme")) throw ValidationError("config: need \"input\" or \"scheme\"");
  RngStream rng(seed);
  return sample(scheme_from_json(cfg.at("scheme")), ndqmc::detail::get_field<std::size_t>(cfg, "n", "config"),
                ndqmc::detail::get_field<std::size_t>(cfg, "d", "config"), rng);
}

// ------------------------------------------------------------------ sample

int cmd_sample(const Common& c) {
  const Json cfg = load_config(c);
  ndqmc::detail::check_keys(cfg, {"scheme", "n", "d", "seed", "threads"}, "sample config");
  if (!cfg.contains("scheme")) throw ValidationError("sample config: missing field \"scheme\"");
  const auto spec = scheme_from_json(cfg.at("scheme"));
  const auto n = ndqmc::detail::get_field<std::size_t>(cfg, "n", "sample config");
  const auto d = ndqmc::detail::get_field<std::size_t>(cfg, "d", "sample config");
  RngStream rng(seed_of(cfg, c));
  const PointSet p = sample(spec, n, d, rng);
  if (c.out.empty()) {
    write_text(std::cout, p);
  } else {
    auto os = open_out(c.out);
    write_text(os, p);
  }
  return kExitOk;
}

// ------------------------------------------------------------- discrepancy

std::string coords_text(const Coords& x) { return Json(x).dump(); }

int cmd_discrepancy(const Common& c) {
  const Json cfg = load_config(c);
  ndqmc::detail::check_keys(cfg, {"input", "scheme", "n", "d", "exact", "delta", "weights", "budget", "seed", "threads"},
                            "discrepancy config");
  const PointSet p = points_from(cfg, seed_of(cfg, c));
  const double budget = ndqmc::detail::get_field_or<double>(cfg, "budget", kDefaultDiscrepancyBudget, "config");
  CsvTable table({{"measure", "exact | cover_lower | cover_upper | weighted"},
                  {"value", "discrepancy value"},
                  {"delta", "cover resolution (cover rows)"},
                  {"cover_size", "number of cover points (cover rows)"},
                  {"subset", "coordinate subset attaining the weighted maximum (weighted rows)"},
                  {"witness", "anchored box corner attaining the value"}});
  if (ndqmc::detail::get_field_or<bool>(cfg, "exact", true, "config")) {
    const auto r = star_discrepancy_exact(p, budget);
    table.add_row({"exact", format_real(r.value), "", "", "", r.witness ? coords_text(*r.witness) : ""});
  }
  for (double delta : list_field<double>(cfg, "delta", {})) {
    const auto r = star_discrepancy_cover(p, delta, budget);
    table.add_row({"cover_lower", format_real(r.lower), format_real(delta), std::to_string(r.cover_size), "",
                   coords_text(r.witness)});
    table.add_row({"cover_upper", format_real(r.upper), format_real(delta), std::to_string(r.cover_size), "", ""});
  }
  if (cfg.contains("weights")) {
    const auto w = weighted_star_discrepancy(p, weights_from_json(cfg.at("weights")), budget);
    std::vector<std::size_t> subset;
    for (std::size_t k = 0; k < 64; ++k) {
      if ((w.subset >> k) & 1U) subset.push_back(k);
    }
    table.add_row({"weighted", format_real(w.value), "", "", Json(subset).dump(), ""});
  }
  emit_table(table, c.out, "discrepancy");
  return kExitOk;
}

// ------------------------------------------------------------------ negdep

Method method_from(const std::string& s) {
  if (s == "auto" || s == "automatic") return Method::automatic;
  if (s == "empirical") return Method::empirical;
  if (s == "exact") return Method::exact;
  throw ValidationError("negdep config: method must be auto, empirical or exact");
}

/// All points of grid^d, first coordinate varying fastest.
std::vector<Coords> grid_points(const std::vector<double>& grid, std::size_t d) {
  ndqmc::detail::require(!grid.empty(), "negdep config: grid must not be empty");
  ndqmc::detail::require(std::pow(static_cast<double>(grid.size()), static_cast<double>(d)) <= 1e4,
                         "negdep config: grid^d must be <= 10000 boxes");
  std::vector<Coords> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Coords x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = grid[idx[k]];
    out.push_back(std::move(x));
    std::size_t k = 0;
    while (k < d && ++idx[k] == grid.size()) idx[k++] = 0;
    if (k == d) break;
  }
  return out;
}

Interval interval_from(const Json& cfg, const char* key, std::size_t dim) {
  if (!cfg.contains(key)) return Interval(Coords(dim, 0.0), Coords(dim, 1.0));
  const Json& j = cfg.at(key);
  ndqmc::detail::check_keys(j, {"a", "b"}, std::string("negdep config ") + key);
  return Interval(ndqmc::detail::get_field<Coords>(j, "a", key), ndqmc::detail::get_field<Coords>(j, "b", key));
}

int cmd_negdep(const Common& c) {
  const Json cfg = load_config(c);
  const std::string ctx = "negdep config";
  ndqmc::detail::check_keys(cfg,
                            {"scheme", "n", "d", "notion", "grid", "regions", "t", "gamma", "replications",
                             "confidence", "method", "oracle", "i", "A", "B", "seed", "threads"},
                            ctx);
  if (!cfg.contains("scheme")) throw ValidationError(ctx + ": missing field \"scheme\"");
  const auto spec = scheme_from_json(cfg.at("scheme"));
  const std::string name = scheme_name(spec);
  const auto n = ndqmc::detail::get_field<std::size_t>(cfg, "n", ctx);
  const auto d = ndqmc::detail::get_field<std::size_t>(cfg, "d", ctx);
  const auto notion = ndqmc::detail::get_field_or<std::string>(cfg, "notion", "upper_nd", ctx);
  const auto grid = list_field<double>(cfg, "grid", {0.25, 0.5, 0.75});
  const bool oracle = c.oracle || ndqmc::detail::get_field_or<bool>(cfg, "oracle", false, ctx);

  TestOptions opts;
  opts.replications = ndqmc::detail::get_field_or<std::size_t>(cfg, "replications", 10000, ctx);
  opts.confidence = ndqmc::detail::get_field_or<double>(cfg, "confidence", 0.99, ctx);
  opts.method = method_from(ndqmc::detail::get_field_or<std::string>(cfg, "method", "auto", ctx));
  opts.threads = threads_of(cfg, c);
  ndqmc::detail::require(opts.confidence > 0.0 && opts.confidence < 1.0, ctx + ": confidence must lie in (0,1)");
  if (oracle) opts.method = Method::empirical;
  const RngStream root(seed_of(cfg, c));

  CsvTable table = dependence_table();
  bool violated = false;
  std::uint64_t stream = 0;
  auto add = [&](const DependenceReport& r, std::optional<double> exact) {
    violated = violated || r.verdict == Verdict::violated;
    table.add_row(dependence_row(name, r, exact));
  };

  if (notion == "upper_nd" || notion == "lower_nd") {
    std::vector<Region> regions;
    if (cfg.contains("regions")) {
      if (!cfg.at("regions").is_array()) throw ValidationError(ctx + ": \"regions\" must be an array");
      for (const auto& r : cfg.at("regions")) regions.push_back(region_from_json(r));
    } else {
      for (auto& x : grid_points(grid, d)) regions.emplace_back(CornerBox0(std::move(x)));
    }
    const bool upper = notion == "upper_nd";
    for (std::size_t t : list_field<std::size_t>(cfg, "t", {2})) {
      for (double gamma : list_field<double>(cfg, "gamma", {1.0})) {
        opts.gamma = gamma;
        for (const auto& q : regions) {
          const RngStream rng = root.split(stream++);
          const auto rep = upper ? test_upper_nd(spec, n, d, q, t, opts, rng) : test_lower_nd(spec, n, d, q, t, opts, rng);
          std::optional<double> exact;
          if (oracle) exact = upper ? exact_upper_prob(spec, n, d, q, t) : exact_lower_prob(spec, n, d, q, t);
          add(rep, exact);
        }
      }
    }
  } else if (notion == "pairwise_nd") {
    std::vector<CornerBox1> corners;
    for (auto& x : grid_points(grid, d)) corners.emplace_back(std::move(x));
    for (const auto& cell : pairwise_sweep(spec, n, d, corners, opts, root)) {
      std::optional<double> hit, miss;
      if (oracle) {
        hit = exact_joint_prob(spec, n, d, corners[cell.q_index], corners[cell.r_index]);
        if (hit) miss = 1.0 - volume(corners[cell.q_index]) - volume(corners[cell.r_index]) + *hit;
      }
      add(cell.report.nlod, hit);
      add(cell.report.nuod, miss);
    }
  } else if (notion == "conditional_nqd") {
    const auto i = ndqmc::detail::get_field_or<std::size_t>(cfg, "i", d, ctx);
    ndqmc::detail::require(i >= 1 && i <= d, ctx + ": need 1 <= i <= d");
    const Interval a = interval_from(cfg, "A", i - 1), b = interval_from(cfg, "B", i - 1);
    for (double alpha : grid) {
      for (double beta : grid) {
        add(test_conditional_nqd(spec, n, d, i, a, b, alpha, beta, opts, root.split(stream++)), std::nullopt);
      }
    }
  } else if (notion == "ci_nqd") {
    const auto i = ndqmc::detail::get_field_or<std::size_t>(cfg, "i", 1, ctx);
    for (double q : grid) {
      for (double r : grid) {
        auto rep = test_ci_nqd(spec, n, d, i, q, r, opts, root.split(stream++));
        bool consistent = true;
        for (const auto& f : rep.factorization) consistent = consistent && f.consistent;
        rep.nqd.event["factorization_consistent"] = consistent;
        rep.nqd.event["partial"] = rep.partial;
        add(rep.nqd, std::nullopt);
      }
    }
  } else {
    throw ValidationError(ctx + ": unknown notion \"" + notion + "\"");
  }
  emit_table(table, c.out, "negdep");
  return (c.expect_holds && violated) ? kExitAcceptance : kExitOk;
}

// ------------------------------------------------------------------ bounds

int cmd_bounds(const Common& c) {
  const Json cfg = load_config(c);
  const std::string ctx = "bounds config";
  ndqmc::detail::check_keys(cfg, {"formula", "n", "d", "rho", "theta", "c", "weights", "seed", "threads"}, ctx);
  const auto formulas =
      list_field<std::string>(cfg, "formula", {"gh_c", "gh_theta", "mixed_theta", "c0_c", "c0_theta"});
  std::optional<Weights> weights;
  if (cfg.contains("weights")) weights = weights_from_json(cfg.at("weights"));

  CsvTable table({{"formula", "gh_c | gh_theta | mixed_theta | c0_c | c0_theta | weighted_c | weighted_theta"},
                  {"n", "number of points"},
                  {"d", "dimension"},
                  {"rho", "log(gamma) / d"},
                  {"theta", "target success probability (theta rows)"},
                  {"c", "constant (c rows)"},
                  {"bound_value", "discrepancy bound"},
                  {"success_prob", "success probability clamped to [0,1]"},
                  {"unclamped", "success probability as given by the formula"},
                  {"clamped", "1 when success_prob was clamped"},
                  {"diverged", "1 when the bound is infinite"},
                  {"vacuous", "1 when the success probability is <= 0"},
                  {"eta", "6e max(1, N / (2 d log 6e))^(1/2)"},
                  {"eta_condition", "1 when the sufficient condition on eta holds"}});
  for (const auto& f : formulas) {
    const bool theta_form = f.size() > 6 && f.substr(f.size() - 6) == "_theta";
    for (std::size_t n : list_field<std::size_t>(cfg, "n", {100})) {
      for (std::size_t d : list_field<std::size_t>(cfg, "d", {2})) {
        for (double rho : list_field<double>(cfg, "rho", {0.0})) {
          const auto second = theta_form ? list_field<double>(cfg, "theta", {0.5}) : list_field<double>(cfg, "c", {1.0});
          for (double v : second) {
            BoundParams p{n, d, rho, 0.5, 1.0};
            (theta_form ? p.theta : p.c) = v;
            BoundResult r;
            if (f == "gh_c") r = gh_bound(p);
            else if (f == "gh_theta") r = gh_bound_theta(p);
            else if (f == "mixed_theta") r = mixed_bound_theta(p);
            else if (f == "c0_c") r = c0_bound(p);
            else if (f == "c0_theta") r = c0_bound_theta(p);
            else if (f == "weighted_c" || f == "weighted_theta") {
              if (!weights) throw ValidationError(ctx + ": " + f + " needs \"weights\"");
              r = f == "weighted_c" ? weighted_bound(p, *weights) : weighted_bound_theta(p, *weights);
            } else {
              throw ValidationError(ctx + ": unknown formula \"" + f + "\"");
            }
            const auto cond = c0_eta_condition(n, d);
            table.add_row({f, std::to_string(n), std::to_string(d), format_real(rho),
                           theta_form ? format_real(p.theta) : "", theta_form ? "" : format_real(p.c),
                           format_real(r.bound_value), format_real(r.success_prob), format_real(r.unclamped),
                           r.clamped ? "1" : "0", r.diverged ? "1" : "0", r.success_prob <= 0.0 ? "1" : "0",
                           format_real(c0_eta(n, d)), cond.holds() ? "1" : "0"});
          }
        }
      }
    }
  }
  emit_table(table, c.out, "bounds");
  return kExitOk;
}

// ---------------------------------------------------------------- variance

TestFunction function_from(const std::string& name, const Json& cfg, std::size_t d) {
  if (name == "product") return product_coords();
  if (name == "sum") return sum_coords();
  if (name == "neg_product") return neg_product();
  if (name == "min") return min_coords();
  if (name == "neg_min") return neg_min_coords();
  if (name == "corner") {
    return corner_indicator(cfg.contains("corner") ? ndqmc::detail::get_field<Coords>(cfg, "corner", "config")
                                                   : Coords(d, 0.5));
  }
  throw ValidationError("variance config: unknown function \"" + name + "\"");
}

int cmd_variance(const Common& c) {
  const Json cfg = load_config(c);
  const std::string ctx = "variance config";
  ndqmc::detail::check_keys(cfg, {"scheme", "n", "d", "function", "corner", "replications", "seed", "threads"}, ctx);
  if (!cfg.contains("scheme")) throw ValidationError(ctx + ": missing field \"scheme\"");
  const auto spec = scheme_from_json(cfg.at("scheme"));
  const auto n = ndqmc::detail::get_field<std::size_t>(cfg, "n", ctx);
  const auto d = ndqmc::detail::get_field<std::size_t>(cfg, "d", ctx);
  const auto reps = ndqmc::detail::get_field_or<std::size_t>(cfg, "replications", 1000, ctx);
  const RngStream root(seed_of(cfg, c));
  CsvTable table = variance_table();
  std::uint64_t k = 0;
  for (const auto& fname : list_field<std::string>(cfg, "function", {"product"})) {
    table.add_row(variance_row(variance_study(spec, function_from(fname, cfg, d), n, d, reps, root.split(k++),
                                              threads_of(cfg, c))));
  }
  emit_table(table, c.out, "variance");
  return kExitOk;
}

// --------------------------------------------------------------- net-check

int cmd_net_check(const Common& c) {
  const Json cfg = load_config(c);
  const std::string ctx = "net-check config";
  ndqmc::detail::check_keys(cfg, {"base", "m", "s", "t", "scramble", "input", "seed", "threads"}, ctx);
  const auto b = ndqmc::detail::get_field<unsigned>(cfg, "base", ctx);
  const auto m = ndqmc::detail::get_field<unsigned>(cfg, "m", ctx);
  const auto s = ndqmc::detail::get_field<unsigned>(cfg, "s", ctx);
  const auto t = ndqmc::detail::get_field_or<unsigned>(cfg, "t", 0, ctx);
  const bool scramble = ndqmc::detail::get_field_or<bool>(cfg, "scramble", false, ctx);
  PointSet p = cfg.contains("input") ? load_points(ndqmc::detail::get_field<std::string>(cfg, "input", ctx))
                                     : faure_net(b, m, s);
  if (scramble) {
    RngStream rng(seed_of(cfg, c));
    p = owen_scramble(p, b, m, rng);
  }
  const bool ok = is_net(p, b, m, s, t);
  emit_json({{"base", b}, {"m", m}, {"s", s}, {"t", t}, {"scrambled", scramble}, {"is_net", ok}}, c.out);
  return (c.expect_holds && !ok) ? kExitAcceptance : kExitOk;
}

// ------------------------------------------------------------------ report

int cmd_report(const Common& c) {
  const Json cfg = load_config(c);
  ndqmc::detail::check_keys(cfg, {"criteria", "seed", "threads"}, "report config");
  std::vector<int> ids;
  for (int id = 1; id <= 12; ++id) ids.push_back(id);
  ids = list_field<int>(cfg, "criteria", ids);
  acceptance::Options opts;
  if (cfg.contains("seed") || c.seed) opts.seed = seed_of(cfg, c);
  opts.threads = threads_of(cfg, c);

  const std::filesystem::path dir = c.out.empty() ? std::filesystem::path("report") : std::filesystem::path(c.out);
  std::filesystem::create_directories(dir);

  CsvTable summary({{"id", "criterion number"},
                    {"name", "short name"},
                    {"passed", "1 on success"},
                    {"seconds", "wall time"},
                    {"detail", "one-line summary"}});
  CsvTable negdep = dependence_table();
  CsvTable variance = variance_table();
  Json results = Json::array();
  bool all = true;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id, opts);
    std::cerr << acceptance::summary_line(r) << '\n';
    all = all && r.passed;
    results.push_back(acceptance::to_json(r));
    summary.add_row({std::to_string(r.id), r.name, r.passed ? "1" : "0", format_real(r.seconds), r.detail});
    if (r.id == 8 && r.data.contains("studies")) {
      for (const auto& s : r.data["studies"]) {
        VarianceStudy v;
        v.scheme = s["scheme"];
        v.function = s["function"];
        v.n = s["n"];
        v.d = s["d"];
        v.replications = s["replications"];
        v.mean_scheme = s["mean_scheme"];
        v.mean_mc = s["mean_mc"];
        v.var_scheme = s["var_scheme"];
        v.var_mc = s["var_mc"];
        v.ratio = s["ratio"];
        v.ratio_stderr = s["ratio_stderr"];
        variance.add_row(variance_row(v));
      }
    }
    if (r.id == 11 && r.data.contains("pairwise")) {
      for (const auto& row : r.data["pairwise"]) {
        negdep.add_row({"net(b=3,m=2,s=2)", row["notion"], row["event"].dump(), format_real(row["lhs"]),
                        format_real(row["rhs"]), format_real(row["ci_halfwidth"]), row["verdict"],
                        std::to_string(row["replications"].get<std::size_t>()), row["exact"].get<bool>() ? "1" : "0",
                        ""});
      }
    }
  }
  emit_table(summary, (dir / "acceptance.csv").string(), "acceptance");
  emit_table(negdep, (dir / "negdep.csv").string(), "negdep");
  emit_table(variance, (dir / "variance.csv").string(), "variance");
  emit_json({{"passed", all}, {"seed", opts.seed}, {"criteria", results}}, (dir / "summary.json").string());
  return all ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negative dependence and randomized QMC toolkit"};
  app.require_subcommand(1);
  Common common;

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const Common&);
  };
  const Entry entries[] = {
      {"sample", "draw one point set and write it in the text format", cmd_sample},
      {"discrepancy", "exact, cover and weighted star discrepancy", cmd_discrepancy},
      {"negdep", "sweep negative dependence tests", cmd_negdep},
      {"bounds", "evaluate discrepancy bound formulas", cmd_bounds},
      {"variance", "variance of the estimator against Monte Carlo", cmd_variance},
      {"net-check", "check the (t,m,s)-net property", cmd_net_check},
      {"report", "run the acceptance suite and write summary.json and CSVs", cmd_report},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option("--json", common.json_text, "inline JSON config");
    sub->add_option("--seed", common.seed, "seed (overrides the config)");
    sub->add_option("--threads", common.threads, "worker thread cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out, "output file (report: directory)");
    sub->add_flag("--expect-holds", common.expect_holds, "exit 4 when a check fails or a verdict is violated");
    sub->add_flag("--oracle", common.oracle, "negdep: empirical run with the exact probability alongside");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    try {
      return entries[k].run(common);
    } catch (const BudgetExceeded& e) {
      std::cerr << "budget exceeded: " << e.what() << '\n';
      return kExitBudget;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return kExitValidation;
}
