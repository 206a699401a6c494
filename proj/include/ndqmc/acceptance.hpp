#pragma once

// End-to-end checks of the library against closed forms and simulation.
// Each criterion returns a pass flag, a one-line summary and a JSON payload.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ndqmc/bounds.hpp"
#include "ndqmc/discrepancy.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/integrate.hpp"
#include "ndqmc/io.hpp"
#include "ndqmc/negdep.hpp"
#include "ndqmc/report_io.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/stats.hpp"
#include "ndqmc/strata.hpp"

namespace ndqmc::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  Json data = Json::object();
};

struct Options {
  std::uint64_t seed = 20240601;
  std::size_t threads = default_threads();
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

inline bool close(double x, double y, double tol) { return std::fabs(x - y) <= tol; }

inline CriterionResult named(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

}  // namespace detail

/// Minimal prime N with 6 / (N^2 (N-1)^2 (N-2)) > (3/N)^6, i.e.
/// 6 N^4 > 729 (N-1)^2 (N-2), searched up to `limit`.
inline std::size_t rsj_crossover_prime(std::size_t limit = 10000) {
  for (std::size_t n = 3; n <= limit; ++n) {
    if (!is_prime(n)) continue;
    const long double nn = static_cast<long double>(n);
    if (6.0L * nn * nn * nn * nn > 729.0L * (nn - 1) * (nn - 1) * (nn - 2)) return n;
  }
  return 0;
}

inline CriterionResult criterion1() {
  CriterionResult r = detail::named(1, "mincopula counterexample");
  const double f = min_copula_cdf(0.75, 0.25);
  bool ok = detail::close(f, 0.25, 1e-15) && f > 3.0 / 16.0;
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double q = k / 10.0;
    worst = std::max(worst, std::fabs(min_copula_cdf(q, q) - q * q));
  }
  ok = ok && worst <= 1e-15;
  TestOptions opts;
  opts.method = Method::exact;
  const auto pair = test_pairwise_nd(MinCopula{}, 2, 1, CornerBox1({0.75}), CornerBox1({0.25}), opts, RngStream(0));
  ok = ok && pair.nuod.verdict == Verdict::violated && detail::close(pair.nuod.lhs, 0.25, 1e-15);
  r.passed = ok;
  r.detail = detail::fmt("F(3/4,1/4)=%.17g vs 3/16; max |F(q,q)-q^2|=%.3g", f, worst);
  r.data = {{"F", f}, {"product", 3.0 / 16.0}, {"diag_max_error", worst}, {"pairwise_miss", to_json(pair.nuod)}};
  return r;
}

inline CriterionResult criterion2() {
  CriterionResult r = detail::named(2, "fourslot conditional NQD counterexample");
  TestOptions opts;
  opts.method = Method::exact;
  const Interval half({0.5}, {1.0});
  const auto rep = test_conditional_nqd(FourSlot{}, 2, 2, 2, half, half, 0.5, 0.5, opts, RngStream(0));
  double total = 0.0;
  for (const auto& row : four_slot_table()) total += row.probability;
  r.passed = detail::close(rep.lhs, 1.0 / 3.0, 1e-15) && detail::close(rep.rhs, 0.25, 1e-15) &&
             rep.verdict == Verdict::violated && detail::close(total, 1.0, 1e-15);
  r.detail = detail::fmt("conditional %.17g vs product %.17g", rep.lhs, rep.rhs);
  r.data = {{"report", to_json(rep)}, {"table_total", total}};
  return r;
}

inline CriterionResult criterion3() {
  CriterionResult r = detail::named(3, "swap scheme: pairwise violation, conditional NQD equality");
  TestOptions opts;
  opts.method = Method::exact;
  const CornerBox1 u({0.5, 0.5});
  const auto pair = test_pairwise_nd(SwapScheme{}, 2, 2, u, u, opts, RngStream(0));
  bool ok = detail::close(pair.nlod.lhs, 0.25, 1e-12) && detail::close(pair.nlod.rhs, 1.0 / 16.0, 1e-12) &&
            pair.nlod.verdict == Verdict::violated;
  const Interval a({0.2}, {0.9}), b({0.1}, {0.6});
  const double grid[3] = {0.25, 0.5, 0.75};
  double worst = 0.0;
  Json rows = Json::array();
  for (double alpha : grid) {
    for (double beta : grid) {
      const auto rep = test_conditional_nqd(SwapScheme{}, 2, 2, 2, a, b, alpha, beta, opts, RngStream(0));
      worst = std::max(worst, std::fabs(rep.lhs - rep.rhs));
      ok = ok && rep.verdict == Verdict::holds;
      rows.push_back(to_json(rep));
    }
  }
  ok = ok && worst <= 1e-12;
  r.passed = ok;
  r.detail = detail::fmt("pairwise %.17g vs %.17g; max |cond - product| over 3x3 = %.3g", pair.nlod.lhs,
                         pair.nlod.rhs, worst);
  r.data = {{"pairwise_hit", to_json(pair.nlod)}, {"conditional", rows}};
  return r;
}

inline CriterionResult criterion4() {
  CriterionResult r = detail::named(4, "rsj small-N lower bound and crossover");
  const std::size_t n = 5;
  std::vector<bool> cells(n * n, false);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) cells[i * n + j] = true;
  }
  const double p = rsj_small_prob(n, cells, 3);
  const std::size_t crossover = rsj_crossover_prime();
  bool monotone = crossover != 0;
  for (std::size_t m = crossover; monotone && m < crossover + 2000; ++m) {
    const long double mm = static_cast<long double>(m);
    monotone = 6.0L * mm * mm * mm * mm > 729.0L * (mm - 1) * (mm - 1) * (mm - 2);
  }
  r.passed = p >= 6.0 / 1200.0 && crossover == 127 && monotone;
  r.detail = detail::fmt("P(3 points in [0,3/5)^2) = %.17g >= 0.005; crossover prime N = %.0f", p,
                         static_cast<double>(crossover));
  r.data = {{"prob", p}, {"lower", 6.0 / 1200.0}, {"crossover_prime", crossover}, {"holds_beyond", monotone}};
  return r;
}

inline CriterionResult criterion5(const Options& o) {
  CriterionResult r = detail::named(5, "lhs exact oracle vs simulation");
  struct Config {
    std::size_t n, d, t;
  };
  const Config configs[] = {{4, 2, 2}, {6, 2, 3}, {8, 3, 4}};
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  const std::size_t reps = 100000;
  std::size_t cells = 0, inside = 0;
  bool nd_ok = true;
  Json rows = Json::array();
  const RngStream root(o.seed);
  for (std::size_t ci = 0; ci < 3; ++ci) {
    const auto [n, d, t] = configs[ci];
    std::size_t ncells = 1;
    for (std::size_t k = 0; k < d; ++k) ncells *= grid.size();
    const RngStream stream = root.split(5).split(ci);
    // For each replication the per-axis max of the first t points decides
    // every grid cell at once.
    using Tally = std::vector<std::size_t>;
    const Tally counts = parallel_reduce(
        reps, o.threads, Tally(ncells, 0),
        [&](std::size_t rep, Tally& acc) {
          RngStream s = stream.split(rep);
          const PointSet p = sample_lhs(n, d, s);
          std::vector<double> mx(d, 0.0);
          for (std::size_t j = 0; j < t; ++j) {
            for (std::size_t k = 0; k < d; ++k) mx[k] = std::max(mx[k], p.at(j, k));
          }
          for (std::size_t c = 0; c < ncells; ++c) {
            std::size_t rest = c;
            bool in = true;
            for (std::size_t k = 0; k < d; ++k) {
              in = in && mx[k] < grid[rest % grid.size()];
              rest /= grid.size();
            }
            acc[c] += in ? 1 : 0;
          }
        },
        [](Tally& acc, const Tally& part) {
          for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += part[k];
        });
    for (std::size_t c = 0; c < ncells; ++c) {
      std::vector<double> q(d);
      std::size_t rest = c;
      for (std::size_t k = 0; k < d; ++k) {
        q[k] = grid[rest % grid.size()];
        rest /= grid.size();
      }
      const double exact = lhs_anchored_prob_exact(n, q, t);
      const double bound = std::pow(ndqmc::detail::product(q), static_cast<double>(t));
      const auto ci_w = stats::wilson(counts[c], reps, 0.999);
      const bool in = ci_w.contains(exact);
      nd_ok = nd_ok && exact <= bound + kExactTolerance;
      ++cells;
      inside += in ? 1 : 0;
      rows.push_back({{"n", n}, {"d", d}, {"t", t}, {"q", q}, {"exact", exact}, {"bound", bound},
                      {"empirical", static_cast<double>(counts[c]) / reps}, {"inside", in}});
    }
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(cells);
  r.passed = frac >= 0.99 && nd_ok;
  r.detail = detail::fmt("%.0f/%.0f cells inside the 99.9%% Wilson interval; ND inequality ", static_cast<double>(inside), static_cast<double>(cells)) +
             (nd_ok ? "holds" : "FAILS");
  r.data = {{"cells", rows}, {"inside_fraction", frac}};
  return r;
}

inline CriterionResult criterion6(const Options& o) {
  CriterionResult r = detail::named(6, "c0 bound at desk scale");
  const std::size_t n = 256, d = 2, reps = 500;
  const double bound = c0_bound_theta({n, d, 0.0, 0.9, 1.0}).bound_value;
  const RngStream root = RngStream(o.seed).split(6);
  Json rows = Json::array();
  bool ok = true;
  std::string summary;
  const SchemeSpec schemes[] = {LatinHypercube{}, MonteCarlo{}};
  for (std::size_t si = 0; si < 2; ++si) {
    std::vector<double> disc(reps);
    const RngStream stream = root.split(si);
    parallel_for(reps, o.threads, [&](std::size_t rep) {
      RngStream s = stream.split(rep);
      disc[rep] = star_discrepancy_exact(sample(schemes[si], n, d, s)).value;
    });
    std::size_t below = 0;
    for (double v : disc) below += v <= bound ? 1 : 0;
    const double frac = static_cast<double>(below) / reps;
    std::vector<double> sorted = disc;
    std::sort(sorted.begin(), sorted.end());
    ok = ok && frac >= 0.9;
    rows.push_back({{"scheme", scheme_name(schemes[si])}, {"fraction_below", frac},
                    {"max", sorted.back()}, {"p95", sorted[reps * 95 / 100]}});
    summary += scheme_name(schemes[si]) + detail::fmt(" %.3f below; ", frac);
  }
  r.passed = ok;
  r.detail = summary + detail::fmt("bound %.4f", bound);
  r.data = {{"bound", bound}, {"schemes", rows}};
  return r;
}

inline CriterionResult criterion7(const Options& o) {
  CriterionResult r = detail::named(7, "hoeffding tail for monte carlo");
  const std::size_t n = 100, reps = 100000;
  const double vol = 0.3;
  const double ts[3] = {5, 10, 15};
  const RngStream root = RngStream(o.seed).split(7);
  using Tally = std::array<std::size_t, 3>;
  const Tally counts = parallel_reduce(
      reps, o.threads, Tally{0, 0, 0},
      [&](std::size_t rep, Tally& acc) {
        RngStream s = root.split(rep);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += s.uniform() < vol ? 1 : 0;
        const double dev = std::fabs(static_cast<double>(hits) - vol * n);
        for (int k = 0; k < 3; ++k) acc[k] += dev >= ts[k] - 1e-9 ? 1 : 0;
      },
      [](Tally& acc, const Tally& part) {
        for (int k = 0; k < 3; ++k) acc[k] += part[k];
      });
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (int k = 0; k < 3; ++k) {
    const double p = static_cast<double>(counts[k]) / reps;
    const double bound = hoeffding_tail(n, ts[k], 1.0);
    const double pb = std::min(bound, 1.0);
    const double slack = 3.0 * std::sqrt(pb * (1.0 - pb) / reps);
    ok = ok && p <= bound + slack;
    rows.push_back({{"t", ts[k]}, {"empirical", p}, {"bound", bound}});
    summary += detail::fmt("t=%.0f: %.5f <= %.5f; ", ts[k], p, bound);
  }
  r.passed = ok;
  r.detail = summary.substr(0, summary.size() - 2);
  r.data = {{"rows", rows}};
  return r;
}

inline CriterionResult criterion8(const Options& o) {
  CriterionResult r = detail::named(8, "variance reduction vs monte carlo");
  struct Cell {
    SchemeSpec spec;
    std::size_t n, d;
  };
  const Cell cells[] = {{LatinHypercube{}, 64, 3}, {RsjRank1Lattice{}, 5, 2}};
  const RngStream root = RngStream(o.seed).split(8);
  bool ok = true;
  Json rows = Json::array();
  std::string summary;
  for (std::size_t ci = 0; ci < 2; ++ci) {
    const auto& c = cells[ci];
    const TestFunction funcs[] = {product_coords(), corner_indicator(Coords(c.d, 0.4))};
    for (std::size_t fi = 0; fi < 2; ++fi) {
      const auto study = variance_study(c.spec, funcs[fi], c.n, c.d, 10000, root.split(ci).split(fi), o.threads);
      const bool pass = study.ratio <= 1.0 + 3.0 * study.ratio_stderr;
      ok = ok && pass;
      rows.push_back(to_json(study));
      summary += study.scheme + "/" + study.function + detail::fmt(" %.3f; ", study.ratio);
    }
  }
  r.passed = ok;
  r.detail = "variance ratios " + summary.substr(0, summary.size() - 2);
  r.data = {{"studies", rows}};
  return r;
}

inline CriterionResult criterion9() {
  CriterionResult r = detail::named(9, "concatenation of lhs factors");
  const std::size_t n = 6, dl = 2, dr = 2;
  const SchemeSpec mixed = make_mixed(LatinHypercube{}, dl, LatinHypercube{}, dr);
  const std::vector<double> grid{0.2, 0.45, 0.8};
  double worst_product = 0.0;
  bool nd_ok = true;
  std::size_t checked = 0;
  for (double a0 : grid) for (double a1 : grid) for (double b0 : grid) for (double b1 : grid) {
    const Coords qa{a0, a1}, qb{b0, b1};
    const CornerBox0 box({a0, a1, b0, b1});
    for (std::size_t t = 1; t <= 4; ++t) {
      const double joint = *exact_upper_prob(mixed, n, dl + dr, box, t);
      const double factors = lhs_anchored_prob_exact(n, qa, t) * lhs_anchored_prob_exact(n, qb, t);
      worst_product = std::max(worst_product, std::fabs(joint - factors));
      nd_ok = nd_ok && joint <= std::pow(volume(box), static_cast<double>(t)) + kExactTolerance;
      ++checked;
    }
  }
  r.passed = worst_product <= 1e-12 && nd_ok;
  r.detail = detail::fmt("%.0f boxes x t; max |joint - product of factors| = %.3g; ND ",
                         static_cast<double>(checked), worst_product) +
             (nd_ok ? "holds" : "FAILS");
  r.data = {{"checked", checked}, {"max_product_error", worst_product}, {"nd_holds", nd_ok}};
  return r;
}

inline CriterionResult criterion10(const Options& o) {
  CriterionResult r = detail::named(10, "discrepancy engine self-consistency");
  bool grid_ok = true;
  double worst_grid = 0.0;
  for (std::size_t n : {2, 4, 8, 16}) {
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = (2.0 * i + 1.0) / (2.0 * n);
    const double v = star_discrepancy_exact(PointSet(n, 1, data)).value;
    worst_grid = std::max(worst_grid, std::fabs(v - 1.0 / (2.0 * n)));
  }
  grid_ok = worst_grid <= 1e-15;

  RngStream rng = RngStream(o.seed).split(10);
  bool sandwich_ok = true;
  std::size_t sets = 0;
  for (double delta : {0.1, 0.05}) {
    for (int k = 0; k < 50; ++k) {
      const std::size_t n = 1 + rng.below(32), d = 1 + rng.below(2);
      const PointSet p = sample_monte_carlo(n, d, rng);
      const double exact = star_discrepancy_exact(p).value;
      const auto cover = star_discrepancy_cover(p, delta);
      sandwich_ok = sandwich_ok && cover.lower <= exact + 1e-15 && exact <= cover.upper + 1e-15;
      ++sets;
    }
  }

  bool card_ok = true;
  for (double delta : {1.0, 0.5, 0.3, 0.25, 0.1, 0.07, 0.05, 0.01}) {
    card_ok = card_ok && build_delta_cover(1, delta).size() == static_cast<std::size_t>(std::ceil(1.0 / delta));
  }
  r.passed = grid_ok && sandwich_ok && card_ok;
  r.detail = detail::fmt("centered grid max error %.3g; sandwich on %.0f sets ", worst_grid,
                         static_cast<double>(sets)) +
             (sandwich_ok ? "ok" : "FAILS") + "; d=1 cover size " + (card_ok ? "ok" : "FAILS");
  r.data = {{"grid_error", worst_grid}, {"sandwich_ok", sandwich_ok}, {"cover_card_ok", card_ok}};
  return r;
}

inline CriterionResult criterion11(const Options& o) {
  CriterionResult r = detail::named(11, "scrambled net property and pairwise ND");
  const RngStream root = RngStream(o.seed).split(11);
  bool nets_ok = true;
  Json nets = Json::array();
  const unsigned params[3][3] = {{2, 3, 1}, {3, 2, 2}, {5, 2, 3}};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto [b, m, s] = std::array<unsigned, 3>{params[k][0], params[k][1], params[k][2]};
    RngStream rng = root.split(k);
    const PointSet net = faure_net(b, m, s);
    const bool plain = is_net(net, b, m, s, 0);
    const bool scrambled = is_net(owen_scramble(net, b, m, rng), b, m, s, 0);
    nets_ok = nets_ok && plain && scrambled;
    nets.push_back({{"b", b}, {"m", m}, {"s", s}, {"net", plain}, {"scrambled_net", scrambled}});
  }
  const std::vector<CornerBox1> corners{CornerBox1({0.2, 0.6}), CornerBox1({0.6, 0.2}), CornerBox1({0.4, 0.4}),
                                        CornerBox1({0.7, 0.8})};
  TestOptions opts;
  opts.replications = 100000;
  opts.method = Method::empirical;
  opts.threads = o.threads;
  const auto sweep = pairwise_sweep(ScrambledNet{3, 2, 2}, 9, 2, corners, opts, root.split(100));
  std::size_t violated = 0, holds = 0;
  Json rows = Json::array();
  for (const auto& cell : sweep) {
    for (const auto* rep : {&cell.report.nlod, &cell.report.nuod}) {
      violated += rep->verdict == Verdict::violated ? 1 : 0;
      holds += rep->verdict == Verdict::holds ? 1 : 0;
      rows.push_back(to_json(*rep));
    }
  }
  r.passed = nets_ok && violated == 0;
  r.detail = std::string("nets ") + (nets_ok ? "ok" : "FAIL") +
             detail::fmt("; pairwise sweep: %.0f violated, %.0f holds of %.0f", static_cast<double>(violated),
                         static_cast<double>(holds), static_cast<double>(rows.size()));
  r.data = {{"nets", nets}, {"pairwise", rows}};
  return r;
}

inline CriterionResult criterion12(const Options& o) {
  CriterionResult r = detail::named(12, "maximum of e_t on the simplex");
  const RngStream root = RngStream(o.seed).split(12);
  bool ok = true;
  std::size_t combos = 0;
  double worst_ratio = 0.0;
  Json rows = Json::array();
  for (std::size_t nvars = 1; nvars <= 8; ++nvars) {
    for (std::size_t t = 1; t <= nvars; ++t) {
      for (double xi : {0.5, 1.0, 2.0}) {
        RngStream rng = root.split(combos++);
        const auto res = maxlemma_check(nvars, t, xi, 100000, rng);
        ok = ok && res.passes;
        if (res.centroid_value > 0) worst_ratio = std::max(worst_ratio, res.max_found / res.centroid_value);
        rows.push_back({{"nvars", nvars}, {"t", t}, {"xi", xi}, {"centroid", res.centroid_value},
                        {"max_found", res.max_found}, {"passes", res.passes}});
      }
    }
  }
  r.passed = ok;
  r.detail = detail::fmt("%.0f combinations; max sample / centroid = %.6f", static_cast<double>(combos), worst_ratio);
  r.data = {{"rows", rows}};
  return r;
}

/// Runs one criterion (1..12) and times it.
inline CriterionResult run_criterion(int id, const Options& o = {}) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = criterion1(); break;
      case 2: r = criterion2(); break;
      case 3: r = criterion3(); break;
      case 4: r = criterion4(); break;
      case 5: r = criterion5(o); break;
      case 6: r = criterion6(o); break;
      case 7: r = criterion7(o); break;
      case 8: r = criterion8(o); break;
      case 9: r = criterion9(); break;
      case 10: r = criterion10(o); break;
      case 11: r = criterion11(o); break;
      case 12: r = criterion12(o); break;
      default: throw ValidationError("acceptance: no criterion " + std::to_string(id));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const Options& o = {},
                                                   const std::function<void(const CriterionResult&)>& on_done = {}) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 12; ++id) {
    out.push_back(run_criterion(id, o));
    if (on_done) on_done(out.back());
  }
  return out;
}

inline Json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
          {"seconds", r.seconds}, {"data", r.data}};
}

inline std::string summary_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] criterion %2d (%.2fs): ", r.passed ? "PASS" : "FAIL", r.id, r.seconds);
  return head + r.name + " -- " + r.detail;
}

}  // namespace ndqmc::acceptance
