#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "renyi/analysis.hpp"
#include "renyi/errors.hpp"
#include "renyi/parallel.hpp"
#include "renyi/thermo.hpp"

namespace renyi::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::size_t kDensitySamples = 512;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  return fmt("%.12g", v);
}

void dump_rec(const Json& j, std::string& s, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        s += "null";
      } else if (v == 0.0) {
        s += "0";  // "-0" would come back as an integer
      } else {
        s += fmt("%.17g", v);
      }
      break;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        s += "[]";
        break;
      }
      // short numeric arrays (pairs, samples) stay on one line
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      s += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) s += flat ? ", " : ",";
        first = false;
        if (!flat) s += "\n" + pad;
        dump_rec(e, s, depth + 1);
      }
      if (!flat) s += "\n" + close;
      s += ']';
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        s += "{}";
        break;
      }
      s += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) s += ',';
        first = false;
        s += "\n" + pad + Json(it.key()).dump() + ": ";
        dump_rec(it.value(), s, depth + 1);
      }
      s += "\n" + close + '}';
      break;
    }
    default:
      s += j.dump();
  }
}

ProblemSpec make_spec(const RunConfig& cfg) {
  if (!cfg.alpha) throw UsageError("--alpha is required");
  if (!cfg.m) throw UsageError("--m is required");
  return ProblemSpec(cfg.kind, *cfg.alpha, *cfg.m, parse_ref_spec(cfg.ref_spec));
}

TsallisSolution solve_cfg(const ProblemSpec& spec, const RunConfig& cfg) {
  if (cfg.gamma_range) return solve(spec, cfg.gamma_range->first, cfg.gamma_range->second, cfg.grid_n);
  const auto [lo, hi] = default_gamma_range(spec.ref());
  return solve(spec, lo, hi, cfg.grid_n);
}

Json interval_json(const IntervalSet& s) {
  Json arr = Json::array();
  for (const auto& iv : s.intervals()) arr.push_back(Json::array({iv.lo, iv.hi}));
  return arr;
}

void emit_csv_header(std::ostream& out, const Json& meta) {
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    out << "# " << it.key() << '=';
    if (it.value().is_number_float()) {
      out << csv_num(it.value().get<double>());
    } else if (it.value().is_string()) {
      out << it.value().get<std::string>();
    } else if (it.value().is_array()) {
      // interval lists: lo:hi separated by ';'
      std::string sep;
      for (const auto& iv : it.value()) {
        out << sep << csv_num(iv[0].get<double>()) << ':' << csv_num(iv[1].get<double>());
        sep = ";";
      }
    } else {
      out << it.value().dump();
    }
    out << '\n';
  }
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw UsageError(what + ": '" + text + "' is not a number");
  return v;
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string s;
  dump_rec(j, s, 0);
  s += '\n';
  return s;
}

std::vector<TabulatedRow> parse_tabulated(std::istream& in) {
  std::vector<TabulatedRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos)
      throw InvalidParameter("tabulated", "line " + std::to_string(lineno) + ": expected x<TAB>q");
    const std::string where = "tabulated line " + std::to_string(lineno);
    try {
      rows.push_back({parse_number(trim(t.substr(0, tab)), where), parse_number(trim(t.substr(tab + 1)), where)});
    } catch (const UsageError& e) {
      throw InvalidParameter("tabulated", e.what());
    }
  }
  return rows;
}

ReferenceDistribution parse_ref_spec(const std::string& spec) {
  if (spec.empty()) throw UsageError("--ref is empty");
  if (spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw UsageError("cannot open tabulated file '" + spec.substr(1) + "'");
    const auto rows = parse_tabulated(in);
    return load_tabulated(rows);
  }
  const auto colon = spec.find(':');
  const Family family = parse_family(spec.substr(0, colon));
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) params.push_back(parse_number(trim(item), "--ref parameter"));
  }
  return make_builtin(family, params);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = make_spec(cfg);
  const TsallisSolution sol = solve_cfg(spec, cfg);

  const double lo = sol.domain.lower();
  const double hi = sol.domain.upper();
  Json samples = Json::array();
  for (std::size_t i = 0; i < kDensitySamples; ++i) {
    const double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(kDensitySamples);
    samples.push_back(Json::array({x, sol.density(x)}));
  }

  Json rec;
  rec["command"] = "solve";
  rec["reference"] = spec.ref().label();
  rec["alpha"] = spec.alpha();
  rec["xi"] = spec.xi();
  rec["kind"] = to_string(spec.kind());
  rec["m"] = spec.m();
  rec["route"] = to_string(sol.route);
  rec["gamma_star"] = sol.gamma_star;
  rec["lambda"] = lambda_of_solution(sol);
  rec["Z_solution"] = sol.Z_solution;
  rec["Z_dual"] = sol.Z_dual;
  rec["divergence"] = sol.divergence;
  rec["achieved_mean"] = sol.achieved_mean;
  rec["interior"] = sol.interior;
  rec["domain"] = interval_json(sol.domain);

  if (cfg.format == "csv") {
    emit_csv_header(out, rec);
    out << "x,density\n";
    for (const auto& s : samples) out << csv_num(s[0].get<double>()) << ',' << csv_num(s[1].get<double>()) << '\n';
  } else {
    rec["density_samples"] = std::move(samples);
    out << dump_json(rec);
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.gamma_range) throw UsageError("sweep needs --gamma-lo and --gamma-hi");
  const ProblemSpec spec = make_spec(cfg);
  const auto [lo, hi] = *cfg.gamma_range;
  const DualScan scan = scan_dual(spec, lo, hi, cfg.grid_n);

  std::vector<SweepRow> rows(scan.gammas.size());
  const std::size_t chunks = std::min<std::size_t>(rows.size(), 64);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    const std::size_t a = rows.size() * c / chunks, b = rows.size() * (c + 1) / chunks;
    const auto part = sweep_dual(spec, std::span<const double>(scan.gammas).subspan(a, b - a));
    std::copy(part.begin(), part.end(), rows.begin() + static_cast<std::ptrdiff_t>(a));
  });
  const auto pairs = non_injective_pairs(spec, rows);

  Json meta;
  meta["command"] = "sweep";
  meta["reference"] = spec.ref().label();
  meta["alpha"] = spec.alpha();
  meta["xi"] = spec.xi();
  meta["kind"] = to_string(spec.kind());
  meta["m"] = spec.m();
  Json maxima = Json::array();
  for (const auto& mx : scan.maxima)
    maxima.push_back({{"gamma", mx.gamma}, {"value", mx.value}, {"interior", mx.interior}});
  Json pair_json = Json::array();
  for (const auto& [i, j] : pairs) pair_json.push_back(Json::array({rows[i].gamma, rows[j].gamma}));

  if (cfg.format == "csv") {
    emit_csv_header(out, meta);
    for (const auto& iv : scan.intervals.intervals())
      out << "# interval=" << csv_num(iv.lo) << ',' << csv_num(iv.hi) << '\n';
    for (const auto& mx : scan.maxima)
      out << "# maximum=" << csv_num(mx.gamma) << ',' << csv_num(mx.value) << ',' << (mx.interior ? 1 : 0) << '\n';
    out << "# selected=" << scan.selected << '\n';
    out << "# non_injective=" << pairs.size() << '\n';
    for (const auto& [i, j] : pairs) out << "# pair=" << csv_num(rows[i].gamma) << ',' << csv_num(rows[j].gamma) << '\n';
    out << "gamma,dual,z,mean_classical,mean_generalized,defined\n";
    for (const auto& r : rows)
      out << csv_num(r.gamma) << ',' << csv_num(r.dual) << ',' << csv_num(r.z) << ',' << csv_num(r.mean_classical)
          << ',' << csv_num(r.mean_generalized) << ',' << (r.defined ? 1 : 0) << '\n';
    return 0;
  }
  Json rec = meta;
  Json table = Json::array();
  for (const auto& r : rows)
    table.push_back(Json::array({r.gamma, r.dual, r.z, r.mean_classical, r.mean_generalized, r.defined}));
  rec["columns"] = Json::array({"gamma", "dual", "z", "mean_classical", "mean_generalized", "defined"});
  rec["rows"] = std::move(table);
  rec["intervals"] = interval_json(scan.intervals);
  rec["maxima"] = std::move(maxima);
  rec["selected"] = scan.selected;
  rec["non_injective"] = !pairs.empty();
  rec["non_injective_pairs"] = std::move(pair_json);
  out << dump_json(rec);
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names = cfg.suites.empty() ? suite_names() : cfg.suites;
  for (const auto& n : names)
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
      throw UsageError("unknown suite '" + n + "'");
  std::vector<SuiteResult> results;
  for (const auto& n : names) results.push_back(run_suite(n, cfg));

  std::string first_failure;
  for (const auto& r : results)
    if (!r.passed && first_failure.empty()) first_failure = r.name;

  if (cfg.format == "csv") {
    out << "suite,passed,residual,tolerance,cases,detail\n";
    for (const auto& r : results)
      out << r.name << ',' << (r.passed ? 1 : 0) << ',' << csv_num(r.residual) << ',' << csv_num(r.tolerance) << ','
          << r.cases << ",\"" << r.detail << "\"\n";
  } else {
    Json rec;
    rec["command"] = "verify";
    Json arr = Json::array();
    for (const auto& r : results)
      arr.push_back({{"suite", r.name},
                     {"passed", r.passed},
                     {"residual", r.residual},
                     {"tolerance", r.tolerance},
                     {"cases", r.cases},
                     {"detail", r.detail}});
    rec["suites"] = std::move(arr);
    rec["passed"] = first_failure.empty();
    out << dump_json(rec);
  }
  if (!first_failure.empty()) {
    err << "verify: suite '" << first_failure << "' failed\n";
    return 2;
  }
  return 0;
}

int cmd_duality(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.alpha) throw UsageError("--alpha is required");
  if (!cfg.m) throw UsageError("--m is required");
  const double a1 = *cfg.alpha;
  if (!(a1 > 0.0) || a1 == 1.0) throw InvalidParameter("alpha", "must be > 0 and != 1");
  const auto ref = parse_ref_spec(cfg.ref_spec);
  const ProblemSpec spec_c(Kind::C, a1, *cfg.m, ref);
  const ProblemSpec spec_g(Kind::G, 1.0 / a1, *cfg.m, ref);
  const auto sol_c = solve_cfg(spec_c, cfg);
  const auto sol_g = solve_cfg(spec_g, cfg);
  const DualityReport rep = check_duality(sol_c, sol_g);

  Json rec;
  rec["command"] = "duality";
  rec["reference"] = ref.label();
  rec["alpha1"] = a1;
  rec["alpha2"] = 1.0 / a1;
  rec["m"] = *cfg.m;
  rec["gamma_star_C"] = sol_c.gamma_star;
  rec["gamma_star_G"] = sol_g.gamma_star;
  rec["divergence_C"] = sol_c.divergence;
  rec["divergence_G"] = sol_g.divergence;
  rec["gamma_gap"] = rep.gamma_gap;
  rec["escort_gap_g"] = rep.escort_gap_g;
  rec["escort_gap_c"] = rep.escort_gap_c;
  rec["divergence_gap"] = rep.divergence_gap;
  rec["solution_divergence_gap"] = rep.solution_divergence_gap;
  rec["max_entry"] = rep.max_entry();
  if (cfg.format == "csv") {
    emit_csv_header(out, rec);
  } else {
    out << dump_json(rec);
  }
  return 0;
}

int cmd_thermo(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = make_spec(cfg);
  const auto ms = legendre_family(spec.ref(), spec.m(), cfg.count);
  LegendreOptions opts;
  opts.threads = cfg.threads;
  if (cfg.gamma_range) {
    opts.gamma_lo = cfg.gamma_range->first;
    opts.gamma_hi = cfg.gamma_range->second;
  }
  const ThermoReport rep = legendre_check(spec, ms, opts);

  Json meta;
  meta["command"] = "thermo";
  meta["reference"] = spec.ref().label();
  meta["alpha"] = spec.alpha();
  meta["kind"] = to_string(spec.kind());
  meta["centre"] = spec.m();
  meta["residual_euler"] = rep.residual_euler;
  meta["residual_dS_dxbar"] = rep.residual_dSdx;
  meta["residual_dphi_dlambda"] = rep.residual_dphidlam;
  meta["residual_dphi_dxbar"] = rep.residual_dphidx;
  meta["conjugacy_gap"] = rep.conjugacy_gap;
  meta["tolerance"] = rep.tolerance;
  meta["passed"] = rep.passed;
  meta["note"] = rep.note;
  if (cfg.format == "csv") {
    emit_csv_header(out, meta);
    out << "m,lambda,xbar,entropy,massieu,interior\n";
    for (std::size_t i = 0; i < rep.ms.size(); ++i)
      out << csv_num(rep.ms[i]) << ',' << csv_num(rep.lambdas[i]) << ',' << csv_num(rep.xbars[i]) << ','
          << csv_num(rep.entropies[i]) << ',' << csv_num(rep.massieu[i]) << ',' << (rep.interior[i] ? 1 : 0) << '\n';
    return 0;
  }
  Json rec = meta;
  Json table = Json::array();
  for (std::size_t i = 0; i < rep.ms.size(); ++i)
    table.push_back({{"m", rep.ms[i]},
                     {"lambda", rep.lambdas[i]},
                     {"xbar", rep.xbars[i]},
                     {"entropy", rep.entropies[i]},
                     {"massieu", rep.massieu[i]},
                     {"interior", static_cast<bool>(rep.interior[i])}});
  rec["family"] = std::move(table);
  out << dump_json(rec);
  return 0;
}

int cmd_divergence(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.alpha) throw UsageError("--alpha is required");
  if (cfg.ref2_spec.empty()) throw UsageError("divergence needs --ref2 (the reference Q)");
  const double alpha = *cfg.alpha;
  const auto p = parse_ref_spec(cfg.ref_spec);
  const auto q = parse_ref_spec(cfg.ref2_spec);
  const DensityPair pair = make_density_pair(p.density(), q.density());
  Json rec;
  rec["command"] = "divergence";
  rec["p"] = p.label();
  rec["q"] = q.label();
  rec["alpha"] = alpha;
  rec["renyi"] = renyi_divergence(pair, alpha);
  rec["tsallis"] = tsallis_divergence(pair, alpha);
  try {
    rec["kl"] = kl_divergence(pair);
  } catch (const PreconditionViolation&) {
    rec["kl"] = std::numeric_limits<double>::infinity();
  }
  if (cfg.format == "csv") {
    emit_csv_header(out, rec);
  } else {
    out << dump_json(rec);
  }
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rényi divergence minimization under mean constraints"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.threads = default_thread_count();

  std::string kind = "C", format = "json", output;
  double alpha = 0.0, m = 0.0, glo = 0.0, ghi = 0.0;
  std::size_t threads = 0;
  std::string suite_list;

  struct Sub {
    Command cmd;
    CLI::App* app;
  };
  std::vector<Sub> subs;
  auto add = [&](Command c, const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--ref", cfg.ref_spec, "reference: family:params or @file");
    s->add_option("--alpha", alpha, "entropic index");
    s->add_option("--m", m, "constrained mean");
    s->add_option("--kind", kind, "C or G");
    s->add_option("--gamma-lo", glo, "lower end of the gamma range");
    s->add_option("--gamma-hi", ghi, "upper end of the gamma range");
    s->add_option("--grid-n", cfg.grid_n, "gamma grid size");
    s->add_option("--format", format, "json or csv");
    s->add_option("-o,--output", output, "write to this file instead of stdout");
    s->add_option("--threads", threads, "worker threads (default RENYI_MAXENT_THREADS or all cores)");
    s->add_option("--seed", cfg.seed, "seed for randomized suites");
    subs.push_back({c, s});
    return s;
  };
  add(Command::solve, "solve", "solve one problem");
  add(Command::sweep, "sweep", "tabulate the alternate dual over a gamma grid");
  add(Command::verify, "verify", "run verification suites")
      ->add_option("--suite", suite_list, "comma separated subset of suites");
  add(Command::duality, "duality", "check the alpha <-> 1/alpha correspondence");
  add(Command::thermo, "thermo", "Legendre structure of a family of solutions")
      ->add_option("--count", cfg.count, "family size");
  add(Command::divergence, "divergence", "divergences between --ref (P) and --ref2 (Q)")
      ->add_option("--ref2", cfg.ref2_spec, "second density");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }
  try {
    CLI::App* chosen = nullptr;
    for (const auto& s : subs)
      if (s.app->parsed()) {
        cfg.command = s.cmd;
        chosen = s.app;
      }
    if (chosen->count("--alpha")) {
      if (!std::isfinite(alpha) || !(alpha > 0.0)) throw InvalidParameter("alpha", "must be > 0");
      if (alpha == 1.0) throw InvalidParameter("alpha", "alpha = 1 is excluded");
      cfg.alpha = alpha;
    }
    if (chosen->count("--m")) {
      if (!std::isfinite(m)) throw InvalidParameter("m", "must be finite");
      cfg.m = m;
    }
    cfg.kind = parse_kind(kind);
    if (chosen->count("--gamma-lo") != chosen->count("--gamma-hi"))
      throw UsageError("--gamma-lo and --gamma-hi go together");
    if (chosen->count("--gamma-lo")) {
      if (!std::isfinite(glo) || !std::isfinite(ghi) || !(glo < ghi))
        throw InvalidParameter("gamma_range", "needs finite gamma-lo < gamma-hi");
      cfg.gamma_range = std::make_pair(glo, ghi);
    }
    if (cfg.grid_n < 64) throw InvalidParameter("grid_n", "must be at least 64");
    if (format != "json" && format != "csv") throw InvalidParameter("format", "expected json or csv");
    cfg.format = format;
    if (chosen->count("--threads")) {
      if (threads == 0) throw InvalidParameter("threads", "must be positive");
      cfg.threads = threads;
    }
    if (cfg.count < 5) throw InvalidParameter("count", "family needs at least 5 members");
    if (!suite_list.empty()) {
      std::stringstream ss(suite_list);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!trim(item).empty()) cfg.suites.push_back(trim(item));
    }
    if (!output.empty()) cfg.output_path = output;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  std::ostringstream buffer;
  int status = 0;
  try {
    switch (cfg.command) {
      case Command::solve: status = cmd_solve(cfg, buffer); break;
      case Command::sweep: status = cmd_sweep(cfg, buffer); break;
      case Command::verify: status = cmd_verify(cfg, buffer, err); break;
      case Command::duality: status = cmd_duality(cfg, buffer); break;
      case Command::thermo: status = cmd_thermo(cfg, buffer); break;
      case Command::divergence: status = cmd_divergence(cfg, buffer); break;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const ConstraintUnattainable& e) {
    err << "error: " << e.what() << " (closest mean " << fmt("%.17g", e.closest_mean()) << ")\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  if (cfg.output_path) {
    std::ofstream f(*cfg.output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << *cfg.output_path << "'\n";
      return 2;
    }
    f << buffer.str();
  } else {
    out << buffer.str();
  }
  return status;
}

}  // namespace renyi::cli
