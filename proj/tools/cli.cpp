#include "cli.hpp"

#include <chrono>
#include <future>
#include <json.hpp>

#include <CLI11.hpp>

#include "hyperobs/design.hpp"
#include "hyperobs/global.hpp"
#include "hyperobs/io.hpp"
#include "hyperobs/local.hpp"
#include "hyperobs/structural.hpp"

namespace hyperobs::cli {

namespace {

using nlohmann::ordered_json;

struct CommonOpts {
  std::string file;
  std::vector<std::string> sigma_flags;
  uint64_t seed = 0;
  int r_cap = -1;
  uint64_t budget = 50'000;
  std::string format = "text";
  bool two_step = false;
  int jobs = 1;
  bool timing = false;
};

std::vector<Rat> parse_sigma(const std::string& flag, int n) {
  std::vector<Rat> sigma;
  std::string cur;
  for (char ch : flag + ",") {
    if (ch == ',') {
      if (!cur.empty()) sigma.push_back(rat_from_string(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (static_cast<int>(sigma.size()) != n)
    throw ParseError("--sigma needs " + std::to_string(n) + " comma-separated rationals");
  return sigma;
}

std::vector<std::vector<Rat>> gather_sigmas(const CommonOpts& opts, const SystemFile& file) {
  std::vector<std::vector<Rat>> sigmas;
  for (const auto& flag : opts.sigma_flags) sigmas.push_back(parse_sigma(flag, file.system.n));
  if (sigmas.empty() && file.sigma) sigmas.push_back(*file.sigma);
  return sigmas;
}

ChainOptions chain_options(const CommonOpts& opts) {
  ChainOptions c;
  if (opts.r_cap >= 0) c.r_cap = opts.r_cap;
  c.two_step_stabilization = opts.two_step;
  c.groebner.max_reductions = opts.budget;
  return c;
}

ordered_json rat_vector_json(const std::vector<Rat>& v) {
  ordered_json out = ordered_json::array();
  for (const auto& r : v) out.push_back(rat_to_string(r));
  return out;
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json out;
  out["status"] = to_string(v.status);
  out["criterion"] = v.criterion;
  out["witness"] = v.witness ? rat_vector_json(*v.witness) : ordered_json(nullptr);
  out["notes"] = v.notes;
  return out;
}

ordered_json chain_json(const IdealChain& chain) {
  ordered_json out;
  out["stabilization_index"] =
      chain.stabilization ? ordered_json(*chain.stabilization) : ordered_json(nullptr);
  out["levels_computed"] = chain.levels_computed();
  out["certified_at_level"] = chain.certified_at_level()
                                  ? ordered_json(*chain.certified_at_level())
                                  : ordered_json(nullptr);
  out["aborted"] = chain.aborted;
  out["note"] = chain.note;
  ordered_json levels = ordered_json::array();
  for (size_t r = 0; r < chain.layers.size(); ++r) {
    ordered_json level;
    level["level"] = r;
    ordered_json gens = ordered_json::array();
    for (const auto& g : chain.layers[r]) gens.push_back(g.to_string());
    level["new_generators"] = std::move(gens);
    levels.push_back(std::move(level));
  }
  out["levels"] = std::move(levels);
  out["generator_count"] = chain.generators().size();
  return out;
}

ordered_json report_skeleton(const std::string& command, const CommonOpts& opts) {
  ordered_json report;
  report["schema_version"] = 1;
  report["tool"] = "hyperobs";
  report["command"] = command;
  report["input"] = opts.file;
  report["seed"] = opts.seed;
  return report;
}

void emit(const ordered_json& report, const CommonOpts& opts,
          const std::function<void(std::ostream&)>& text_renderer, std::ostream& out) {
  if (opts.format == "json")
    out << report.dump(2) << "\n";
  else
    text_renderer(out);
}

int run_global(const CommonOpts& opts, std::ostream& out, std::ostream& err) {
  SystemFile file = parse_system_file(opts.file);
  auto sigmas = gather_sigmas(opts, file);
  if (sigmas.empty()) {
    err << "global: no sigma given (use --sigma or a \"sigma\" field in the file)\n";
    return 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  IdealChain chain = build_chain(file.system, chain_options(opts));

  SearchOptions search;
  search.seed = opts.seed;
  auto decide_at = [&](const std::vector<Rat>& sigma) -> Verdict {
    SubstitutedIdeals ideals = substitute_initial(chain, sigma);
    if (chain.stabilized()) return decide_global(ideals.J, ideals.ell, sigma, search);
    SearchOptions no_search = search;
    no_search.max_candidates = 0;
    Verdict partial = decide_global(ideals.J, ideals.ell, sigma, no_search);
    if (partial.status == ObsStatus::Observable) return partial;
    Verdict v;
    v.status = ObsStatus::Inconclusive;
    v.criterion = "chain incomplete";
    v.notes = chain.note;
    return v;
  };

  std::vector<Verdict> verdicts(sigmas.size());
  if (opts.jobs > 1 && sigmas.size() > 1) {
    std::vector<std::future<Verdict>> futures;
    for (const auto& sigma : sigmas)
      futures.push_back(std::async(std::launch::async, decide_at, sigma));
    for (size_t i = 0; i < futures.size(); ++i) verdicts[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < sigmas.size(); ++i) verdicts[i] = decide_at(sigmas[i]);
  }
  auto t1 = std::chrono::steady_clock::now();

  ordered_json report = report_skeleton("global", opts);
  report["chain"] = chain_json(chain);
  ordered_json analyses = ordered_json::array();
  for (size_t i = 0; i < sigmas.size(); ++i) {
    ordered_json a;
    a["sigma"] = rat_vector_json(sigmas[i]);
    a["verdict"] = verdict_json(verdicts[i]);
    if (verdicts[i].witness) {
      // corroborate numerically: outputs from sigma and from the witness
      // should agree along the flow (zero input)
      std::vector<double> x0, xw;
      for (const auto& r : sigmas[i]) x0.push_back(r.get_d());
      for (const auto& r : *verdicts[i].witness) xw.push_back(r.get_d());
      std::vector<double> u(file.system.num_inputs(), 0.0);
      SimulationResult sim_sigma = simulate_outputs(file.system, x0, u, 1.0, 1e-3);
      SimulationResult sim_witness = simulate_outputs(file.system, xw, u, 1.0, 1e-3);
      a["witness_max_output_gap"] = max_output_gap(sim_sigma, sim_witness);
    }
    analyses.push_back(std::move(a));
  }
  report["analyses"] = std::move(analyses);
  if (opts.timing)
    report["timing_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

  emit(report, opts, [&](std::ostream& os) {
    os << "chain: levels computed = " << chain.levels_computed();
    if (chain.stabilization)
      os << ", stabilized with N = " << *chain.stabilization;
    else
      os << ", not stabilized (" << chain.note << ")";
    os << "\n";
    for (size_t i = 0; i < sigmas.size(); ++i) {
      os << "sigma = (";
      for (size_t j = 0; j < sigmas[i].size(); ++j)
        os << (j ? ", " : "") << rat_to_string(sigmas[i][j]);
      os << "): " << to_string(verdicts[i].status) << " [" << verdicts[i].criterion << "]";
      if (verdicts[i].witness) {
        os << " witness = (";
        for (size_t j = 0; j < verdicts[i].witness->size(); ++j)
          os << (j ? ", " : "") << rat_to_string((*verdicts[i].witness)[j]);
        os << ")";
      }
      os << "\n";
    }
  }, out);

  bool failed = chain.aborted;
  for (const auto& v : verdicts)
    if (v.status == ObsStatus::Inconclusive &&
        (v.criterion == "resource budget exhausted" || v.criterion == "chain incomplete"))
      failed = true;
  return failed ? 1 : 0;
}

int run_chain(const CommonOpts& opts, std::ostream& out, std::ostream&) {
  SystemFile file = parse_system_file(opts.file);
  IdealChain chain = build_chain(file.system, chain_options(opts));
  ordered_json report = report_skeleton("chain", opts);
  report["chain"] = chain_json(chain);
  emit(report, opts, [&](std::ostream& os) {
    for (size_t r = 0; r < chain.layers.size(); ++r) {
      os << "J_" << r << " new generators:\n";
      if (chain.layers[r].empty()) os << "  (none)\n";
      for (const auto& g : chain.layers[r]) os << "  " << g.to_string() << "\n";
    }
    if (chain.stabilization)
      os << "stabilized: J_" << *chain.stabilization << " = J_" << *chain.stabilization + 1
         << "\n";
    else
      os << "not stabilized: " << chain.note << "\n";
  }, out);
  return chain.aborted ? 1 : 0;
}

int run_structural(const CommonOpts& opts, std::ostream& out, std::ostream&) {
  SystemFile file = parse_system_file(opts.file);
  StructuralHypergraph h = StructuralHypergraph::from_system(file.system);
  DiameterResult diam = observational_diameter(h);
  StructuralVerdict verdict = structural_observability_test(h);

  ordered_json report = report_skeleton("structural", opts);
  ordered_json s;
  s["diameter"] = diam.diameter ? ordered_json(*diam.diameter) : ordered_json(nullptr);
  ordered_json layers = ordered_json::array();
  for (const auto& layer : diam.layers) layers.push_back(std::vector<int>(layer.begin(), layer.end()));
  s["layers"] = std::move(layers);
  ordered_json distances = ordered_json::array();
  for (const auto& d : diam.distance)
    distances.push_back(d ? ordered_json(*d) : ordered_json(nullptr));
  s["backward_distances"] = std::move(distances);
  ordered_json autos = ordered_json::array();
  for (const auto& p : verdict.nontrivial_automorphisms) autos.push_back(p);
  s["nontrivial_automorphisms"] = std::move(autos);
  s["certified"] = verdict.certified;
  s["reason"] = verdict.reason;
  report["structural"] = std::move(s);

  emit(report, opts, [&](std::ostream& os) {
    if (diam.diameter)
      os << "observational diameter T = " << *diam.diameter << "\n";
    else
      os << "observational diameter T = infinity\n";
    os << (verdict.certified ? "StructurallyObservable\n"
                             : "NotCertified(" + verdict.reason + ")\n");
  }, out);
  return 0;
}

int run_local(const CommonOpts& opts, std::ostream& out, std::ostream&) {
  SystemFile file = parse_system_file(opts.file);
  const HypergraphSystem& sys = file.system;

  std::string kind;
  PolyMatrix matrix;
  if (sys.has_inputs() && sys.has_direct()) {
    kind = "direct-jacobian";  // no factored formula for the mixed case
    matrix = observability_jacobian_direct(sys);
  } else if (sys.has_inputs()) {
    kind = "O1";
    matrix = matrix_O1(sys);
  } else if (sys.has_direct()) {
    kind = "O2";
    matrix = matrix_O2(sys);
  } else {
    kind = "O";
    matrix = matrix_O(sys);
  }

  RankOptions rank_opts;
  rank_opts.seed = opts.seed;
  RankResult generic = generic_rank(matrix, rank_opts);

  ordered_json report = report_skeleton("local", opts);
  ordered_json l;
  l["matrix"] = kind;
  if (kind == "direct-jacobian")
    l["note"] = "system has both input and direct-transmission tensors; factored "
                "matrices are not defined for the mixed case";
  l["rows"] = matrix.row_count();
  l["cols"] = matrix.col_count();
  l["state_dimension"] = sys.n;
  l["generic_rank"] = generic.rank;
  l["rank_certified_full"] = generic.certified_full;
  ordered_json points = ordered_json::array();
  for (const auto& p : generic.evaluation_points) points.push_back(rat_vector_json(p));
  l["evaluation_points"] = std::move(points);

  auto sigmas = gather_sigmas(opts, file);
  if (!sigmas.empty()) {
    ordered_json at = ordered_json::array();
    for (const auto& sigma : sigmas) {
      std::vector<Rat> assignment(matrix.space->size(), Rat(0));
      for (int i = 0; i < sys.n; ++i) assignment[i] = sigma[i];
      ordered_json one;
      one["point"] = rat_vector_json(sigma);
      one["rank"] = rank_at_point(matrix, assignment);
      at.push_back(std::move(one));
    }
    l["rank_at_points"] = std::move(at);
  }
  if (sys.n <= 3) {
    ordered_json vanish;
    for (const auto& [var, exp] : minor_common_monomial_divisor(matrix)) vanish[var] = exp;
    l["minor_common_monomial_divisor"] = std::move(vanish);
  }
  report["local"] = std::move(l);

  emit(report, opts, [&](std::ostream& os) {
    os << "matrix " << kind << " (" << matrix.row_count() << "x" << matrix.col_count()
       << "), generic rank = " << generic.rank;
    os << (generic.rank == static_cast<size_t>(sys.n) ? " (full: locally observable generically)"
                                                      : " (rank-deficient)");
    os << "\n";
  }, out);
  return 0;
}

int run_design(const CommonOpts& opts, int d_max, int p, int r_relax, std::ostream& out,
               std::ostream& err) {
  SystemFile file = parse_system_file(opts.file);
  auto sigmas = gather_sigmas(opts, file);
  if (sigmas.empty()) {
    err << "design: a target sigma is required (use --sigma or the file's \"sigma\")\n";
    return 2;
  }

  DesignConfig cfg = file.design.value_or(DesignConfig{});
  if (d_max > 0) cfg.d_max = d_max;
  if (p > 0) cfg.p = p;
  if (r_relax > 0) cfg.r_relax = r_relax;
  cfg.chain = chain_options(opts);
  cfg.search.seed = opts.seed;

  HypergraphSystem dynamics = file.system;
  VarSpace::Ptr x = VarSpace::states(dynamics.n);
  std::vector<Polynomial> existing = lower_outputs(dynamics, x);
  dynamics.outputs.clear();
  dynamics.direct.clear();

  ordered_json report = report_skeleton("design", opts);
  ordered_json d;
  d["d_max"] = cfg.d_max;
  d["p"] = cfg.p;
  d["r_relax"] = cfg.r_relax;

  // the design sweep tests every requested sigma with the same budget
  bool all_success = true;
  ordered_json sweeps = ordered_json::array();
  DesignResult last;
  for (const auto& sigma : sigmas) {
    DesignResult res = design_outputs(dynamics, sigma, cfg, existing);
    ordered_json one;
    one["sigma"] = rat_vector_json(sigma);
    one["success"] = res.success;
    ordered_json outputs = ordered_json::array();
    for (const auto& y : res.outputs) outputs.push_back(y.to_string());
    one["outputs"] = std::move(outputs);
    one["verdict"] = verdict_json(res.verdict);
    one["note"] = res.note;
    ordered_json trace = ordered_json::array();
    for (const auto& t : res.trace) {
      ordered_json entry;
      entry["degree"] = t.degree;
      entry["vanishing_order"] = t.vanishing_order;
      entry["basis_size"] = t.basis_size;
      entry["kernel_dimension"] = t.kernel_dimension;
      trace.push_back(std::move(entry));
    }
    one["trace"] = std::move(trace);
    if (res.success) {
      SystemFile designed;
      designed.system = file.system;
      for (const auto& tensors : res.output_tensors) {
        designed.system.outputs.push_back(tensors);
        for (const auto& t : tensors)
          designed.system.max_cardinality =
              std::max(designed.system.max_cardinality, t.order());
      }
      one["designed_system"] = system_to_json(designed);
    }
    sweeps.push_back(std::move(one));
    all_success = all_success && res.success;
    last = std::move(res);
  }
  d["runs"] = std::move(sweeps);
  report["design"] = std::move(d);

  emit(report, opts, [&](std::ostream& os) {
    for (size_t i = 0; i < sigmas.size(); ++i) {
      const auto& run = report["design"]["runs"][i];
      os << "sigma " << run["sigma"].dump() << ": "
         << (run["success"].get<bool>() ? "designed " : "FAILED ");
      if (run["success"].get<bool>()) {
        for (const auto& y : run["outputs"]) os << "y = " << y.get<std::string>() << "  ";
      } else {
        os << run["note"].get<std::string>();
      }
      os << "\n";
    }
  }, out);
  return all_success ? 0 : 1;
}

int run_simulate(const CommonOpts& opts, const std::string& x0_flag,
                 const std::string& x0b_flag, const std::string& u_flag, double horizon,
                 double step, std::ostream& out, std::ostream& err) {
  SystemFile file = parse_system_file(opts.file);
  const int n = file.system.n;

  auto parse_doubles = [&](const std::string& flag, int expect) {
    std::vector<Rat> exact = parse_sigma(flag, expect);
    std::vector<double> v;
    for (const auto& r : exact) v.push_back(r.get_d());
    return v;
  };

  std::vector<double> x0;
  if (!x0_flag.empty()) {
    x0 = parse_doubles(x0_flag, n);
  } else if (file.sigma) {
    for (const auto& r : *file.sigma) x0.push_back(r.get_d());
  } else {
    err << "simulate: --x0 required (or a \"sigma\" field in the file)\n";
    return 2;
  }
  std::vector<double> u;
  if (!u_flag.empty()) u = parse_doubles(u_flag, file.system.num_inputs());

  SimulationResult a = simulate_outputs(file.system, x0, u, horizon, step);
  std::optional<SimulationResult> b;
  if (!x0b_flag.empty())
    b = simulate_outputs(file.system, parse_doubles(x0b_flag, n), u, horizon, step);

  ordered_json report = report_skeleton("simulate", opts);
  ordered_json s;
  s["horizon"] = horizon;
  s["step"] = step;
  s["samples"] = a.times.size();
  s["blowup_time"] = a.blowup_time ? ordered_json(*a.blowup_time) : ordered_json(nullptr);
  if (!a.outputs.empty()) s["final_outputs"] = a.outputs.back();
  if (b) {
    s["comparison_blowup_time"] =
        b->blowup_time ? ordered_json(*b->blowup_time) : ordered_json(nullptr);
    s["max_output_gap"] = max_output_gap(a, *b);
  }
  report["simulation"] = std::move(s);

  emit(report, opts, [&](std::ostream& os) {
    os << "simulated " << a.times.size() << " samples";
    if (a.blowup_time) os << " (state blew up at t = " << *a.blowup_time << ")";
    os << "\n";
    if (b) os << "max output gap vs --x0b: " << max_output_gap(a, *b) << "\n";
  }, out);
  return a.blowup_time || (b && b->blowup_time) ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"observability analysis for polynomial dynamical systems on hypergraphs"};
  app.require_subcommand(1);

  CommonOpts opts;
  int d_max = 0, p = 0, r_relax = 0;
  std::string x0_flag, x0b_flag, u_flag;
  double horizon = 1.0, step = 1e-3;

  auto add_common = [&](CLI::App* cmd, bool needs_file = true) {
    if (needs_file)
      cmd->add_option("file", opts.file, "system description (JSON)")->required();
    cmd->add_option("--sigma", opts.sigma_flags,
                    "initial state, comma-separated rationals (repeatable)");
    cmd->add_option("--seed", opts.seed, "seed for randomized procedures (recorded in report)");
    cmd->add_option("--r-cap", opts.r_cap, "max Lie order for the ideal chain");
    cmd->add_option("--budget", opts.budget, "Buchberger reduction budget");
    cmd->add_option("--format", opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--two-step-stabilization", opts.two_step,
                  "require two consecutive equal chain levels");
    cmd->add_option("--jobs", opts.jobs, "parallel independent sub-analyses");
    cmd->add_flag("--timing", opts.timing, "include wall-clock timing in the report");
  };

  CLI::App* global_cmd = app.add_subcommand("global", "ideal-chain global observability");
  add_common(global_cmd);
  CLI::App* chain_cmd = app.add_subcommand("chain", "print the Lie-derivative ideal chain");
  add_common(chain_cmd);
  CLI::App* structural_cmd =
      app.add_subcommand("structural", "closure/diameter and automorphism test");
  add_common(structural_cmd);
  CLI::App* local_cmd = app.add_subcommand("local", "observability matrix rank tests");
  add_common(local_cmd);
  CLI::App* design_cmd = app.add_subcommand("design", "incremental output design");
  add_common(design_cmd);
  design_cmd->add_option("--d-max", d_max, "max output monomial degree");
  design_cmd->add_option("--p", p, "max number of sensors");
  design_cmd->add_option("--r-relax", r_relax, "max nonvanishing Lie order");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "RK4 trajectory sampling");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--x0", x0_flag, "initial state (defaults to sigma)");
  simulate_cmd->add_option("--x0b", x0b_flag, "second initial state for gap comparison");
  simulate_cmd->add_option("--u", u_flag, "constant input vector");
  simulate_cmd->add_option("--horizon", horizon, "simulation horizon");
  simulate_cmd->add_option("--step", step, "integration step");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (global_cmd->parsed()) return run_global(opts, out, err);
    if (chain_cmd->parsed()) return run_chain(opts, out, err);
    if (structural_cmd->parsed()) return run_structural(opts, out, err);
    if (local_cmd->parsed()) return run_local(opts, out, err);
    if (design_cmd->parsed()) return run_design(opts, d_max, p, r_relax, out, err);
    if (simulate_cmd->parsed())
      return run_simulate(opts, x0_flag, x0b_flag, u_flag, horizon, step, out, err);
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const SystemError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "analysis error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace hyperobs::cli
