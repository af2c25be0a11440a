// pmi: batch front door for the streamlined PMI relaxations.  Builds and
// exports SDPs, solves them (optionally with certificate extraction), runs
// the penalty pipeline and the ground-truth oracles, and emits benchmark
// tables.  Exit codes: 0 = ran (solver failures are data), 2 = bad input,
// 3 = internal error.
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pmsos/certificate.hpp"
#include "pmsos/oracle.hpp"
#include "pmsos/penalty.hpp"
#include "pmsos/relax.hpp"
#include "pmsos/sdpa_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pmsos;

namespace {

constexpr const char* kArtifactVersion = "1";

struct CliError {
  std::string code;
  std::string message;
};

[[noreturn]] void bad_input(const std::string& code, const std::string& msg) {
  throw CliError{code, msg};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string timestamp_utc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct RunConfig {
  std::string command;
  std::string instance;
  std::string kind = "proposed";
  std::string r;  // "a" or "a..b"; command-specific default when empty
  int v = -1;     // penalty degree override
  int k = -1;     // penalty smoothness override
  std::string shift_mode = "auto";
  double lambda = -0.5;
  double N = 1.0;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::string out = ".";
  long samples = 20000;
  bool certify = false;
  bool explicit_equalities = false;
  std::map<std::string, std::string> provenance;  // key -> default|config|flag

  json canonical() const {
    return {{"command", command},
            {"instance", instance},
            {"kind", kind},
            {"r", r},
            {"v", v},
            {"k", k},
            {"shift_mode", shift_mode},
            {"lambda", lambda},
            {"N", N},
            {"tol", tol},
            {"seed", seed},
            {"out", out},
            {"samples", samples},
            {"certify", certify},
            {"explicit_equalities", explicit_equalities}};
  }
  std::string config_hash() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical().dump())));
    return buf;
  }
};

json meta_json(const RunConfig& c) {
  return {{"artifact_version", kArtifactVersion},
          {"tool", "pmi"},
          {"command", c.command},
          {"config_hash", c.config_hash()},
          {"provenance", c.provenance},
          {"generated", timestamp_utc()}};
}

void csv_meta_header(std::ostream& os, const RunConfig& c) {
  os << "# pmi artifact v" << kArtifactVersion << " command=" << c.command
     << " config_hash=" << c.config_hash() << "\n";
  for (const auto& [key, src] : c.provenance)
    if (src != "default") os << "# provenance " << key << "=" << src << "\n";
  os << "# generated=" << timestamp_utc() << "\n";
}

std::pair<int, int> parse_range(const std::string& s, int lo_def, int hi_def) {
  if (s.empty()) return {lo_def, hi_def};
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      size_t used = 0;
      const int r = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {r, r};
    }
    size_t ua = 0, ub = 0;
    const std::string a = s.substr(0, dots), b = s.substr(dots + 2);
    const int lo = std::stoi(a, &ua), hi = std::stoi(b, &ub);
    if (ua != a.size() || ub != b.size() || lo > hi)
      throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::exception&) {
    bad_input("BAD_ARGS", "cannot parse --r \"" + s + "\" (want k or a..b)");
  }
}

std::vector<RelaxKind> kinds_for(const std::string& kind, Domain d) {
  if (kind == "proposed") return {proposed_kind_for(d)};
  if (kind == "both") return {proposed_kind_for(d), RelaxKind::HolScherer};
  try {
    return {kind_from_name(kind)};
  } catch (const std::invalid_argument& e) {
    bad_input("BAD_ARGS", e.what());
  }
}

Instance load_instance(const std::string& path) {
  if (path.empty()) bad_input("BAD_ARGS", "--instance is required");
  json j;
  try {
    j = load_json_file(path);
  } catch (const std::exception& e) {
    bad_input("INSTANCE_PARSE", std::string(e.what()));
  }
  try {
    return instance_from_json(j);
  } catch (const std::exception& e) {
    bad_input("INSTANCE_PARSE", path + ": " + e.what());
  }
}

std::string instance_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

Relaxation build_checked(const Instance& inst, RelaxKind kind, int r,
                         const RunConfig& c) {
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = kind;
  spec.r = r;
  spec.explicit_equalities = c.explicit_equalities;
  try {
    return build(spec);
  } catch (const std::invalid_argument& e) {
    bad_input("BUILD_ERROR", e.what());
  }
}

json relax_meta(const Relaxation& rel, RelaxKind kind, int r,
                const RunConfig& c) {
  const SizeReport rep = size_report(rel.sdp);
  json blocks = json::array();
  for (const auto& b : rep.blocks)
    blocks.push_back(
        {{"name", b.name}, {"size", b.size}, {"equality", b.equality}});
  json j = {{"meta", meta_json(c)},
            {"instance", c.instance},
            {"kind", kind_name(kind)},
            {"r", r},
            {"n", rel.meta.n},
            {"m", rel.meta.m},
            {"l", rel.meta.l},
            {"k", rel.meta.k},
            {"vstar", rel.meta.vstar},
            {"moment_degree", rel.meta.moment_degree},
            {"domain", domain_name(rel.meta.domain)},
            {"squarefree", rel.meta.squarefree},
            {"g_scale", rel.meta.g_scale},
            {"obj_scale", rel.meta.obj_scale},
            {"nvars", rep.nvars},
            {"largest_block", rep.largest_block},
            {"blocks", blocks},
            {"warnings", rel.meta.warnings}};
  if (!rel.meta.g_scales.empty()) j["g_scales"] = rel.meta.g_scales;
  return j;
}

int cmd_relax(RunConfig& c) {
  const Instance inst = load_instance(c.instance);
  const auto [rlo, rhi] = parse_range(c.r, 2, 2);
  const auto kinds = kinds_for(c.kind, inst.domain);
  fs::create_directories(c.out);
  const std::string stem = instance_stem(c.instance);
  json files = json::array();
  for (RelaxKind kind : kinds)
    for (int r = rlo; r <= rhi; ++r) {
      Relaxation rel = build_checked(inst, kind, r, c);
      const std::string base =
          c.out + "/" + stem + "." + kind_name(kind) + ".r" + std::to_string(r);
      write_sdpa_file(rel.sdp, base + ".dat-s");
      save_json_file(base + ".meta.json", relax_meta(rel, kind, r, c));
      files.push_back(base + ".dat-s");
      files.push_back(base + ".meta.json");
    }
  std::cout << json{{"written", files}}.dump(2) << "\n";
  return 0;
}

json solve_one(const Instance& inst, RelaxKind kind, int r,
               const RunConfig& c) {
  Relaxation rel = build_checked(inst, kind, r, c);
  SolveOptions opt;
  opt.tol = c.tol;
  const auto t0 = std::chrono::steady_clock::now();
  RelaxSolution rs = solve_relaxation(rel, opt);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const SizeReport rep = size_report(rel.sdp);
  json row = {{"kind", kind_name(kind)},
              {"r", r},
              {"status", status_name(rs.sdp.status)},
              {"bound", rs.bound},
              {"primal_obj", rs.sdp.primal_obj},
              {"dual_obj", rs.sdp.dual_obj},
              {"primal_res", rs.sdp.primal_res},
              {"dual_res", rs.sdp.dual_res},
              {"rel_gap", rs.sdp.rel_gap},
              {"iterations", rs.sdp.iterations},
              {"nvars", rep.nvars},
              {"largest_block", rep.largest_block},
              {"moment_degree", rel.meta.moment_degree},
              {"warnings", rel.meta.warnings},
              {"note", rs.note},
              {"wall_time_s", secs}};
  if (c.certify) {
    const Certificate cert = extract_certificate(rel, rs.sdp);
    json grams = json::array();
    for (const auto& gb : cert.grams)
      grams.push_back({{"name", gb.name},
                       {"role", gb.role},
                       {"size", gb.gram.rows()},
                       {"min_eig_raw", gb.min_eig_raw}});
    row["certificate"] = {{"ok", cert.ok},
                          {"bound", cert.bound},
                          {"residual", cert.residual},
                          {"message", cert.message},
                          {"grams", grams}};
  }
  return row;
}

int cmd_solve(RunConfig& c) {
  const Instance inst = load_instance(c.instance);
  const auto [rlo, rhi] = parse_range(c.r, 2, 2);
  const auto kinds = kinds_for(c.kind, inst.domain);
  fs::create_directories(c.out);
  json results = json::array();
  for (RelaxKind kind : kinds)
    for (int r = rlo; r <= rhi; ++r)
      results.push_back(solve_one(inst, kind, r, c));
  json out = {{"meta", meta_json(c)},
              {"instance", c.instance},
              {"results", results}};
  const std::string path =
      c.out + "/" + instance_stem(c.instance) + ".solve.json";
  save_json_file(path, out);
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct BenchRow {
  std::string instance;
  std::string kind;
  int r = 0;
  int largest = 0;
  long long vars = 0;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double oracle = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double secs = 0.0;
  std::string error;
};

int cmd_bench(RunConfig& c) {
  if (c.instance.empty()) bad_input("BAD_ARGS", "--instance is required");
  std::vector<std::string> paths;
  if (fs::is_directory(c.instance)) {
    for (const auto& entry : fs::directory_iterator(c.instance))
      if (entry.path().extension() == ".json")
        paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(c.instance);
  }
  if (paths.empty())
    bad_input("BAD_ARGS", "no instance JSON files in " + c.instance);
  const auto [rlo, rhi] = parse_range(c.r, 2, 4);

  std::vector<Instance> instances;
  std::vector<double> oracle_min(paths.size());
  for (size_t i = 0; i < paths.size(); ++i) {
    instances.push_back(load_instance(paths[i]));
    const Instance& inst = instances.back();
    try {
      oracle_min[i] =
          inst.domain == Domain::Binary
              ? brute_force_binary(inst.objective, inst.g).f_min
              : sample_min_ball(inst.objective, inst.g, c.samples, c.seed)
                    .f_min;
    } catch (const std::runtime_error&) {
      oracle_min[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }

  struct Task {
    size_t inst;
    RelaxKind kind;
    int r;
  };
  std::vector<Task> tasks;
  for (size_t i = 0; i < paths.size(); ++i)
    for (int r = rlo; r <= rhi; ++r)
      for (RelaxKind kind : kinds_for(c.kind, instances[i].domain))
        tasks.push_back({i, kind, r});

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t t = next.fetch_add(1); t < tasks.size();
         t = next.fetch_add(1)) {
      const Task& task = tasks[t];
      BenchRow& row = rows[t];
      row.instance = instance_stem(paths[task.inst]);
      row.kind = kind_name(task.kind);
      row.r = task.r;
      row.oracle = oracle_min[task.inst];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        RelaxSpec spec;
        spec.instance = instances[task.inst];
        spec.kind = task.kind;
        spec.r = task.r;
        spec.explicit_equalities = c.explicit_equalities;
        Relaxation rel = build(spec);
        const SizeReport rep = size_report(rel.sdp);
        row.largest = rep.largest_block;
        row.vars = rep.nvars;
        SolveOptions opt;
        opt.tol = c.tol;
        RelaxSolution rs = solve_relaxation(rel, opt);
        row.bound = rs.bound;
        row.gap = row.oracle - row.bound;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  };
  const unsigned nw = std::max(
      1u, std::min({4u, std::thread::hardware_concurrency(),
                    static_cast<unsigned>(tasks.size())}));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  fs::create_directories(c.out);
  const std::string path = c.out + "/bench.csv";
  std::ofstream os(path);
  if (!os) bad_input("BAD_ARGS", "cannot write " + path);
  csv_meta_header(os, c);
  os << "instance,kind,r,largest_block,total_vars,bound,oracle_f_min,gap,"
        "wall_time_s\n";
  for (const auto& row : rows) {
    if (!row.error.empty())
      std::cerr << "bench: " << row.instance << " " << row.kind << " r="
                << row.r << " failed: " << row.error << "\n";
    os << row.instance << "," << row.kind << "," << row.r << ","
       << row.largest << "," << row.vars << "," << fmt_g(row.bound) << ","
       << fmt_g(row.oracle) << "," << fmt_g(row.gap) << ","
       << fmt_g(row.secs) << "\n";
  }
  os.close();
  std::cout << json{{"csv", path}, {"rows", rows.size()}}.dump(2) << "\n";
  return 0;
}

int cmd_penalty(RunConfig& c) {
  PenaltySpec spec;
  spec.lambda = c.lambda;
  spec.N = c.N;
  spec.v = c.v > 0 ? c.v : 40;
  spec.k = c.k >= 0 ? c.k : choose_k(std::abs(spec.lambda), spec.v);
  ShiftMode mode = ShiftMode::Auto;
  if (c.shift_mode == "theoretical")
    mode = ShiftMode::Theoretical;
  else if (c.shift_mode == "empirical")
    mode = ShiftMode::Empirical;
  else if (c.shift_mode != "auto")
    bad_input("BAD_ARGS", "unknown --shift-mode \"" + c.shift_mode + "\"");

  PenaltyResult res;
  try {
    res = penalty_poly(spec, mode);
  } catch (const std::exception& e) {
    bad_input("PENALTY_SPEC", e.what());
  }

  fs::create_directories(c.out);
  const std::string csv_path = c.out + "/penalty.csv";
  std::ofstream os(csv_path);
  if (!os) bad_input("BAD_ARGS", "cannot write " + csv_path);
  csv_meta_header(os, c);
  os << "t,q,p,error,k\n";
  const PenaltyStep q(spec);
  long rows = 0;
  for (double t : penalty_grid(spec)) {
    const double qt = q.eval(t);
    const double pt = res.p_eval(t);
    os << fmt_g(t) << "," << fmt_g(qt) << "," << fmt_g(pt) << ","
       << fmt_g(std::abs(res.cheb.eval(t) - qt)) << "," << spec.k << "\n";
    ++rows;
  }
  os.close();

  json sidecar = {{"meta", meta_json(c)},
                  {"spec",
                   {{"lambda", spec.lambda},
                    {"N", spec.N},
                    {"k", spec.k},
                    {"v", spec.v}}},
                  {"shift", res.shift},
                  {"shift_mode", res.shift_mode},
                  {"grid_sup_error", res.grid_sup_error},
                  {"sup_p_minus_q", res.sup_p_minus_q},
                  {"min_p_minus_q", res.min_p_minus_q},
                  {"envelope_bound", res.bound},
                  {"tv_bound", res.tv_bound},
                  {"jackson_bound", res.jackson_bound},
                  {"rows", rows},
                  {"csv", csv_path}};
  save_json_file(c.out + "/penalty.json", sidecar);
  std::cout << sidecar.dump(2) << "\n";
  return 0;
}

int cmd_oracle(RunConfig& c) {
  const Instance inst = load_instance(c.instance);
  const int r = parse_range(c.r, 2, 2).first;
  json oj;
  double f_min = std::numeric_limits<double>::quiet_NaN();
  double lambda_gap = -1.0;
  try {
    const OracleResult orc =
        inst.domain == Domain::Binary
            ? brute_force_binary(inst.objective, inst.g)
            : sample_min_ball(inst.objective, inst.g, c.samples, c.seed);
    f_min = orc.f_min;
    oj = {{"f_min", orc.f_min},
          {"argmin", orc.argmin},
          {"feasible_count", orc.feasible_count},
          {"upper_bound_only", orc.upper_bound_only}};
    if (orc.lambda_gap) {
      oj["lambda_gap"] = *orc.lambda_gap;
      lambda_gap = *orc.lambda_gap;
    }
  } catch (const std::runtime_error& e) {
    oj = {{"feasible_count", 0}, {"note", e.what()}};
  }

  const int l = inst.g.half_degree();
  const int k = r / l - 1;
  HypoParams hp;
  hp.n = inst.n;
  hp.d = std::max(1, inst.objective.degree());
  hp.l = l;
  hp.r = r;
  hp.v = (k + 1) / 2;
  hp.m = inst.g.dim();
  const HypothesisReport rep = check_hypotheses(inst.domain, hp);
  json checks = json::array();
  for (const auto& ck : rep.checks)
    checks.push_back({{"name", ck.name},
                      {"value", ck.value},
                      {"threshold", ck.threshold},
                      {"satisfied", ck.satisfied},
                      {"slack", ck.slack}});

  const LipschitzEstimate le =
      lipschitz_estimate(inst.objective, 2000, c.seed);
  double f_norm = 0.0;
  for (const auto& [mo, coef] : inst.objective.terms())
    f_norm += std::abs(coef);

  RateParams rp;
  rp.n = inst.n;
  rp.m = inst.g.dim();
  rp.d = hp.d;
  rp.l = l;
  rp.v = hp.v;
  rp.r = r;
  rp.f_norm = f_norm;
  rp.lambda = std::min(lambda_gap, -1e-9);
  rp.L_f = le.upper;
  if (std::isfinite(f_min) && f_min > 0.0) rp.E_f = f_min;
  const RateDiagnostics rd = rate_bounds(inst.domain, rp);
  json rdj = {{"a_const", rd.a_const},
              {"xi", rd.xi},
              {"V_bound", rd.V_bound},
              {"U_bound", rd.U_bound},
              {"xi_term", rd.xi_term},
              {"C_B", rd.C_B},
              {"thm42_rhs", rd.thm42_rhs},
              {"b", rd.b},
              {"gamma", rd.gamma},
              {"d_prime", rd.d_prime},
              {"v_choice", rd.v_choice},
              {"delta_choice", rd.delta_choice},
              {"rate_exponent", rd.rate_exponent},
              {"thm51_degree", rd.thm51_degree},
              {"L_f", rd.L_f},
              {"C_loj", rd.C_loj},
              {"L_loj", rd.L_loj},
              {"E_f", rd.E_f},
              {"note", rd.Cd_note},
              {"flags", rd.flags}};

  json out = {{"meta", meta_json(c)},
              {"instance", c.instance},
              {"oracle", oj},
              {"hypotheses",
               {{"checks", checks}, {"all_satisfied", rep.all_satisfied}}},
              {"lipschitz", {{"upper", le.upper}, {"sampled", le.sampled}}},
              {"rate", rdj}};
  fs::create_directories(c.out);
  save_json_file(c.out + "/" + instance_stem(c.instance) + ".oracle.json",
                 out);
  std::cout << out.dump(2) << "\n";
  return 0;
}

void merge_config_file(const std::string& path, RunConfig& c) {
  json j;
  try {
    j = load_json_file(path);
  } catch (const std::exception& e) {
    bad_input("CONFIG_PARSE", e.what());
  }
  if (!j.is_object()) bad_input("CONFIG_PARSE", path + ": not a JSON object");
  try {
    for (const auto& [key, val] : j.items()) {
      const bool flag_set = c.provenance.count(key) != 0 &&
                            c.provenance.at(key) == "flag";
      if (key == "instance") {
        if (!flag_set) c.instance = val.get<std::string>();
      } else if (key == "kind") {
        if (!flag_set) c.kind = val.get<std::string>();
      } else if (key == "r") {
        if (!flag_set)
          c.r = val.is_string() ? val.get<std::string>()
                                : std::to_string(val.get<int>());
      } else if (key == "v") {
        if (!flag_set) c.v = val.get<int>();
      } else if (key == "k") {
        if (!flag_set) c.k = val.get<int>();
      } else if (key == "shift_mode") {
        if (!flag_set) c.shift_mode = val.get<std::string>();
      } else if (key == "lambda") {
        if (!flag_set) c.lambda = val.get<double>();
      } else if (key == "N") {
        if (!flag_set) c.N = val.get<double>();
      } else if (key == "tol") {
        if (!flag_set) c.tol = val.get<double>();
      } else if (key == "seed") {
        if (!flag_set) c.seed = val.get<std::uint64_t>();
      } else if (key == "out") {
        if (!flag_set) c.out = val.get<std::string>();
      } else if (key == "samples") {
        if (!flag_set) c.samples = val.get<long>();
      } else if (key == "certify") {
        if (!flag_set) c.certify = val.get<bool>();
      } else if (key == "explicit_equalities") {
        if (!flag_set) c.explicit_equalities = val.get<bool>();
      } else {
        bad_input("CONFIG_KEY", "unknown config key \"" + key + "\"");
      }
      if (!flag_set) c.provenance[key] = "config";
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    bad_input("CONFIG_PARSE", path + ": " + e.what());
  }
}

int print_error(int exit_code, const std::string& code,
                const std::string& message) {
  std::cout << json{{"error", {{"code", code}, {"message", message}}}}.dump(2)
            << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pmi: streamlined moment relaxations for polynomial matrix "
      "inequalities"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string config_path;
  std::map<std::string, CLI::Option*> opts;
  opts["instance"] =
      app.add_option("--instance", cfg.instance, "instance JSON path");
  opts["kind"] = app.add_option(
      "--kind", cfg.kind,
      "proposed|holscherer|both|proposed-binary|proposed-ball|blockdiag|"
      "scalar-lasserre");
  opts["r"] = app.add_option("--r", cfg.r, "relaxation order k or range a..b");
  opts["v"] = app.add_option("--v", cfg.v, "penalty approximation degree");
  opts["k"] = app.add_option("--k", cfg.k, "penalty smoothness order");
  opts["shift_mode"] = app.add_option("--shift-mode", cfg.shift_mode,
                                      "auto|theoretical|empirical");
  opts["lambda"] =
      app.add_option("--lambda", cfg.lambda, "penalty breakpoint in [-1,0)");
  opts["N"] = app.add_option("--N", cfg.N, "penalty plateau height");
  opts["tol"] = app.add_option("--tol", cfg.tol, "solver tolerance");
  opts["seed"] = app.add_option("--seed", cfg.seed, "sampling seed");
  opts["out"] = app.add_option("--out", cfg.out, "output directory");
  opts["samples"] =
      app.add_option("--samples", cfg.samples, "oracle sample count");
  opts["certify"] = app.add_flag("--certify", cfg.certify,
                                 "extract and verify an SOS certificate");
  opts["explicit_equalities"] =
      app.add_flag("--explicit-equalities", cfg.explicit_equalities,
                   "keep binary equalities as localizer blocks");
  app.add_option("--config", config_path,
                 "JSON config mirroring the flags; flags win");

  CLI::App* sub_relax =
      app.add_subcommand("relax", "build and export SDPA + metadata");
  CLI::App* sub_solve =
      app.add_subcommand("solve", "build and solve; JSON results");
  CLI::App* sub_bench =
      app.add_subcommand("bench", "benchmark CSV over an instance set");
  CLI::App* sub_penalty =
      app.add_subcommand("penalty", "penalty pipeline CSV + sidecar");
  CLI::App* sub_oracle =
      app.add_subcommand("oracle", "ground truth and rate diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return print_error(2, "BAD_ARGS", e.what());
  }

  for (const auto& [key, opt] : opts)
    cfg.provenance[key] = opt->count() > 0 ? "flag" : "default";

  try {
    if (!config_path.empty()) merge_config_file(config_path, cfg);
    if (cfg.tol <= 0) bad_input("BAD_ARGS", "--tol must be positive");
    if (cfg.samples < 1) bad_input("BAD_ARGS", "--samples must be >= 1");
    if (sub_relax->parsed()) {
      cfg.command = "relax";
      return cmd_relax(cfg);
    }
    if (sub_solve->parsed()) {
      cfg.command = "solve";
      return cmd_solve(cfg);
    }
    if (sub_bench->parsed()) {
      cfg.command = "bench";
      if (cfg.provenance["kind"] == "default") cfg.kind = "both";
      return cmd_bench(cfg);
    }
    if (sub_penalty->parsed()) {
      cfg.command = "penalty";
      return cmd_penalty(cfg);
    }
    cfg.command = "oracle";
    return cmd_oracle(cfg);
  } catch (const CliError& e) {
    return print_error(2, e.code, e.message);
  } catch (const std::exception& e) {
    return print_error(3, "INTERNAL", e.what());
  }
}
