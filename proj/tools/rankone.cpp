// rankone: command-line front end.
//
// Exit codes: 0 pass, 1 usage or input error, 2 certificate violation.
// Outputs go to --out-dir (default $RANKONE_OUT_DIR, else "."); every run
// also writes manifest-<command>.json describing how to reproduce it.

#include "rankone/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <thread>

using namespace rankone;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ViolationExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string command;
  fs::path out_dir;
  unsigned threads = 1;
  Json inputs = Json::array();
  Json parameters = Json::object();
  Json outputs = Json::array();
  std::optional<std::uint64_t> seed;

  void input(const std::string& path) { inputs.push_back(path); }

  void write(const std::string& name, const std::string& content) {
    const auto file = out_dir / name;
    write_file_atomic(file, content);
    outputs.push_back(file.string());
  }
  void write(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void manifest() const {
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    Json m = {{"command", command}, {"inputs", inputs},       {"parameters", parameters},
              {"outputs", outputs}, {"tool_version", kVersion}, {"timestamp", stamp}};
    m["seed"] = seed ? Json(*seed) : Json(nullptr);
    write_file_atomic(out_dir / ("manifest-" + command + ".json"), m.dump(2) + "\n");
  }
};

template <class T, class F>
T load(Run& run, const std::string& file, F&& decode) {
  run.input(file);
  try {
    return decode(read_json_file(file));
  } catch (const SchemaError& e) {
    const std::string what = e.what();
    throw SchemaError(what.rfind(file, 0) == 0 ? what : file + ": " + what);
  }
}

RankOneSpec load_spec(Run& run, const std::string& file) {
  return load<RankOneSpec>(run, file, [](const Json& j) { return spec_from(j); });
}

LevelFunction function_arg(Run& run, const std::string& file, std::size_t stage, std::int64_t level) {
  if (!file.empty()) {
    return load<LevelFunction>(run, file, [](const Json& j) { return level_function_from(j); });
  }
  return LevelFunction::indicator(stage, level);
}

Rational rational_arg(const std::string& text, const std::string& name) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("--" + name + ": expected a rational like 1/10, got '" + text + "'");
  }
}

// Splits [from, to] across threads, one Correlator each.
CorrelationSequence parallel_sequence(const RankOneSpec& spec, const LevelFunction& f, std::int64_t from,
                                      std::int64_t to, const Rational& tol, unsigned threads) {
  const std::int64_t count = to - from + 1;
  threads = static_cast<unsigned>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, count)));
  std::vector<CorrelationSequence> parts(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::int64_t lo = from + t * chunk, hi = std::min(to, lo + chunk - 1);
        if (lo <= hi) parts[t] = autocorrelation_sequence(spec, f, lo, hi, tol);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CorrelationSequence seq = parts.front();
  for (unsigned t = 1; t < threads; ++t) {
    seq.entries.insert(seq.entries.end(), parts[t].entries.begin(), parts[t].entries.end());
  }
  return seq;
}

void cmd_schedule(Run& run, const std::string& growth, std::int64_t horizon, const std::vector<std::int64_t>& seeds,
                  const std::string& out) {
  run.parameters = {{"growth", growth}, {"horizon", horizon}, {"seed_lengths", seeds}};
  const auto s = generate_schedule(rational_arg(growth, "growth"), horizon, seeds);
  run.write(out, to_json(s));
  std::cout << "schedule: " << s.blocks.size() << " blocks, horizon " << s.horizon << "\n";
}

void cmd_plan(Run& run, const std::string& schedule_file, const std::string& policy_file) {
  const auto schedule = load<IntervalSchedule>(run, schedule_file, [](const Json& j) { return schedule_from(j); });
  PairPolicy policy;
  if (!policy_file.empty()) policy = load<PairPolicy>(run, policy_file, [](const Json& j) { return policy_from(j); });
  run.parameters = {{"policy", to_json(policy)}};
  const auto plan = plan_pair(schedule, policy);
  run.write("spec_S.json", to_json(plan.spec_s));
  run.write("spec_T.json", to_json(plan.spec_t));
  run.write("cert_S.json", to_json(plan.cert_s));
  run.write("cert_T.json", to_json(plan.cert_t));
  const auto product = product_correlation(plan.corr_s, plan.corr_t);
  const auto summary = summability_report(product, schedule.horizon);
  run.write("plan.json", Json{{"n0", plan.n0},
                              {"horizon", schedule.horizon},
                              {"tracked", to_json(plan.cert_s.tracked)},
                              {"product_support", summary.support},
                              {"stages_S", plan.spec_s.stages.size()},
                              {"stages_T", plan.spec_t.stages.size()}});
  std::cout << "plan: n0 = " << plan.n0 << ", S stages " << plan.spec_s.stages.size() << ", T stages "
            << plan.spec_t.stages.size() << "\n";
  for (const auto* cert : {&plan.cert_s, &plan.cert_t}) {
    for (const auto& z : cert->zero_intervals) {
      if (!z.exact_zero) {
        throw ViolationExit(cert->factor + " zero claim " + z.interval.str() + " violated at n=" +
                            std::to_string(z.first_violation.value_or(z.interval.lo)));
      }
    }
  }
}

void cmd_verify(Run& run, const std::string& spec_file, const std::string& cert_file) {
  const auto spec = load_spec(run, spec_file);
  const auto cert = load<ConstructionCertificate>(run, cert_file, [](const Json& j) { return certificate_from(j); });
  const auto check = verify_certificate(spec, cert);
  run.write("verify-" + cert.factor + ".json", to_json(check));
  std::cout << (check.ok ? "PASS " : "FAIL ") << check.message << "\n";
  if (!check.ok) throw ViolationExit(check.message);
}

void cmd_correlate(Run& run, const std::string& spec_file, const std::string& f_file, std::size_t stage,
                   std::int64_t level, std::int64_t from, std::int64_t to, const std::string& tol,
                   const std::string& out) {
  const auto spec = load_spec(run, spec_file);
  const auto f = function_arg(run, f_file, stage, level);
  run.parameters = {{"f", to_json(f)}, {"from", from}, {"to", to}, {"tolerance", tol}};
  if (from > to) throw std::invalid_argument("--from must be <= --to");
  const auto seq = parallel_sequence(spec, f, from, to, rational_arg(tol, "tolerance"), run.threads);
  run.write(out, to_table(seq));
}

void cmd_spectrum(Run& run, const std::string& table_file, std::int64_t order, std::size_t grid, bool exact,
                  std::int64_t horizon) {
  run.input(table_file);
  CorrelationSequence seq;
  try {
    seq = parse_table(read_text_file(table_file));
  } catch (const SchemaError& e) {
    throw SchemaError(table_file + ": " + e.what());
  }
  run.parameters = {{"order", order}, {"grid", grid}, {"exact", exact}, {"horizon", horizon}};
  const auto d = exact ? exact_density(seq, grid) : fejer_density(seq, order, grid);
  run.write("density.tsv", to_table(d));
  Json summary = {{"exact", d.exact}, {"order", d.order}, {"grid", d.grid()}, {"mean", d.mean()}, {"min", d.min()}};
  if (horizon > 0) summary["summability"] = to_json(summability_report(seq, horizon));
  run.write("spectrum.json", summary);
  std::cout << "density: mean " << d.mean() << ", min " << d.min() << "\n";
}

void cmd_simulate(Run& run, const std::string& kind, const std::string& spec_file, const std::string& cov_file,
                  const std::string& config_file, std::size_t depth, std::int64_t steps, std::int64_t length,
                  const std::string& f_file, std::size_t stage, std::int64_t level) {
  SimulationConfig config;
  if (!config_file.empty()) {
    config = load<SimulationConfig>(run, config_file, [](const Json& j) { return simulation_config_from(j); });
  }
  run.seed = config.seed;
  run.parameters = {{"kind", kind}, {"config", to_json(config)}};
  Json report = {{"kind", kind}, {"seed", config.seed}, {"sample_count", config.sample_count}};
  if (kind == "gaussian") {
    if (cov_file.empty()) throw std::invalid_argument("gaussian simulation needs --cov");
    run.input(cov_file);
    const auto cov = parse_table(read_text_file(cov_file));
    const auto len = length > 0 ? length : config.lag_max + 1;
    run.parameters["length"] = len;
    const auto s = gaussian_sample(cov, len, config);
    Json lags = Json::array();
    double worst = 0;
    for (const auto& e : lag_covariance(s, config.lag_max)) {
      const double exact = to_double(cov.at(e.lag).midpoint());
      worst = std::max(worst, std::abs(e.estimate - exact));
      lags.push_back({{"lag", e.lag}, {"estimate", e.estimate}, {"std_error", e.std_error}, {"exact", exact}});
    }
    report["method"] = s.method;
    report["lags"] = lags;
    report["max_abs_error"] = worst;
  } else if (kind == "poisson") {
    if (spec_file.empty()) throw std::invalid_argument("poisson simulation needs --spec");
    const auto spec = load_spec(run, spec_file);
    const auto f = function_arg(run, f_file, stage, level);
    run.parameters["depth"] = depth;
    run.parameters["steps"] = steps;
    run.parameters["f"] = to_json(f);
    const auto pairs = poisson_sample_and_push(spec, depth, steps, config);
    const auto est = linear_statistic_covariance(spec, pairs, f, config.confidence);
    const auto exact = autocorrelation(spec, f, steps, 0);
    const double target = config.intensity * to_double(exact.midpoint());
    report["steps"] = steps;
    report["estimate"] = to_json(est);
    report["target"] = target;
    report["exact_correlation"] = {{"lower", rational_json(exact.lower)}, {"upper", rational_json(exact.upper)}};
    report["contains_target"] = est.contains(target);
  } else {
    throw std::invalid_argument("--kind must be gaussian or poisson");
  }
  run.write("simulate-" + kind + ".json", report);
  std::cout << report.dump(2) << "\n";
}

void cmd_lemma3(Run& run, const std::string& f_file, const std::string& delta_text, std::int64_t horizon) {
  const auto f = load<WalshPolynomial>(run, f_file, [](const Json& j) { return walsh_from(j); });
  const auto delta = rational_arg(delta_text, "delta");
  run.parameters = {{"delta", delta_text}, {"horizon", horizon}};
  const auto res = lemma3_truncate(f, delta);
  const auto tail = corr_tail_certificate(res.f_prime, res.M, horizon);
  run.write("f_prime.json", to_json(res.f_prime));
  run.write("lemma3.json", Json{{"M", res.M},
                                {"terms_kept", res.terms_kept},
                                {"renormalized", res.renormalized},
                                {"distance_sq", rational_json(res.distance_sq_bound)},
                                {"delta_sq", rational_json(delta * delta)},
                                {"corr_tail", rational_json(tail)},
                                {"corr_head", rational_json(walsh_corr(res.f_prime, {1, res.M}))},
                                {"horizon", horizon}});
  std::cout << "lemma3: M = " << res.M << ", corr over (M, " << horizon << "] = " << to_string(tail) << "\n";
  if (tail != 0) throw ViolationExit("nonzero correlation tail " + to_string(tail));
}

void cmd_report(Run& run, const fs::path& plan_dir, std::size_t grid) {
  const auto spec_s = load_spec(run, (plan_dir / "spec_S.json").string());
  const auto spec_t = load_spec(run, (plan_dir / "spec_T.json").string());
  auto cert = [&](const char* name) {
    return load<ConstructionCertificate>(run, (plan_dir / name).string(),
                                         [](const Json& j) { return certificate_from(j); });
  };
  const auto cert_s = cert("cert_S.json"), cert_t = cert("cert_T.json");
  run.parameters = {{"grid", grid}};
  const auto check_s = verify_certificate(spec_s, cert_s), check_t = verify_certificate(spec_t, cert_t);
  const std::int64_t H = cert_s.horizon;
  const auto corr_s = parallel_sequence(spec_s, cert_s.tracked, 0, H, 0, run.threads);
  const auto corr_t = parallel_sequence(spec_t, cert_t.tracked, 0, H, 0, run.threads);
  const auto product = product_correlation(corr_s, corr_t);
  const auto summary = summability_report(product, H);
  const auto density = exact_density(product, grid);
  std::int64_t n0 = 1;
  if (!summary.support.empty()) n0 = summary.support.back() + 1;
  run.write("report.json",
            Json{{"verify_S", to_json(check_s)},
                 {"verify_T", to_json(check_t)},
                 {"horizon", H},
                 {"n0", n0},
                 {"product_corr", {{"lower", rational_json(corr_functional(product, {1, H}).lower)},
                                   {"upper", rational_json(corr_functional(product, {1, H}).upper)}}},
                 {"summability", to_json(summary)},
                 {"density", {{"grid", grid}, {"mean", density.mean()}, {"min", density.min()}}},
                 {"unverified", cert_s.unverified}});
  std::cout << "report: n0 = " << n0 << ", S " << (check_s.ok ? "ok" : "FAIL") << ", T "
            << (check_t.ok ? "ok" : "FAIL") << "\n";
  if (!check_s.ok) throw ViolationExit(check_s.message);
  if (!check_t.ok) throw ViolationExit(check_t.message);
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-one constructions: schedules, pair planning, certificates and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Run run;
  std::string out_dir = env_or("RANKONE_OUT_DIR", ".");
  std::string threads_env = env_or("RANKONE_THREADS", "1");
  app.add_option("--out-dir", out_dir, "Output directory (env RANKONE_OUT_DIR)");

  std::string growth = "10", out = "schedule.json";
  std::int64_t horizon = 100;
  std::vector<std::int64_t> seeds;
  auto* schedule = app.add_subcommand("schedule", "Generate an interval schedule");
  schedule->add_option("--growth", growth, "Growth factor, rational >= 2")->capture_default_str();
  schedule->add_option("--horizon", horizon, "Largest n covered")->capture_default_str();
  schedule->add_option("--seed-lengths", seeds, "Initial breakpoints")->delimiter(',');
  schedule->add_option("-o,--output", out, "Output file name")->capture_default_str();

  std::string schedule_file, policy_file;
  auto* plan = app.add_subcommand("plan", "Plan the pair (S, T) for a schedule");
  plan->add_option("--schedule", schedule_file, "Schedule JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("--policy", policy_file, "Policy JSON")->check(CLI::ExistingFile);

  std::string spec_file, cert_file;
  auto* verify = app.add_subcommand("verify", "Re-check a certificate against its spec");
  verify->add_option("--spec", spec_file, "Spec JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--cert", cert_file, "Certificate JSON")->required()->check(CLI::ExistingFile);

  std::string f_file, tolerance = "0", table_out = "correlation.tsv";
  std::size_t stage = 1;
  std::int64_t level = 0, from = 0, to = 100;
  auto* correlate = app.add_subcommand("correlate", "Tabulate (f, T^n f)");
  correlate->add_option("--spec", spec_file, "Spec JSON")->required()->check(CLI::ExistingFile);
  correlate->add_option("--f", f_file, "Level function JSON (default: indicator of --stage/--level)");
  correlate->add_option("--stage", stage, "Stage of the indicator")->capture_default_str();
  correlate->add_option("--level", level, "Level of the indicator")->capture_default_str();
  correlate->add_option("--from", from)->capture_default_str();
  correlate->add_option("--to", to)->capture_default_str();
  correlate->add_option("--tolerance", tolerance, "Bracket width, rational")->capture_default_str();
  correlate->add_option("-o,--output", table_out)->capture_default_str();

  std::string table_file;
  std::int64_t order = 64, sum_horizon = 0;
  std::size_t grid = 4096;
  bool exact = false;
  auto* spectrum = app.add_subcommand("spectrum", "Density of a correlation table");
  spectrum->add_option("--table", table_file, "Correlation table")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--order", order, "Fejer order M")->capture_default_str();
  spectrum->add_option("--grid", grid, "Grid size G")->capture_default_str();
  spectrum->add_flag("--exact", exact, "Exact trig polynomial instead of Fejer");
  spectrum->add_option("--horizon", sum_horizon, "Also report summability over [1, horizon]");

  std::string kind, cov_file, config_file;
  std::size_t depth = 1;
  std::int64_t steps = 0, length = 0;
  auto* simulate = app.add_subcommand("simulate", "Gaussian or Poisson first-chaos simulation");
  simulate->add_option("--kind", kind, "gaussian or poisson")->required()->check(CLI::IsMember({"gaussian", "poisson"}));
  simulate->add_option("--spec", spec_file, "Spec JSON (poisson)");
  simulate->add_option("--cov", cov_file, "Covariance table (gaussian)");
  simulate->add_option("--config", config_file, "SimulationConfig JSON")->check(CLI::ExistingFile);
  simulate->add_option("--depth", depth, "Tower region depth (poisson)")->capture_default_str();
  simulate->add_option("--steps", steps, "Push-forward steps n (poisson)")->capture_default_str();
  simulate->add_option("--length", length, "Path length (gaussian; default lag_max + 1)");
  simulate->add_option("--f", f_file, "Level function JSON");
  simulate->add_option("--stage", stage)->capture_default_str();
  simulate->add_option("--level", level)->capture_default_str();

  std::string walsh_file, delta = "1/10";
  std::int64_t lemma_horizon = 10000;
  auto* lemma3 = app.add_subcommand("lemma3", "Finite truncation with exactly vanishing correlations");
  lemma3->add_option("--f", walsh_file, "Walsh polynomial JSON")->required()->check(CLI::ExistingFile);
  lemma3->add_option("--delta", delta, "Approximation radius, rational")->capture_default_str();
  lemma3->add_option("--horizon", lemma_horizon, "Tail certificate horizon")->capture_default_str();

  std::string plan_dir = ".";
  auto* report = app.add_subcommand("report", "Verify and summarize a planned pair directory");
  report->add_option("--plan-dir", plan_dir, "Directory holding spec_*.json and cert_*.json")->check(CLI::ExistingDirectory);
  report->add_option("--grid", grid)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    run.out_dir = out_dir;
    run.threads = static_cast<unsigned>(std::max(1, std::stoi(threads_env)));
  } catch (const std::exception&) {
    std::cerr << "error: RANKONE_THREADS must be a positive integer\n";
    return 1;
  }
  run.command = app.get_subcommands().front()->get_name();

  int code = 0;
  try {
    if (*schedule) cmd_schedule(run, growth, horizon, seeds, out);
    if (*plan) cmd_plan(run, schedule_file, policy_file);
    if (*verify) cmd_verify(run, spec_file, cert_file);
    if (*correlate) cmd_correlate(run, spec_file, f_file, stage, level, from, to, tolerance, table_out);
    if (*spectrum) cmd_spectrum(run, table_file, order, grid, exact, sum_horizon);
    if (*simulate) cmd_simulate(run, kind, spec_file, cov_file, config_file, depth, steps, length, f_file, stage, level);
    if (*lemma3) cmd_lemma3(run, walsh_file, delta, lemma_horizon);
    if (*report) cmd_report(run, plan_dir, grid);
  } catch (const ViolationExit& e) {
    std::cerr << "violation: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    run.manifest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
