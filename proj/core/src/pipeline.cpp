#include "multipeak/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include "multipeak/errors.hpp"
#include "multipeak/rescaling.hpp"

namespace multipeak {

namespace {

using json = nlohmann::ordered_json;

const char* const module = "pipeline";

constexpr std::pair<Command, std::string_view> command_names[] = {
    {Command::constants, "constants"}, {Command::ground_state, "ground-state"},
    {Command::ansatz, "ansatz"},       {Command::reduce, "reduce"},
    {Command::solve, "solve"},         {Command::rescale, "rescale"},
    {Command::validate, "validate"},   {Command::sweep, "sweep"},
};

std::string format(double x, int digits = 17) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, x);
  return buffer;
}

/// Non-finite numbers become null in JSON.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::io, module, "writable output file", path.string());
  out << text;
  if (!out) raise(ErrorKind::io, module, "writable output file", "write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& document) {
  write_text(path, document.dump(2) + "\n");
}

json error_json(const std::exception& error) {
  json out;
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    out["kind"] = std::string(to_string(e->kind()));
    out["module"] = e->where();
    out["expectation"] = e->expectation();
  }
  out["message"] = error.what();
  return out;
}

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const Check& c : checks)
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", number(c.value)},
                   {"bound", number(c.bound)}});
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json interval_json(const AdmissibleInterval& interval) {
  return {{"r_min", interval.r_min},
          {"r_max", interval.r_max},
          {"r_mid", interval.r_mid()},
          {"c", interval.c}};
}

json report_json(const SolveReport& r) {
  json peaks = json::array();
  for (const PeakLocation& p : r.peaks)
    peaks.push_back({{"vertex", {p.vertex[0], p.vertex[1], p.vertex[2]}},
                     {"extremum", {p.extremum[0], p.extremum[1], p.extremum[2]}},
                     {"value", p.value},
                     {"offset", p.offset}});
  return {{"eta", r.eta},
          {"log_eta", std::log(r.eta)},
          {"r_eta", r.r_eta},
          {"r_over_log_eta", r.r_over_log_eta},
          {"sigma", r.sigma},
          {"residual_w", r.residual_w},
          {"aux_tolerance", r.aux_tolerance},
          {"projected_residual", r.projected_residual},
          {"nu_norm", r.nu_norm},
          {"inverse_bound", r.inverse_bound},
          {"charge", r.charge},
          {"distance_to_peaks", r.distance_to_peaks},
          {"full_gradient", r.full_gradient},
          {"min_value", r.min_value},
          {"max_value", r.max_value},
          {"sign_change", r.sign_change},
          {"peaks", peaks}};
}

void write_scan_csv(const std::filesystem::path& path, const ReducedScan& scan) {
  std::vector<std::pair<const ScanPoint*, bool>> rows;
  for (const ScanPoint& p : scan.points) rows.emplace_back(&p, false);
  for (const ScanPoint& p : scan.refinement) rows.emplace_back(&p, true);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first->r < b.first->r; });
  std::ostringstream out;
  out << "r,sigma,action_w,expansion,leading,residual,nu_norm,projected_residual,"
         "outer_iterations,krylov_iterations,refinement\n";
  for (const auto& [p, refined] : rows)
    out << format(p->r) << ',' << format(p->sigma) << ',' << format(p->action_w) << ','
        << format(p->expansion) << ',' << format(p->leading) << ',' << format(p->residual) << ','
        << format(p->nu_norm) << ',' << format(p->projected_residual) << ','
        << p->outer_iterations << ',' << p->krylov_iterations << ',' << (refined ? 1 : 0) << '\n';
  write_text(path, out.str());
}

/// Runs f(i) for i < n on up to `threads` workers; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
  std::vector<T> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) results[i] = f(i);
  };
  const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(threads));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  return results;
}

struct Outcome {
  json document;
  bool passed = false;
};

/// Runs `body` and turns an escaping numerical error into a failed outcome.
Outcome guarded(double eta, std::ostream& log, std::mutex& log_mutex,
                const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const Error& error) {
    if (error.is_configuration_error()) throw;
    outcome.document = {{"eta", eta}, {"error", error_json(error)}};
    outcome.passed = false;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::lock_guard lock(log_mutex);
  log << "eta = " << format(eta, 6) << " (log " << format(std::log(eta), 6) << "): "
      << (outcome.passed ? "pass" : "FAIL") << " in " << format(seconds, 3) << " s";
  if (outcome.document.contains("error"))
    log << ": " << outcome.document["error"]["message"].get<std::string>();
  log << '\n';
  return outcome;
}

json constants_json(const RunConfig& config) {
  const Dimension dim = config.dimension();
  const SignPattern pattern = config.pattern();
  const double kappa = pair_coupling(pattern);
  json couplings = json::array();
  for (double eta : config.eta_values()) {
    const CouplingParams c{eta, dim};
    const std::optional<double> bound = bound_state_energy(c);
    couplings.push_back({{"eta", eta},
                         {"log_eta", std::log(eta)},
                         {"beta_one", beta_one(c)},
                         {"bound_state_energy", bound ? json(*bound) : json(nullptr)}});
  }
  return {{"p_star", p_star()},
          {"p", config.p},
          {"dim", config.dim},
          {"p_star_threshold", p_star_threshold(config.p)},
          {"peaks", pattern.size()},
          {"signs", pattern.deltas()},
          {"cyclic_sum", pattern.cyclic_sum()},
          {"pair_coupling", kappa},
          {"chi", chi(pattern, config.p)},
          {"interval_c", config.interval_c > 0.0 ? config.interval_c : 8.0 * kappa},
          {"ell", pattern.size() >= 4 ? json(ell(pattern.size())) : json(nullptr)},
          {"green_far_field_prefactor", green_far_field_prefactor(dim)},
          {"couplings", couplings}};
}

json profile_json(const RadialProfile& profile) {
  double worst = 0.0;
  for (double s = 0.25; s <= 12.0; s += 0.25)
    worst = std::max(worst, std::abs(profile.ode_residual(s)));
  return {{"dim", profile.dim().value()},
          {"p", profile.p()},
          {"peak", profile.peak()},
          {"tail_amplitude", profile.tail_amplitude()},
          {"theta", profile.theta()},
          {"ground_action", ground_state_action(profile)},
          {"h1_norm_squared", h1_norm_squared(profile)},
          {"matched_radius", profile.matched_radius()},
          {"matching_defect", profile.matching_defect()},
          {"max_ode_residual", worst}};
}

std::string profile_file(const RunConfig& config) {
  return "ground_state_" + std::to_string(config.dim) + "_" + format(config.p, 6) + ".csv";
}

PeakConfiguration configuration_at(const RunConfig& config, double eta, double r) {
  return PeakConfiguration{config.dimension(), config.p, eta, r, config.pattern()};
}

double interval_constant(const RunConfig& config) {
  return config.interval_c > 0.0 ? config.interval_c : 8.0 * pair_coupling(config.pattern());
}

Outcome ansatz_outcome(const RunConfig& config, const RadialProfile& profile, double eta) {
  const AdmissibleInterval interval =
      admissible_interval(eta, interval_constant(config), chi(config.pattern(), config.p), profile);
  const double r = config.r.value_or(interval.r_mid());
  const PeakConfiguration peaks = configuration_at(config, eta, r);
  const auto space = FieldSpace::create(config.grid(), eta);
  const PeakField field(peaks, profile, space);
  const EtaFunction zero = EtaFunction::zero(space);
  const double kc0 = peaks.peak_count() * field.ground_action();
  const double action_w = field.action(zero);
  const double residual = field.residual_norm();
  const double scale = residual_scale(config.dimension(), config.p, r, eta);
  const bool inside = r >= interval.r_min && r <= interval.r_max;
  std::vector<Check> checks{{"radius_admissible", inside, r, interval.r_max}};
  json document{{"eta", eta},
                {"interval", interval_json(interval)},
                {"r", r},
                {"action_w", action_w},
                {"action_excess", action_w - kc0},
                {"expansion_F", expansion_F(peaks, profile)},
                {"expansion_leading", expansion_leading(peaks, profile)},
                {"residual_w", residual},
                {"residual_scale", scale},
                {"residual_over_scale", residual / scale},
                {"charge", field.charge()},
                {"truncation_defect", truncation_defect(field.superposition())},
                {"checks", checks_json(checks)}};
  return {document, all_passed(checks)};
}

Outcome reduce_outcome(const RunConfig& config, const RadialProfile& profile, double eta) {
  const AdmissibleInterval interval =
      admissible_interval(eta, interval_constant(config), chi(config.pattern(), config.p), profile);
  const double r = config.r.value_or(interval.r_mid());
  const auto space = FieldSpace::create(config.grid(), eta);
  ReductionWorkspace ws(configuration_at(config, eta, r), profile, space, config.tolerances);
  const AuxiliaryResult& aux = ws.solve_auxiliary();
  const double bound = ws.inverse_bound(static_cast<unsigned>(config.seed));
  const double nu = norm(aux.nu);
  std::vector<Check> checks{
      {"auxiliary_residual", aux.projected_residual <= ws.aux_tolerance(), aux.projected_residual,
       ws.aux_tolerance()},
      {"nu_bound", nu <= 2.0 * bound * ws.residual_norm(), nu, 2.0 * bound * ws.residual_norm()}};
  json document{{"eta", eta},
                {"interval", interval_json(interval)},
                {"r", r},
                {"residual_w", ws.residual_norm()},
                {"aux_tolerance", ws.aux_tolerance()},
                {"projected_residual", aux.projected_residual},
                {"history", aux.history},
                {"contraction", number(aux.contraction)},
                {"krylov_iterations", aux.krylov_iterations},
                {"nu_norm", nu},
                {"inverse_bound", bound},
                {"sigma", reduced_value(ws)},
                {"full_gradient", norm(ws.full_gradient(aux.nu))},
                {"checks", checks_json(checks)}};
  return {document, all_passed(checks)};
}

Outcome solve_outcome(const RunConfig& config, const RadialProfile& profile, double eta,
                      std::optional<EtaSolve>* keep = nullptr) {
  EtaSolve result = solve_eta(config, profile, eta);
  write_scan_csv(config.out / tagged_name("scan", eta, "csv"), result.scan);
  save_snapshot(result.solution.u, config.out / tagged_name("solution", eta, "bin"));
  const std::vector<Check> checks = solution_checks(result);
  const SolveReport& report = result.solution.report;
  const PeakConfiguration at_minimum = configuration_at(config, eta, report.r_eta);
  json document = report_json(report);
  document["interval"] = interval_json(result.scan.interval);
  document["scan_points"] = result.scan.points.size();
  document["refinement_points"] = result.scan.refinement.size();
  document["expansion_F"] = expansion_F(at_minimum, profile);
  document["expansion_leading"] = expansion_leading(at_minimum, profile);
  document["expansion_error"] = std::abs(report.sigma - expansion_F(at_minimum, profile));
  document["leading_error"] = std::abs(report.sigma - expansion_leading(at_minimum, profile));
  document["checks"] = checks_json(checks);
  const bool passed = all_passed(checks);
  if (keep) *keep = std::move(result);
  return {document, passed};
}

std::vector<Outcome> per_eta(const RunConfig& config, std::ostream& log,
                             const std::function<Outcome(double)>& body) {
  const std::vector<double> etas = config.eta_values();
  std::mutex log_mutex;
  return parallel_map<Outcome>(etas.size(), config.threads, [&](std::size_t i) {
    return guarded(etas[i], log, log_mutex, [&] { return body(etas[i]); });
  });
}

json outcomes_json(const std::vector<Outcome>& outcomes) {
  json out = json::array();
  for (const Outcome& o : outcomes) out.push_back(o.document);
  return out;
}

bool outcomes_passed(const std::vector<Outcome>& outcomes) {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.passed; });
}

json config_json(const RunConfig& config) {
  json out;
  std::istringstream lines(to_text(config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

json envelope(const RunConfig& config, Command command) {
  return {{"command", std::string(to_string(command))},
          {"timestamp", timestamp()},
          {"config", config_json(config)}};
}

/// Trend checks over a sweep ordered by eta.
std::vector<Check> sweep_checks(const std::vector<Outcome>& outcomes) {
  std::vector<double> gap;
  std::vector<double> distance;
  for (const Outcome& o : outcomes) {
    if (!o.document.contains("r_over_log_eta")) return {};
    gap.push_back(std::abs(o.document["r_over_log_eta"].get<double>() - 1.0));
    distance.push_back(o.document["distance_to_peaks"].get<double>());
  }
  if (gap.size() < 2) return {};
  bool shrinking = true;
  bool decreasing = true;
  for (std::size_t i = 1; i < gap.size(); ++i) {
    shrinking = shrinking && gap[i] < gap[i - 1];
    decreasing = decreasing && distance[i] < distance[i - 1];
  }
  return {{"ratio_gap_shrinking", shrinking, gap.back(), gap.front()},
          {"distance_to_peaks_decreasing", decreasing, distance.back(), distance.front()}};
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<Outcome>& outcomes) {
  std::ostringstream out;
  out << "eta,log_eta,r_eta,r_over_log_eta,residual_w,nu_norm,inverse_bound,sigma,"
         "expansion_error,leading_error,distance_to_peaks\n";
  for (const Outcome& o : outcomes) {
    const json& d = o.document;
    if (!d.contains("r_eta")) continue;
    out << format(d["eta"].get<double>()) << ',' << format(d["log_eta"].get<double>()) << ','
        << format(d["r_eta"].get<double>()) << ',' << format(d["r_over_log_eta"].get<double>())
        << ',' << format(d["residual_w"].get<double>()) << ','
        << format(d["nu_norm"].get<double>()) << ',' << format(d["inverse_bound"].get<double>())
        << ',' << format(d["sigma"].get<double>()) << ','
        << format(d["expansion_error"].get<double>()) << ','
        << format(d["leading_error"].get<double>()) << ','
        << format(d["distance_to_peaks"].get<double>()) << '\n';
  }
  write_text(path, out.str());
}

json validation_json(const ValidationSummary& summary) {
  json entries = json::array();
  for (const ValidationEntry& e : summary.entries) {
    json metrics;
    for (const auto& [key, value] : e.metrics) metrics[key] = number(value);
    entries.push_back(
        {{"name", e.name}, {"gated", e.gated}, {"passed", e.passed}, {"metrics", metrics}});
  }
  return {{"passed", summary.passed()}, {"entries", entries}};
}

int exit_status(bool passed) { return passed ? 0 : 3; }

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [command, text] : command_names)
    if (text == name) return command;
  return std::nullopt;
}

std::string_view to_string(Command command) {
  for (const auto& [c, text] : command_names)
    if (c == command) return text;
  return "unknown";
}

std::string profile_key(const GroundStateParams& p) {
  std::string key = std::to_string(p.dim.value()) + "|" + format(p.p) + "|" + format(p.s_max) +
                    "|" + std::to_string(p.node_count) + "|" + format(p.shooting_tolerance) + "|" +
                    format(p.tail_threshold) + "|" + format(p.min_match_radius);
  if (p.bracket) key += "|" + format(p.bracket->first) + "|" + format(p.bracket->second);
  return key;
}

std::shared_ptr<const RadialProfile> ProfileCache::get(const GroundStateParams& params) {
  const std::string key = profile_key(params);
  std::lock_guard lock(mutex_);
  auto& slot = profiles_[key];
  if (!slot) slot = std::make_shared<const RadialProfile>(solve_ground_state(params));
  return slot;
}

std::string tagged_name(std::string_view name, double value, std::string_view extension) {
  return std::string(name) + "_" + format(value, 6) + "." + std::string(extension);
}

EtaSolve solve_eta(const RunConfig& config, const RadialProfile& profile, double eta) {
  const auto space = FieldSpace::create(config.grid(), eta);
  const PeakConfiguration pattern = configuration_at(config, eta, 1.0);
  ReducedScan scan = minimize_reduced(eta, pattern, profile, space, config.scan_options());
  ReductionWorkspace ws(configuration_at(config, eta, scan.r_eta), profile, space,
                        config.tolerances);
  ws.solve_auxiliary();
  Solution solution = assemble_solution(ws, scan);
  return {std::move(scan), std::move(solution)};
}

std::vector<Check> solution_checks(const EtaSolve& result) {
  const SolveReport& r = result.solution.report;
  const double nu_bound = 2.0 * r.inverse_bound * r.residual_w;
  return {{"interior_minimizer", result.scan.interior, r.r_eta, result.scan.interval.r_max},
          {"auxiliary_residual", r.projected_residual <= r.aux_tolerance, r.projected_residual,
           r.aux_tolerance},
          {"nu_bound", r.nu_norm <= nu_bound, r.nu_norm, nu_bound},
          {"sign_change", r.sign_change, r.min_value, r.max_value}};
}

int run_command(Command command, const RunConfig& input, std::ostream& log) {
  RunConfig config = input;
  config.validator.seed = config.seed;
  if (command == Command::rescale && !config.alpha)
    raise(ErrorKind::configuration, module, "alpha and omega for rescale",
          "the configuration gives an eta list");
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) raise(ErrorKind::io, module, "writable output directory", config.out.string());

  ProfileCache cache;
  auto profile = [&] { return cache.get(config.ground_state()); };

  switch (command) {
    case Command::constants: {
      const json document = constants_json(config);
      write_json(config.out / "constants.json", document);
      log << "p_* = " << format(p_star(), 12) << ", pair coupling "
          << format(document["pair_coupling"].get<double>(), 6) << ", chi "
          << format(document["chi"].get<double>(), 6) << '\n';
      return 0;
    }
    case Command::ground_state: {
      const auto phi = profile();
      save_profile(*phi, config.out / profile_file(config));
      json document = profile_json(*phi);
      write_json(config.out / "ground_state.json", document);
      log << "Phi(0) = " << format(phi->peak(), 12) << ", A = " << format(phi->tail_amplitude(), 12)
          << ", theta = " << format(phi->theta(), 12) << ", C0 = "
          << format(document["ground_action"].get<double>(), 12) << '\n';
      return 0;
    }
    case Command::ansatz:
    case Command::reduce:
    case Command::solve: {
      const auto phi = profile();
      auto body = [&](double eta) {
        if (command == Command::ansatz) return ansatz_outcome(config, *phi, eta);
        if (command == Command::reduce) return reduce_outcome(config, *phi, eta);
        return solve_outcome(config, *phi, eta);
      };
      const std::vector<Outcome> outcomes = per_eta(config, log, body);
      json document = envelope(config, command);
      document["results"] = outcomes_json(outcomes);
      const bool passed = outcomes_passed(outcomes);
      document["passed"] = passed;
      const std::string file = command == Command::solve ? "report.json"
                               : command == Command::ansatz ? "ansatz.json"
                                                            : "reduce.json";
      write_json(config.out / file, document);
      return exit_status(passed);
    }
    case Command::rescale: {
      const auto phi = profile();
      const std::vector<double> etas = config.eta_values();
      std::mutex log_mutex;
      const std::vector<Outcome> outcomes =
          parallel_map<Outcome>(etas.size(), config.threads, [&](std::size_t i) {
            return guarded(etas[i], log, log_mutex, [&] {
              const double omega = config.omega[i];
              std::optional<EtaSolve> solved;
              Outcome outcome = solve_outcome(config, *phi, etas[i], &solved);
              const EtaFunction& u = solved->solution.u;
              const WeakResidual before =
                  weak_form_residual(u, OmegaProblem{etas[i], 1.0, config.dimension(), config.p});
              const EtaFunction scaled =
                  rescale_solution(u, config.p, omega, ScaleDirection::from_unit);
              const WeakResidual after = weak_form_residual(
                  scaled, OmegaProblem{*config.alpha, omega, config.dimension(), config.p});
              save_snapshot(scaled, config.out / tagged_name("rescaled", omega, "bin"));
              const double consistency =
                  beta_consistency_check(*config.alpha, omega, config.dimension());
              std::vector<Check> checks{
                  {"beta_consistency", consistency <= 1e-12, consistency, 1e-12},
                  {"weak_residual_ratio", after.relative <= 10.0 * before.relative,
                   after.relative, 10.0 * before.relative}};
              outcome.document["omega"] = omega;
              outcome.document["alpha"] = *config.alpha;
              outcome.document["weak_residual_unit"] = {{"absolute", before.absolute},
                                                        {"relative", before.relative}};
              outcome.document["weak_residual_omega"] = {{"absolute", after.absolute},
                                                         {"relative", after.relative}};
              outcome.document["rescale_checks"] = checks_json(checks);
              outcome.passed = outcome.passed && all_passed(checks);
              return outcome;
            });
          });
      json document = envelope(config, command);
      document["results"] = outcomes_json(outcomes);
      const bool passed = outcomes_passed(outcomes);
      document["passed"] = passed;
      write_json(config.out / "rescale.json", document);
      return exit_status(passed);
    }
    case Command::validate: {
      const std::shared_ptr<const RadialProfile> profiles[] = {profile()};
      const ValidationSummary summary = run_validation(config.validator, profiles);
      json document = envelope(config, command);
      document["validation"] = validation_json(summary);
      write_json(config.out / "validate.json", document);
      for (const ValidationEntry& e : summary.entries)
        if (e.gated && !e.passed) log << "validation failed: " << e.name << '\n';
      return exit_status(summary.passed());
    }
    case Command::sweep: {
      write_json(config.out / "constants.json", constants_json(config));
      const auto phi = profile();
      save_profile(*phi, config.out / profile_file(config));
      const std::vector<Outcome> outcomes =
          per_eta(config, log, [&](double eta) { return solve_outcome(config, *phi, eta); });
      const std::vector<Check> trends = sweep_checks(outcomes);
      write_sweep_csv(config.out / "sweep.csv", outcomes);
      const std::shared_ptr<const RadialProfile> profiles[] = {phi};
      const ValidationSummary summary = run_validation(config.validator, profiles);
      json validation = envelope(config, Command::validate);
      validation["validation"] = validation_json(summary);
      write_json(config.out / "validate.json", validation);

      json document = envelope(config, command);
      document["ground_state"] = profile_json(*phi);
      document["results"] = outcomes_json(outcomes);
      document["trends"] = checks_json(trends);
      const bool passed = outcomes_passed(outcomes) && all_passed(trends) && summary.passed();
      document["passed"] = passed;
      write_json(config.out / "report.json", document);
      return exit_status(passed);
    }
  }
  return 3;
}

int exit_code_for(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error))
    return e->is_configuration_error() ? 2 : 3;
  return 3;
}

}  // namespace multipeak
