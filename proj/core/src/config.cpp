#include "multipeak/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "multipeak/errors.hpp"
#include "multipeak/rescaling.hpp"

namespace multipeak {

namespace {

const char* const module = "config";

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    raise(ErrorKind::configuration, module, "typed value for '" + key + "'",
          "cannot read '" + text + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(parse_number<T>(key, trim(item)));
  if (out.empty())
    raise(ErrorKind::configuration, module, "non-empty list for '" + key + "'", "got nothing");
  return out;
}

std::string format(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T, typename Field>
Setter number(Field field) {
  return [field](RunConfig& c, const std::string& key, const std::string& text) {
    field(c) = parse_number<T>(key, text);
  };
}

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> table = {
      {"dim", number<int>([](RunConfig& c) -> int& { return c.dim; })},
      {"p", number<double>([](RunConfig& c) -> double& { return c.p; })},
      {"peaks", number<int>([](RunConfig& c) -> int& { return c.peaks; })},
      {"signs", [](RunConfig& c, const std::string& k,
                   const std::string& t) { c.signs = parse_list<int>(k, t); }},
      {"eta", [](RunConfig& c, const std::string& k,
                 const std::string& t) { c.eta = parse_list<double>(k, t); }},
      {"log_eta",
       [](RunConfig& c, const std::string& k, const std::string& t) {
         c.eta.clear();
         for (double x : parse_list<double>(k, t)) c.eta.push_back(std::exp(x));
       }},
      {"alpha", [](RunConfig& c, const std::string& k,
                   const std::string& t) { c.alpha = parse_number<double>(k, t); }},
      {"omega", [](RunConfig& c, const std::string& k,
                   const std::string& t) { c.omega = parse_list<double>(k, t); }},
      {"r", [](RunConfig& c, const std::string& k,
               const std::string& t) { c.r = parse_number<double>(k, t); }},
      {"grid_nodes", number<int>([](RunConfig& c) -> int& { return c.grid_nodes; })},
      {"half_width", number<double>([](RunConfig& c) -> double& { return c.half_width; })},
      {"gs_s_max", number<double>([](RunConfig& c) -> double& { return c.gs_s_max; })},
      {"gs_nodes", number<int>([](RunConfig& c) -> int& { return c.gs_nodes; })},
      {"scan_samples", number<int>([](RunConfig& c) -> int& { return c.scan_samples; })},
      {"interval_c", number<double>([](RunConfig& c) -> double& { return c.interval_c; })},
      {"refine_relative",
       number<double>([](RunConfig& c) -> double& { return c.refine_relative; })},
      {"aux_relative",
       number<double>([](RunConfig& c) -> double& { return c.tolerances.aux_relative; })},
      {"krylov_tolerance",
       number<double>([](RunConfig& c) -> double& { return c.tolerances.krylov; })},
      {"max_outer", number<int>([](RunConfig& c) -> int& { return c.tolerances.max_outer; })},
      {"max_krylov", number<int>([](RunConfig& c) -> int& { return c.tolerances.max_krylov; })},
      {"validator_samples",
       number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.validator.samples; })},
      {"validator_delta",
       number<double>([](RunConfig& c) -> double& { return c.validator.delta; })},
      {"validator_ball", number<double>([](RunConfig& c) -> double& { return c.validator.ball; })},
      {"validator_epsilon",
       number<double>([](RunConfig& c) -> double& { return c.validator.epsilon; })},
      {"out", [](RunConfig& c, const std::string&, const std::string& t) { c.out = t; }},
      {"seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.seed; })},
      {"threads", number<int>([](RunConfig& c) -> int& { return c.threads; })},
  };
  return table;
}

}  // namespace

SignPattern RunConfig::pattern() const {
  return signs.empty() ? SignPattern::alternating(peaks) : SignPattern(signs);
}

GridSpec RunConfig::grid() const {
  const bool two = dim == 2;
  return GridSpec{dimension(), half_width > 0.0 ? half_width : (two ? 64.0 : 56.0),
                  grid_nodes > 0 ? grid_nodes : (two ? 512 : 128)};
}

GroundStateParams RunConfig::ground_state() const {
  GroundStateParams params;
  params.dim = dimension();
  params.p = p;
  params.s_max = gs_s_max;
  params.node_count = gs_nodes;
  return params;
}

ScanOptions RunConfig::scan_options() const {
  ScanOptions options;
  options.samples = scan_samples;
  options.c = interval_c;
  options.refine_relative = refine_relative;
  options.tolerances = tolerances;
  return options;
}

std::vector<double> RunConfig::eta_values() const {
  if (!alpha) return eta;
  std::vector<double> out;
  for (double w : omega) out.push_back(alpha_omega(*alpha, w, dimension()));
  return out;
}

void RunConfig::validate() const {
  if (dim != 2 && dim != 3)
    raise(ErrorKind::configuration, module, "dimension 2 or 3", "got dim = " + std::to_string(dim));
  const double threshold = p_star();
  if (dim == 2 && !(p > threshold && p <= 3.0))
    raise(ErrorKind::configuration, module, "p_* < p <= 3 in two dimensions (p_* threshold)",
          "got p = " + format(p) + ", p_* = " + format(threshold));
  if (dim == 3 && !(p > threshold && p < 3.0))
    raise(ErrorKind::configuration, module, "p_* < p < 3 in three dimensions (p_* threshold)",
          "got p = " + format(p) + ", p_* = " + format(threshold));
  if (!signs.empty() && static_cast<int>(signs.size()) != peaks)
    raise(ErrorKind::configuration, module, "one sign per peak",
          std::to_string(signs.size()) + " signs for " + std::to_string(peaks) + " peaks");
  (void)pattern();  // sign condition
  if (alpha.has_value() == !eta.empty())
    raise(ErrorKind::configuration, module, "either an eta list or alpha with omega",
          alpha ? "both given" : "neither given");
  if (alpha && omega.empty())
    raise(ErrorKind::configuration, module, "omega list with alpha", "no omega given");
  if (!alpha && !omega.empty())
    raise(ErrorKind::configuration, module, "alpha with the omega list", "no alpha given");
  for (double w : omega)
    if (!(w > 0.0))
      raise(ErrorKind::configuration, module, "omega > 0", "got omega = " + format(w));
  for (double e : eta_values()) {
    if (!(e > std::exp(1.0)))
      raise(ErrorKind::configuration, module, "coupling eta > e for the admissible interval",
            "got eta = " + format(e));
    try {
      (void)CouplingParams::for_reduction(e, dimension());
    } catch (const Error& error) {
      raise(ErrorKind::configuration, module, error.expectation(), error.what());
    }
  }
  if (interval_c != 0.0 && !(interval_c > 4.0 * chi(pattern(), p)))
    raise(ErrorKind::configuration, module, "interval constant c > 4 chi",
          "got c = " + format(interval_c) + ", chi = " + format(chi(pattern(), p)));
  if (r && !(*r > 0.0))
    raise(ErrorKind::configuration, module, "positive radius r", "got r = " + format(*r));
  grid().validate();
  ground_state().validate();
  if (scan_samples < 17)
    raise(ErrorKind::configuration, module, "at least 17 scan samples",
          "got " + std::to_string(scan_samples));
  if (!(refine_relative > 0.0))
    raise(ErrorKind::configuration, module, "positive refinement width",
          "got " + format(refine_relative));
  if (!(tolerances.aux_relative > 0.0 && tolerances.krylov > 0.0 && tolerances.max_outer > 0 &&
        tolerances.max_krylov > 0))
    raise(ErrorKind::configuration, module, "positive solver tolerances and limits",
          "check aux_relative, krylov_tolerance, max_outer, max_krylov");
  validator.validate();
  if (threads < 1)
    raise(ErrorKind::configuration, module, "at least one thread", "got " + std::to_string(threads));
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::stringstream stream(text);
  std::string line;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      raise(ErrorKind::configuration, module, "key = value lines",
            "line " + std::to_string(number) + ": '" + content + "'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto entry = schema().find(key);
    if (entry == schema().end())
      raise(ErrorKind::configuration, module, "known configuration key",
            "line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      raise(ErrorKind::configuration, module, "each key at most once",
            "line " + std::to_string(number) + ": '" + key + "' repeated");
    entry->second(config, key, value);
  }
  if (seen.count("eta") && seen.count("log_eta"))
    raise(ErrorKind::configuration, module, "one of eta and log_eta", "both given");
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::io, module, "readable configuration file", path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream out;
  out << "dim = " << c.dim << "\np = " << format(c.p) << "\npeaks = " << c.peaks << '\n';
  if (!c.signs.empty()) out << "signs = " << join(c.signs) << '\n';
  if (c.alpha) {
    out << "alpha = " << format(*c.alpha) << "\nomega = " << join(c.omega) << '\n';
  } else if (!c.eta.empty()) {
    out << "eta = " << join(c.eta) << '\n';
  }
  if (c.r) out << "r = " << format(*c.r) << '\n';
  out << "grid_nodes = " << c.grid_nodes << "\nhalf_width = " << format(c.half_width)
      << "\ngs_s_max = " << format(c.gs_s_max) << "\ngs_nodes = " << c.gs_nodes
      << "\nscan_samples = " << c.scan_samples << "\ninterval_c = " << format(c.interval_c)
      << "\nrefine_relative = " << format(c.refine_relative)
      << "\naux_relative = " << format(c.tolerances.aux_relative)
      << "\nkrylov_tolerance = " << format(c.tolerances.krylov)
      << "\nmax_outer = " << c.tolerances.max_outer << "\nmax_krylov = " << c.tolerances.max_krylov
      << "\nvalidator_samples = " << c.validator.samples
      << "\nvalidator_delta = " << format(c.validator.delta)
      << "\nvalidator_ball = " << format(c.validator.ball)
      << "\nvalidator_epsilon = " << format(c.validator.epsilon) << "\nout = " << c.out.string()
      << "\nseed = " << c.seed << "\nthreads = " << c.threads << '\n';
  return out.str();
}

}  // namespace multipeak
