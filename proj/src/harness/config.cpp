#include "descentlab/harness/config.hpp"

#include "descentlab/harness/csv.hpp"
#include "descentlab/types.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace descentlab::harness {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) {
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

// every integer parameter is a count
std::int64_t parse_count(const std::string& key, const std::string& text) {
  const auto v = parse_number<std::int64_t>(key, text);
  if (v < 0) {
    throw ConfigError("config key '" + key + "' must be nonnegative");
  }
  return v;
}

ParamValue parse_value(const ParamSpec& spec, const std::string& text) {
  switch (spec.type) {
    case ParamType::integer:
      return parse_count(spec.key, text);
    case ParamType::real:
      return parse_number<double>(spec.key, text);
    case ParamType::text:
      return text;
    case ParamType::integer_list: {
      std::vector<std::int64_t> out;
      for (const auto& item : split_list(text)) {
        out.push_back(parse_count(spec.key, item));
      }
      return out;
    }
    case ParamType::real_list: {
      std::vector<double> out;
      for (const auto& item : split_list(text)) {
        out.push_back(parse_number<double>(spec.key, item));
      }
      return out;
    }
  }
  throw ConfigError("unsupported parameter type");
}

ParamSpec count_param(std::string key, std::string def, std::string help) {
  return {std::move(key), ParamType::integer, std::move(def), std::move(help)};
}
ParamSpec real_param(std::string key, std::string def, std::string help) {
  return {std::move(key), ParamType::real, std::move(def), std::move(help)};
}
ParamSpec text_param(std::string key, std::string def, std::string help) {
  return {std::move(key), ParamType::text, std::move(def), std::move(help)};
}
ParamSpec counts_param(std::string key, std::string def, std::string help) {
  return {std::move(key), ParamType::integer_list, std::move(def), std::move(help)};
}
ParamSpec reals_param(std::string key, std::string def, std::string help) {
  return {std::move(key), ParamType::real_list, std::move(def), std::move(help)};
}

const std::map<std::string, std::vector<ParamSpec>, std::less<>>& schemas() {
  static const std::map<std::string, std::vector<ParamSpec>, std::less<>> table = {
      {"sparse-risk",
       {count_param("d", "100", "number of covariates"),
        count_param("n", "40", "training samples"),
        real_param("w_norm_sq", "1", "squared norm of the true weights (spread evenly)"),
        real_param("noise_var", "0.04", "noise variance sigma^2"),
        counts_param("p_grid", "0,10,20,30,35,38,39,40,41,42,45,50,60,70,80,90,100",
                     "subset sizes to evaluate"),
        count_param("trials", "500", "Monte Carlo trials per p"),
        count_param("test_points", "100", "fresh test draws per trial")}},
      {"rff-sweep",
       {text_param("data", "auto", "auto | mnist | synthetic"),
        count_param("n_train", "1000", "training samples"),
        count_param("n_test", "1000", "test samples"),
        counts_param("n_grid", "20,50,100,250,500,1000,2000,4000,8000", "feature counts N"),
        real_param("bandwidth", "5", "kernel length scale for MNIST pixels in [0,1]"),
        count_param("repeats", "3", "independent maps per N"),
        count_param("synthetic_dim", "4", "input dimension of the synthetic target"),
        count_param("synthetic_centers", "20", "kernel centers in the synthetic target"),
        real_param("synthetic_bandwidth", "0.3", "length scale for synthetic target and maps"),
        real_param("synthetic_noise", "0", "label noise standard deviation (synthetic)")}},
      {"kernel-approx",
       {count_param("n_points", "50", "points drawn from N(0, I)"),
        count_param("dim", "3", "input dimension"),
        real_param("bandwidth", "1", "kernel length scale"),
        counts_param("n_grid", "100,1000,10000", "feature counts N"),
        count_param("maps", "20", "independent maps per N")}},
      {"implicit-bias",
       {count_param("n", "50", "points"),
        count_param("d", "2", "dimension"),
        real_param("margin", "0.5", "minimum margin of the generator"),
        text_param("loss", "logistic", "logistic | exponential"),
        count_param("iters", "100000", "gradient descent iterations"),
        real_param("step_fraction", "0.9", "step size as a fraction of 2/(beta sigma_max^2)"),
        count_param("record_every", "100", "trajectory decimation"),
        real_param("gap_threshold", "0.05", "final direction gap counted as converged")}},
      {"polyfit",
       {count_param("n", "20", "noisy samples"),
        count_param("degree", "20", "Legendre degree"),
        real_param("noise", "0.5", "noise standard deviation"),
        reals_param("truth_coeffs", "", "monomial coefficients c0..c3; empty = random cubic"),
        text_param("method", "pinv", "pinv | gd"),
        count_param("grid_points", "512", "evaluation grid size")}},
      {"bias-variance",
       {counts_param("degrees", "3,20", "Legendre degrees"),
        count_param("n", "20", "training samples per trial"),
        real_param("noise", "0.1", "noise standard deviation"),
        reals_param("truth_coeffs", "0,-0.5,0,1", "monomial coefficients of the truth"),
        count_param("trials", "2000", "Monte Carlo trials"),
        count_param("probe_points", "64", "probe grid size on [-1, 1]")}},
      {"emc",
       {text_param("model", "linear", "linear | rff"),
        count_param("d", "30", "input dimension"),
        count_param("n_features", "30", "RFF feature count (model = rff)"),
        real_param("bandwidth", "1", "RFF kernel length scale (model = rff)"),
        real_param("noise", "1", "label noise standard deviation"),
        real_param("eps", "1e-6", "training-error threshold"),
        counts_param("n_grid", "10,20,25,28,29,30,31,32,35,40", "increasing sample sizes"),
        count_param("trials", "5", "trials per sample size")}},
  };
  return table;
}

}  // namespace

std::int64_t ExperimentConfig::integer(const std::string& key) const {
  return std::get<std::int64_t>(params.at(key));
}

std::size_t ExperimentConfig::count(const std::string& key) const {
  const std::int64_t v = integer(key);
  if (v < 0) {
    throw ConfigError("config key '" + key + "' must be nonnegative");
  }
  return static_cast<std::size_t>(v);
}

double ExperimentConfig::real(const std::string& key) const {
  return std::get<double>(params.at(key));
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  return std::get<std::string>(params.at(key));
}

std::vector<std::size_t> ExperimentConfig::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (std::int64_t v : std::get<std::vector<std::int64_t>>(params.at(key))) {
    if (v < 0) {
      throw ConfigError("config key '" + key + "' must hold nonnegative integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

const std::vector<double>& ExperimentConfig::reals(const std::string& key) const {
  return std::get<std::vector<double>>(params.at(key));
}

std::string format_param(const ParamValue& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const std::vector<std::int64_t>& l) const {
      std::string out;
      for (std::size_t i = 0; i < l.size(); ++i) {
        out += (i ? "," : "") + std::to_string(l[i]);
      }
      return out;
    }
    std::string operator()(const std::vector<double>& l) const {
      std::string out;
      for (std::size_t i = 0; i < l.size(); ++i) {
        out += (i ? "," : "") + format_double(l[i]);
      }
      return out;
    }
  };
  return std::visit(Visitor{}, v);
}

std::vector<std::string> ExperimentConfig::echo() const {
  std::vector<std::string> lines;
  lines.push_back("experiment = " + experiment);
  lines.push_back("seed = " + std::to_string(seed));
  for (const auto& [key, value] : params) {
    lines.push_back(key + " = " + format_param(value));
  }
  return lines;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!out.emplace(key, std::move(value)).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : schemas()) {
      out.push_back(name);
    }
    return out;
  }();
  return names;
}

const std::vector<ParamSpec>& experiment_schema(std::string_view experiment) {
  const auto it = schemas().find(experiment);
  if (it == schemas().end()) {
    throw ConfigError("unknown experiment '" + std::string(experiment) + "'");
  }
  return it->second;
}

ExperimentConfig resolve_config(const std::map<std::string, std::string>& raw,
                                const Overrides& overrides) {
  ExperimentConfig cfg;
  const auto file_experiment = raw.find("experiment");
  if (overrides.experiment) {
    if (file_experiment != raw.end() && file_experiment->second != *overrides.experiment) {
      throw ConfigError("config file is for experiment '" + file_experiment->second +
                        "', not '" + *overrides.experiment + "'");
    }
    cfg.experiment = *overrides.experiment;
  } else if (file_experiment != raw.end()) {
    cfg.experiment = file_experiment->second;
  } else {
    throw ConfigError("config does not name an experiment");
  }
  const std::vector<ParamSpec>& schema = experiment_schema(cfg.experiment);

  if (auto it = raw.find("seed"); it != raw.end()) {
    cfg.seed = parse_number<std::uint64_t>("seed", it->second);
  }
  if (overrides.seed) {
    cfg.seed = *overrides.seed;
  }
  if (auto it = raw.find("output"); it != raw.end()) {
    cfg.output_path = it->second;
  }
  if (overrides.output_path) {
    cfg.output_path = *overrides.output_path;
  }
  if (cfg.output_path.empty()) {
    cfg.output_path = cfg.experiment + ".csv";
  }
  if (auto it = raw.find("threads"); it != raw.end()) {
    cfg.threads = parse_number<std::size_t>("threads", it->second);
  }
  if (overrides.threads) {
    cfg.threads = *overrides.threads;
  }
  cfg.threads = std::max<std::size_t>(cfg.threads, 1);

  for (const auto& [key, value] : raw) {
    if (key == "experiment" || key == "seed" || key == "output" || key == "threads") {
      continue;
    }
    const bool known = std::any_of(schema.begin(), schema.end(),
                                   [&](const ParamSpec& s) { return s.key == key; });
    if (!known) {
      throw ConfigError("unknown key '" + key + "' for experiment '" + cfg.experiment + "'");
    }
  }
  for (const ParamSpec& spec : schema) {
    const auto it = raw.find(spec.key);
    cfg.params[spec.key] = parse_value(spec, it != raw.end() ? it->second : spec.default_value);
  }
  return cfg;
}

}  // namespace descentlab::harness
