#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sparsereg::cli {

namespace {

std::string describe(int line, const std::string& field, const std::string& message) {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  if (!field.empty()) out += "field '" + field + "': ";
  return out + message;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a number, got '" + text + "'");
  return value;
}

template <class Int>
Int parse_int(const std::string& text) {
  Int value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected an integer, got '" + text + "'");
  return value;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  // nullopt: omit from the text form
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class T>
Field number_field(const char* section, const char* key, T ExperimentConfig::*member) {
  return Field{
      section, key,
      [member](ExperimentConfig& c, const std::string& v) {
        if constexpr (std::is_floating_point_v<T>) {
          c.*member = parse_double(v);
        } else {
          c.*member = parse_int<T>(v);
        }
      },
      [member](const ExperimentConfig& c) -> std::optional<std::string> {
        if constexpr (std::is_floating_point_v<T>) {
          return format_double(c.*member);
        } else {
          return std::to_string(c.*member);
        }
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"problem", "kind",
       [](ExperimentConfig& c, const std::string& v) { c.kind = parse_problem_kind(v); },
       [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.kind); }},
      {"problem", "truth",
       [](ExperimentConfig& c, const std::string& v) { c.truth = parse_truth_model(v); },
       [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.truth); }},
      number_field("problem", "n", &ExperimentConfig::n),
      number_field("problem", "m", &ExperimentConfig::m),
      number_field("problem", "sparsity", &ExperimentConfig::sparsity),
      number_field("problem", "q", &ExperimentConfig::q),
      number_field("problem", "p", &ExperimentConfig::p),
      number_field("problem", "decay", &ExperimentConfig::decay),
      number_field("problem", "kernel_width", &ExperimentConfig::kernel_width),
      number_field("problem", "epsilon", &ExperimentConfig::epsilon),
      {"penalty", "weights",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "uniform") {
           c.weights.reset();
           return;
         }
         std::vector<double> w;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) w.push_back(parse_double(trim(item)));
         if (w.empty()) throw std::invalid_argument("expected 'uniform' or a comma-separated list");
         c.weights = std::move(w);
       },
       [](const ExperimentConfig& c) -> std::optional<std::string> {
         if (!c.weights) return "uniform";
         std::string out;
         for (std::size_t i = 0; i < c.weights->size(); ++i) {
           if (i > 0) out += ", ";
           out += format_double((*c.weights)[i]);
         }
         return out;
       }},
      number_field("penalty", "weight", &ExperimentConfig::weight),
      number_field("sweep", "delta_min", &ExperimentConfig::delta_min),
      number_field("sweep", "delta_max", &ExperimentConfig::delta_max),
      number_field("sweep", "delta_count", &ExperimentConfig::delta_count),
      number_field("sweep", "c_alpha", &ExperimentConfig::c_alpha),
      number_field("sweep", "trials", &ExperimentConfig::trials),
      number_field("sweep", "validation_samples", &ExperimentConfig::validation_samples),
      number_field("sweep", "validation_radius", &ExperimentConfig::validation_radius),
      {"solve", "alpha",
       [](ExperimentConfig& c, const std::string& v) { c.alpha = parse_double(v); },
       [](const ExperimentConfig& c) -> std::optional<std::string> {
         if (!c.alpha) return std::nullopt;
         return format_double(*c.alpha);
       }},
      number_field("solve", "max_iter", &ExperimentConfig::max_iter),
      number_field("solve", "tol", &ExperimentConfig::tol),
      number_field("run", "seed", &ExperimentConfig::seed),
      {"run", "output",
       [](ExperimentConfig& c, const std::string& v) { c.output = v; },
       [](const ExperimentConfig& c) -> std::optional<std::string> { return c.output; }},
      number_field("run", "threads", &ExperimentConfig::threads),
  };
  return table;
}

void check(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(0, field, message);
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error(describe(line, field, message)),
      line_(line),
      field_(std::move(field)),
      message_(message) {}

void validate(const ExperimentConfig& c) {
  check(c.n > 0, "problem.n", "must be positive");
  check(c.m > 0, "problem.m", "must be positive");
  check(c.sparsity <= c.n, "problem.sparsity", "must not exceed n");
  check(c.q >= 1.0 && c.q <= 2.0, "problem.q", "must lie in [1, 2]");
  check(c.p == 1 || c.p == 2, "problem.p", "must be 1 or 2");
  check(c.decay > 0.0, "problem.decay", "must be positive");
  check(c.kernel_width > 0.0, "problem.kernel_width", "must be positive");
  check(c.epsilon >= 0.0, "problem.epsilon", "must be nonnegative");
  check(c.kind != ProblemKind::ToyNonlinear || c.p == 2, "problem.p",
        "toy-nonlinear problems support p = 2 only");
  check(c.truth != TruthModel::Range || c.q > 1.0, "problem.truth", "range truth needs q > 1");
  check(c.truth != TruthModel::Range || c.kind != ProblemKind::ToyNonlinear, "problem.truth",
        "range truth needs a linear operator");
  if (c.weights) {
    check(c.weights->size() == c.n, "penalty.weights", "needs exactly n entries");
    for (double w : *c.weights) check(w > 0.0 && std::isfinite(w), "penalty.weights", "entries must be positive");
  }
  check(c.weight > 0.0 && std::isfinite(c.weight), "penalty.weight", "must be positive");
  check(c.delta_count >= 1, "sweep.delta_count", "delta grid is empty");
  check(c.delta_min > 0.0, "sweep.delta_min", "must be positive");
  check(c.delta_max >= c.delta_min, "sweep.delta_max", "must be at least delta_min");
  check(c.c_alpha > 0.0, "sweep.c_alpha", "must be positive");
  check(c.trials >= 1, "sweep.trials", "must be at least 1");
  check(c.validation_samples >= 100, "sweep.validation_samples", "must be at least 100");
  check(c.validation_radius > 0.0, "sweep.validation_radius", "must be positive");
  check(!c.alpha || *c.alpha > 0.0, "solve.alpha", "must be positive");
  check(c.max_iter >= 1, "solve.max_iter", "must be at least 1");
  check(c.tol > 0.0, "solve.tol", "must be positive");
  check(!c.output.empty(), "run.output", "must not be empty");
  check(c.threads >= 1, "run.threads", "must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const Field& f : fields()) known = known || section == f.section;
      if (!known) throw ConfigError(line_no, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(line_no, key, "key outside of a section");
    const std::string name = section + "." + key;
    const Field* field = nullptr;
    for (const Field& f : fields()) {
      if (section == f.section && key == f.key) field = &f;
    }
    if (field == nullptr) throw ConfigError(line_no, name, "unknown key");
    if (seen.count(name) != 0) throw ConfigError(line_no, name, "duplicate key");
    seen[name] = line_no;
    if (value.empty()) throw ConfigError(line_no, name, "missing value");
    try {
      field->set(config, value);
    } catch (const std::exception& e) {
      throw ConfigError(line_no, name, e.what());
    }
  }
  try {
    validate(config);
  } catch (const ConfigError& e) {
    const auto it = seen.find(e.field());
    if (it == seen.end()) throw;
    throw ConfigError(it->second, e.field(), e.message());
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    const auto value = f.get(config);
    if (!value) continue;
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + *value + "\n";
  }
  return out;
}

ProblemOptions ExperimentConfig::problem_options() const {
  ProblemOptions o;
  o.kind = kind;
  o.truth = truth;
  o.n = n;
  o.m = m;
  o.sparsity = sparsity;
  o.q = q;
  o.p = p;
  if (weights) o.weights = Eigen::Map<const Eigen::VectorXd>(weights->data(), static_cast<Eigen::Index>(weights->size()));
  o.weight = weight;
  o.decay = decay;
  o.kernel_width = kernel_width;
  o.epsilon = epsilon;
  o.seed = seed;
  return o;
}

std::vector<double> ExperimentConfig::delta_grid() const {
  return log_delta_grid(delta_min, delta_max, delta_count);
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s;
  s.p = p;
  s.max_iter = max_iter;
  s.tol = tol;
  return s;
}

}  // namespace sparsereg::cli
