#include "coopbeacon/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace coopbeacon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_name(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const std::string_view item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (item.empty()) {
      throw std::invalid_argument("empty list element");
    }
    items.push_back(item);
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return items;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_integer(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

/// Comma list; an element "start:stop:step" expands to an inclusive range.
std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  for (std::string_view item : split_list(s)) {
    const auto c1 = item.find(':');
    if (c1 == std::string_view::npos) {
      out.push_back(parse_double(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw std::invalid_argument("range needs start:stop:step");
    }
    const double start = parse_double(item.substr(0, c1));
    const double stop = parse_double(item.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_double(item.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) {
      throw std::invalid_argument("range needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 100000) {
      throw std::invalid_argument("range expands to too many points");
    }
    for (long k = 0; k <= count; ++k) {
      out.push_back(start + static_cast<double>(k) * step);
    }
  }
  return out;
}

std::vector<int> parse_int_list(std::string_view s) {
  std::vector<int> out;
  for (std::string_view item : split_list(s)) {
    out.push_back(parse_integer<int>(item));
  }
  return out;
}

std::vector<Scheme> parse_scheme_list(std::string_view s) {
  std::vector<Scheme> out;
  for (std::string_view item : split_list(s)) {
    out.push_back(scheme_from_string(item));
  }
  return out;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& values, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += fmt(values[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) { return join(v, format_double); }
std::string join_ints(const std::vector<int>& v) {
  return join(v, [](int x) { return std::to_string(x); });
}

struct Field {
  std::function<void(ExperimentConfig&, std::string_view)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

#define COOPBEACON_DOUBLE(member) \
  Field{[](ExperimentConfig& c, std::string_view v) { c.member = parse_double(v); }, \
        [](const ExperimentConfig& c) { return format_double(c.member); }}
#define COOPBEACON_INT(member) \
  Field{[](ExperimentConfig& c, std::string_view v) { c.member = parse_integer<int>(v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }}
#define COOPBEACON_DLIST(member) \
  Field{[](ExperimentConfig& c, std::string_view v) { c.member = parse_double_list(v); }, \
        [](const ExperimentConfig& c) { return join_doubles(c.member); }}

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> fields = {
      {"seed", Field{[](ExperimentConfig& c, std::string_view v) { c.seed = parse_integer<std::uint64_t>(v); },
                     [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},

      {"sweep.schemes",
       Field{[](ExperimentConfig& c, std::string_view v) { c.schemes = parse_scheme_list(v); },
             [](const ExperimentConfig& c) {
               return join(c.schemes, [](Scheme s) { return std::string(to_string(s)); });
             }}},
      {"sweep.rho_db", COOPBEACON_DLIST(rho_grid_db)},
      {"sweep.n_trials",
       Field{[](ExperimentConfig& c, std::string_view v) { c.n_trials = parse_integer<std::uint64_t>(v); },
             [](const ExperimentConfig& c) { return std::to_string(c.n_trials); }}},
      {"sweep.sampler", Field{[](ExperimentConfig& c, std::string_view v) { c.sampler = sampler_from_string(trim(v)); },
                              [](const ExperimentConfig& c) { return std::string(to_string(c.sampler)); }}},

      {"protocol.alpha", COOPBEACON_DOUBLE(alpha)},
      {"protocol.d", COOPBEACON_INT(distance)},
      {"protocol.power_budget", COOPBEACON_DOUBLE(power_budget)},
      {"protocol.info_bits", COOPBEACON_INT(info_bits)},
      {"protocol.block_length", COOPBEACON_INT(block_length)},

      {"links.lambda_pt", COOPBEACON_DOUBLE(lambda_pt)},
      {"links.lambda_pr", COOPBEACON_DOUBLE(lambda_pr)},
      {"links.lambda_tr", COOPBEACON_DOUBLE(lambda_tr)},

      {"multiuser.pairs", Field{[](ExperimentConfig& c, std::string_view v) { c.pairs = parse_int_list(v); },
                                [](const ExperimentConfig& c) { return join_ints(c.pairs); }}},
      {"multiuser.lambda", COOPBEACON_DOUBLE(multiuser_lambda)},
      {"multiuser.pair", COOPBEACON_INT(pair_index)},

      {"diversity.fit_lo_db", COOPBEACON_DOUBLE(fit_lo_db)},
      {"diversity.fit_hi_db", COOPBEACON_DOUBLE(fit_hi_db)},

      {"activity.p_theta_t", COOPBEACON_DOUBLE(p_theta_t)},
      {"activity.p_theta_joint", COOPBEACON_DOUBLE(p_theta_joint)},
      {"activity.coherence", COOPBEACON_INT(coherence)},

      {"outage.epsilon", COOPBEACON_DLIST(epsilons)},
      {"imperfect.sigma2", COOPBEACON_DLIST(sigma2)},
      {"overhead.w1", COOPBEACON_DLIST(w1)},
      {"overhead.w2", COOPBEACON_DLIST(w2)},

      {"output.path", Field{[](ExperimentConfig& c, std::string_view v) { c.output_path = std::string(trim(v)); },
                            [](const ExperimentConfig& c) { return c.output_path; }}},
      {"output.format",
       Field{[](ExperimentConfig& c, std::string_view v) { c.format = table_format_from_string(trim(v)); },
             [](const ExperimentConfig& c) { return std::string(to_string(c.format)); }}},
      {"output.clamp_lower",
       Field{[](ExperimentConfig& c, std::string_view v) { c.clamp_lower = parse_bool(v); },
             [](const ExperimentConfig& c) { return std::string(c.clamp_lower ? "true" : "false"); }}},
  };
  return fields;
}

#undef COOPBEACON_DOUBLE
#undef COOPBEACON_INT
#undef COOPBEACON_DLIST

std::string where(int line) {
  return line > 0 ? " (line " + std::to_string(line) + ")" : " (command-line override)";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

// ---------------------------------------------------------------------------

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_name(trim(line.substr(1, line.size() - 2)))) {
        throw ConfigError("malformed section header" + where(line_no), std::string(line), line_no);
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value'" + where(line_no), std::string(line), line_no);
    }
    const std::string_view name = trim(line.substr(0, eq));
    if (!valid_name(name)) {
      throw ConfigError("invalid key name '" + std::string(name) + "'" + where(line_no), std::string(name), line_no);
    }
    const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
    if (cfg.entries_.contains(key)) {
      throw ConfigError("duplicate key '" + key + "'" + where(line_no), key, line_no);
    }
    cfg.entries_[key] = {std::string(trim(line.substr(eq + 1))), line_no};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  }
  return parse(in);
}

void KeyValueConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  if (!valid_name(key)) {
    throw ConfigError("invalid override key '" + key + "'", key);
  }
  set(key, std::string(trim(assignment.substr(eq + 1))), 0);
}

void KeyValueConfig::set(const std::string& key, std::string value, int line) {
  entries_[key] = {std::move(value), line};
}

std::optional<KeyValueConfig::Entry> KeyValueConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

TableFormat table_format_from_string(std::string_view name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  throw std::invalid_argument("unknown format '" + std::string(name) + "' (csv | json)");
}

std::string_view to_string(TableFormat f) noexcept { return f == TableFormat::Csv ? "csv" : "json"; }

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  const auto& fields = schema();
  for (const auto& [key, entry] : kv.entries()) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw ConfigError("unknown key '" + key + "'" + where(entry.line), key, entry.line);
    }
    try {
      it->second.read(cfg, entry.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("bad value for '" + key + "'" + where(entry.line) + ": " + e.what(), key, entry.line);
    }
  }
  if (!kv.find("seed")) {
    throw ConfigError("missing mandatory key 'seed'", "seed");
  }
  if (cfg.schemes.empty() || cfg.rho_grid_db.empty()) {
    throw ConfigError("sweep.schemes and sweep.rho_db must be nonempty");
  }
  for (int m : cfg.pairs) {
    if (m < 1) {
      throw ConfigError("multiuser.pairs entries must be >= 1", "multiuser.pairs");
    }
  }
  return cfg;
}

std::map<std::string, std::string> ExperimentConfig::to_kv() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : schema()) {
    out[key] = field.write(*this);
  }
  return out;
}

ProtocolConfig ExperimentConfig::protocol(double rho_db) const {
  ProtocolConfig cfg = ProtocolConfig::with_split(db_to_linear(rho_db), alpha, distance);
  cfg.power_budget = power_budget;
  cfg.info_bits = info_bits;
  cfg.block_length = block_length;
  cfg.validate();
  return cfg;
}

LinkTriple ExperimentConfig::links() const { return LinkTriple::direct(lambda_pt, lambda_pr, lambda_tr); }

ActivityModel ExperimentConfig::activity() const {
  ActivityModel a{Probability(p_theta_t), Probability(p_theta_joint), coherence};
  a.validate();
  return a;
}

SweepSpec ExperimentConfig::sweep(Scheme scheme) const {
  SweepSpec spec;
  spec.scheme = scheme;
  spec.pairs = pairs.front();
  spec.rho_grid_db = rho_grid_db;
  spec.links = links();
  spec.multiuser = MultiuserLinks::uniform(spec.pairs, multiuser_lambda);
  spec.cfg = protocol(rho_grid_db.front());
  spec.n_trials = n_trials;
  spec.seed = seed;
  spec.sampler = sampler;
  spec.threads = threads;
  return spec;
}

CapacitySetup ExperimentConfig::capacity_setup(double rho_db) const {
  return {activity(), protocol(rho_db), links(), n_trials, seed, threads};
}

MultiuserSetup ExperimentConfig::multiuser_setup(int m, double rho_db) const {
  return {activity(), protocol(rho_db), MultiuserLinks::uniform(m, multiuser_lambda), n_trials, seed, threads};
}

}  // namespace coopbeacon
