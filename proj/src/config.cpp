#include "qet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qet/errors.hpp"

namespace qet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& value, int line) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in site list", line);
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("not an integer: '" + item + "'", line);
    }
  }
  if (out.empty()) throw ConfigError("empty site list", line);
  return out;
}

std::vector<double> parse_double_list(const std::string& value, int line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'", line);
    }
  }
  return out;
}

long long parse_int(const std::string& value, int line) {
  try {
    return std::stoll(value);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + value + "'", line);
  }
}

double parse_double(const std::string& value, int line) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + value + "'", line);
  }
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.model_name != "tfim" && cfg.model_name != "field_only")
    throw ConfigError("model.name: unknown model '" + cfg.model_name + "'");
  if (cfg.n_sites < 2)
    throw ConfigError("model.n: need at least 2 sites, got " +
                      std::to_string(cfg.n_sites));
  if (cfg.region_a.empty()) throw ConfigError("regions.A: missing or empty");
  for (int s : cfg.region_a)
    if (s < 0 || s >= cfg.n_sites)
      throw ConfigError("regions.A: site " + std::to_string(s) +
                        " outside the " + std::to_string(cfg.n_sites) +
                        "-site chain");
  if (cfg.region_b) {
    for (int s : *cfg.region_b)
      if (s < 0 || s >= cfg.n_sites)
        throw ConfigError("regions.B: site " + std::to_string(s) +
                          " outside the " + std::to_string(cfg.n_sites) +
                          "-site chain");
  }
  if (cfg.sweep) {
    const auto& sw = *cfg.sweep;
    if (sw.d_min < 1 || sw.d_max < sw.d_min)
      throw ConfigError("sweep: need 1 <= d_min <= d_max");
    if (sw.b_size < 1) throw ConfigError("sweep.b_size: must be >= 1");
    int a_max = cfg.region_a.front();
    for (int s : cfg.region_a) a_max = std::max(a_max, s);
    const int last_site = a_max + sw.d_max + sw.b_size - 1;
    if (last_site >= cfg.n_sites)
      throw ConfigError("sweep: B at d_max reaches site " +
                        std::to_string(last_site) + " outside the " +
                        std::to_string(cfg.n_sites) + "-site chain");
  }
  if (cfg.scheme != "bloch_projective" && cfg.scheme != "povm_sqrt")
    throw ConfigError("protocol.scheme: unknown scheme '" + cfg.scheme + "'");
  if (cfg.budget < 1) throw ConfigError("protocol.budget: must be >= 1");
  if (cfg.restarts < 1) throw ConfigError("protocol.restarts: must be >= 1");
  if (cfg.format != "csv" && cfg.format != "record" && cfg.format != "both")
    throw ConfigError("output.format: expected csv, record or both");
  if (cfg.window_min && cfg.window_max && *cfg.window_min > *cfg.window_max)
    throw ConfigError("clustering: window_min exceeds window_max");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  bool saw_anything = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    saw_anything = true;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "regions" && section != "sweep" &&
          section != "protocol" && section != "clustering" &&
          section != "output")
        throw ConfigError("unknown section [" + section + "]", line_no);
      if (section == "sweep" && !cfg.sweep) cfg.sweep = SweepSpec{};
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line_no);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
    if (section.empty())
      throw ConfigError("key '" + key + "' outside any section", line_no);

    if (section == "model") {
      if (key == "name") cfg.model_name = value;
      else if (key == "n") cfg.n_sites = static_cast<int>(parse_int(value, line_no));
      else if (key == "g") cfg.g = parse_double(value, line_no);
      else if (key == "coupling") cfg.coupling = parse_double(value, line_no);
      else throw ConfigError("unknown key 'model." + key + "'", line_no);
    } else if (section == "regions") {
      if (key == "A") cfg.region_a = parse_int_list(value, line_no);
      else if (key == "B") cfg.region_b = parse_int_list(value, line_no);
      else throw ConfigError("unknown key 'regions." + key + "'", line_no);
    } else if (section == "sweep") {
      if (key == "d_min") cfg.sweep->d_min = static_cast<int>(parse_int(value, line_no));
      else if (key == "d_max") cfg.sweep->d_max = static_cast<int>(parse_int(value, line_no));
      else if (key == "b_size") cfg.sweep->b_size = static_cast<int>(parse_int(value, line_no));
      else throw ConfigError("unknown key 'sweep." + key + "'", line_no);
    } else if (section == "protocol") {
      if (key == "scheme") cfg.scheme = value;
      else if (key == "budget") cfg.budget = static_cast<std::size_t>(parse_int(value, line_no));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
      else if (key == "restarts") cfg.restarts = static_cast<int>(parse_int(value, line_no));
      else if (key == "params") cfg.params = parse_double_list(value, line_no);
      else throw ConfigError("unknown key 'protocol." + key + "'", line_no);
    } else if (section == "clustering") {
      if (key == "d_min") cfg.clustering_d_min = static_cast<int>(parse_int(value, line_no));
      else if (key == "d_max") cfg.clustering_d_max = static_cast<int>(parse_int(value, line_no));
      else if (key == "window_min") cfg.window_min = static_cast<int>(parse_int(value, line_no));
      else if (key == "window_max") cfg.window_max = static_cast<int>(parse_int(value, line_no));
      else throw ConfigError("unknown key 'clustering." + key + "'", line_no);
    } else {  // output
      if (key == "dir") cfg.output_dir = value;
      else if (key == "format") cfg.format = value;
      else throw ConfigError("unknown key 'output." + key + "'", line_no);
    }
  }

  if (!saw_anything) throw ConfigError("empty configuration", 1);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n";
  out << "name = " << cfg.model_name << "\n";
  out << "n = " << cfg.n_sites << "\n";
  out << "g = " << fmt_double(cfg.g) << "\n";
  out << "coupling = " << fmt_double(cfg.coupling) << "\n";
  out << "\n[regions]\n";
  out << "A = " << join_ints(cfg.region_a) << "\n";
  if (cfg.region_b) out << "B = " << join_ints(*cfg.region_b) << "\n";
  if (cfg.sweep) {
    out << "\n[sweep]\n";
    out << "d_min = " << cfg.sweep->d_min << "\n";
    out << "d_max = " << cfg.sweep->d_max << "\n";
    out << "b_size = " << cfg.sweep->b_size << "\n";
  }
  out << "\n[protocol]\n";
  out << "scheme = " << cfg.scheme << "\n";
  out << "budget = " << cfg.budget << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "restarts = " << cfg.restarts << "\n";
  if (cfg.params) out << "params = " << join_doubles(*cfg.params) << "\n";
  if (cfg.clustering_d_min || cfg.clustering_d_max || cfg.window_min ||
      cfg.window_max) {
    out << "\n[clustering]\n";
    if (cfg.clustering_d_min) out << "d_min = " << *cfg.clustering_d_min << "\n";
    if (cfg.clustering_d_max) out << "d_max = " << *cfg.clustering_d_max << "\n";
    if (cfg.window_min) out << "window_min = " << *cfg.window_min << "\n";
    if (cfg.window_max) out << "window_max = " << *cfg.window_max << "\n";
  }
  out << "\n[output]\n";
  out << "dir = " << cfg.output_dir << "\n";
  out << "format = " << cfg.format << "\n";
  return out.str();
}

}  // namespace qet
