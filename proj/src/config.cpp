#include "finwalk/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace finwalk {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    raise(Errc::invalid_config, "key '" + key + "': cannot parse number from '" + text + "'");
  return v;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::invalid_config, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

RunConfig RunConfig::from_string(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') raise(Errc::invalid_config, where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) raise(Errc::invalid_config, where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise(Errc::invalid_config, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) raise(Errc::invalid_config, where + ": empty key");
    if (section.empty())
      raise(Errc::invalid_config, where + ": key '" + key + "' appears before any [section]");
    cfg.values_[section + "." + key] = value;
  }
  return cfg;
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  values_[dotted_key] = value;
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || assignment.find('.') == std::string::npos || eq == 0)
    raise(Errc::invalid_config, "override must look like section.key=value: '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) raise(Errc::invalid_config, "missing required key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

long RunConfig::get_long(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = parse_double(key, it->second);
  return static_cast<long>(v);
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::istringstream in(it->second);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  return out;
}

std::vector<long> RunConfig::get_longs(const std::string& key) const {
  std::vector<long> out;
  for (double v : get_doubles(key)) out.push_back(static_cast<long>(v));
  return out;
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    if (!out.empty()) out += "; ";
    out += k + " = " + v;
  }
  return out;
}

Geometry RunConfig::make_geometry() const {
  const std::string name = require_string("metric.name");
  std::map<std::string, double> params;
  const std::string prefix = "metric.";
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0 && k != "metric.name")
      params[k.substr(prefix.size())] = parse_double(k, v);
  }
  return finwalk::make_geometry(name, params);
}

std::shared_ptr<MeasureFamily> RunConfig::make_measure(const Geometry& geo) const {
  const std::string kind = get_string("measure.kind", "lebesgue-disc");
  if (kind == "lebesgue-disc") return make_lebesgue_disc(geo);
  if (kind == "indicatrix-fundamental" || kind == "indicatrix")
    return make_indicatrix_measure(geo);
  if (kind == "discrete") {
    // atoms = w1 : c1 c2 | w2 : c1 c2 | ...
    const std::string text = require_string("measure.atoms");
    std::vector<std::pair<Vec, double>> atoms;
    std::istringstream atoms_in(text);
    std::string atom;
    while (std::getline(atoms_in, atom, '|')) {
      const auto colon = atom.find(':');
      if (colon == std::string::npos)
        raise(Errc::invalid_config, "measure.atoms: each atom is 'weight : components'");
      const double w = parse_double("measure.atoms", trim(atom.substr(0, colon)));
      std::istringstream comp_in(atom.substr(colon + 1));
      std::vector<double> comps;
      std::string tok;
      while (comp_in >> tok) comps.push_back(parse_double("measure.atoms", tok));
      if (comps.empty()) raise(Errc::invalid_config, "measure.atoms: atom without components");
      Vec v(static_cast<Eigen::Index>(comps.size()));
      for (std::size_t i = 0; i < comps.size(); ++i) v[static_cast<Eigen::Index>(i)] = comps[i];
      atoms.emplace_back(v, w);
    }
    if (atoms.empty()) raise(Errc::invalid_config, "measure.atoms: no atoms given");
    for (const auto& [v, w] : atoms)
      if (v.size() != geo.metric->dimension())
        raise(Errc::invalid_config, "measure.atoms: atom dimension disagrees with the metric");
    return make_discrete_measure(std::move(atoms));
  }
  raise(Errc::invalid_config, "unknown measure kind '" + kind + "'");
}

WalkConfig RunConfig::make_walk(const Geometry& geo) const {
  WalkConfig w;
  w.N = get_long("walk.N", 1);
  w.T = get_double("walk.T", 1.0);
  w.n_steps = get_long("walk.n_steps", -1);
  w.h_ode = get_double("walk.h_ode", 1e-3);
  w.seed = static_cast<std::uint64_t>(get_long("walk.seed", 0));
  w.paths = get_long("walk.paths", 1);
  w.alpha = get_double("walk.alpha", 1.0);
  w.threads = static_cast<int>(get_long("walk.threads", 1));

  const int m = geo.metric->dimension();
  w.start.chart = static_cast<int>(get_long("walk.chart", 0));
  const std::vector<double> coords = get_doubles("walk.start");
  w.start.x = Vec::Zero(m);
  if (!coords.empty()) {
    if (static_cast<int>(coords.size()) != m)
      raise(Errc::invalid_config, "walk.start: expected " + std::to_string(m) + " coordinates");
    for (int i = 0; i < m; ++i) w.start.x[i] = coords[static_cast<std::size_t>(i)];
  }
  if (!geo.atlas->in_domain(w.start))
    raise(Errc::invalid_config, "walk.start lies outside the atlas");
  return w;
}

std::vector<ChartPoint> RunConfig::probe_points(const Geometry& geo) const {
  const int m = geo.metric->dimension();
  std::vector<ChartPoint> out;
  // probes = x1 x2 ; y1 y2 ; ...
  const std::string text = get_string("study.probes", "");
  if (text.empty()) return out;
  std::istringstream rows(text);
  std::string row;
  while (std::getline(rows, row, ';')) {
    row = trim(row);
    if (row.empty()) continue;
    std::istringstream in(row);
    std::vector<double> coords;
    std::string tok;
    while (in >> tok) coords.push_back(parse_double("study.probes", tok));
    if (static_cast<int>(coords.size()) != m)
      raise(Errc::invalid_config, "study.probes: each probe needs " + std::to_string(m) +
                                      " coordinates");
    ChartPoint p;
    p.chart = 0;
    p.x = Vec::Zero(m);
    for (int i = 0; i < m; ++i) p.x[i] = coords[static_cast<std::size_t>(i)];
    if (!geo.atlas->in_domain(p)) raise(Errc::invalid_config, "study.probes: probe outside atlas");
    out.push_back(p);
  }
  return out;
}

}  // namespace finwalk
