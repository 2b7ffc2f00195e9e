#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "finwalk/generator.hpp"

namespace finwalk {

// Flat key = value configuration grouped in [sections]; '#' and ';' start
// comments. Keys are addressed as "section.key". Overrides replace or add
// entries after the file is read, so the resolved map is the full record of a
// run.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text, const std::string& origin = "<inline>");

  void set(const std::string& dotted_key, const std::string& value);
  // "section.key=value"
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // whitespace separated
  std::vector<long> get_longs(const std::string& key) const;

  // Resolved contents, sorted by key (for output headers).
  std::string echo() const;

  // Builders over the zoo.
  Geometry make_geometry() const;
  std::shared_ptr<MeasureFamily> make_measure(const Geometry& geo) const;
  WalkConfig make_walk(const Geometry& geo) const;
  std::vector<ChartPoint> probe_points(const Geometry& geo) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace finwalk
