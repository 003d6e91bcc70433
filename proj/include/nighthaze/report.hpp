#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nighthaze {

// Named metric values per image plus per-metric means over all images.
// Non-finite values serialize as "inf", "-inf" or "nan".
class EvalReport {
 public:
  void add(const std::string& image, const std::string& metric, double value);

  const std::vector<std::string>& images() const noexcept { return order_; }
  const std::map<std::string, double>& metrics(const std::string& image) const;

  // Mean of each metric over the images that report it.
  std::map<std::string, double> aggregate() const;

  // "image,metric,value" rows in insertion order, then one "__mean__" row per
  // metric.
  std::string to_csv() const;
  std::string to_json() const;
  static EvalReport from_json(std::string_view text);

  friend bool operator==(const EvalReport& a, const EvalReport& b);

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::map<std::string, double>> rows_;
};

// Shortest round-trippable text for a double; "inf"/"-inf"/"nan" otherwise.
std::string format_metric(double v);
double parse_metric(std::string_view text);

}  // namespace nighthaze
