#include "nighthaze/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "nighthaze/config.hpp"
#include "nighthaze/image.hpp"

namespace nighthaze {

using json = nlohmann::ordered_json;

std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

double parse_metric(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("cannot parse metric value '" + std::string(text) + "'");
  }
  return v;
}

void EvalReport::add(const std::string& image, const std::string& metric, double value) {
  auto [it, inserted] = rows_.try_emplace(image);
  if (inserted) order_.push_back(image);
  it->second[metric] = value;
}

const std::map<std::string, double>& EvalReport::metrics(const std::string& image) const {
  const auto it = rows_.find(image);
  if (it == rows_.end()) throw InvalidArgument("no report rows for '" + image + "'");
  return it->second;
}

std::map<std::string, double> EvalReport::aggregate() const {
  std::map<std::string, double> sums;
  std::map<std::string, std::size_t> counts;
  for (const auto& name : order_) {
    for (const auto& [metric, value] : rows_.at(name)) {
      sums[metric] += value;
      ++counts[metric];
    }
  }
  for (auto& [metric, sum] : sums) sum /= static_cast<double>(counts[metric]);
  return sums;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "image,metric,value\n";
  for (const auto& name : order_) {
    for (const auto& [metric, value] : rows_.at(name)) {
      out << name << ',' << metric << ',' << format_metric(value) << '\n';
    }
  }
  for (const auto& [metric, value] : aggregate()) {
    out << "__mean__," << metric << ',' << format_metric(value) << '\n';
  }
  return out.str();
}

namespace {

json metric_value(double v) {
  if (std::isfinite(v)) return v;
  return format_metric(v);
}

double metric_from_json(const json& j) {
  if (j.is_string()) return parse_metric(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

std::string EvalReport::to_json() const {
  json doc;
  doc["images"] = json::array();
  for (const auto& name : order_) {
    json entry;
    entry["name"] = name;
    entry["metrics"] = json::object();
    for (const auto& [metric, value] : rows_.at(name)) entry["metrics"][metric] = metric_value(value);
    doc["images"].push_back(entry);
  }
  doc["aggregate"] = json::object();
  for (const auto& [metric, value] : aggregate()) doc["aggregate"][metric] = metric_value(value);
  return doc.dump(2) + "\n";
}

EvalReport EvalReport::from_json(std::string_view text) {
  EvalReport report;
  try {
    const json doc = json::parse(text);
    for (const auto& entry : doc.at("images")) {
      const auto name = entry.at("name").get<std::string>();
      for (const auto& [metric, value] : entry.at("metrics").items()) {
        report.add(name, metric, metric_from_json(value));
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

bool operator==(const EvalReport& a, const EvalReport& b) {
  if (a.order_ != b.order_) return false;
  for (const auto& name : a.order_) {
    const auto& ra = a.rows_.at(name);
    const auto& rb = b.rows_.at(name);
    if (ra.size() != rb.size()) return false;
    for (const auto& [metric, value] : ra) {
      const auto it = rb.find(metric);
      if (it == rb.end()) return false;
      const bool both_nan = std::isnan(value) && std::isnan(it->second);
      if (!both_nan && value != it->second) return false;
    }
  }
  return true;
}

}  // namespace nighthaze
