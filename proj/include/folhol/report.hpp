/// Deterministic analysis reports. One Report collects the echoed input, the
/// per-analysis outcomes and the tolerances in force; it renders to a fixed
/// human-readable text form and to JSON with a stable key order, rationals as
/// {"num", "den"} strings and floats as decimal strings with 17 significant
/// digits. Serialization is byte-identical across runs for fixed inputs.
#pragma once

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "folhol/rational.hpp"
#include "folhol/version.hpp"

namespace folhol {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Json json_double(double v) { return Json(format_double(v)); }

inline Json json_rational(const Rational& r) {
  Json j;
  j["num"] = r.numerator_string();
  j["den"] = r.denominator_string();
  return j;
}

inline Json json_point(const std::vector<Rational>& p) {
  Json j = Json::array();
  for (const auto& c : p) j.push_back(json_rational(c));
  return j;
}

inline Json json_doubles(const std::vector<double>& p) {
  Json j = Json::array();
  for (double c : p) j.push_back(json_double(c));
  return j;
}

class Report {
public:
  Report(std::string input_path, std::string input_name, double comparison_tol,
         std::string input_echo = {})
      : input_path_(std::move(input_path)), input_name_(std::move(input_name)),
        input_echo_(std::move(input_echo)), tol_(comparison_tol) {}

  void add_ok(const std::string& analysis, Json params, Json data, std::string text) {
    results_.push_back({analysis, std::move(params), true, std::move(data), std::move(text)});
  }

  void add_error(const std::string& analysis, Json params, const std::string& message) {
    results_.push_back({analysis, std::move(params), false, Json::object(), message});
    any_error_ = true;
  }

  bool has_error() const { return any_error_; }

  Json to_json() const {
    Json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    Json input;
    input["file"] = input_path_;
    input["foliation"] = input_name_;
    if (!input_echo_.empty()) input["document"] = input_echo_;
    j["input"] = input;
    Json results = Json::array();
    for (const auto& r : results_) {
      Json item;
      item["analysis"] = r.analysis;
      item["params"] = r.params;
      item["outcome"] = r.ok ? "ok" : "error";
      if (r.ok) {
        item["data"] = r.data;
      } else {
        item["error"] = r.text;
      }
      results.push_back(std::move(item));
    }
    j["results"] = results;
    Json tols;
    tols["comparison"] = json_double(tol_);
    j["tolerances"] = tols;
    return j;
  }

  std::string to_json_string() const { return to_json().dump(2) + "\n"; }

  std::string to_text() const {
    std::ostringstream os;
    os << tool_name << " " << tool_version << " — " << input_name_ << " (" << input_path_
       << ")\n";
    for (const auto& r : results_) {
      os << "== " << r.analysis << " ==\n";
      if (r.ok) {
        os << r.text;
        if (!r.text.empty() && r.text.back() != '\n') os << "\n";
      } else {
        os << "error: " << r.text << "\n";
      }
    }
    return os.str();
  }

private:
  struct Entry {
    std::string analysis;
    Json params;
    bool ok;
    Json data;
    std::string text;  // rendered text on success, message on error
  };

  std::string input_path_;
  std::string input_name_;
  std::string input_echo_;
  double tol_;
  std::vector<Entry> results_;
  bool any_error_ = false;
};

} // namespace folhol
