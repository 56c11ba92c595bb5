#include "uat/json_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "uat/error.hpp"

namespace uat {

using Json = nlohmann::ordered_json;

namespace {

void dump_value(const Json& j, std::string& out, int depth);

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void newline(std::string& out, int depth) {
  out.push_back('\n');
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void dump_value(const Json& j, std::string& out, int depth) {
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return is_scalar(v); });
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) newline(out, depth + 1);
        dump_value(v, out, depth + 1);
        first = false;
      }
      if (!flat) newline(out, depth);
      out.push_back(']');
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (const auto& [key, v] : j.items()) {
        if (!first) out.push_back(',');
        newline(out, depth + 1);
        out += Json(key).dump();
        out += ": ";
        dump_value(v, out, depth + 1);
        first = false;
      }
      newline(out, depth);
      out.push_back('}');
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

std::string dump(const Json& j) {
  std::string out;
  dump_value(j, out, 0);
  out.push_back('\n');
  return out;
}

Json parse(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

template <class T>
T field(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite number");
}

}  // namespace

std::string format_double(double value) {
  require_finite(value, "format_double");
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  std::string text(buf.data(), end);
  // Keep integral values typed as floating point so -0.0 survives a round trip.
  if (text.find_first_of(".e") == std::string::npos) text += ".0";
  return text;
}

std::string canonical_json(std::string_view text) { return dump(parse(text, "canonical_json")); }

std::string net_to_json(const Net& net) {
  Json j;
  j["input_dim"] = net.input_dim();
  j["hidden_count"] = net.hidden_count();
  j["output_count"] = net.output_count();
  j["activation"] = std::string(to_string(net.activation()));
  j["softmax_head"] = net.softmax_head();
  Json weights = Json::array();
  for (std::size_t r = 0; r < net.hidden_count(); ++r) {
    const auto row = net.hidden_row(r);
    weights.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["hidden_weights"] = std::move(weights);
  j["hidden_biases"] = net.hidden_biases();
  Json outputs = Json::array();
  for (std::size_t i = 0; i < net.output_count(); ++i) {
    const auto row = net.output_row(i);
    outputs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["output_weights"] = std::move(outputs);
  return dump(j);
}

Net net_from_json(std::string_view text) {
  constexpr const char* what = "net JSON";
  const Json j = parse(text, what);
  const auto d = field<std::size_t>(j, "input_dim", what);
  const auto n = field<std::size_t>(j, "hidden_count", what);
  const auto m = field<std::size_t>(j, "output_count", what);
  const auto act = activation_from_string(field<std::string>(j, "activation", what));
  const bool head = field<bool>(j, "softmax_head", what);
  const auto w_rows = field<std::vector<std::vector<double>>>(j, "hidden_weights", what);
  const auto biases = field<std::vector<double>>(j, "hidden_biases", what);
  const auto a_rows = field<std::vector<std::vector<double>>>(j, "output_weights", what);
  if (w_rows.size() != n) throw ShapeError("net JSON: hidden_weights must have hidden_count rows");
  if (a_rows.size() != m) throw ShapeError("net JSON: output_weights must have output_count rows");
  std::vector<double> weights;
  weights.reserve(n * d);
  for (const auto& row : w_rows) {
    if (row.size() != d) throw ShapeError("net JSON: hidden weight row length must equal input_dim");
    weights.insert(weights.end(), row.begin(), row.end());
  }
  std::vector<double> alphas;
  alphas.reserve(m * n);
  for (const auto& row : a_rows) {
    if (row.size() != n) throw ShapeError("net JSON: output weight row length must equal hidden_count");
    alphas.insert(alphas.end(), row.begin(), row.end());
  }
  return Net(d, n, m, std::move(weights), biases, std::move(alphas), act, head);
}

std::string spec_to_json(const IndicatorSpec& spec) {
  Json j;
  j["input_dim"] = spec.input_dim();
  j["class_count"] = spec.class_count();
  j["axis_cuts"] = spec.axis_cuts();
  j["cell_labels"] = spec.cell_labels();
  return dump(j);
}

IndicatorSpec spec_from_json(std::string_view text) {
  constexpr const char* what = "indicator spec JSON";
  const Json j = parse(text, what);
  return IndicatorSpec(field<std::size_t>(j, "input_dim", what),
                       field<std::size_t>(j, "class_count", what),
                       field<std::vector<std::vector<double>>>(j, "axis_cuts", what),
                       field<std::vector<int>>(j, "cell_labels", what));
}

std::string certificate_to_json(const ApproxCertificate& cert) {
  Json j;
  j["requested_eps"] = cert.requested_eps;
  Json names = Json::array();
  Json budgets = Json::array();
  Json achieved = Json::array();
  for (const auto& s : cert.stages) {
    names.push_back(s.name);
    budgets.push_back(s.budget);
    achieved.push_back(s.achieved);
  }
  j["stage_names"] = std::move(names);
  j["stage_budgets"] = std::move(budgets);
  j["stage_achieved"] = std::move(achieved);
  j["total_achieved"] = cert.total_achieved();
  j["mode"] = std::string(to_string(cert.mode));
  Json details = Json::object();
  for (const auto& [key, value] : cert.details) details[key] = value;
  j["details"] = std::move(details);
  return dump(j);
}

namespace {

Json report_value(const L1Report& r) {
  Json j;
  j["value"] = r.value;
  j["method"] = std::string(to_string(r.method));
  j["n"] = r.n;
  if (r.ci_halfwidth) j["ci_halfwidth"] = *r.ci_halfwidth;
  if (r.seed) j["seed"] = *r.seed;
  if (r.abs_error) j["abs_error"] = *r.abs_error;
  return j;
}

}  // namespace

std::string report_to_json(const L1Report& report) { return dump(report_value(report)); }

std::string reports_to_json(const std::vector<L1Report>& reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(report_value(r));
  return dump(arr);
}

L1Report report_from_json(std::string_view text) {
  constexpr const char* what = "L1 report JSON";
  const Json j = parse(text, what);
  L1Report r;
  r.value = field<double>(j, "value", what);
  const auto method = field<std::string>(j, "method", what);
  if (method == "exact_cpwl") {
    r.method = L1Method::ExactCpwl;
  } else if (method == "adaptive_quadrature") {
    r.method = L1Method::AdaptiveQuadrature;
  } else if (method == "grid_quadrature") {
    r.method = L1Method::GridQuadrature;
  } else if (method == "monte_carlo") {
    r.method = L1Method::MonteCarlo;
  } else {
    throw ParseError("L1 report JSON: unknown method '" + method + "'");
  }
  r.n = field<std::uint64_t>(j, "n", what);
  if (j.contains("ci_halfwidth")) r.ci_halfwidth = j["ci_halfwidth"].get<double>();
  if (j.contains("seed")) r.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("abs_error")) r.abs_error = j["abs_error"].get<double>();
  return r;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace uat
