#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uat/certificate.hpp"
#include "uat/indicator_spec.hpp"
#include "uat/measure.hpp"
#include "uat/nets.hpp"

namespace uat {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Re-emits a JSON document with two-space indentation, insertion-ordered
/// keys, and every floating-point number in shortest round-trip form.
std::string canonical_json(std::string_view text);

/// Network interchange document:
///   input_dim, hidden_count, output_count, activation ("relu" | "sigma1"),
///   softmax_head, hidden_weights (n arrays of d), hidden_biases (n),
///   output_weights (m arrays of n).
std::string net_to_json(const Net& net);
Net net_from_json(std::string_view text);

/// input_dim, class_count, axis_cuts (one array per axis), cell_labels
/// (row-major, 1-based).
std::string spec_to_json(const IndicatorSpec& spec);
IndicatorSpec spec_from_json(std::string_view text);

/// requested_eps, stage_names, stage_budgets, stage_achieved,
/// total_achieved, mode, details.
std::string certificate_to_json(const ApproxCertificate& cert);

/// value, method, n, ci_halfwidth?, seed?, abs_error?.
std::string report_to_json(const L1Report& report);
std::string reports_to_json(const std::vector<L1Report>& reports);
L1Report report_from_json(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace uat
