#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qstar/bounds.hpp"
#include "qstar/catalog.hpp"

namespace qstar {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// Numbers that may be infinite are written as strings "inf" / "-inf".
json num_to_json(double x);
double num_from_json(const json& j);

json vec_to_json(const Vec& v);  // [[re, im], ...]
Vec vec_from_json(const json& j);
json kvec_to_json(const KVec& k);
KVec kvec_from_json(const json& j);
json mat_to_json(const Mat& m);  // flat row-major [[re, im], ...]
Mat mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols);

/// Operator file: either the coefficient layout
///   {d, ell, m, t, zero_order, deriv_coeffs: [{r, q, idx, re, im}]}
/// (indices one-based) or {d, ell, m, symbol_entries}. An optional "form"
/// object {side, mat} and "base_form" may ride along.
OperatorSymbol operator_from_json(const json& j);
json operator_to_json(const OperatorSymbol& sym);

json form_to_json(const QuadraticForm& f);
QuadraticForm form_from_json(const json& j);

json field_to_json(const FourierField& f);
FourierField field_from_json(const json& j);

json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const json& j);

json step_to_json(const ReductionStep& s);
ReductionStep step_from_json(const json& j);

json extremal_to_json(const ExtremalForm& e);
ExtremalForm extremal_from_json(const json& j);

json bound_to_json(const BoundSummary& b);
BoundSummary bound_from_json(const json& j);

json checkpoints_to_json(const std::vector<CheckpointResult>& r);

/// Catalog entry in the operator file layout, with its form.
json catalog_export(const CatalogEntry& e);

bool same_certificate(const Certificate& a, const Certificate& b);
bool same_extremal(const ExtremalForm& a, const ExtremalForm& b);

struct RunReport {
  std::string command;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::string inputs_digest;
  json config = json::object();
  json results = json::object();
  std::optional<json> timings;  // excluded unless requested

  bool operator==(const RunReport&) const = default;
};

enum class ReportFormat { text, json };

ReportFormat parse_report_format(const std::string& s);
std::string report_render(const RunReport& r, ReportFormat fmt);
/// Inverse of report_render(r, json).
RunReport report_parse(const std::string& text);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace qstar
