#include "qsn/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qsn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
    case ErrorCode::SingularC: return "SingularC";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NonPositiveK: return "NonPositiveK";
    case ErrorCode::UnequalWeights: return "UnequalWeights";
    case ErrorCode::GOutOfRange: return "GOutOfRange";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadParameters: return "BadParameters";
  }
  return "Unknown";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Local: return "local";
    case Strategy::Naive: return "naive";
    case Strategy::OptSequential: return "opt";
    case Strategy::SignedSensorSymmetric: return "ss";
  }
  return "unknown";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void check_shape_and_signs(const Matrix& a, const Vector& w, double t) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw Error(ErrorCode::BadDimensions, "coefficient matrix is empty");
  }
  if (a.rows() > a.cols()) {
    throw Error(ErrorCode::BadDimensions, "more functions (" + std::to_string(a.rows()) +
                                              ") than sensors (" + std::to_string(a.cols()) + ")");
  }
  if (w.size() != a.rows()) {
    throw Error(ErrorCode::BadDimensions, "weight count " + std::to_string(w.size()) +
                                              " does not match function count " +
                                              std::to_string(a.rows()));
  }
  if (!a.allFinite() || !w.allFinite() || !std::isfinite(t)) {
    throw Error(ErrorCode::NonFinite, "instance contains NaN or infinity");
  }
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    if (!(w[l] > 0.0)) {
      throw Error(ErrorCode::NonPositive, "weight " + std::to_string(l) + " is not positive");
    }
  }
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositive, "total time is not positive");
}

void check_rank(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] <= kRankRelativeThreshold * sv[0]) {
    throw Error(ErrorCode::RankDeficient, "rows are linearly dependent");
  }
}

}  // namespace

std::pair<ProblemInstance, NormalizationReport> validate_and_normalize(const Matrix& raw_a,
                                                                       const Vector& w, double t,
                                                                       RankCheck check) {
  check_shape_and_signs(raw_a, w, t);

  const auto n = raw_a.rows();
  NormalizationReport report;
  report.original_row_norms.resize(n);
  report.absorbed_weights.resize(n);

  Matrix a = raw_a;
  Vector absorbed(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const double norm = raw_a.row(l).norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::ZeroRow, "function " + std::to_string(l) + " is identically zero");
    }
    a.row(l) /= norm;
    absorbed[l] = w[l] * norm * norm;
    report.original_row_norms[l] = norm;
    report.absorbed_weights[l] = absorbed[l];
  }
  if (check == RankCheck::Enforce) check_rank(a);

  return {ProblemInstance(std::move(a), std::move(absorbed), t), std::move(report)};
}

ProblemInstance ProblemInstance::with_time(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::NonPositive, "total time is not positive");
  }
  return ProblemInstance(a_, w_, t);
}

ProblemInstance load_instance_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("A") || !doc.contains("w")) {
    throw Error(ErrorCode::ParseError, "expected an object with \"A\" and \"w\"");
  }

  Matrix a;
  Vector w;
  double t = 1.0;
  try {
    const auto& rows = doc.at("A");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
      throw Error(ErrorCode::ParseError, "\"A\" must be a non-empty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows[0].size());
    a.resize(n, d);
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto& row = rows[static_cast<std::size_t>(l)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
        throw Error(ErrorCode::ParseError, "rows of \"A\" have unequal lengths");
      }
      for (Eigen::Index j = 0; j < d; ++j) a(l, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    const auto& weights = doc.at("w");
    if (!weights.is_array()) throw Error(ErrorCode::ParseError, "\"w\" must be an array");
    w.resize(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t l = 0; l < weights.size(); ++l) w[static_cast<Eigen::Index>(l)] = weights[l].get<double>();
    if (doc.contains("t")) t = doc.at("t").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }

  check_shape_and_signs(a, w, t);
  bool unit_rows = true;
  for (Eigen::Index l = 0; l < a.rows(); ++l) {
    if (std::abs(a.row(l).norm() - 1.0) > kRowNormTolerance) unit_rows = false;
  }
  if (!unit_rows) return validate_and_normalize(a, w, t).first;

  check_rank(a);
  return ProblemInstance(std::move(a), std::move(w), t);
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_instance_json(buf.str());
}

std::string instance_to_json(const ProblemInstance& inst) {
  std::string out = "{\n  \"A\": [";
  for (int l = 0; l < inst.n(); ++l) {
    out += l == 0 ? "\n    [" : ",\n    [";
    for (int j = 0; j < inst.d(); ++j) {
      if (j) out += ", ";
      out += format_double(inst.A()(l, j));
    }
    out += "]";
  }
  out += "\n  ],\n  \"w\": [";
  for (int l = 0; l < inst.n(); ++l) {
    if (l) out += ", ";
    out += format_double(inst.w()[l]);
  }
  out += "],\n  \"t\": " + format_double(inst.t()) + "\n}\n";
  return out;
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << instance_to_json(inst);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace qsn
