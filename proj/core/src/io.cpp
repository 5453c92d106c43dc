#include "rankad/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace rankad {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t col) {
  const std::string_view t = trim(cell);
  auto where = [&] {
    return " at row " + std::to_string(line) + ", column " +
           std::to_string(col);
  };
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw DataError("cannot parse '" + std::string(t) + "' as a number" +
                    where());
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite value '" + std::string(t) + "'" + where());
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string checksum_hex(std::string_view payload) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));
  return buf;
}

json finite_array(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericalError(std::string("refusing to save non-finite ") + what);
    }
  }
  return json(v);
}

std::vector<double> double_vector(const json& j, const char* what) {
  if (!j.is_array()) {
    throw DataError(std::string("model field '") + what +
                    "' is not an array");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& x : j) {
    if (!x.is_number()) {
      throw DataError(std::string("model field '") + what +
                      "' holds a non-numeric entry");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

const json& need(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw DataError(std::string("model file is missing field '") + key + "'");
  }
  return *it;
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, bool has_labels) {
  const std::string text = read_file(path);

  std::vector<double> cells;
  std::vector<int> labels;
  std::size_t cols = 0, rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line(
        text.data() + pos,
        (eol == std::string::npos ? text.size() : eol) - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(
          start, (comma == std::string_view::npos ? line.size() : comma) -
                     start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    if (rows == 0) {
      cols = fields.size();
      if (has_labels && cols < 2) {
        throw DataError("labeled dataset needs at least one feature column "
                        "plus the label");
      }
    } else if (fields.size() != cols) {
      throw DataError("row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " cells, expected " +
                      std::to_string(cols));
    }

    const std::size_t feature_cols = has_labels ? cols - 1 : cols;
    for (std::size_t c = 0; c < feature_cols; ++c) {
      cells.push_back(parse_cell(fields[c], line_no, c + 1));
    }
    if (has_labels) {
      const double v = parse_cell(fields[cols - 1], line_no, cols);
      if (v != 0.0 && v != 1.0) {
        throw DataError("label at row " + std::to_string(line_no) +
                        " must be 0 or 1, got '" +
                        std::string(trim(fields[cols - 1])) + "'");
      }
      labels.push_back(v == 1.0 ? 1 : 0);
    }
    ++rows;
  }
  if (rows == 0) throw DataError("dataset file '" + path + "' is empty");

  const std::size_t feature_cols = has_labels ? cols - 1 : cols;
  LoadedDataset out;
  out.features = Matrix(rows, feature_cols);
  std::copy(cells.begin(), cells.end(), out.features.row_ptr(0));
  out.labels = std::move(labels);
  return out;
}

void save_dataset_csv(const std::string& path, const Matrix& features,
                      const std::vector<int>* labels) {
  if (labels != nullptr && labels->size() != features.rows()) {
    throw UsageError("label count does not match the row count");
  }
  std::string text;
  text.reserve(features.rows() * (features.cols() + 1) * 12);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      if (c > 0) text += ',';
      append_double(text, features(r, c));
    }
    if (labels != nullptr) {
      text += ',';
      text += std::to_string((*labels)[r]);
    }
    text += '\n';
  }
  write_file(path, text);
}

void save_model(const ModelBundle& bundle, const std::string& path) {
  const RankModel& model = bundle.detector.model;
  if (model.support_points.rows() != model.betas.size()) {
    throw UsageError("model support points and coefficients disagree");
  }

  json support = json::array();
  for (std::size_t r = 0; r < model.support_points.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < model.support_points.cols(); ++c) {
      const double v = model.support_points(r, c);
      if (!std::isfinite(v)) {
        throw NumericalError("refusing to save non-finite support point");
      }
      row.push_back(v);
    }
    support.push_back(std::move(row));
  }

  json payload = {
      {"d", model.dim},
      {"kernel", {{"family", "rbf"}, {"sigma", model.kernel.sigma}}},
      {"c", model.meta.c},
      {"k", bundle.k},
      {"m", bundle.m},
      {"pair_cap", bundle.pair_cap},
      {"pair_seed", bundle.pair_seed},
      {"solver_seed", model.meta.solver_seed},
      {"dual_objective", model.meta.dual_objective},
      {"epochs", model.meta.epochs},
      {"converged", model.meta.converged},
      {"support_pairs", model.meta.support_pairs},
      {"support_points", std::move(support)},
      {"betas", finite_array(model.betas, "coefficients")},
      {"sorted_scores",
       finite_array(bundle.detector.sorted_scores, "training scores")},
      {"n_train", bundle.detector.sorted_scores.size()},
  };

  const std::string payload_text = payload.dump();
  json file = {
      {"format", "rankad-model"},
      {"format_version", kModelFormatVersion},
      {"payload", std::move(payload)},
      {"checksum", checksum_hex(payload_text)},
  };
  write_file(path, file.dump(2) + "\n");
}

ModelBundle load_model(const std::string& path) {
  const std::string text = read_file(path);
  json file;
  try {
    file = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("model file '" + path + "' is not valid JSON: " +
                    e.what());
  }
  if (!file.is_object() || need(file, "format") != "rankad-model") {
    throw DataError("'" + path + "' is not a rankad model file");
  }
  const json& version = need(file, "format_version");
  if (!version.is_number_integer() ||
      version.get<int>() != kModelFormatVersion) {
    throw DataError("unsupported model format version " + version.dump() +
                    " (this build reads version " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  const json& payload = need(file, "payload");
  if (checksum_hex(payload.dump()) != need(file, "checksum")) {
    throw DataError("model file '" + path +
                    "' failed its checksum (truncated or edited?)");
  }

  ModelBundle bundle;
  RankModel& model = bundle.detector.model;
  model.dim = need(payload, "d").get<std::size_t>();
  if (model.dim == 0) throw DataError("model dimension must be >= 1");
  const json& kernel = need(payload, "kernel");
  if (need(kernel, "family") != "rbf") {
    throw DataError("unsupported kernel family " +
                    need(kernel, "family").dump());
  }
  model.kernel.sigma = need(kernel, "sigma").get<double>();
  if (!(model.kernel.sigma > 0.0)) {
    throw DataError("model kernel sigma must be positive");
  }

  model.meta.c = need(payload, "c").get<double>();
  model.meta.solver_seed = need(payload, "solver_seed").get<std::uint64_t>();
  model.meta.dual_objective = need(payload, "dual_objective").get<double>();
  model.meta.epochs = need(payload, "epochs").get<std::size_t>();
  model.meta.converged = need(payload, "converged").get<bool>();
  model.meta.support_pairs = need(payload, "support_pairs").get<std::size_t>();
  bundle.k = need(payload, "k").get<std::size_t>();
  bundle.m = need(payload, "m").get<int>();
  bundle.pair_cap = need(payload, "pair_cap").get<std::size_t>();
  bundle.pair_seed = need(payload, "pair_seed").get<std::uint64_t>();

  model.betas = double_vector(need(payload, "betas"), "betas");
  const json& support = need(payload, "support_points");
  if (!support.is_array() || support.size() != model.betas.size()) {
    throw DataError("model support points and coefficients disagree");
  }
  model.support_points = Matrix(support.size(), model.dim);
  for (std::size_t r = 0; r < support.size(); ++r) {
    const std::vector<double> row = double_vector(support[r], "support_points");
    if (row.size() != model.dim) {
      throw DataError("support point " + std::to_string(r) +
                      " has the wrong dimension");
    }
    std::copy(row.begin(), row.end(), model.support_points.row_ptr(r));
  }

  bundle.detector.sorted_scores =
      double_vector(need(payload, "sorted_scores"), "sorted_scores");
  if (bundle.detector.sorted_scores.empty()) {
    throw DataError("model has no training scores");
  }
  if (!std::is_sorted(bundle.detector.sorted_scores.begin(),
                      bundle.detector.sorted_scores.end())) {
    throw DataError("model training scores are not sorted");
  }
  if (need(payload, "n_train").get<std::size_t>() !=
      bundle.detector.sorted_scores.size()) {
    throw DataError("model n_train disagrees with the stored scores");
  }
  return bundle;
}

}  // namespace rankad
