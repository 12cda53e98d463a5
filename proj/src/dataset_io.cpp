#include "persid/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "persid/error.hpp"

namespace persid {
namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::filesystem::path& file) {
  try {
    std::size_t used = 0;
    const double x = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, "bad number '" + cell + "' in " + file.string());
  }
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["records"] = nlohmann::json::array();
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& rec = data.records[i];
    const std::string name = "record_" + std::to_string(i) + ".csv";
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorCode::kConfigError, "cannot write " + (dir / name).string());
    const int m = rec.inputs.input_dim();
    const int T = rec.inputs.horizon();
    const int p = rec.is_discrete() ? 1 : rec.output_dim();
    out << "t";
    for (int k = 0; k < m; ++k) out << ",u_" << k;
    for (int k = 0; k < p; ++k) out << ",y_" << k;
    out << "\n";
    for (int t = 0; t <= T; ++t) {
      out << t;
      for (int k = 0; k < m; ++k) {
        out << ",";
        if (t < T) out << fmt17(rec.inputs.values(t, k));
      }
      if (rec.is_discrete()) {
        out << "," << rec.symbols()[static_cast<std::size_t>(t)];
      } else {
        for (int k = 0; k < p; ++k) out << "," << fmt17(rec.continuous()(t, k));
      }
      out << "\n";
    }
    nlohmann::json entry;
    entry["file"] = name;
    entry["policy_id"] = rec.inputs.policy_id;
    entry["sequence_seed"] = rec.inputs.seed;
    entry["seed"] = rec.seed;
    entry["discrete"] = rec.is_discrete();
    entry["input_dim"] = m;
    if (rec.truth_tag) entry["truth_tag"] = *rec.truth_tag;
    manifest["records"].push_back(std::move(entry));
  }
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::kConfigError, "cannot open " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, manifest_path.string() + ": " + e.what());
  }
  std::vector<TrajectoryRecord> records;
  for (const auto& entry : manifest.at("records")) {
    const auto file = dir / entry.at("file").get<std::string>();
    std::ifstream csv(file);
    if (!csv) fail(ErrorCode::kConfigError, "cannot open " + file.string());
    const int m = entry.at("input_dim").get<int>();
    const bool discrete = entry.at("discrete").get<bool>();
    std::string line;
    std::getline(csv, line);
    const auto header = split_csv(line);
    const int p = static_cast<int>(header.size()) - 1 - m;
    if (p < 1) fail(ErrorCode::kDimensionMismatch, "no output columns in " + file.string());
    std::vector<std::vector<std::string>> rows;
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      rows.push_back(split_csv(line));
      if (rows.back().size() != header.size()) {
        fail(ErrorCode::kDimensionMismatch, "ragged row in " + file.string());
      }
    }
    if (rows.empty()) fail(ErrorCode::kDimensionMismatch, "empty record " + file.string());
    const int T = static_cast<int>(rows.size()) - 1;
    TrajectoryRecord rec;
    rec.inputs.values.resize(T, m);
    rec.inputs.policy_id = entry.at("policy_id").get<std::string>();
    rec.inputs.seed = entry.at("sequence_seed").get<std::uint64_t>();
    rec.seed = entry.at("seed").get<std::uint64_t>();
    if (entry.contains("truth_tag")) rec.truth_tag = entry.at("truth_tag").get<std::string>();
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < m; ++k) rec.inputs.values(t, k) = parse_cell(rows[t][1 + k], file);
    }
    if (discrete) {
      Symbols ys;
      for (const auto& row : rows) ys.push_back(static_cast<int>(parse_cell(row[1 + m], file)));
      rec.outputs = std::move(ys);
    } else {
      Eigen::MatrixXd ys(T + 1, p);
      for (int t = 0; t <= T; ++t) {
        for (int k = 0; k < p; ++k) ys(t, k) = parse_cell(rows[t][1 + m + k], file);
      }
      rec.outputs = std::move(ys);
    }
    records.push_back(std::move(rec));
  }
  return group_dataset(std::move(records));
}

}  // namespace persid
