#include "gm3/csv_log.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gm3/errors.hpp"

namespace gm3 {
namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.9g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_csv(const RunLog& log, std::ostream& out) {
  out << to_csv(log);
}

std::string to_csv(const RunLog& log) {
  std::string out;
  for (std::size_t i = 0; i < log.columns.size(); ++i) {
    if (i) out += ',';
    out += log.columns[i];
  }
  out += '\n';
  for (const auto& row : log.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_number(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

void export_csv(const RunLog& log, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(log, f);
  f.flush();
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

RunLog read_csv(std::istream& in) {
  RunLog log;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV document");
  log.columns = split(line, ',');
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != log.columns.size()) {
      throw DataError("CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(log.columns.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw DataError("CSV line " + std::to_string(line_no) + ": bad number '" + f + "'");
      }
    }
    log.rows.push_back(std::move(row));
  }
  return log;
}

RunLog import_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_csv(f);
}

std::string metadata_json(const RunLogMetadata& meta) {
  nlohmann::json j;
  j["model_id"] = meta.model_id;
  j["vehicle"] = meta.vehicle;
  j["spec_hash"] = meta.spec_hash;
  j["dt"] = meta.dt;
  j["deterministic"] = meta.deterministic;
  j["error"] = meta.error ? nlohmann::json(*meta.error) : nlohmann::json(nullptr);
  return j.dump(2);
}

void export_metadata(const RunLogMetadata& meta, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << metadata_json(meta) << '\n';
}

}  // namespace gm3
