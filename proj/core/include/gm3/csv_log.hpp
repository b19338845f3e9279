#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gm3/simulator.hpp"

namespace gm3 {

// Header row, then one row per log entry; numbers use 9 significant digits.
void write_csv(const RunLog& log, std::ostream& out);
std::string to_csv(const RunLog& log);
// Throws std::runtime_error on I/O failure.
void export_csv(const RunLog& log, const std::filesystem::path& path);

// Parses a CSV written by write_csv. Metadata is not part of the CSV and
// is left default.
RunLog read_csv(std::istream& in);
RunLog import_csv(const std::filesystem::path& path);

// JSON sidecar with the run metadata (model, vehicle, spec hash, dt, error).
std::string metadata_json(const RunLogMetadata& meta);
void export_metadata(const RunLogMetadata& meta, const std::filesystem::path& path);

}  // namespace gm3
