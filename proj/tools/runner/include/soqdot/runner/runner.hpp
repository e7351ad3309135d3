#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "soqdot/runner/config.hpp"

namespace soqdot::runner {

struct OutputFile {
  std::string name;     // relative to the output directory
  std::string content;  // deterministic for a given config and seed
};

/// Runs the scenario in memory. Nothing touches the filesystem.
struct ScenarioResult {
  std::vector<OutputFile> files;
  std::vector<std::string> notes;  // flags worth surfacing in the manifest
};
ScenarioResult compute(const RunConfig& cfg);

/// Writes every file through a temp name, renaming only after all temp
/// files exist. Leaves no partial output on failure.
void write_atomically(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

struct RunSummary {
  std::vector<std::filesystem::path> written;
  double wall_seconds = 0.0;
};

/// compute + manifest.json + write_atomically.
RunSummary run(const RunConfig& cfg, const std::vector<std::string>& warnings = {});

/// Exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// CSV text: a `# units: ...` line, a header, then rows. Reals use %.17g.
class CsvTable {
 public:
  CsvTable(std::string units, std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t rows() const { return rows_.size(); }

 private:
  std::string units_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_real(double v);

}  // namespace soqdot::runner
