#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace sgwave {

/// Byte-stable CSV writer: doubles are printed with %.17g so identical runs
/// produce identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::string header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& values);
  void add_row_prefixed(const std::string& prefix, const std::vector<double>& values);
  void write(const std::string& path) const;
  std::string str() const;

 private:
  std::string header_;
  std::vector<std::string> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

// Minimal standalone SVG line plot (log axes optional), no external deps.
void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool logx = false,
                     bool logy = false);

void write_text_file(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

/// Run manifest: config echo, seed, version, wall time and every artifact
/// written by the driver.
struct Manifest {
  std::string command;
  std::string config_echo;  // JSON text
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;

  void write(const std::string& path) const;
};

std::string format_double(double v);  // %.17g

}  // namespace sgwave
