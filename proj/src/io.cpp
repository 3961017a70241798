#include "sgwave/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sgwave {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
  std::string row;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) row += ",";
    row += format_double(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::add_row_prefixed(const std::string& prefix, const std::vector<double>& values) {
  std::string row = prefix;
  for (const double v : values) {
    row += ",";
    row += format_double(v);
  }
  rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
  std::string out = header_ + "\n";
  for (const auto& r : rows_) out += r + "\n";
  return out;
}

void CsvWriter::write(const std::string& path) const { write_text_file(path, str()); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void ensure_directory(const std::string& path) {
  std::filesystem::create_directories(path);
}

namespace {

double axis_value(double v, bool log_axis) { return log_axis ? std::log10(v) : v; }

}  // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool logx, bool logy) {
  const int width = 720, height = 480;
  const int ml = 70, mr = 160, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, axis_value(s.x[i], logx));
      xmax = std::max(xmax, axis_value(s.x[i], logx));
      ymin = std::min(ymin, axis_value(s.y[i], logy));
      ymax = std::max(ymax, axis_value(s.y[i], logy));
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const auto px = [&](double x) {
    return ml + (axis_value(x, logx) - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - (axis_value(y, logy) - ymin) / (ymax - ymin) * (height - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
     << title << "</text>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << height / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << height / 2
     << ")\">" << ylabel << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
     << "\" height=\"" << height - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  // axis ticks
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    const double gx = ml + (width - ml - mr) * k / 4.0;
    const double gy = height - mb - (height - mt - mb) * k / 4.0;
    char lx[32], ly[32];
    std::snprintf(lx, sizeof(lx), "%.3g", logx ? std::pow(10.0, fx) : fx);
    std::snprintf(ly, sizeof(ly), "%.3g", logy ? std::pow(10.0, fy) : fy);
    os << "<text x=\"" << gx << "\" y=\"" << height - mb + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << lx << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << gy + 3
       << "\" text-anchor=\"end\" font-size=\"10\">" << ly << "</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    const char* color = colors[ci % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0) || !std::isfinite(s.y[i])) continue;
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << width - mr + 10 << "\" y=\"" << mt + 14 + 16 * ci
       << "\" font-size=\"11\" fill=\"" << color << "\">" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  write_text_file(path, os.str());
}

void Manifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(config_echo);
  j["seed"] = seed;
  j["wall_seconds"] = wall_seconds;
  j["version"] = "0.1.0";
  j["outputs"] = outputs;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace sgwave
