#include "entlab/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace entlab {

json operator_to_json(const cmat& m, const Layout& layout) {
  if (m.rows() != m.cols()) throw dimension_error("operator_to_json: matrix is not square");
  if (!layout.empty() && layout_dim(layout) != m.rows())
    throw dimension_error("operator_to_json: layout does not match the matrix");
  json j;
  j["dim"] = m.rows();
  j["layout"] = layout;
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

cmat operator_from_json(const json& j, Layout* layout_out) {
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  if (dim < 1) throw dimension_error("operator_from_json: bad dimension");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != dim * dim ||
      static_cast<Eigen::Index>(im.size()) != dim * dim)
    throw dimension_error("operator_from_json: entry count does not match dim");
  Layout layout = j.value("layout", Layout{});
  if (!layout.empty() && layout_dim(layout) != dim)
    throw dimension_error("operator_from_json: layout does not match dim");
  cmat m(dim, dim);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c, ++k)
      m(r, c) = cxd(re[static_cast<size_t>(k)].get<double>(),
                    im[static_cast<size_t>(k)].get<double>());
  if (layout_out) *layout_out = std::move(layout);
  return m;
}

json report_envelope(json config, json results) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  j["meta"] = json{{"timestamp", stamp}};
  return j;
}

std::string csv_table(const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << header << '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw parameter_error("cannot open for writing: " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw parameter_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace entlab
