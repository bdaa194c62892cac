#include "lipvi/io.hpp"

#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lipvi/error.hpp"

namespace lipvi {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = cell.find_first_not_of(' ');
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return in;
}

bool is_blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

void write_dataset(std::ostream& out, const TransitionDataset& dataset) {
  const std::size_t ds = dataset.state_dim(), da = dataset.action_dim();
  out << "ep,t";
  for (std::size_t k = 0; k < ds; ++k) out << ",s" << k;
  for (std::size_t k = 0; k < da; ++k) out << ",a" << k;
  out << ",r";
  for (std::size_t k = 0; k < ds; ++k) out << ",sp" << k;
  out << '\n';
  for (const auto& row : dataset.rows()) {
    out << row.episode << ',' << row.t;
    for (double v : row.s) out << ',' << format_real(v);
    for (double v : row.a) out << ',' << format_real(v);
    out << ',' << format_real(row.r);
    for (double v : row.s_next) out << ',' << format_real(v);
    out << '\n';
  }
}

TransitionDataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "missing header");
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "ep" || header[1] != "t")
    throw Error(Errc::parse_error, "header must start with ep,t");
  std::size_t ds = 0, da = 0, dsp = 0;
  std::size_t col = 2;
  while (col < header.size() && header[col] == "s" + std::to_string(ds)) ++ds, ++col;
  while (col < header.size() && header[col] == "a" + std::to_string(da)) ++da, ++col;
  if (col >= header.size() || header[col] != "r") throw Error(Errc::parse_error, "header is missing the r column");
  ++col;
  while (col < header.size() && header[col] == "sp" + std::to_string(dsp)) ++dsp, ++col;
  if (col != header.size() || ds == 0 || dsp != ds)
    throw Error(Errc::parse_error, "header must be ep,t,s0..,a0..,r,sp0.. with matching state columns");

  TransitionDataset data(ds, da);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected " +
                                         std::to_string(header.size()) + " fields");
    TransitionDataset::Row row;
    row.episode = parse_int(cells[0], lineno);
    row.t = parse_int(cells[1], lineno);
    std::size_t c = 2;
    for (std::size_t k = 0; k < ds; ++k) row.s.push_back(parse_real(cells[c++], lineno));
    for (std::size_t k = 0; k < da; ++k) row.a.push_back(parse_real(cells[c++], lineno));
    row.r = parse_real(cells[c++], lineno);
    for (std::size_t k = 0; k < ds; ++k) row.s_next.push_back(parse_real(cells[c++], lineno));
    data.add(std::move(row));
  }
  if (data.empty()) throw Error(Errc::empty_input, "dataset has no rows");
  return data;
}

void save_dataset(const std::filesystem::path& path, const TransitionDataset& dataset) {
  std::ostringstream os;
  write_dataset(os, dataset);
  write_file_atomic(path, os.str());
}

TransitionDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void save_points(const std::filesystem::path& path, std::span<const Point> points) {
  std::ostringstream os;
  if (!points.empty()) {
    const auto& p0 = points.front();
    for (std::size_t k = 0; k < p0.state_dim(); ++k) os << (k ? "," : "") << 's' << k;
    for (std::size_t k = 0; k < p0.action_dim(); ++k) os << ',' << 'a' << k;
    os << '\n';
  }
  for (const auto& p : points) {
    for (std::size_t k = 0; k < p.dim(); ++k) os << (k ? "," : "") << format_real(p[k]);
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

std::vector<Point> load_points(const std::filesystem::path& path, std::size_t state_dim, std::size_t action_dim) {
  auto in = open_in(path);
  std::vector<Point> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    auto cells = split_csv(line);
    if (lineno == 1 && !cells.empty() && !cells[0].empty() && cells[0][0] == 's') continue;
    if (cells.size() != state_dim + action_dim)
      throw Error(Errc::dimension_mismatch, "line " + std::to_string(lineno) + ": expected " +
                                                std::to_string(state_dim + action_dim) + " fields");
    std::vector<double> c;
    for (const auto& s : cells) c.push_back(parse_real(s, lineno));
    out.emplace_back(std::move(c), state_dim, action_dim);
  }
  if (out.empty()) throw Error(Errc::empty_input, "no points in " + path.string());
  return out;
}

std::shared_ptr<const FeatureTable> load_feature_table(const std::filesystem::path& path,
                                                      const TransitionDataset& dataset, bool allow_fallback) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "missing header");
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "row") throw Error(Errc::parse_error, "header must be row,f0,...");
  for (std::size_t k = 1; k < header.size(); ++k)
    if (header[k] != "f" + std::to_string(k - 1)) throw Error(Errc::parse_error, "header must be row,f0,...");
  const std::size_t fdim = header.size() - 1;

  std::vector<std::vector<double>> feats(dataset.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": wrong field count");
    auto row = parse_int(cells[0], lineno);
    if (row < 0 || static_cast<std::size_t>(row) >= dataset.size())
      throw Error(Errc::index_out_of_range, "line " + std::to_string(lineno) + ": row index out of range");
    auto& f = feats[static_cast<std::size_t>(row)];
    if (!f.empty()) throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": duplicate row");
    for (std::size_t k = 1; k < cells.size(); ++k) f.push_back(parse_real(cells[k], lineno));
  }
  PointMatrix points, features;
  features.dim = fdim;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (feats[i].empty()) throw Error(Errc::length_mismatch, "feature table misses row " + std::to_string(i));
    points.push(dataset.point(i).coords());
    features.push(feats[i]);
  }
  return std::make_shared<const FeatureTable>(std::move(points), std::move(features), allow_fallback);
}

nlohmann::json config_to_json(const LviConfig& cfg) {
  nlohmann::json j;
  j["gamma"] = cfg.gamma;
  j["eta"] = cfg.eta;
  j["max_iters"] = cfg.max_iters;
  j["tol"] = cfg.tol ? nlohmann::json(*cfg.tol) : nlohmann::json(nullptr);
  j["subsample"] = cfg.subsample;
  j["action_samples"] = cfg.action_samples;
  j["init_points"] = cfg.init_points;
  j["kappa"] = cfg.kappa;
  j["max_escalations"] = cfg.max_escalations;
  j["seed"] = cfg.seed;
  return j;
}

nlohmann::json report_to_json(const BoundsReport& r) {
  nlohmann::json j;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["eta_initial"] = r.eta_initial;
  j["eta_used"] = r.eta_used;
  j["escalations"] = r.escalations;
  j["iterations"] = {{"upper", r.iterations_upper}, {"lower", r.iterations_lower}, {"total", r.iterations}};
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"t", e.t},
                     {"r_upper", e.r_upper},
                     {"r_lower", e.r_lower},
                     {"max_dq", std::isnan(e.max_dq) ? nlohmann::json(nullptr) : nlohmann::json(e.max_dq)}});
  }
  j["trace"] = std::move(trace);
  j["diagnosis"] = to_string(r.diagnosis);
  j["crossings"] = r.crossings;
  j["covering_radius"] = r.covering_radius;
  j["gap_bound"] = r.gap_bound;
  j["tol"] = r.tol;
  j["rows"] = r.rows;
  j["subsample_used"] = r.subsample_used;
  j["action_samples"] = r.action_samples;
  j["stochastic_target"] = r.stochastic_target;
  j["feature_fallbacks"] = r.feature_fallbacks;
  j["config"] = config_to_json(r.config);
  j["seed"] = r.config.seed;
  j["versions"] = {{"lipvi", kVersion}, {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(Errc::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot move result into " + path.string());
  }
}

}  // namespace lipvi
