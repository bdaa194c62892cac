#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipvi/lvi.hpp"
#include "lipvi/mdp.hpp"
#include "lipvi/metric.hpp"

namespace lipvi {

/// Reals are written with 17 significant digits so every double round-trips.
std::string format_real(double v);

/// Header `ep,t,s0..s{ds-1},a0..a{da-1},r,sp0..sp{ds-1}`.
void write_dataset(std::ostream& out, const TransitionDataset& dataset);
TransitionDataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const TransitionDataset& dataset);
TransitionDataset load_dataset(const std::filesystem::path& path);

/// Initial points as `s0..,a0..` rows.
void save_points(const std::filesystem::path& path, std::span<const Point> points);
std::vector<Point> load_points(const std::filesystem::path& path, std::size_t state_dim, std::size_t action_dim);

/// Header `row,f0,...,f{k-1}`; `row` is the 0-based dataset row.
std::shared_ptr<const FeatureTable> load_feature_table(const std::filesystem::path& path,
                                                      const TransitionDataset& dataset, bool allow_fallback = true);

nlohmann::json config_to_json(const LviConfig& cfg);
nlohmann::json report_to_json(const BoundsReport& report);

/// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lipvi
