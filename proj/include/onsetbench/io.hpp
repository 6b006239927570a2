#pragma once

#include <filesystem>
#include <string>

#include "onsetbench/grid.hpp"

namespace onsetbench {

/// Self-describing gridded series file:
///
///   ONSETBENCH-GSF\n
///   <compact JSON header>\n
///   <float32 little-endian payload, time-major then lat then lon>
///
/// Header keys: schema_version, variable, units, lat_edges, lon_edges,
/// start_date, calendar, n_days, n_lat, n_lon, missing_value, byte_order,
/// element_type.
inline constexpr std::string_view kGridSeriesMagic = "ONSETBENCH-GSF";
inline constexpr int kGridSeriesVersion = 1;
inline constexpr float kDefaultMissingValue = -9999.0f;

struct GridSeriesFile {
  std::string variable;
  float missing_value = kDefaultMissingValue;
  FieldSeries<float> series;
};

/// Values equal to the header's missing value (or NaN) load as NaN.
GridSeriesFile read_grid_series(const std::filesystem::path& path);

void write_grid_series(const FieldSeries<float>& series, const std::filesystem::path& path,
                       const std::string& variable, float missing_value = kDefaultMissingValue);

template <typename Scalar>
void write_grid_series(const FieldSeries<Scalar>& series, const std::filesystem::path& path,
                       const std::string& variable, float missing_value = kDefaultMissingValue) {
  write_grid_series(series.template cast<float>(), path, variable, missing_value);
}

/// Dense series from rows of `date,lat_index,lon_index,value` on `grid`,
/// spanning the first to the last date present; absent entries are missing.
FieldSeries<double> read_csv_series(const std::filesystem::path& path, const RegularGrid& grid,
                                    Units units = Units::MillimetresPerDay);

/// Whole file as a string; throws Io on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace onsetbench
