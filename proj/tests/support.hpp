#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "onsetbench/grid.hpp"

namespace testing {

// Fresh scratch directory under ONSETBENCH_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("ONSETBENCH_TEST_TMP");
  std::filesystem::path p = root ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "onsetbench";
  p /= name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Single-cell rainfall series starting at `start`.
inline onsetbench::DailyFieldSeries one_cell(const onsetbench::CalendarDate& start, const std::vector<double>& v) {
  const auto grid = onsetbench::RegularGrid::uniform(20, 21, 1, 80, 81, 1);
  onsetbench::DailyFieldSeries::Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return {grid, start, onsetbench::Units::MillimetresPerDay, std::move(m)};
}

}  // namespace testing
