#include "onsetbench/grid.hpp"

#include <algorithm>

namespace onsetbench {

std::string_view to_string(Units u) {
  switch (u) {
    case Units::MillimetresPerDay: return "mm/day";
    case Units::MetresPerSecond: return "m/s";
    case Units::Fraction: return "1";
    case Units::Days: return "day";
  }
  return "?";
}

Units parse_units(std::string_view text) {
  if (text == "mm/day") return Units::MillimetresPerDay;
  if (text == "m/s") return Units::MetresPerSecond;
  if (text == "1") return Units::Fraction;
  if (text == "day") return Units::Days;
  throw Error(ErrorKind::UnitMismatch, "unknown units '" + std::string(text) + "'");
}

double normalize_longitude(double lon) {
  double x = std::fmod(lon, 360.0);
  if (x < 0) x += 360.0;
  return x;
}

double spherical_patch_area(double lat1, double lat2, double lon1, double lon2) {
  return kEarthRadiusM * kEarthRadiusM * (lon2 - lon1) * kDegToRad *
         (std::sin(lat2 * kDegToRad) - std::sin(lat1 * kDegToRad));
}

namespace {

void check_edges(const Eigen::VectorXd& e, const char* axis) {
  if (e.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, std::string(axis) + " needs at least two edges");
  }
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (!std::isfinite(e[i])) {
      throw Error(ErrorKind::InvalidArgument, std::string(axis) + " edges must be finite");
    }
    if (i > 0 && !(e[i] > e[i - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string(axis) + " edges must be strictly ascending");
    }
  }
}

}  // namespace

RegularGrid::RegularGrid(Eigen::VectorXd lat_edges, Eigen::VectorXd lon_edges)
    : lat_edges_(std::move(lat_edges)), lon_edges_(std::move(lon_edges)) {
  check_edges(lat_edges_, "latitude");
  check_edges(lon_edges_, "longitude");
  if (lat_edges_[0] < -90.0 || lat_edges_[lat_edges_.size() - 1] > 90.0) {
    throw Error(ErrorKind::InvalidArgument, "latitude edges outside [-90, 90]");
  }
  // Regional grids only: shift so the first edge is in [0, 360) and keep
  // the span monotone (no wraparound handling).
  const double shift = normalize_longitude(lon_edges_[0]) - lon_edges_[0];
  lon_edges_.array() += shift;
  if (lon_edges_[lon_edges_.size() - 1] - lon_edges_[0] > 360.0) {
    throw Error(ErrorKind::InvalidArgument, "longitude span exceeds 360 degrees");
  }
  areas_.resize(n_cells());
  for (Eigen::Index i = 0; i < n_lat(); ++i) {
    for (Eigen::Index j = 0; j < n_lon(); ++j) {
      const double a = spherical_patch_area(lat_edges_[i], lat_edges_[i + 1], lon_edges_[j],
                                            lon_edges_[j + 1]);
      if (!(a > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid cell with non-positive area");
      }
      areas_[cell(i, j)] = a;
    }
  }
}

RegularGrid RegularGrid::uniform(double lat0, double lat1, double dlat, double lon0,
                                 double lon1, double dlon) {
  if (!(dlat > 0) || !(dlon > 0)) {
    throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  }
  const auto nlat = static_cast<Eigen::Index>(std::llround((lat1 - lat0) / dlat));
  const auto nlon = static_cast<Eigen::Index>(std::llround((lon1 - lon0) / dlon));
  Eigen::VectorXd lat(nlat + 1), lon(nlon + 1);
  for (Eigen::Index i = 0; i <= nlat; ++i) lat[i] = lat0 + dlat * static_cast<double>(i);
  for (Eigen::Index j = 0; j <= nlon; ++j) lon[j] = lon0 + dlon * static_cast<double>(j);
  return RegularGrid(std::move(lat), std::move(lon));
}

double RegularGrid::cell_area(Eigen::Index c) const { return areas_[c]; }

double RegularGrid::resolution() const {
  double r = 0.0;
  for (Eigen::Index i = 1; i < lat_edges_.size(); ++i)
    r = std::max(r, lat_edges_[i] - lat_edges_[i - 1]);
  for (Eigen::Index j = 1; j < lon_edges_.size(); ++j)
    r = std::max(r, lon_edges_[j] - lon_edges_[j - 1]);
  return r;
}

CellMask::CellMask(RegularGrid g, Eigen::VectorXd fraction)
    : grid(std::move(g)), land_fraction(std::move(fraction)) {
  if (land_fraction.size() != grid.n_cells()) {
    throw Error(ErrorKind::ShapeMismatch, "mask size does not match its grid");
  }
  for (Eigen::Index i = 0; i < land_fraction.size(); ++i) {
    if (!(land_fraction[i] >= 0.0 && land_fraction[i] <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "land fraction outside [0, 1]");
    }
  }
}

RegionSpec::RegionSpec(std::string name, std::vector<Eigen::Index> cells,
                       const RegularGrid& grid)
    : name_(std::move(name)), cells_(std::move(cells)) {
  if (cells_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "region '" + name_ + "' has no cells");
  }
  for (auto c : cells_) {
    if (c < 0 || c >= grid.n_cells()) {
      throw Error(ErrorKind::OutOfRange,
                  "region '" + name_ + "' cell " + std::to_string(c) + " outside grid");
    }
  }
}

RegionSpec RegionSpec::from_box(std::string name, const RegularGrid& grid,
                                const LatLonBox& box, const CellMask* mask, double min_land) {
  if (mask && !(mask->grid == grid)) {
    throw Error(ErrorKind::ShapeMismatch, "region mask is not on the region grid");
  }
  std::vector<Eigen::Index> cells;
  for (Eigen::Index i = 0; i < grid.n_lat(); ++i) {
    const double lat = grid.lat_center(i);
    if (lat < box.lat_min || lat >= box.lat_max) continue;
    for (Eigen::Index j = 0; j < grid.n_lon(); ++j) {
      const double lon = normalize_longitude(grid.lon_center(j));
      if (lon < box.lon_min || lon >= box.lon_max) continue;
      const Eigen::Index c = grid.cell(i, j);
      if (mask && !(mask->land_fraction[c] > min_land)) continue;
      cells.push_back(c);
    }
  }
  return RegionSpec(std::move(name), std::move(cells), grid);
}

RegionSpec RegionSpec::core_monsoon_zone(const RegularGrid& grid, const CellMask* mask) {
  return from_box("cmz", grid, kCoreMonsoonBox, mask, 0.5);
}

}  // namespace onsetbench
