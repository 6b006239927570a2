#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "onsetbench/calendar.hpp"
#include "onsetbench/error.hpp"

namespace onsetbench {

inline constexpr double kEarthRadiusM = 6.371e6;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

enum class Units { MillimetresPerDay, MetresPerSecond, Fraction, Days };

std::string_view to_string(Units u);
Units parse_units(std::string_view text);

/// Regular latitude-longitude grid described by its cell edges in degrees.
/// Cells are indexed row-major: `cell = ilat * n_lon + ilon`.
class RegularGrid {
 public:
  RegularGrid() = default;
  RegularGrid(Eigen::VectorXd lat_edges, Eigen::VectorXd lon_edges);

  /// Uniform spacing from `lat0..lat1` and `lon0..lon1` with step `dlat`/`dlon`.
  static RegularGrid uniform(double lat0, double lat1, double dlat, double lon0,
                             double lon1, double dlon);

  const Eigen::VectorXd& lat_edges() const { return lat_edges_; }
  const Eigen::VectorXd& lon_edges() const { return lon_edges_; }

  Eigen::Index n_lat() const { return lat_edges_.size() - 1; }
  Eigen::Index n_lon() const { return lon_edges_.size() - 1; }
  Eigen::Index n_cells() const { return n_lat() * n_lon(); }

  Eigen::Index cell(Eigen::Index ilat, Eigen::Index ilon) const { return ilat * n_lon() + ilon; }
  Eigen::Index lat_index(Eigen::Index cell) const { return cell / n_lon(); }
  Eigen::Index lon_index(Eigen::Index cell) const { return cell % n_lon(); }

  double lat_center(Eigen::Index ilat) const {
    return 0.5 * (lat_edges_[ilat] + lat_edges_[ilat + 1]);
  }
  double lon_center(Eigen::Index ilon) const {
    return 0.5 * (lon_edges_[ilon] + lon_edges_[ilon + 1]);
  }

  /// R^2 * dlon * (sin(lat2) - sin(lat1)), in m^2.
  double cell_area(Eigen::Index cell) const;
  /// All cell areas in cell order.
  const Eigen::VectorXd& cell_areas() const { return areas_; }

  /// Largest edge spacing in degrees over both axes.
  double resolution() const;

  friend bool operator==(const RegularGrid& a, const RegularGrid& b) {
    return a.lat_edges_ == b.lat_edges_ && a.lon_edges_ == b.lon_edges_;
  }

 private:
  Eigen::VectorXd lat_edges_;
  Eigen::VectorXd lon_edges_;
  Eigen::VectorXd areas_;
};

/// Area of the spherical band between two latitudes and longitudes, m^2.
double spherical_patch_area(double lat1, double lat2, double lon1, double lon2);

/// Longitude mapped into [0, 360).
double normalize_longitude(double lon);

inline bool is_missing(double v) { return std::isnan(v); }
inline bool is_missing(float v) { return std::isnan(v); }

/// Daily stack of gridded values. Rows are days, columns are cells; missing
/// values are stored as NaN.
template <typename Scalar>
class FieldSeries {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FieldSeries() = default;
  FieldSeries(RegularGrid grid, CalendarDate start, Units units, Matrix values)
      : grid_(std::move(grid)), start_(start), units_(units), values_(std::move(values)) {
    if (values_.cols() != grid_.n_cells()) {
      throw Error(ErrorKind::ShapeMismatch,
                  "field has " + std::to_string(values_.cols()) + " columns but grid has " +
                      std::to_string(grid_.n_cells()) + " cells");
    }
    if (units_ == Units::MillimetresPerDay) {
      for (Eigen::Index i = 0; i < values_.size(); ++i) {
        const Scalar v = values_.data()[i];
        if (!is_missing(v) && v < Scalar(0)) {
          throw Error(ErrorKind::InvalidArgument, "negative rainfall value in field");
        }
      }
    }
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (std::isinf(values_.data()[i])) {
        throw Error(ErrorKind::InvalidArgument, "non-finite value in field");
      }
    }
  }

  /// All-missing series of the given shape.
  static FieldSeries missing(RegularGrid grid, CalendarDate start, Units units,
                             Eigen::Index n_days) {
    Matrix m = Matrix::Constant(n_days, grid.n_cells(),
                                std::numeric_limits<Scalar>::quiet_NaN());
    return FieldSeries(std::move(grid), start, units, std::move(m));
  }

  const RegularGrid& grid() const { return grid_; }
  CalendarDate start_date() const { return start_; }
  CalendarDate end_date() const { return date_add(start_, static_cast<long>(n_days()) - 1); }
  Units units() const { return units_; }
  Eigen::Index n_days() const { return values_.rows(); }
  Eigen::Index n_cells() const { return values_.cols(); }

  const Matrix& values() const { return values_; }
  Scalar operator()(Eigen::Index day, Eigen::Index cell) const { return values_(day, cell); }

  /// Row index of `d`, or -1 when outside the series.
  Eigen::Index day_index(const CalendarDate& d) const {
    const long k = date_diff(d, start_);
    return (k < 0 || k >= n_days()) ? -1 : static_cast<Eigen::Index>(k);
  }
  bool covers(const CalendarDate& first, const CalendarDate& last) const {
    return day_index(first) >= 0 && day_index(last) >= 0;
  }

  /// One cell's daily values, promoted to double.
  std::vector<double> cell_series(Eigen::Index cell) const {
    std::vector<double> out(static_cast<std::size_t>(n_days()));
    for (Eigen::Index t = 0; t < n_days(); ++t) out[t] = static_cast<double>(values_(t, cell));
    return out;
  }

  template <typename Other>
  FieldSeries<Other> cast() const {
    return FieldSeries<Other>(grid_, start_, units_, values_.template cast<Other>());
  }

 private:
  RegularGrid grid_;
  CalendarDate start_;
  Units units_ = Units::MillimetresPerDay;
  Matrix values_;
};

using DailyFieldSeries = FieldSeries<double>;

/// Land fraction per cell of a grid.
struct CellMask {
  RegularGrid grid;
  Eigen::VectorXd land_fraction;

  CellMask() = default;
  CellMask(RegularGrid g, Eigen::VectorXd fraction);
  static CellMask all_land(const RegularGrid& g) {
    return CellMask(g, Eigen::VectorXd::Ones(g.n_cells()));
  }
};

/// Lat/lon rectangle in degrees; longitudes in [0, 360).
struct LatLonBox {
  double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
};

/// Named subset of cells on an evaluation grid.
class RegionSpec {
 public:
  RegionSpec() = default;
  RegionSpec(std::string name, std::vector<Eigen::Index> cells, const RegularGrid& grid);

  /// Cells whose centers lie in [lat_min, lat_max) x [lon_min, lon_max) and whose
  /// land fraction exceeds `min_land` (when a mask is given).
  static RegionSpec from_box(std::string name, const RegularGrid& grid, const LatLonBox& box,
                             const CellMask* mask = nullptr, double min_land = 0.5);

  /// Core monsoon zone default: 18-28N, 70-90E, land fraction > 0.5.
  static RegionSpec core_monsoon_zone(const RegularGrid& grid, const CellMask* mask = nullptr);

  const std::string& name() const { return name_; }
  const std::vector<Eigen::Index>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

 private:
  std::string name_;
  std::vector<Eigen::Index> cells_;
};

inline constexpr LatLonBox kCoreMonsoonBox{18.0, 28.0, 70.0, 90.0};
inline constexpr LatLonBox kWebsterYangBox{0.0, 20.0, 40.0, 110.0};

}  // namespace onsetbench
