#pragma once

#include <Eigen/SparseCore>

#include <algorithm>
#include <optional>
#include <vector>

#include "onsetbench/grid.hpp"

namespace onsetbench {

using RemapWeights = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// First-order conservative overlap weights, destination x source, holding
/// overlap area (m^2) scaled by the source land fraction when `mask` is given.
/// Throws DisjointGrids when no source cell overlaps any destination cell.
RemapWeights conservative_weights(const RegularGrid& src, const RegularGrid& dst,
                                  const CellMask* mask = nullptr);

/// Fraction of each destination cell's area covered by source land
/// (overlap area x land fraction / destination area).
Eigen::VectorXd remap_fraction(const CellMask& src_mask, const RegularGrid& dst);

/// Mask on the source grid: 1 where the cell has any non-missing value, else 0.
template <typename Scalar>
CellMask coverage_mask(const FieldSeries<Scalar>& field) {
  Eigen::VectorXd frac = Eigen::VectorXd::Zero(field.n_cells());
  for (Eigen::Index c = 0; c < field.n_cells(); ++c) {
    for (Eigen::Index t = 0; t < field.n_days(); ++t) {
      if (!is_missing(field(t, c))) {
        frac[c] = 1.0;
        break;
      }
    }
  }
  return CellMask(field.grid(), std::move(frac));
}

/// Area-weighted mean of overlapping source cells for every destination cell
/// and day. Missing source values drop out and the remaining weights
/// renormalise; a destination cell with no contributing weight is missing.
template <typename Scalar>
FieldSeries<Scalar> regrid_conservative(const FieldSeries<Scalar>& src, const RegularGrid& dst,
                                        const CellMask* mask = nullptr,
                                        std::optional<Units> expect_units = std::nullopt) {
  if (expect_units && *expect_units != src.units()) {
    throw Error(ErrorKind::UnitMismatch, std::string("regrid expected units ") +
                                             std::string(to_string(*expect_units)) + " but field has " +
                                             std::string(to_string(src.units())));
  }
  if (mask && !(mask->grid == src.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "regrid mask is not on the source grid");
  }
  const RemapWeights w = conservative_weights(src.grid(), dst, mask);
  const RemapWeights wt = w.transpose();

  using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  typename FieldSeries<Scalar>::Matrix out(src.n_days(), dst.n_cells());
  constexpr Eigen::Index kChunk = 2048;
  for (Eigen::Index t0 = 0; t0 < src.n_days(); t0 += kChunk) {
    const Eigen::Index nt = std::min(kChunk, src.n_days() - t0);
    const auto block = src.values().middleRows(t0, nt);
    Dense filled(nt, src.n_cells());
    Dense present(nt, src.n_cells());
    for (Eigen::Index t = 0; t < nt; ++t) {
      for (Eigen::Index c = 0; c < src.n_cells(); ++c) {
        const Scalar v = block(t, c);
        const bool ok = !is_missing(v);
        filled(t, c) = ok ? static_cast<double>(v) : 0.0;
        present(t, c) = ok ? 1.0 : 0.0;
      }
    }
    const Dense num = filled * wt;
    const Dense den = present * wt;
    for (Eigen::Index t = 0; t < nt; ++t) {
      for (Eigen::Index c = 0; c < dst.n_cells(); ++c) {
        out(t0 + t, c) = den(t, c) > 0.0 ? static_cast<Scalar>(num(t, c) / den(t, c))
                                         : std::numeric_limits<Scalar>::quiet_NaN();
      }
    }
  }
  return FieldSeries<Scalar>(dst, src.start_date(), src.units(), std::move(out));
}

/// sum(area * v) / sum(area) over the region's non-missing cells on `day`.
template <typename Scalar>
double area_weighted_mean(const FieldSeries<Scalar>& field, const RegionSpec& region,
                          Eigen::Index day) {
  if (day < 0 || day >= field.n_days()) {
    throw Error(ErrorKind::OutOfRange, "day index outside field");
  }
  double num = 0.0, den = 0.0;
  for (Eigen::Index c : region.cells()) {
    if (c >= field.n_cells()) {
      throw Error(ErrorKind::OutOfRange, "region cell outside field grid");
    }
    const Scalar v = field(day, c);
    if (is_missing(v)) continue;
    const double a = field.grid().cell_area(c);
    num += a * static_cast<double>(v);
    den += a;
  }
  if (!(den > 0.0)) {
    throw Error(ErrorKind::MissingData,
                "all cells of region '" + region.name() + "' are missing on day " +
                    std::to_string(day));
  }
  return num / den;
}

}  // namespace onsetbench
