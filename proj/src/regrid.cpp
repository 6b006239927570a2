#include "onsetbench/regrid.hpp"

namespace onsetbench {

namespace {

// Overlapping index ranges along one axis: for each destination interval,
// the source intervals that intersect it with positive length.
struct AxisOverlap {
  Eigen::Index dst, src;
  double lo, hi;
};

std::vector<AxisOverlap> axis_overlaps(const Eigen::VectorXd& src, const Eigen::VectorXd& dst) {
  std::vector<AxisOverlap> out;
  const Eigen::Index ns = src.size() - 1;
  const Eigen::Index nd = dst.size() - 1;
  Eigen::Index s = 0;
  for (Eigen::Index d = 0; d < nd; ++d) {
    while (s < ns && src[s + 1] <= dst[d]) ++s;
    for (Eigen::Index k = s; k < ns && src[k] < dst[d + 1]; ++k) {
      const double lo = std::max(src[k], dst[d]);
      const double hi = std::min(src[k + 1], dst[d + 1]);
      if (hi > lo) out.push_back({d, k, lo, hi});
    }
  }
  return out;
}

}  // namespace

RemapWeights conservative_weights(const RegularGrid& src, const RegularGrid& dst,
                                  const CellMask* mask) {
  if (mask && !(mask->grid == src)) {
    throw Error(ErrorKind::ShapeMismatch, "mask is not on the source grid");
  }
  const auto lat = axis_overlaps(src.lat_edges(), dst.lat_edges());
  const auto lon = axis_overlaps(src.lon_edges(), dst.lon_edges());
  if (lat.empty() || lon.empty()) {
    throw Error(ErrorKind::DisjointGrids, "source and destination grids do not overlap");
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(lat.size() * lon.size());
  const double r2 = kEarthRadiusM * kEarthRadiusM;
  for (const auto& a : lat) {
    const double band = std::sin(a.hi * kDegToRad) - std::sin(a.lo * kDegToRad);
    for (const auto& b : lon) {
      const Eigen::Index sc = src.cell(a.src, b.src);
      double wgt = r2 * (b.hi - b.lo) * kDegToRad * band;
      if (mask) wgt *= mask->land_fraction[sc];
      if (wgt > 0.0) trips.emplace_back(dst.cell(a.dst, b.dst), sc, wgt);
    }
  }
  RemapWeights w(dst.n_cells(), src.n_cells());
  w.setFromTriplets(trips.begin(), trips.end());
  return w;
}

Eigen::VectorXd remap_fraction(const CellMask& src_mask, const RegularGrid& dst) {
  const RemapWeights w = conservative_weights(src_mask.grid, dst, &src_mask);
  Eigen::VectorXd covered = w * Eigen::VectorXd::Ones(src_mask.grid.n_cells());
  return covered.cwiseQuotient(dst.cell_areas()).cwiseMin(1.0);
}

}  // namespace onsetbench
