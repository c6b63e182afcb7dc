#pragma once

// Collocation point generation: uniform grids (endpoints included), Latin
// hypercube sampling, and shuffled draw-without-replacement pools.

#include <span>
#include <stdexcept>
#include <vector>

#include "sfpinn/pde.hpp"
#include "sfpinn/rng.hpp"

namespace sfpinn {

// Tensor grid with counts[d] nodes per dimension, endpoints included.
// Points are flattened row-major, last dimension fastest.
inline std::vector<double> uniform_grid(const Domain& dom, std::span<const int> counts) {
  dom.validate();
  if (static_cast<int>(counts.size()) != dom.dim())
    throw std::invalid_argument("uniform_grid: counts size must match dimension");
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw std::invalid_argument("uniform_grid: counts must be >= 1");
    total *= static_cast<std::size_t>(c);
  }
  const int dim = dom.dim();
  std::vector<double> pts(total * dim);
  std::vector<int> idx(dim, 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (int d = 0; d < dim; ++d) {
      const int n = counts[d];
      pts[p * dim + d] =
          n == 1 ? 0.5 * (dom.lo(d) + dom.hi(d))
                 : dom.lo(d) + (dom.hi(d) - dom.lo(d)) * idx[d] / static_cast<double>(n - 1);
    }
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
    }
  }
  return pts;
}

// One point per axis-aligned stratum per dimension, strata permuted
// independently across dimensions.
inline std::vector<double> latin_hypercube(const Domain& dom, int count, Rng& rng) {
  dom.validate();
  if (count < 1) throw std::invalid_argument("latin_hypercube: count must be >= 1");
  const int dim = dom.dim();
  std::vector<double> pts(static_cast<std::size_t>(count) * dim);
  std::vector<int> perm(count);
  for (int d = 0; d < dim; ++d) {
    for (int i = 0; i < count; ++i) perm[i] = i;
    rng.shuffle(perm);
    for (int i = 0; i < count; ++i) {
      const double u = (perm[i] + rng.uniform()) / count;
      pts[static_cast<std::size_t>(i) * dim + d] = dom.lo(d) + (dom.hi(d) - dom.lo(d)) * u;
    }
  }
  return pts;
}

// Fixed point pool; batches are drawn without replacement, reshuffling at
// every epoch boundary.
class SamplePool {
 public:
  SamplePool() = default;

  SamplePool(std::vector<double> pts, int dim) : pts_(std::move(pts)), dim_(dim) {
    order_.resize(pts_.size() / dim_);
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
  }

  int dim() const { return dim_; }
  std::size_t size() const { return order_.size(); }
  std::span<const double> point(std::size_t i) const {
    return {pts_.data() + static_cast<std::size_t>(order_[i]) * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const double> raw_point(std::size_t i) const {
    return {pts_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  // Appends `count` points (count x dim doubles) to out.
  void draw(int count, Rng& rng, std::vector<double>& out) {
    if (order_.empty()) throw std::invalid_argument("SamplePool: empty pool");
    for (int k = 0; k < count; ++k) {
      if (cursor_ == order_.size()) {
        rng.shuffle(order_);
        cursor_ = 0;
      }
      const auto p = point(cursor_++);
      out.insert(out.end(), p.begin(), p.end());
    }
  }

 private:
  std::vector<double> pts_;
  int dim_ = 0;
  std::vector<std::uint32_t> order_;
  std::size_t cursor_ = 0;
};

// Grid over one boundary face: full-dimension points with pts[dim] fixed to
// the face coordinate. Resolution per free dimension comes from shape.
inline std::vector<double> face_grid(const Domain& dom, std::span<const int> shape, int face_dim,
                                     int side, bool exclude_corners) {
  const int dim = dom.dim();
  std::vector<double> pts;
  const double fixed = side == 0 ? dom.lo(face_dim) : dom.hi(face_dim);
  // iterate over the remaining dimensions
  std::vector<int> counts;
  std::vector<int> dims;
  for (int d = 0; d < dim; ++d) {
    if (d == face_dim) continue;
    dims.push_back(d);
    counts.push_back(static_cast<int>(shape.size()) == dim ? shape[d] : 64);
  }
  if (dims.empty()) {
    pts.push_back(fixed);
    return pts;
  }
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  std::vector<double> pt(dim);
  pt[face_dim] = fixed;
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    bool corner = true;
    for (std::size_t k = counts.size(); k-- > 0;) {
      const int n = counts[k];
      const int i = static_cast<int>(rem % n);
      rem /= n;
      pt[dims[k]] = n == 1 ? 0.5 * (dom.lo(dims[k]) + dom.hi(dims[k]))
                           : dom.lo(dims[k]) +
                                 (dom.hi(dims[k]) - dom.lo(dims[k])) * i / static_cast<double>(n - 1);
      corner = corner && n > 1 && (i == 0 || i == n - 1);
    }
    if (!(exclude_corners && corner)) pts.insert(pts.end(), pt.begin(), pt.end());
  }
  return pts;
}

// The t=0 slice: grid over space dimensions at the shape resolution.
inline std::vector<double> time_zero_grid(const Domain& dom, std::span<const int> shape) {
  if (!dom.has_time) throw std::invalid_argument("time_zero_grid: domain has no time dimension");
  return face_grid(dom, shape, dom.time_dim(), 0, false);
}

}  // namespace sfpinn
