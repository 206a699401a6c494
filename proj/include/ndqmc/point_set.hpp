#pragma once

#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ndqmc/error.hpp"

namespace ndqmc {

/// N points in [0,1)^d stored row-major. d = 0 is allowed (the neutral
/// element of concatenation).
class PointSet {
 public:
  PointSet() = default;

  PointSet(std::size_t n, std::size_t d, std::vector<double> data)
      : n_(n), d_(d), data_(std::move(data)) {
    detail::require(n_ >= 1, "PointSet: need at least one point");
    detail::require(data_.size() == n_ * d_, "PointSet: data size must equal n*d");
    for (double x : data_) {
      if (!(x >= 0.0 && x < 1.0)) throw ValidationError("PointSet: coordinates must lie in [0,1)");
    }
  }

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * d_, d_};
  }
  double at(std::size_t i, std::size_t k) const { return data_[i * d_ + k]; }
  std::span<const double> data() const { return data_; }

  /// Projection onto the listed coordinates, in that order.
  PointSet project(std::span<const std::size_t> coords) const {
    std::vector<double> out;
    out.reserve(n_ * coords.size());
    for (std::size_t i = 0; i < n_; ++i) {
      for (auto k : coords) {
        detail::require(k < d_, "PointSet::project: coordinate out of range");
        out.push_back(at(i, k));
      }
    }
    return PointSet(n_, coords.size(), std::move(out));
  }

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Text format: a header line "d N" followed by N lines of d space-separated
/// reals printed with 17 significant digits.
inline void write_text(std::ostream& os, const PointSet& p) {
  os << p.dim() << ' ' << p.size() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t k = 0; k < p.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p.at(i, k));
      if (k) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

inline PointSet read_text(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("PointSet text: missing header");
  std::istringstream header(line);
  long long d = -1, n = -1;
  if (!(header >> d >> n) || d < 0 || n < 1) {
    throw ValidationError("PointSet text: header must be \"d N\" with d >= 0, N >= 1");
  }
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(d * n));
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(is, line)) {
      throw ValidationError("PointSet text: expected " + std::to_string(n) + " rows");
    }
    std::istringstream row(line);
    for (long long k = 0; k < d; ++k) {
      double x;
      if (!(row >> x)) {
        throw ValidationError("PointSet text: row " + std::to_string(i + 1) + " has fewer than " +
                              std::to_string(d) + " values");
      }
      data.push_back(x);
    }
    std::string extra;
    if (row >> extra) {
      throw ValidationError("PointSet text: row " + std::to_string(i + 1) + " has extra values");
    }
  }
  return PointSet(static_cast<std::size_t>(n), static_cast<std::size_t>(d), std::move(data));
}

}  // namespace ndqmc
