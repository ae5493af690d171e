#pragma once

#include <algorithm>
#include <tuple>

#include "common.hpp"

namespace ctxrec {

// Square sparse matrix in compressed sparse row form. Row-major
// multiplication with a fixed column order keeps results bit-reproducible.
struct Csr {
  uint32_t n = 0;
  std::vector<std::size_t> row_ptr;  // n + 1
  std::vector<uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return col.size(); }

  // Duplicate (row, col) entries are accumulated; columns sorted per row.
  static Csr from_triplets(uint32_t n, std::vector<std::tuple<uint32_t, uint32_t, double>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    Csr m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    std::size_t k = 0;
    for (uint32_t r = 0; r < n; ++r) {
      m.row_ptr[r] = m.col.size();
      while (k < t.size() && std::get<0>(t[k]) == r) {
        uint32_t c = std::get<1>(t[k]);
        double v = 0.0;
        while (k < t.size() && std::get<0>(t[k]) == r && std::get<1>(t[k]) == c) {
          v += std::get<2>(t[k]);
          ++k;
        }
        m.col.push_back(c);
        m.val.push_back(v);
      }
    }
    m.row_ptr[n] = m.col.size();
    return m;
  }

  Csr transpose() const {
    std::vector<std::tuple<uint32_t, uint32_t, double>> t;
    t.reserve(nnz());
    for (uint32_t r = 0; r < n; ++r)
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        t.emplace_back(col[k], r, val[k]);
    return from_triplets(n, std::move(t));
  }

  // out = A * in
  void multiply(const Mat& in, Mat& out) const {
    require(in.rows() == n && out.rows() == n && in.cols() == out.cols(), Errc::contract,
            "csr multiply: dimension mismatch");
    const std::size_t d = in.cols();
    for (uint32_t r = 0; r < n; ++r) {
      double* dst = out.row(r);
      std::fill(dst, dst + d, 0.0);
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        const double v = val[k];
        const double* src = in.row(col[k]);
        for (std::size_t j = 0; j < d; ++j) dst[j] += v * src[j];
      }
    }
  }

  Mat multiply(const Mat& in) const {
    Mat out(n, in.cols());
    multiply(in, out);
    return out;
  }
};

}  // namespace ctxrec
