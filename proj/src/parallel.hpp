#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace egns::detail {

/// Per-chunk output of an element loop.
struct Contributions {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::pair<int, double>> entries;
};

/// Runs body(t, out) for t in [0, n) split into contiguous chunks, one per
/// worker, and concatenates the chunk outputs in element order. Triplet and
/// entry sequences are therefore identical to a serial loop.
template <class Body>
Contributions for_each_element(int n, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, std::max(1, n));
  std::vector<Contributions> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](int w) {
    const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    try {
      for (int t = begin; t < end; ++t) body(t, parts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (workers == 1) return std::move(parts[0]);
  Contributions all;
  for (auto& p : parts) {
    all.triplets.insert(all.triplets.end(), p.triplets.begin(), p.triplets.end());
    all.entries.insert(all.entries.end(), p.entries.begin(), p.entries.end());
  }
  return all;
}

inline Eigen::SparseMatrix<double> to_sparse(int rows, int cols,
                                             const std::vector<Eigen::Triplet<double>>& t) {
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline Eigen::VectorXd to_dense(int size, const std::vector<std::pair<int, double>>& entries) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
  for (const auto& [i, x] : entries) v[i] += x;
  return v;
}

}  // namespace egns::detail
