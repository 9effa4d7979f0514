//
// wingbem -- Common types, error hierarchy and a small parallel loop.
//
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wingbem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

constexpr double pi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometric or numerical input (bad WingSpec, parameter out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Closest-point projection failed to converge; carries the best iterate.
class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& what, Vec2 best_param, double best_gradient)
      : Error(what), best_param(best_param), best_gradient(best_gradient) {}
  Vec2 best_param;
  double best_gradient;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated at coincident points.
class KernelError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear solve failure; row is the offending pivot index.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, long row) : Error(what), row(row) {}
  long row;
};

/// Newton iteration failed; residual_trace holds |r| per iteration.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), residual_trace(std::move(trace)) {}
  std::vector<double> residual_trace;
};

/// Wake relaxation diverged or self-intersected.
class WakeError : public Error {
 public:
  WakeError(const std::string& what, int iteration) : Error(what), iteration(iteration) {}
  int iteration;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0) : Error(what), line(line) {}
  int line;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path) : Error(what), path(std::move(path)) {}
  std::string path;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one worker, so writes to disjoint slots are deterministic.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace wingbem
