#include "semscale/solvers/projection.hpp"

#include <chrono>
#include <cmath>

#include "semscale/error.hpp"

namespace semscale::solvers {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_finite(std::span<const double> v, const char* where) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument(std::string(where) + ": non-finite input");
}

std::vector<std::span<const double>> spans(const std::deque<std::vector<double>>& vs) {
  return {vs.begin(), vs.end()};
}

} // namespace

ProjectionSpace::ProjectionSpace(int capacity) : capacity_(capacity) {
  if (capacity < 0) throw InvalidArgument("ProjectionSpace: capacity must be >= 0");
}

void ProjectionSpace::clear() {
  basis_.clear();
  images_.clear();
  solutions_.clear();
  solution_images_.clear();
}

std::vector<double> ProjectionSpace::project_out(std::span<double> f, sim::Exec& exec) {
  check_finite(f, "ProjectionSpace::project_out");
  std::vector<double> xbar(f.size(), 0.0);
  if (basis_.empty()) return xbar;
  for (const auto& b : basis_)
    if (b.size() != f.size()) throw InvalidArgument("ProjectionSpace::project_out: size mismatch");
  std::vector<double> alpha(basis_.size());
  const auto bs = spans(basis_);
  exec.dot_many(f, bs, alpha, "projection");
  const auto t0 = Clock::now();
  for (std::size_t k = 0; k < basis_.size(); ++k)
    for (std::size_t i = 0; i < f.size(); ++i) {
      xbar[i] += alpha[k] * basis_[k][i];
      f[i] -= alpha[k] * images_[k][i];
    }
  exec.charge_points(4.0 * static_cast<double>(basis_.size()), seconds_since(t0), "projection");
  return xbar;
}

void ProjectionSpace::update(std::span<const double> x, const LinearMap& h, sim::Exec& exec) {
  if (capacity_ == 0) return;
  check_finite(x, "ProjectionSpace::update");
  std::vector<double> hx(x.size());
  h(x, hx);
  solutions_.emplace_back(x.begin(), x.end());
  solution_images_.push_back(std::move(hx));
  if (static_cast<int>(solutions_.size()) > capacity_) {
    // Rebuild from the retained solutions so the span stays that of the last L.
    solutions_.pop_front();
    solution_images_.pop_front();
    basis_.clear();
    images_.clear();
    for (std::size_t k = 0; k < solutions_.size(); ++k) append(solutions_[k], solution_images_[k], exec);
  } else {
    append(solutions_.back(), solution_images_.back(), exec);
  }
}

void ProjectionSpace::append(const std::vector<double>& x, const std::vector<double>& hx, sim::Exec& exec) {
  std::vector<double> v = x, hv = hx;
  double norm0 = exec.dot(v, hv, "projection");
  if (!(norm0 > 0.0)) return;

  // Classical Gram-Schmidt in the H inner product, twice. H v is updated
  // alongside v so no extra operator application is needed.
  for (int pass = 0; pass < 2 && !basis_.empty(); ++pass) {
    std::vector<double> c(basis_.size());
    const auto imgs = spans(images_);
    exec.dot_many(v, imgs, c, "projection");
    const auto t0 = Clock::now();
    for (std::size_t k = 0; k < basis_.size(); ++k)
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] -= c[k] * basis_[k][i];
        hv[i] -= c[k] * images_[k][i];
      }
    exec.charge_points(4.0 * static_cast<double>(basis_.size()), seconds_since(t0), "projection");
  }
  const double vhv = exec.dot(v, hv, "projection");
  if (!(vhv > 1e-18 * norm0)) return;
  const double s = 1.0 / std::sqrt(vhv);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] *= s;
    hv[i] *= s;
  }
  basis_.push_back(std::move(v));
  images_.push_back(std::move(hv));
}

} // namespace semscale::solvers
