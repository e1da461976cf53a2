// Copyright 2026 The qbnsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbnsl/cobyla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbnsl/error.hpp"

namespace qbnsl {
namespace {

// Powell's simplex acceptability and step constants.
constexpr double kAlpha = 0.25;  // minimum relative vertex distance from the opposite face
constexpr double kBeta = 2.1;    // maximum relative edge length
constexpr double kGamma = 0.5;   // geometry step length
constexpr double kDelta = 1.1;   // edge-length threshold when picking a vertex to drop

using Matrix = std::vector<std::vector<double>>;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Rows of the result are the rows of the inverse of the matrix whose
// columns are `dirs[j]`. Throws if singular.
Matrix invert_columns(const Matrix& dirs) {
  const std::size_t n = dirs.size();
  Matrix a(n, std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = dirs[j][i];
    a[i][n + i] = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) throw DomainError("cobyla: degenerate simplex");
    std::swap(a[piv], a[c]);
    const double inv = 1.0 / a[c][c];
    for (auto& v : a[c]) v *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double factor = a[r][c];
      for (std::size_t k = 0; k < 2 * n; ++k) a[r][k] -= factor * a[c][k];
    }
  }
  Matrix inv(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  }
  return inv;
}

class Simplex {
 public:
  Simplex(const Objective& f, std::vector<double> x0, const CobylaOptions& opt)
      : f_(f), opt_(opt), n_(x0.size()), x0_(std::move(x0)) {}

  CobylaResult run();

 private:
  double evaluate(std::span<const double> x) {
    const double v = f_(x);
    ++evals_;
    const double safe = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    if (safe < best_f_ || best_x_.empty()) {
      best_f_ = safe;
      best_x_.assign(x.begin(), x.end());
    }
    return safe;
  }
  bool budget_left() const { return evals_ < opt_.max_evaluations; }
  std::vector<double> point(std::span<const double> d) const {
    std::vector<double> x(x0_);
    for (std::size_t i = 0; i < n_; ++i) x[i] += d[i];
    return x;
  }
  void replace_vertex(std::size_t j, const std::vector<double>& dx, double fval);
  void pivot_to_best();
  void refresh_inverse_if_drifted();

  const Objective& f_;
  CobylaOptions opt_;
  std::size_t n_;
  std::vector<double> x0_;
  double f0_ = 0.0;
  Matrix dirs_;  // dirs_[j] = vertex j - pivot
  Matrix simi_;  // inverse of the matrix with columns dirs_
  std::vector<double> fvals_;
  std::size_t evals_ = 0;
  std::vector<double> best_x_;
  double best_f_ = std::numeric_limits<double>::infinity();
};

void Simplex::replace_vertex(std::size_t j, const std::vector<double>& dx, double fval) {
  const double t = dot(simi_[j], dx);
  dirs_[j] = dx;
  for (auto& v : simi_[j]) v /= t;
  for (std::size_t k = 0; k < n_; ++k) {
    if (k == j) continue;
    const double s = dot(simi_[k], dx);
    for (std::size_t i = 0; i < n_; ++i) simi_[k][i] -= s * simi_[j][i];
  }
  fvals_[j] = fval;
}

void Simplex::pivot_to_best() {
  std::size_t nbest = n_;
  double lowest = f0_;
  for (std::size_t j = 0; j < n_; ++j) {
    if (fvals_[j] < lowest) {
      lowest = fvals_[j];
      nbest = j;
    }
  }
  if (nbest == n_) return;
  const std::vector<double> shift = dirs_[nbest];
  for (std::size_t i = 0; i < n_; ++i) x0_[i] += shift[i];
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) dirs_[j][i] = j == nbest ? -shift[i] : dirs_[j][i] - shift[i];
  }
  std::vector<double> row(n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) row[i] -= simi_[k][i];
  }
  simi_[nbest] = row;
  std::swap(f0_, fvals_[nbest]);
}

void Simplex::refresh_inverse_if_drifted() {
  double err = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      err = std::max(err, std::abs(dot(simi_[i], dirs_[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  if (err > 1e-8) simi_ = invert_columns(dirs_);
}

CobylaResult Simplex::run() {
  double rho = opt_.rhobeg;
  const double rhoend = opt_.rhoend;

  f0_ = evaluate(x0_);
  dirs_.assign(n_, std::vector<double>(n_, 0.0));
  simi_.assign(n_, std::vector<double>(n_, 0.0));
  fvals_.assign(n_, 0.0);
  bool converged = false;
  for (std::size_t j = 0; j < n_; ++j) {
    dirs_[j][j] = rho;
    fvals_[j] = budget_left() ? evaluate(point(dirs_[j])) : std::numeric_limits<double>::infinity();
    if (fvals_[j] < f0_) {
      // Move the pivot to the better point; the old pivot becomes vertex j.
      x0_[j] += rho;
      for (std::size_t k = 0; k <= j; ++k) dirs_[k][j] = -rho;
      std::swap(f0_, fvals_[j]);
    }
  }
  simi_ = invert_columns(dirs_);

  bool force_trust_step = false;
  while (budget_left()) {
    pivot_to_best();
    refresh_inverse_if_drifted();

    std::vector<double> vsig(n_), veta(n_);
    bool acceptable = true;
    for (std::size_t j = 0; j < n_; ++j) {
      vsig[j] = 1.0 / norm2(simi_[j]);
      veta[j] = norm2(dirs_[j]);
      if (vsig[j] < kAlpha * rho || veta[j] > kBeta * rho) acceptable = false;
    }

    std::vector<double> grad(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double df = fvals_[j] - f0_;
      for (std::size_t i = 0; i < n_; ++i) grad[i] += df * simi_[j][i];
    }

    if (!force_trust_step && !acceptable) {
      std::size_t jdrop = static_cast<std::size_t>(
          std::max_element(veta.begin(), veta.end()) - veta.begin());
      if (veta[jdrop] <= kBeta * rho) {
        jdrop = static_cast<std::size_t>(std::min_element(vsig.begin(), vsig.end()) - vsig.begin());
      }
      std::vector<double> dx(n_);
      for (std::size_t i = 0; i < n_; ++i) dx[i] = kGamma * rho * vsig[jdrop] * simi_[jdrop][i];
      if (dot(grad, dx) > 0.0) {
        for (auto& v : dx) v = -v;
      }
      const double fnew = evaluate(point(dx));
      replace_vertex(jdrop, dx, fnew);
      force_trust_step = true;
      continue;
    }
    force_trust_step = false;

    const double gnorm = norm2(grad);
    bool reduce = true;
    if (gnorm > 0.0 && std::isfinite(gnorm)) {
      std::vector<double> dx(n_);
      for (std::size_t i = 0; i < n_; ++i) dx[i] = -rho * grad[i] / gnorm;
      const double fnew = evaluate(point(dx));
      const double predicted = rho * gnorm;
      const double actual = f0_ - fnew;

      double threshold = actual <= 0.0 ? 1.0 : 0.0;
      std::size_t jdrop = n_;
      std::vector<double> sigbar(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        const double t = std::abs(dot(simi_[j], dx));
        if (t > threshold) {
          jdrop = j;
          threshold = t;
        }
        sigbar[j] = t * vsig[j];
      }
      double edgmax = kDelta * rho;
      std::size_t longest = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (sigbar[j] >= kAlpha * rho || sigbar[j] >= vsig[j]) {
          double len = veta[j];
          if (actual > 0.0) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += (dx[i] - dirs_[j][i]) * (dx[i] - dirs_[j][i]);
            len = std::sqrt(s);
          }
          if (len > edgmax) {
            longest = j;
            edgmax = len;
          }
        }
      }
      if (longest < n_) jdrop = longest;
      if (jdrop < n_) replace_vertex(jdrop, dx, fnew);

      if (actual > 0.0 && actual >= 0.1 * predicted) reduce = false;
    }
    if (!reduce) continue;
    if (!acceptable) continue;  // repair the geometry before shrinking rho
    if (rho <= rhoend) {
      converged = true;
      break;
    }
    rho *= 0.5;
    if (rho <= 1.5 * rhoend) rho = rhoend;
  }

  CobylaResult out;
  out.x = best_x_;
  out.value = best_f_;
  out.evaluations = evals_;
  out.converged = converged;
  out.final_rho = rho;
  return out;
}

}  // namespace

CobylaResult cobyla_minimize(const Objective& f, std::vector<double> x0, const CobylaOptions& opt) {
  if (x0.empty()) throw DomainError("cobyla: no variables");
  if (!(opt.rhobeg > 0.0) || !(opt.rhoend > 0.0) || opt.rhoend > opt.rhobeg) {
    throw DomainError("cobyla: require 0 < rhoend <= rhobeg");
  }
  if (opt.max_evaluations < x0.size() + 1) {
    throw DomainError("cobyla: evaluation budget smaller than the initial simplex");
  }
  Simplex s(f, std::move(x0), opt);
  return s.run();
}

}  // namespace qbnsl
