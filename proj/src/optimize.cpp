#include "gevmiss/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gevmiss::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

struct Simplex {
  std::vector<Vector> vertices;
  std::vector<double> values;
};

Simplex initial_simplex(const Objective& f, const Vector& start, const Vector& steps, int& evals) {
  const auto n = start.size();
  Simplex s;
  s.vertices.push_back(start);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector v = start;
    v[j] += steps[j];
    s.vertices.push_back(v);
  }
  for (const auto& v : s.vertices) {
    s.values.push_back(finite_or_inf(f(v)));
    ++evals;
  }
  return s;
}

// One run of the Lagarias et al. variant (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2).
bool run_simplex(const Objective& f, Simplex& s, const NelderMeadOptions& opts, int& iters,
                 int& evals) {
  const std::size_t np1 = s.vertices.size();
  const auto n = static_cast<double>(np1 - 1);
  std::vector<std::size_t> order(np1);
  for (int it = 0; it < opts.max_iter; ++it) {
    ++iters;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[np1 - 2];
    const double f_best = s.values[best];
    const double f_worst = s.values[worst];

    if (std::isfinite(f_worst) &&
        std::abs(f_worst - f_best) <= opts.rel_ftol * (std::abs(f_best) + std::abs(f_worst)) * 0.5 +
                                          1e-300) {
      return true;
    }

    Vector centroid = Vector::Zero(s.vertices[0].size());
    for (std::size_t k = 0; k < np1; ++k) {
      if (k != worst) centroid += s.vertices[k];
    }
    centroid /= n;

    const Vector xr = centroid + (centroid - s.vertices[worst]);
    const double fr = finite_or_inf(f(xr));
    ++evals;
    if (fr < f_best) {
      const Vector xe = centroid + 2.0 * (centroid - s.vertices[worst]);
      const double fe = finite_or_inf(f(xe));
      ++evals;
      if (fe < fr) {
        s.vertices[worst] = xe;
        s.values[worst] = fe;
      } else {
        s.vertices[worst] = xr;
        s.values[worst] = fr;
      }
      continue;
    }
    if (fr < s.values[second]) {
      s.vertices[worst] = xr;
      s.values[worst] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < f_worst) {
      const Vector xc = centroid + 0.5 * (xr - centroid);
      const double fc = finite_or_inf(f(xc));
      ++evals;
      if (fc <= fr) {
        s.vertices[worst] = xc;
        s.values[worst] = fc;
      } else {
        shrink = true;
      }
    } else {
      const Vector xc = centroid + 0.5 * (s.vertices[worst] - centroid);
      const double fc = finite_or_inf(f(xc));
      ++evals;
      if (fc < f_worst) {
        s.vertices[worst] = xc;
        s.values[worst] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t k = 0; k < np1; ++k) {
        if (k == best) continue;
        s.vertices[k] = s.vertices[best] + 0.5 * (s.vertices[k] - s.vertices[best]);
        s.values[k] = finite_or_inf(f(s.vertices[k]));
        ++evals;
      }
    }
  }
  return false;
}

std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Vector& start, const Vector& steps,
                             const NelderMeadOptions& opts) {
  NelderMeadResult res;
  Simplex s = initial_simplex(f, start, steps, res.evaluations);
  bool ok = run_simplex(f, s, opts, res.iterations, res.evaluations);
  for (int r = 0; ok && r < opts.restarts; ++r) {
    const Vector incumbent = s.vertices[argmin(s.values)];
    s = initial_simplex(f, incumbent, steps, res.evaluations);
    ok = run_simplex(f, s, opts, res.iterations, res.evaluations);
  }
  const std::size_t best = argmin(s.values);
  res.x = s.vertices[best];
  res.value = s.values[best];
  res.converged = ok && std::isfinite(res.value);
  return res;
}

Vector relative_steps(const Vector& x, double scale) {
  return (scale * (1.0 + x.array().abs())).matrix();
}

Vector numeric_gradient(const Objective& f, const Vector& x, const Vector& h) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector xp = x;
    Vector xm = x;
    xp[j] += h[j];
    xm[j] -= h[j];
    const double fp = f(xp);
    const double fm = f(xm);
    g[j] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * h[j])
                                                    : std::numeric_limits<double>::quiet_NaN();
  }
  return g;
}

Matrix numeric_hessian(const Objective& f, const Vector& x, const Vector& h) {
  const auto n = x.size();
  Matrix H(n, n);
  const double f0 = f(x);
  auto eval = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    Vector y = x;
    y[i] += di;
    y[j] += dj;
    return f(y);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fp = eval(i, h[i], i, 0.0);
    const double fm = eval(i, -h[i], i, 0.0);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double fpp = eval(i, h[i], j, h[j]);
      const double fpm = eval(i, h[i], j, -h[j]);
      const double fmp = eval(i, -h[i], j, h[j]);
      const double fmm = eval(i, -h[i], j, -h[j]);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  if (!H.allFinite()) H.setConstant(std::numeric_limits<double>::quiet_NaN());
  return H;
}

Vector newton_polish(const Objective& f, Vector x, double step_scale, int max_iter) {
  double fx = f(x);
  if (!std::isfinite(fx)) return x;
  for (int it = 0; it < max_iter; ++it) {
    const Vector h = relative_steps(x, step_scale);
    const Vector g = numeric_gradient(f, x, h);
    const Matrix H = numeric_hessian(f, x, h);
    if (!g.allFinite() || !H.allFinite()) return x;
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) return x;
    Vector step = -llt.solve(g);
    bool improved = false;
    for (int half = 0; half < 20; ++half) {
      const Vector trial = x + step;
      const double ft = f(trial);
      if (std::isfinite(ft) && ft <= fx) {
        improved = ft < fx;
        x = trial;
        fx = ft;
        break;
      }
      step *= 0.5;
    }
    if (!improved) return x;
    if ((step.array().abs() <= 1e-12 * (1.0 + x.array().abs())).all()) return x;
  }
  return x;
}

}  // namespace gevmiss::optim
