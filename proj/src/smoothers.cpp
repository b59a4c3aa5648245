#include "mpc/smoothers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

struct Series {
  std::vector<double> xs, ys;  // sorted by x
};

// Sorts the pairs by x. When jitter is requested, ties are spread by
// rank-ordered offsets of 1e-9 times the input range so downstream fits see
// strictly increasing abscissae.
Series prepare(Eigen::Ref<const Eigen::VectorXd> xs, Eigen::Ref<const Eigen::VectorXd> ys,
               bool jitter_ties) {
  const auto n = static_cast<std::size_t>(xs.size());
  if (xs.size() != ys.size())
    throw DimensionMismatch("smoother inputs differ in length: " + std::to_string(xs.size()) +
                            " vs " + std::to_string(ys.size()));
  if (n < 4)
    throw InsufficientData("smoother needs at least 4 points, got " + std::to_string(n));
  for (Eigen::Index i = 0; i < xs.size(); ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw NonFinite("smoother input contains a non-finite value at index " + std::to_string(i));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[static_cast<Eigen::Index>(a)] < xs[static_cast<Eigen::Index>(b)]; });

  Series s;
  s.xs.resize(n);
  s.ys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.xs[i] = xs[static_cast<Eigen::Index>(order[i])];
    s.ys[i] = ys[static_cast<Eigen::Index>(order[i])];
  }

  const double range = s.xs.back() - s.xs.front();
  if (range == 0.0) throw DegenerateInputs("all smoother inputs are identical");

  if (jitter_ties) {
    const double eps = 1e-9 * range;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i + 1;
      while (j < n && s.xs[j] == s.xs[i]) ++j;
      for (std::size_t k = i + 1; k < j; ++k) s.xs[k] += eps * static_cast<double>(k - i);
      i = j;
    }
  }
  return s;
}

// ---- cubic B-spline helpers ------------------------------------------------

int find_span(const std::vector<double>& t, int degree, double x) {
  const int m = static_cast<int>(t.size()) - degree - 1;  // basis count
  if (x >= t[static_cast<std::size_t>(m)]) return m - 1;
  if (x <= t[static_cast<std::size_t>(degree)]) return degree;
  int lo = degree, hi = m;
  int mid = (lo + hi) / 2;
  while (x < t[static_cast<std::size_t>(mid)] || x >= t[static_cast<std::size_t>(mid) + 1]) {
    if (x < t[static_cast<std::size_t>(mid)])
      hi = mid;
    else
      lo = mid;
    mid = (lo + hi) / 2;
  }
  return mid;
}

// Nonzero basis values N[0..degree] at x for the given span (Cox-de Boor).
void basis_funs(const std::vector<double>& t, int degree, int span, double x, double* N) {
  double left[5], right[5];
  N[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - t[static_cast<std::size_t>(span + 1 - j)];
    right[j] = t[static_cast<std::size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
}

double bspline_value(const std::vector<double>& t, const Eigen::VectorXd& c, int degree,
                     double x) {
  const int span = find_span(t, degree, x);
  double N[5];
  basis_funs(t, degree, span, x, N);
  double v = 0.0;
  for (int r = 0; r <= degree; ++r) v += N[r] * c[span - degree + r];
  return v;
}

// Derivative of a clamped cubic spline as a quadratic spline on the knot
// vector with its first and last knot dropped.
struct SplineDerivative {
  std::vector<double> knots;
  Eigen::VectorXd coeffs;
};

SplineDerivative derivative_spline(const std::vector<double>& t, const Eigen::VectorXd& c) {
  SplineDerivative d;
  d.knots.assign(t.begin() + 1, t.end() - 1);
  d.coeffs.resize(c.size() - 1);
  for (Eigen::Index i = 0; i + 1 < c.size(); ++i) {
    const double denom = t[static_cast<std::size_t>(i) + 4] - t[static_cast<std::size_t>(i) + 1];
    d.coeffs[i] = denom > 0.0 ? 3.0 * (c[i + 1] - c[i]) / denom : 0.0;
  }
  return d;
}

// Type-7 empirical quantile of a sorted vector.
double quantile(const std::vector<double>& sorted, double u) {
  const double h = u * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

detail::SplineState fit_spline(const SmootherSpec& spec, const Series& s) {
  const int n = static_cast<int>(s.xs.size());
  const double a = s.xs.front();
  const double b = s.xs.back();
  const double range = b - a;

  const int requested = std::min(n, 35);
  std::vector<double> interior;
  interior.reserve(static_cast<std::size_t>(requested));
  const double tol = range * std::max(1e-6, 2e-9 * static_cast<double>(n));
  for (int k = 1; k <= requested; ++k) {
    const double q = quantile(s.xs, static_cast<double>(k) / static_cast<double>(requested + 1));
    if (q <= a + tol || q >= b - tol) continue;
    if (!interior.empty() && q - interior.back() <= tol) continue;
    interior.push_back(q);
  }

  std::vector<double> knots;
  knots.reserve(interior.size() + 8);
  for (int i = 0; i < 4; ++i) knots.push_back(a);
  knots.insert(knots.end(), interior.begin(), interior.end());
  for (int i = 0; i < 4; ++i) knots.push_back(b);
  const int m = static_cast<int>(knots.size()) - 4;  // basis count

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, m);
  for (int i = 0; i < n; ++i) {
    const int span = find_span(knots, 3, s.xs[static_cast<std::size_t>(i)]);
    double N[5];
    basis_funs(knots, 3, span, s.xs[static_cast<std::size_t>(i)], N);
    for (int r = 0; r <= 3; ++r) B(i, span - 3 + r) = N[r];
  }

  // Second divided differences across the Greville abscissae; zero exactly on
  // coefficient vectors representing affine functions, so heavy penalties
  // shrink toward the least-squares line instead of distorting it.
  std::vector<double> grev(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    grev[static_cast<std::size_t>(i)] =
        (knots[static_cast<std::size_t>(i) + 1] + knots[static_cast<std::size_t>(i) + 2] +
         knots[static_cast<std::size_t>(i) + 3]) / 3.0;
  const int dr = m - 2;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dr, m);
  for (int i = 0; i < dr; ++i) {
    const double g0 = grev[static_cast<std::size_t>(i)];
    const double g1 = grev[static_cast<std::size_t>(i) + 1];
    const double g2 = grev[static_cast<std::size_t>(i) + 2];
    const double w1 = 1.0 / (g1 - g0);
    const double w2 = 1.0 / (g2 - g1);
    const double scale = 2.0 / (g2 - g0);
    D(i, i) = w1 * scale;
    D(i, i + 1) = -(w1 + w2) * scale;
    D(i, i + 2) = w2 * scale;
  }

  Eigen::MatrixXd stacked(n + dr, m);
  stacked.topRows(n) = B;
  stacked.bottomRows(dr) = std::sqrt(spec.penalty) * D;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + dr);
  for (int i = 0; i < n; ++i) rhs[i] = s.ys[static_cast<std::size_t>(i)];

  // minimum-norm least squares; underdetermined penalty-free fits stay bounded
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(stacked);
  const Eigen::VectorXd coeffs = cod.solve(rhs);
  if (!coeffs.allFinite())
    throw SingularSystem("spline solve produced non-finite coefficients; "
                         "penalty too small for these inputs");
  return {std::move(knots), coeffs};
}

// ---- lowess ----------------------------------------------------------------

double tricube(double u) {
  const double au = std::abs(u);
  if (au >= 1.0) return 0.0;
  const double t = 1.0 - au * au * au;
  return t * t * t;
}

struct LocalFit {
  double value = 0.0;
  double slope = 0.0;
};

// Weighted linear regression of the window [lo, hi] at query x. Weights are
// tricube in the scaled distance times the robustness weights.
LocalFit lowess_local(const detail::LowessState& st, int lo, int hi, double x,
                      double dmax) {
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double w = (dmax > 0.0 ? tricube((st.xs[ui] - x) / dmax) : 1.0) * st.robustness[ui];
    sw += w;
    swx += w * st.xs[ui];
    swy += w * st.ys[ui];
  }
  if (sw <= 0.0) {
    // every candidate got zero weight; fall back to the nearest point
    int best = lo;
    for (int i = lo + 1; i <= hi; ++i)
      if (std::abs(st.xs[static_cast<std::size_t>(i)] - x) <
          std::abs(st.xs[static_cast<std::size_t>(best)] - x))
        best = i;
    return {st.ys[static_cast<std::size_t>(best)], 0.0};
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double w = (dmax > 0.0 ? tricube((st.xs[ui] - x) / dmax) : 1.0) * st.robustness[ui];
    const double dx = st.xs[ui] - xbar;
    sxx += w * dx * dx;
    sxy += w * dx * (st.ys[ui] - ybar);
  }
  double slope = 0.0;
  if (sxx > 0.0) {
    slope = sxy / sxx;
    if (!std::isfinite(slope)) slope = 0.0;
  }
  return {ybar + slope * (x - xbar), slope};
}

// Window of the k nearest training points around x (two-pointer on sorted xs).
void nearest_window(const std::vector<double>& xs, double x, int k, int& lo, int& hi) {
  const int n = static_cast<int>(xs.size());
  k = std::min(k, n);
  int right = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  int left = right - 1;
  lo = right;
  hi = right - 1;
  for (int taken = 0; taken < k; ++taken) {
    const bool can_left = left >= 0;
    const bool can_right = right < n;
    if (can_left &&
        (!can_right || x - xs[static_cast<std::size_t>(left)] <=
                           xs[static_cast<std::size_t>(right)] - x)) {
      lo = left--;
    } else {
      hi = right++;
    }
  }
}

LocalFit lowess_at(const detail::LowessState& st, double x) {
  int lo, hi;
  nearest_window(st.xs, x, st.window, lo, hi);
  const double dmax = std::max(std::abs(st.xs[static_cast<std::size_t>(lo)] - x),
                               std::abs(st.xs[static_cast<std::size_t>(hi)] - x));
  return lowess_local(st, lo, hi, x, dmax);
}

detail::LowessState fit_lowess(const SmootherSpec& spec, const Series& s) {
  detail::LowessState st;
  st.xs = s.xs;
  st.ys = s.ys;
  const int n = static_cast<int>(s.xs.size());
  st.robustness.assign(static_cast<std::size_t>(n), 1.0);
  // bandwidth in (0, 1] is a fraction of the sample; above 1 it is a direct
  // neighbor count, so lowess(5) smooths over the 5 nearest points
  int window;
  if (spec.bandwidth <= 1.0)
    window = static_cast<int>(std::ceil(spec.bandwidth * static_cast<double>(n)));
  else
    window = static_cast<int>(std::lround(spec.bandwidth));
  st.window = std::min(n, std::max(4, window));

  for (int pass = 0; pass < spec.iterations; ++pass) {
    std::vector<double> resid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      resid[ui] = std::abs(st.ys[ui] - lowess_at(st, st.xs[ui]).value);
    }
    std::vector<double> tmp = resid;
    std::nth_element(tmp.begin(), tmp.begin() + n / 2, tmp.end());
    double med = tmp[static_cast<std::size_t>(n) / 2];
    if (n % 2 == 0) {
      std::nth_element(tmp.begin(), tmp.begin() + n / 2 - 1, tmp.end());
      med = 0.5 * (med + tmp[static_cast<std::size_t>(n) / 2 - 1]);
    }
    if (med <= 0.0) break;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double u = resid[ui] / (6.0 * med);
      st.robustness[ui] = u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
  }
  return st;
}

// ---- kernel ridge ----------------------------------------------------------

double rbf(double u, double v, double lengthscale) {
  const double d = u - v;
  return std::exp(-d * d / (2.0 * lengthscale * lengthscale));
}

double median_pairwise_distance(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const std::size_t m = std::min<std::size_t>(n, 500);
  std::vector<double> sub(m);
  for (std::size_t i = 0; i < m; ++i) sub[i] = xs[i * n / m];

  std::vector<double> dist;
  dist.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) dist.push_back(std::abs(sub[i] - sub[j]));

  const std::size_t half = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(half), dist.end());
  double med = dist[half];
  if (dist.size() % 2 == 0) {
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(half) - 1,
                     dist.end());
    med = 0.5 * (med + dist[half - 1]);
  }
  if (med > 0.0) return med;

  // heavily tied subsample: fall back to the mean positive distance
  double pos_sum = 0.0;
  std::size_t pos_count = 0;
  for (double d : dist)
    if (d > 0.0) {
      pos_sum += d;
      ++pos_count;
    }
  if (pos_count > 0) return pos_sum / static_cast<double>(pos_count);
  return 0.5 * (xs.back() - xs.front());
}

detail::KernelRidgeState fit_kernel_ridge(const SmootherSpec& spec, const Series& s) {
  detail::KernelRidgeState st;
  st.xs = s.xs;
  st.lengthscale = spec.lengthscale ? *spec.lengthscale : median_pairwise_distance(s.xs);

  const int n = static_cast<int>(s.xs.size());
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K(i, j) = rbf(s.xs[static_cast<std::size_t>(i)], s.xs[static_cast<std::size_t>(j)],
                    st.lengthscale);
  K.diagonal().array() += spec.alpha;

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = s.ys[static_cast<std::size_t>(i)];

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw SingularSystem("kernel system factorization failed; "
                         "alpha too small for these inputs");
  st.dual = ldlt.solve(y);
  const double scale = K.cwiseAbs().maxCoeff() * st.dual.cwiseAbs().maxCoeff() *
                           static_cast<double>(n) +
                       y.cwiseAbs().maxCoeff();
  if (!st.dual.allFinite() || (K * st.dual - y).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw SingularSystem("kernel system solve is inaccurate; "
                         "alpha too small for these inputs");
  return st;
}

LocalFit kernel_ridge_at(const detail::KernelRidgeState& st, double x) {
  LocalFit f;
  const double inv_sq = 1.0 / (st.lengthscale * st.lengthscale);
  for (std::size_t i = 0; i < st.xs.size(); ++i) {
    const double k = rbf(x, st.xs[i], st.lengthscale);
    f.value += st.dual[static_cast<Eigen::Index>(i)] * k;
    f.slope += st.dual[static_cast<Eigen::Index>(i)] * (-(x - st.xs[i]) * inv_sq) * k;
  }
  return f;
}

// ---- nadaraya-watson -------------------------------------------------------

LocalFit nadaraya_at(const detail::NadarayaState& st, double x) {
  const std::size_t n = st.xs.size();
  const double inv_sq = 1.0 / (st.bandwidth * st.bandwidth);
  // factor out the smallest exponent so far-away queries never underflow to 0/0
  double emin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x - st.xs[i];
    emin = std::min(emin, 0.5 * d * d * inv_sq);
  }
  double den = 0.0, num = 0.0, dden = 0.0, dnum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x - st.xs[i];
    const double w = std::exp(emin - 0.5 * d * d * inv_sq);
    const double wp = -d * inv_sq * w;
    den += w;
    num += w * st.ys[i];
    dden += wp;
    dnum += wp * st.ys[i];
  }
  LocalFit f;
  f.value = num / den;
  f.slope = (dnum - f.value * dden) / den;
  return f;
}

}  // namespace

SmootherSpec SmootherSpec::spline(double penalty) {
  if (!(penalty >= 0.0)) throw InvalidSpec("spline penalty must be >= 0");
  SmootherSpec s;
  s.kind = SmootherKind::SmoothingSpline;
  s.penalty = penalty;
  return s;
}

SmootherSpec SmootherSpec::lowess(double bandwidth, int iterations) {
  if (!(bandwidth > 0.0)) throw InvalidSpec("lowess bandwidth must be > 0");
  if (iterations < 0) throw InvalidSpec("lowess iterations must be >= 0");
  SmootherSpec s;
  s.kind = SmootherKind::Lowess;
  s.bandwidth = bandwidth;
  s.iterations = iterations;
  return s;
}

SmootherSpec SmootherSpec::kernel_ridge(double alpha, std::optional<double> lengthscale) {
  if (!(alpha >= 0.0)) throw InvalidSpec("kernel ridge alpha must be >= 0");
  if (lengthscale && !(*lengthscale > 0.0))
    throw InvalidSpec("kernel ridge lengthscale must be > 0");
  SmootherSpec s;
  s.kind = SmootherKind::KernelRidge;
  s.alpha = alpha;
  s.lengthscale = lengthscale;
  return s;
}

SmootherSpec SmootherSpec::nadaraya_watson(double bandwidth) {
  if (!(bandwidth > 0.0)) throw InvalidSpec("nadaraya-watson bandwidth must be > 0");
  SmootherSpec s;
  s.kind = SmootherKind::NadarayaWatson;
  s.bandwidth = bandwidth;
  return s;
}

SmootherModel::SmootherModel(SmootherSpec spec, detail::SmootherState state)
    : spec_(std::move(spec)), state_(std::move(state)) {}

double SmootherModel::interior(double x) const {
  if (const auto* sp = std::get_if<detail::SplineState>(&state_))
    return bspline_value(sp->knots, sp->coeffs, 3, x);
  if (const auto* lo = std::get_if<detail::LowessState>(&state_)) return lowess_at(*lo, x).value;
  if (const auto* kr = std::get_if<detail::KernelRidgeState>(&state_))
    return kernel_ridge_at(*kr, x).value;
  return nadaraya_at(std::get<detail::NadarayaState>(state_), x).value;
}

double SmootherModel::predict(double x) const {
  if (x < x_min_) return lo_value_ + lo_slope_ * (x - x_min_);
  if (x > x_max_) return hi_value_ + hi_slope_ * (x - x_max_);
  return interior(x);
}

SmootherModel fit_smoother(const SmootherSpec& spec, Eigen::Ref<const Eigen::VectorXd> xs,
                           Eigen::Ref<const Eigen::VectorXd> ys) {
  const bool jitter = spec.kind == SmootherKind::SmoothingSpline ||
                      spec.kind == SmootherKind::Lowess;
  const Series s = prepare(xs, ys, jitter);

  detail::SmootherState state = [&]() -> detail::SmootherState {
    switch (spec.kind) {
      case SmootherKind::SmoothingSpline:
        return fit_spline(spec, s);
      case SmootherKind::Lowess:
        return fit_lowess(spec, s);
      case SmootherKind::KernelRidge:
        return fit_kernel_ridge(spec, s);
      case SmootherKind::NadarayaWatson:
        return detail::NadarayaState{s.xs, s.ys, spec.bandwidth};
    }
    throw InvalidSpec("unknown smoother kind");
  }();

  SmootherModel model(spec, std::move(state));
  model.x_min_ = s.xs.front();
  model.x_max_ = s.xs.back();

  // cache boundary values and slopes once so extrapolation is O(1) and exact
  // at the boundaries themselves
  if (const auto* sp = std::get_if<detail::SplineState>(&model.state_)) {
    const SplineDerivative der = derivative_spline(sp->knots, sp->coeffs);
    model.lo_value_ = bspline_value(sp->knots, sp->coeffs, 3, model.x_min_);
    model.hi_value_ = bspline_value(sp->knots, sp->coeffs, 3, model.x_max_);
    model.lo_slope_ = bspline_value(der.knots, der.coeffs, 2, model.x_min_);
    model.hi_slope_ = bspline_value(der.knots, der.coeffs, 2, model.x_max_);
  } else if (const auto* lo = std::get_if<detail::LowessState>(&model.state_)) {
    const LocalFit fl = lowess_at(*lo, model.x_min_);
    const LocalFit fh = lowess_at(*lo, model.x_max_);
    model.lo_value_ = fl.value;
    model.lo_slope_ = fl.slope;
    model.hi_value_ = fh.value;
    model.hi_slope_ = fh.slope;
  } else if (const auto* kr = std::get_if<detail::KernelRidgeState>(&model.state_)) {
    const LocalFit fl = kernel_ridge_at(*kr, model.x_min_);
    const LocalFit fh = kernel_ridge_at(*kr, model.x_max_);
    model.lo_value_ = fl.value;
    model.lo_slope_ = fl.slope;
    model.hi_value_ = fh.value;
    model.hi_slope_ = fh.slope;
  } else {
    const auto& nw = std::get<detail::NadarayaState>(model.state_);
    const LocalFit fl = nadaraya_at(nw, model.x_min_);
    const LocalFit fh = nadaraya_at(nw, model.x_max_);
    model.lo_value_ = fl.value;
    model.lo_slope_ = fl.slope;
    model.hi_value_ = fh.value;
    model.hi_slope_ = fh.slope;
  }
  return model;
}

Eigen::VectorXd CurveModel::at(double lambda) const {
  Eigen::VectorXd out(p());
  for (Eigen::Index j = 0; j < p(); ++j)
    out[j] = coords_[static_cast<std::size_t>(j)].predict(lambda);
  return out;
}

Eigen::MatrixXd CurveModel::sample(Eigen::Ref<const Eigen::VectorXd> lambdas) const {
  Eigen::MatrixXd out(p(), lambdas.size());
  for (Eigen::Index c = 0; c < lambdas.size(); ++c)
    for (Eigen::Index j = 0; j < p(); ++j)
      out(j, c) = coords_[static_cast<std::size_t>(j)].predict(lambdas[c]);
  return out;
}

CurveModel fit_curve(const SmootherSpec& spec, Eigen::Ref<const Eigen::VectorXd> lambdas,
                     const PointCloud& cloud) {
  if (lambdas.size() != cloud.n())
    throw DimensionMismatch("lambda count " + std::to_string(lambdas.size()) +
                            " does not match point count " + std::to_string(cloud.n()));
  std::vector<SmootherModel> coords;
  coords.reserve(static_cast<std::size_t>(cloud.p()));
  for (Eigen::Index j = 0; j < cloud.p(); ++j) {
    const std::string where = "coordinate " + std::to_string(j) + ": ";
    try {
      coords.push_back(fit_smoother(spec, lambdas, cloud.data.col(j)));
    } catch (const InsufficientData& e) {
      throw InsufficientData(where + e.what());
    } catch (const DegenerateInputs& e) {
      throw DegenerateInputs(where + e.what());
    } catch (const SingularSystem& e) {
      throw SingularSystem(where + e.what());
    } catch (const NonFinite& e) {
      throw NonFinite(where + e.what());
    }
  }
  return CurveModel(std::move(coords));
}

}  // namespace mpc
