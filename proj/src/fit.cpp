#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "minklab/errors.hpp"
#include "minklab/parvol.hpp"
#include "minklab/pluriphase.hpp"

namespace minklab {

namespace {

struct Samples {
  std::vector<double> eps, val, sig;
};

struct PieceFit {
  std::vector<double> coeffs;
  double sse = 0.0;
  std::vector<double> resid;
};

class Fitter {
 public:
  Fitter(const Samples& s, int d, double D) : s_(s), d_(d), D_(D) {}

  std::vector<int> basis(bool first) const {
    std::vector<int> ks;
    for (int k = 0; k <= d_; ++k)
      if (!first || static_cast<double>(k) < D_ - 1e-9) ks.push_back(k);
    return ks;
  }

  int params(bool first) const { return static_cast<int>(basis(first).size()); }

  PieceFit solve(int lo, int hi, bool first) const {
    const auto ks = basis(first);
    const int n = hi - lo;
    const int p = static_cast<int>(ks.size());
    Eigen::MatrixXd A(n, p);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      const double e = s_.eps[static_cast<std::size_t>(lo + i)];
      const double w = 1.0 / s_.sig[static_cast<std::size_t>(lo + i)];
      for (int j = 0; j < p; ++j) A(i, j) = std::pow(e, d_ - ks[static_cast<std::size_t>(j)]) * w;
      b(i) = s_.val[static_cast<std::size_t>(lo + i)] * w;
    }
    Eigen::VectorXd scale(p);
    for (int j = 0; j < p; ++j) {
      scale(j) = A.col(j).cwiseAbs().maxCoeff();
      if (scale(j) == 0.0) scale(j) = 1.0;
      A.col(j) /= scale(j);
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    PieceFit f;
    f.coeffs.assign(static_cast<std::size_t>(d_ + 1), 0.0);
    for (int j = 0; j < p; ++j) f.coeffs[static_cast<std::size_t>(ks[static_cast<std::size_t>(j)])] = c(j) / scale(j);
    Eigen::VectorXd r = A * c - b;
    f.resid.assign(r.data(), r.data() + n);
    f.sse = r.squaredNorm();
    return f;
  }

  double value(const std::vector<double>& c, double e) const {
    double v = 0.0;
    for (int k = 0; k <= d_; ++k) v += c[static_cast<std::size_t>(k)] * std::pow(e, d_ - k);
    return v;
  }

 private:
  const Samples& s_;
  int d_;
  double D_;
};

double tail_rms(const std::vector<double>& r, int w) {
  const int n = static_cast<int>(r.size());
  const int from = std::max(0, n - w);
  double ss = 0.0;
  for (int i = from; i < n; ++i) ss += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
  return std::sqrt(ss / std::max(1, n - from));
}

double locate_break(const Fitter& f, const std::vector<double>& left, const std::vector<double>& right, double lo,
                    double hi) {
  auto diff = [&](double e) { return f.value(left, e) - f.value(right, e); };
  double flo = diff(lo), fhi = diff(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) != (fhi < 0.0)) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = diff(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  double best = 0.5 * (lo + hi), bestv = std::abs(diff(best));
  for (int i = 0; i <= 400; ++i) {
    const double e = lo + (hi - lo) * i / 400.0;
    const double v = std::abs(diff(e));
    if (v < bestv) {
      bestv = v;
      best = e;
    }
  }
  return best;
}

}  // namespace

FitResult fit(const VolumeCurve& curve, int d, double D, double g, const FitOptions& options) {
  std::vector<double> sigma(curve.size(), 0.0);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double se = i < curve.std_errors.size() ? curve.std_errors[i] : 0.0;
    const double eb = i < curve.error_bounds.size() ? curve.error_bounds[i] / 2.0 : 0.0;
    sigma[i] = std::max(se, eb);
  }
  return fit(curve.epsilons, curve.values, sigma, d, D, g, options);
}

FitResult fit(const std::vector<double>& eps, const std::vector<double>& values, const std::vector<double>& sigma,
              int d, double D, double g, const FitOptions& options) {
  if (eps.size() != values.size()) throw ValidationError("ε and value arrays differ in length");
  if (!sigma.empty() && sigma.size() != eps.size()) throw ValidationError("σ array length does not match ε");
  if (d < 1) throw ValidationError("ambient dimension must be at least 1");
  if (!(g > 0.0)) throw ValidationError("g must be positive");
  if (options.max_pieces < 1) throw ValidationError("max_pieces must be at least 1");

  std::vector<std::size_t> order(eps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  const double floor = 1e-9 * std::max(vmax, 1e-300);

  Samples in;
  std::vector<double> beyond_v, beyond_w;
  for (std::size_t idx : order) {
    if (!(eps[idx] > 0.0)) throw ValidationError("ε values must be positive");
    const double sg = std::max(sigma.empty() ? 0.0 : sigma[idx], floor);
    if (eps[idx] <= g * (1.0 + 1e-12)) {
      in.eps.push_back(eps[idx]);
      in.val.push_back(values[idx]);
      in.sig.push_back(sg);
    } else {
      beyond_v.push_back(values[idx]);
      beyond_w.push_back(1.0 / (sg * sg));
    }
  }
  const Fitter fitter(in, d, D);
  const int n = static_cast<int>(in.eps.size());
  const int w = std::max(1, options.window);

  // Greedy growth: extend a segment until the trailing window stops fitting.
  std::vector<int> bounds{0};
  int start = 0;
  while (start < n) {
    const bool first = bounds.size() == 1;
    const int nmin = fitter.params(first) + 2;
    if (n - start < nmin) {
      if (first) {
        std::ostringstream os;
        os << "under-determined fit: " << n << " samples in (0, g] but at least " << nmin << " are required";
        throw ValidationError(os.str());
      }
      bounds.pop_back();
      break;
    }
    int end = start + nmin;
    while (end < n) {
      const PieceFit pf = fitter.solve(start, end + 1, first);
      if (tail_rms(pf.resid, w) > options.threshold) break;
      ++end;
    }
    if (end < n) bounds.push_back(end);
    start = end;
  }
  bounds.push_back(n);

  FitResult result;
  auto piece_count = [&] { return static_cast<int>(bounds.size()) - 1; };
  if (piece_count() > options.max_pieces) {
    std::ostringstream os;
    os << "volume may not be pluriphase: segmentation needs more than " << options.max_pieces << " pieces";
    result.message = os.str();
    return result;
  }

  auto seg_sse = [&](int lo, int hi, bool first) { return fitter.solve(lo, hi, first).sse; };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 1; j + 1 < bounds.size(); ++j) {
      const bool first_left = j == 1;
      const int lo = bounds[j - 1], hi = bounds[j + 1];
      const int pl = fitter.params(first_left) + 1, pr = fitter.params(false) + 1;
      int best = bounds[j];
      double best_sse = seg_sse(lo, best, first_left) + seg_sse(best, hi, false);
      for (int s = bounds[j] - options.refine_width; s <= bounds[j] + options.refine_width; ++s) {
        if (s - lo < pl || hi - s < pr || s == bounds[j]) continue;
        const double v = seg_sse(lo, s, first_left) + seg_sse(s, hi, false);
        if (v < best_sse) {
          best_sse = v;
          best = s;
        }
      }
      bounds[j] = best;
    }
  }

  std::vector<PieceFit> fits;
  auto refit_all = [&] {
    fits.clear();
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) fits.push_back(fitter.solve(bounds[j], bounds[j + 1], j == 0));
  };
  refit_all();
  bool merged = true;
  while (merged && bounds.size() > 2) {
    merged = false;
    for (std::size_t j = 0; j + 2 < bounds.size(); ++j) {
      const PieceFit joint = fitter.solve(bounds[j], bounds[j + 2], j == 0);
      const double rms = std::sqrt(joint.sse / static_cast<double>(bounds[j + 2] - bounds[j]));
      bool same = true;
      for (int k = 0; k <= d; ++k) {
        const double a = fits[j].coeffs[static_cast<std::size_t>(k)], b = fits[j + 1].coeffs[static_cast<std::size_t>(k)];
        same = same && std::abs(a - b) <= options.merge_tol * std::max({std::abs(a), std::abs(b), 1e-300});
      }
      if (same || rms <= 2.0) {
        bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(j + 1));
        refit_all();
        merged = true;
        break;
      }
    }
  }

  PluriphaseData p;
  p.ambient_dim = d;
  p.similarity_dim = D;
  p.provenance = "empirical";
  double total_sse = 0.0;
  for (std::size_t j = 0; j < fits.size(); ++j) {
    p.coeffs.push_back(fits[j].coeffs);
    total_sse += fits[j].sse;
    if (j + 1 < fits.size()) {
      const int s = bounds[j + 1];
      p.breakpoints.push_back(locate_break(fitter, fits[j].coeffs, fits[j + 1].coeffs,
                                           in.eps[static_cast<std::size_t>(s - 1)], in.eps[static_cast<std::size_t>(s)]));
    }
  }
  p.breakpoints.push_back(g);
  if (!beyond_v.empty()) {
    double sw = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < beyond_v.size(); ++i) {
      sw += beyond_w[i];
      sv += beyond_w[i] * beyond_v[i];
    }
    p.gamma_volume = sv / sw;
  } else {
    p.gamma_volume = fitter.value(fits.back().coeffs, g);
  }
  result.rms = std::sqrt(total_sse / std::max(1, n));
  result.split_indices.assign(bounds.begin() + 1, bounds.end() - 1);
  if (result.rms > options.threshold) {
    std::ostringstream os;
    os << "volume may not be pluriphase: residual RMS " << result.rms << " exceeds threshold " << options.threshold;
    result.message = os.str();
    return result;
  }
  const auto problems = validate(p, 2000);
  result.ok = true;
  result.message = problems.empty() ? "ok" : "fitted data violates: " + problems.front();
  result.data = std::move(p);
  return result;
}

}  // namespace minklab
