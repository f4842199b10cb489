#include "minklab/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minklab/errors.hpp"

namespace minklab {

namespace {

void require_lattice(const LatticeInfo& lat) {
  if (!lat.is_lattice) throw ValidationError("a lattice IFS is required");
  if (!(lat.base > 0.0 && lat.base < 1.0)) throw ValidationError("lattice base must lie in (0,1)");
}

bool exact_mode(const PluriphaseData& p, const LatticeInfo& lat) { return p.exact.has_value() && lat.exact_base.has_value(); }

long snapped_ceil(double x) {
  const double n = std::round(x);
  if (std::abs(x - n) < 1e-12) return static_cast<long>(n);
  return static_cast<long>(std::ceil(x));
}

}  // namespace

long level_index(const PluriphaseData& p, const LatticeInfo& lat, int m, double eps) {
  require_lattice(lat);
  if (!(eps > 0.0)) throw ValidationError("ε must be positive");
  if (m < 1 || m > p.pieces()) throw ValidationError("piece index m out of range");
  return snapped_ceil(std::log(p.a(m) / eps) / std::log(lat.base));
}

long level_index_exact(const PluriphaseData& p, const LatticeInfo& lat, int m, const Surd& eps) {
  require_lattice(lat);
  if (!exact_mode(p, lat)) throw ValidationError("exact level index needs exact data and an exact lattice base");
  if (eps.sign() <= 0) throw ValidationError("ε must be positive");
  const Surd y = p.a_exact(m) / eps;
  const Surd r(*lat.exact_base);
  long L = static_cast<long>(std::ceil(std::log(y.to_double()) / std::log(lat.base)));
  // ceil(log_r y) = L  <=>  r^L <= y < r^(L-1)
  for (int guard = 0; guard < 200; ++guard) {
    if (pow(r, L) > y) {
      ++L;
    } else if (y >= pow(r, L - 1)) {
      --L;
    } else {
      return L;
    }
  }
  throw Error("level index search did not converge");
}

double BreakStructure::left(int q) const { return q == 1 ? lower : cuts[static_cast<std::size_t>(q - 2)]; }

double BreakStructure::right(int q) const { return q == Q() ? upper : cuts[static_cast<std::size_t>(q - 1)]; }

int BreakStructure::interval_of(double eps) const {
  auto it = std::lower_bound(cuts.begin(), cuts.end(), eps);
  return static_cast<int>(it - cuts.begin()) + 1;
}

BreakStructure break_structure(const PluriphaseData& p, const LatticeInfo& lat) {
  require_lattice(lat);
  const int M = p.pieces();
  if (M < 1) throw ValidationError("pluriphase data has no pieces");
  const bool exact = exact_mode(p, lat);
  const double r = lat.base;
  BreakStructure bs;
  bs.exact = exact;
  bs.upper = p.g();
  bs.lower = r * p.g();

  struct Jump {
    int m;
    double at;
    std::optional<Surd> exact_at;
  };
  std::vector<Jump> jumps;
  for (int m = 1; m <= M; ++m) {
    long n;
    bool jump_free;
    if (exact) {
      const Surd g = p.a_exact(M);
      n = level_index_exact(p, lat, m, g);
      jump_free = p.a_exact(m) == g * Surd(pow(*lat.exact_base, n));
      if (!jump_free) jumps.push_back({m, 0.0, p.a_exact(m) * Surd(pow(*lat.exact_base, 1 - n))});
    } else {
      const double x = std::log(p.a(m) / p.g()) / std::log(r);
      jump_free = std::abs(x - std::round(x)) < 1e-12;
      n = jump_free ? static_cast<long>(std::round(x)) : static_cast<long>(std::ceil(x));
      if (!jump_free) jumps.push_back({m, p.a(m) * std::pow(r, static_cast<double>(1 - n)), std::nullopt});
    }
    bs.level_at_g.push_back(n);
  }
  if (exact)
    for (auto& j : jumps) j.at = j.exact_at->to_double();
  std::sort(jumps.begin(), jumps.end(), [&](const Jump& a, const Jump& b) {
    return exact ? *a.exact_at < *b.exact_at : a.at < b.at;
  });
  std::vector<int> where(static_cast<std::size_t>(M), 0);  // 1-based cut index of L_m's jump, 0 if none
  std::vector<Surd> ecuts;
  for (const auto& j : jumps) {
    bool same = false;
    if (!bs.cuts.empty()) {
      same = exact ? *j.exact_at == ecuts.back()
                   : std::abs(j.at - bs.cuts.back()) <= 1e-12 * std::max(j.at, bs.cuts.back());
    }
    if (!same) {
      bs.cuts.push_back(j.at);
      if (exact) ecuts.push_back(*j.exact_at);
      bs.groups.emplace_back();
    }
    bs.groups.back().push_back(j.m);
    where[static_cast<std::size_t>(j.m - 1)] = static_cast<int>(bs.cuts.size());
  }
  if (exact) bs.exact_cuts = ecuts;
  bs.groups.emplace_back();
  for (int m = 1; m <= M; ++m)
    if (where[static_cast<std::size_t>(m - 1)] == 0) bs.groups.back().push_back(m);
  for (auto& grp : bs.groups) std::sort(grp.begin(), grp.end());

  for (int q = 1; q <= bs.Q(); ++q) {
    std::vector<long> lv;
    for (int m = 1; m <= M; ++m) {
      const long n = bs.level_at_g[static_cast<std::size_t>(m - 1)];
      const int w = where[static_cast<std::size_t>(m - 1)];
      lv.push_back(w != 0 && q <= w ? n - 1 : n);
    }
    bs.levels.push_back(std::move(lv));
  }
  return bs;
}

namespace {

OscillationProfile build_profile(const PluriphaseData& p, const LatticeInfo& lat, bool integer_branch, int Dint) {
  OscillationProfile prof;
  prof.ambient_dim = p.ambient_dim;
  prof.similarity_dim = p.similarity_dim;
  prof.r = lat.base;
  prof.g = p.g();
  prof.integer_branch = integer_branch;
  prof.breaks = break_structure(p, lat);
  const double D = integer_branch ? static_cast<double>(Dint) : p.similarity_dim;
  const double lr = std::log(lat.base);
  const int M = p.pieces();
  for (int q = 1; q <= prof.breaks.Q(); ++q) {
    const auto& L = prof.breaks.levels[static_cast<std::size_t>(q - 1)];
    std::vector<double> row;
    for (int k = 0; k <= p.ambient_dim; ++k) {
      double s = 0.0;
      for (int m = 1; m <= M; ++m) {
        const double Lm = static_cast<double>(L[static_cast<std::size_t>(m - 1)]);
        if (integer_branch && k == Dint) s += Lm * (p.kappa(m + 1, k) - p.kappa(m, k));
        else s += std::exp(Lm * (D - k) * lr) * (p.kappa(m, k) - p.kappa(m + 1, k));
      }
      row.push_back(s);
    }
    prof.beta.push_back(std::move(row));
  }
  return prof;
}

}  // namespace

OscillationProfile p_closed_form(const PluriphaseData& p, const LatticeInfo& lat, std::optional<int> exact_integer_dim) {
  require_lattice(lat);
  const double D = p.similarity_dim;
  if (!(D < p.ambient_dim)) throw ValidationError("the oscillation profile needs D < d");
  if (exact_integer_dim) {
    if (std::abs(D - *exact_integer_dim) > 1e-9) throw ValidationError("declared integer D does not match D");
    return build_profile(p, lat, true, *exact_integer_dim);
  }
  const double n = std::round(D);
  if (std::abs(D - n) < 1e-9) {
    OscillationProfile prof = build_profile(p, lat, true, static_cast<int>(n));
    prof.integer_ambiguous = true;
    if (D != n) prof.alternative = std::make_shared<OscillationProfile>(build_profile(p, lat, false, 0));
    return prof;
  }
  return build_profile(p, lat, false, 0);
}

double OscillationProfile::fold(double eps) const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("ε must be positive and finite");
  const double h = -std::log(r);
  const double j = std::floor(std::log(g / eps) / h);
  double e = eps * std::exp(j * h);
  for (int guard = 0; guard < 4 && e > g; ++guard) e *= r;
  for (int guard = 0; guard < 4 && e <= r * g; ++guard) e /= r;
  return std::min(std::max(e, std::nextafter(r * g, g)), g);
}

double OscillationProfile::eval_on(int q, double eps) const {
  const auto& b = beta[static_cast<std::size_t>(q - 1)];
  const int Dint = static_cast<int>(std::lround(similarity_dim));
  const double D = integer_branch ? static_cast<double>(Dint) : similarity_dim;
  double v = 0.0;
  for (int k = 0; k <= ambient_dim; ++k) {
    if (integer_branch && k == Dint) v += b[static_cast<std::size_t>(k)];
    else v += std::pow(eps, D - k) * b[static_cast<std::size_t>(k)] / (1.0 - std::pow(r, D - k));
  }
  return v;
}

double OscillationProfile::derivative_on(int q, double eps) const {
  const auto& b = beta[static_cast<std::size_t>(q - 1)];
  const int Dint = static_cast<int>(std::lround(similarity_dim));
  const double D = integer_branch ? static_cast<double>(Dint) : similarity_dim;
  double v = 0.0;
  for (int k = 0; k <= ambient_dim; ++k) {
    if (integer_branch && k == Dint) continue;
    v += (D - k) * std::pow(eps, D - k - 1) * b[static_cast<std::size_t>(k)] / (1.0 - std::pow(r, D - k));
  }
  return v;
}

double OscillationProfile::eval(double eps) const {
  const double e = fold(eps);
  return eval_on(breaks.interval_of(e), e);
}

SeriesValue p_series(const PluriphaseData& p, const LatticeInfo& lat, double eps, int l_max) {
  require_lattice(lat);
  const int d = p.ambient_dim;
  const double D = p.similarity_dim;
  if (!(D < d)) throw ValidationError("the series for p needs D < d");
  if (l_max < 0) throw ValidationError("ℓ_max must be nonnegative");
  const double r = lat.base, g = p.g();
  double e = eps;
  {
    const double h = -std::log(r);
    e = eps * std::exp(std::floor(std::log(g / eps) / h) * h);
    for (int guard = 0; guard < 4 && e > g; ++guard) e *= r;
    for (int guard = 0; guard < 4 && e <= r * g; ++guard) e /= r;
  }
  const double s = D - d;
  double sum = p.gamma_volume / (std::pow(r, s) - 1.0);
  double rl = 1.0;
  for (int l = 0; l <= l_max; ++l) {
    sum += std::pow(r, l * s) * p.eval(rl * e);
    rl *= r;
  }
  double tail = 0.0;
  int l = l_max + 1;
  for (; rl * e > p.a(1); ++l, rl *= r) tail += std::pow(r, l * s) * p.eval(rl * e);
  tail *= std::pow(e, s);
  for (int k = 0; k <= d; ++k) {
    const double c = p.kappa(1, k);
    if (c == 0.0) continue;
    if (!(k < D)) throw ValidationError("series diverges: κ_{1,k} != 0 for some k >= D");
    tail += c * std::pow(e, D - k) * std::pow(r, l * (D - k)) / (1.0 - std::pow(r, D - k));
  }
  SeriesValue out;
  out.value = std::pow(e, s) * sum + tail;
  out.tail = tail;
  out.tail_bound = std::abs(tail);
  return out;
}

SeriesValue p_series(const VolumeCurve& curve, double gamma_volume, int d, double D, double g, const LatticeInfo& lat,
                     double eps, int l_max) {
  require_lattice(lat);
  if (!(D < d)) throw ValidationError("the series for p needs D < d");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (curve.epsilons[i] <= g && curve.values[i] > 0.0) pts.emplace_back(curve.epsilons[i], curve.values[i]);
  if (pts.size() < 2) throw ValidationError("the sampled curve needs at least two positive values in (0, g]");
  std::sort(pts.begin(), pts.end());
  const double e1 = pts[0].first, v1 = pts[0].second;
  const double slope = std::log(pts[1].second / v1) / std::log(pts[1].first / e1);
  auto vol = [&](double x) {
    if (x > g) return gamma_volume;
    if (x >= pts.back().first) return pts.back().second;
    if (x < e1) return v1 * std::pow(x / e1, slope);
    auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(x, std::numeric_limits<double>::infinity()));
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double t = std::log(x / a.first) / std::log(b.first / a.first);
    return std::exp((1.0 - t) * std::log(a.second) + t * std::log(b.second));
  };
  const double r = lat.base, h = -std::log(r);
  double e = eps * std::exp(std::floor(std::log(g / eps) / h) * h);
  for (int guard = 0; guard < 4 && e > g; ++guard) e *= r;
  for (int guard = 0; guard < 4 && e <= r * g; ++guard) e /= r;
  const double s = D - d;
  double sum = gamma_volume / (std::pow(r, s) - 1.0);
  double tail = 0.0;
  double rl = 1.0;
  int l = 0;
  for (; l <= l_max && rl * e >= e1; ++l, rl *= r) sum += std::pow(r, l * s) * vol(rl * e);
  const double ratio = std::pow(r, s + slope);
  if (!(ratio < 1.0)) throw ValidationError("extrapolated tail of the sampled curve does not converge");
  tail = std::pow(r, l * s) * vol(rl * e) / (1.0 - ratio) * std::pow(e, s);
  SeriesValue out;
  out.value = std::pow(e, s) * sum + tail;
  out.tail = tail;
  out.tail_bound = std::abs(tail);
  return out;
}

OscillationSummary oscillation(const OscillationProfile& profile) {
  OscillationSummary out;
  out.inf = std::numeric_limits<double>::infinity();
  out.sup = -std::numeric_limits<double>::infinity();
  auto consider = [&](double e, double v) {
    if (v < out.inf) {
      out.inf = v;
      out.argmin = e;
    }
    if (v > out.sup) {
      out.sup = v;
      out.argmax = e;
    }
  };
  constexpr int kGrid = 1000;
  for (int q = 1; q <= profile.breaks.Q(); ++q) {
    const double lo = profile.breaks.left(q), hi = profile.breaks.right(q);
    double prev_e = lo, prev_d = profile.derivative_on(q, lo);
    consider(lo, profile.eval_on(q, lo));
    for (int i = 1; i <= kGrid; ++i) {
      const double e = lo + (hi - lo) * i / kGrid;
      const double dv = profile.derivative_on(q, e);
      consider(e, profile.eval_on(q, e));
      if ((prev_d < 0.0) != (dv < 0.0) && prev_d != 0.0 && dv != 0.0) {
        double a = prev_e, b = e, fa = prev_d;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = profile.derivative_on(q, mid);
          if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        const double c = 0.5 * (a + b);
        consider(c, profile.eval_on(q, c));
      }
      prev_e = e;
      prev_d = dv;
    }
  }
  out.amplitude = out.sup - out.inf;
  out.error = 1e-13 * std::max(std::abs(out.sup), std::abs(out.inf));
  return out;
}

OscillationSummary oscillation(const std::vector<double>& eps, const std::vector<double>& values,
                               const std::vector<double>& errors) {
  if (values.empty() || eps.size() != values.size()) throw ValidationError("sampled profile is empty or ragged");
  OscillationSummary out;
  const auto mn = std::min_element(values.begin(), values.end());
  const auto mx = std::max_element(values.begin(), values.end());
  const auto i = static_cast<std::size_t>(mn - values.begin()), j = static_cast<std::size_t>(mx - values.begin());
  out.inf = *mn;
  out.sup = *mx;
  out.argmin = eps[i];
  out.argmax = eps[j];
  out.amplitude = out.sup - out.inf;
  if (!errors.empty()) out.error = errors.at(i) + errors.at(j);
  return out;
}

}  // namespace minklab
