#include <algorithm>
#include <cmath>
#include <sstream>

#include "minklab/errors.hpp"
#include "minklab/renewal.hpp"

namespace minklab {

namespace {

struct FloatField {
  using T = double;
  const PluriphaseData& p;
  double r;
  T kappa(int m, int k) const { return p.kappa(m, k); }
  T a(int m) const { return p.a(m); }
  T rpow(long n) const { return std::pow(r, static_cast<double>(n)); }
  static T power(const T& x, long n) { return std::pow(x, static_cast<double>(n)); }
  static T from_long(long n) { return static_cast<double>(n); }
  static double to_double(const T& x) { return x; }
};

struct ExactField {
  using T = Surd;
  const PluriphaseData& p;
  Rational r;
  T kappa(int m, int k) const { return p.kappa_exact(m, k); }
  T a(int m) const { return p.a_exact(m); }
  T rpow(long n) const { return Surd(pow(r, n)); }
  static T power(const T& x, long n) { return pow(x, n); }
  static T from_long(long n) { return Surd(static_cast<long long>(n)); }
  static double to_double(const T& x) { return x.to_double(); }
};

bool is_zero(double v, double scale) { return std::abs(v) <= 1e-9 * std::max(scale, 1e-300); }
bool is_zero(const Surd& v, double) { return v.is_zero(); }
bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300}); }
bool same(const Surd& a, const Surd& b) { return a == b; }

template <class Field>
void store_c(ConditionFormulation& f, const typename Field::T& c) {
  f.C = Field::to_double(c);
  if constexpr (std::is_same_v<typename Field::T, Surd>) f.C_exact = c;
}

template <class Field>
ConditionTerm make_term(int k, int q, const typename Field::T& v, bool holds) {
  ConditionTerm t;
  t.k = k;
  t.q = q;
  t.value = Field::to_double(v);
  if constexpr (std::is_same_v<typename Field::T, Surd>) t.exact_value = v;
  t.holds = holds;
  return t;
}

std::string label(int k, int q) {
  std::ostringstream os;
  os << "k=" << k << ",q=" << q;
  return os.str();
}

template <class Field>
std::pair<ConditionFormulation, ConditionFormulation> evaluate(const Field& F, const BreakStructure& bs, int d, int D,
                                                               int M) {
  using T = typename Field::T;
  ConditionFormulation lv, gr;
  lv.pass = true;
  gr.pass = true;
  auto fail = [](ConditionFormulation& f, int k, int q) {
    if (f.pass) f.first_failure = label(k, q);
    f.pass = false;
  };

  std::optional<T> c1;
  for (int q = 1; q <= bs.Q(); ++q) {
    const auto& L = bs.levels[static_cast<std::size_t>(q - 1)];
    for (int k = 0; k <= d; ++k) {
      T sum(0);
      double scale = 0.0;
      for (int m = 1; m <= M; ++m) {
        const long Lm = L[static_cast<std::size_t>(m - 1)];
        T term = k == D ? Field::from_long(Lm) * (F.kappa(m + 1, k) - F.kappa(m, k))
                        : F.rpow(Lm * (D - k)) * (F.kappa(m, k) - F.kappa(m + 1, k));
        scale = std::max(scale, std::abs(Field::to_double(term)));
        sum += term;
      }
      if (k == D) {
        if (!c1) c1 = sum;
        const bool holds = same(sum, *c1);
        lv.terms.push_back(make_term<Field>(k, q, sum, holds));
        if (!holds) fail(lv, k, q);
      } else {
        const bool holds = is_zero(sum, scale);
        lv.terms.push_back(make_term<Field>(k, q, sum, holds));
        if (!holds) fail(lv, k, q);
      }
    }
  }
  store_c<Field>(lv, *c1);

  const int Q = bs.Q();
  for (int q = 1; q <= Q; ++q) {
    const auto& U = bs.groups[static_cast<std::size_t>(q - 1)];
    for (int k = 0; k <= d; ++k) {
      if (k == D && q == Q) continue;
      T sum(0);
      double scale = 0.0;
      for (int m : U) {
        T term = Field::power(F.a(m), D - k) * (F.kappa(m, k) - F.kappa(m + 1, k));
        scale = std::max(scale, std::abs(Field::to_double(term)));
        sum += term;
      }
      const bool holds = is_zero(sum, scale);
      gr.terms.push_back(make_term<Field>(k, q, sum, holds));
      if (!holds) fail(gr, k, q);
    }
  }
  // Σ_{U_q} L_m(g) δ_m is constant but need not vanish for q < Q when the
  // pieces of U_q sit in different periods, so every group contributes.
  T c2(0);
  for (const auto& U : bs.groups)
    for (int m : U)
      c2 += Field::from_long(bs.level_at_g[static_cast<std::size_t>(m - 1)]) * (F.kappa(m + 1, D) - F.kappa(m, D));
  gr.terms.push_back(make_term<Field>(D, Q, c2, true));
  store_c<Field>(gr, c2);

  if (lv.pass != gr.pass || (lv.pass && !same(*c1, c2))) {
    std::ostringstream os;
    os << "integer-dimension conditions disagree: level form " << (lv.pass ? "passes" : "fails") << " with C = "
       << Field::to_double(*c1) << ", group form " << (gr.pass ? "passes" : "fails") << " with C = "
       << Field::to_double(c2);
    throw ConsistencyError(os.str());
  }
  return {lv, gr};
}

double power_integral(double a, double b, double s) {
  if (a == 0.0) {
    if (!(s > 0.0)) throw ValidationError("integral diverges at ε = 0 (κ_{1,k} != 0 for some k >= D)");
    return std::pow(b, s) / s;
  }
  const double lr = std::log(b / a);
  if (s == 0.0) return lr;
  return std::pow(a, s) * std::expm1(s * lr) / s;
}

}  // namespace

IntegerConditionReport integer_conditions(const PluriphaseData& p, const LatticeInfo& lat, int D) {
  if (!lat.is_lattice) throw ValidationError("integer conditions need a lattice IFS");
  if (D < 0 || D >= p.ambient_dim) throw ValidationError("integer conditions need an integer D with 0 <= D < d");
  if (std::abs(p.similarity_dim - D) > 1e-9) throw ValidationError("declared integer D does not match D");
  const BreakStructure bs = break_structure(p, lat);
  IntegerConditionReport rep;
  rep.D = D;
  rep.exact = bs.exact;
  std::pair<ConditionFormulation, ConditionFormulation> res;
  if (bs.exact) res = evaluate(ExactField{p, *lat.exact_base}, bs, p.ambient_dim, D, p.pieces());
  else res = evaluate(FloatField{p, lat.base}, bs, p.ambient_dim, D, p.pieces());
  rep.with_levels = std::move(res.first);
  rep.with_groups = std::move(res.second);
  rep.pass = rep.with_levels.pass;
  if (rep.pass) {
    rep.C = rep.with_groups.C;
    rep.C_exact = rep.with_groups.C_exact;
  }
  return rep;
}

double content_factor(const LatticeInfo& lat, const std::vector<double>& ratios, double D) {
  if (!lat.is_lattice) throw ValidationError("the content factor needs a lattice IFS");
  return lat.h / renewal_mean(ratios, D);
}

double forcing_integral(const PluriphaseData& p) {
  const int d = p.ambient_dim;
  const double D = p.similarity_dim;
  if (!(D < d)) throw ValidationError("average content needs D < d");
  double total = p.gamma_volume * std::pow(p.g(), D - d) / (d - D);
  for (int m = 1; m <= p.pieces(); ++m)
    for (int k = 0; k <= d; ++k) {
      const double c = p.kappa(m, k);
      if (c == 0.0) continue;
      total += c * power_integral(p.a(m - 1), p.a(m), D - k);
    }
  return total;
}

AverageContent average_content(const PluriphaseData& p, const std::vector<double>& ratios,
                               const std::optional<LatticeInfo>& lat, std::optional<int> exact_integer_dim) {
  AverageContent out;
  out.value = forcing_integral(p) / renewal_mean(ratios, p.similarity_dim);
  if (lat && lat->is_lattice) {
    const OscillationProfile prof = p_closed_form(p, *lat, exact_integer_dim);
    const int Dint = static_cast<int>(std::lround(prof.similarity_dim));
    const double D = prof.integer_branch ? static_cast<double>(Dint) : prof.similarity_dim;
    double integral = 0.0;
    for (int q = 1; q <= prof.breaks.Q(); ++q) {
      const double lo = prof.breaks.left(q), hi = prof.breaks.right(q);
      const auto& b = prof.beta[static_cast<std::size_t>(q - 1)];
      for (int k = 0; k <= prof.ambient_dim; ++k) {
        if (prof.integer_branch && k == Dint) integral += b[static_cast<std::size_t>(k)] * std::log(hi / lo);
        else
          integral += b[static_cast<std::size_t>(k)] / (1.0 - std::pow(prof.r, D - k)) * power_integral(lo, hi, D - k);
      }
    }
    const double factor = content_factor(*lat, ratios, p.similarity_dim);
    out.profile_route = factor * integral / lat->h;
    out.route_gap = std::abs(*out.profile_route - out.value) / std::max(std::abs(out.value), 1e-300);
  }
  return out;
}

double average_content(const VolumeCurve& curve, double gamma_volume, double g, int d, double D,
                       const std::vector<double>& ratios) {
  if (!(D < d)) throw ValidationError("average content needs D < d");
  struct Sample {
    double eps, value, err;
  };
  std::vector<Sample> all;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.epsilons[i] > g) continue;
    const double se = i < curve.std_errors.size() ? curve.std_errors[i] : 0.0;
    const double eb = i < curve.error_bounds.size() ? curve.error_bounds[i] : 0.0;
    all.push_back({curve.epsilons[i], std::max(curve.values[i], 0.0), std::max(se, 0.5 * eb)});
  }
  std::sort(all.begin(), all.end(), [](const Sample& a, const Sample& b) { return a.eps < b.eps; });
  // Small-ε samples with a relative error above 20% are replaced by the fitted tail.
  std::size_t first = 0;
  while (first < all.size() && !(all[first].value > 0.0 && all[first].err <= 0.2 * all[first].value)) ++first;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = first; i < all.size(); ++i) pts.emplace_back(all[i].eps, all[i].value);
  if (pts.size() < 2 || pts[1].second <= 0.0)
    throw ValidationError("the sampled curve needs at least two well-resolved positive values below g");
  const double s = D - d;
  // Power-law tail below the first resolved sample, fitted in log-log space with
  // weights from the relative errors of the smallest resolved samples.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < pts.size() && i < 8; ++i) {
    if (pts[i].second <= 0.0) break;
    const double rel = all[first + i].err / pts[i].second;
    const double w = 1.0 / std::max(rel * rel, 1e-12);
    const double x = std::log(pts[i].first), y = std::log(pts[i].second);
    sw += w, sx += w * x, sy += w * y, sxx += w * x * x, sxy += w * x * y;
  }
  const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
  if (!(s + slope > 0.0)) throw ValidationError("extrapolated curve is not integrable at ε = 0");
  double total = pts[0].second * std::pow(pts[0].first, s) / (s + slope);
  pts.emplace_back(g, pts.back().second);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [ea, va] = pts[i];
    const auto [eb, vb] = pts[i + 1];
    if (eb <= ea) continue;
    if (va > 0.0 && vb > 0.0) {
      const double k = std::log(vb / va) / std::log(eb / ea);
      total += va * std::pow(ea, -k) * power_integral(ea, eb, s + k);
    } else {
      const double slope_lin = (vb - va) / (eb - ea);
      // ∫ (va + slope (ε - ea)) ε^{s-1} dε
      total += (va - slope_lin * ea) * power_integral(ea, eb, s) + slope_lin * power_integral(ea, eb, s + 1.0);
    }
  }
  total += gamma_volume * std::pow(g, s) / (d - D);
  return total / renewal_mean(ratios, D);
}

double renewal_forcing(const PluriphaseData& p, const std::vector<double>& ratios, double t) {
  const int d = p.ambient_dim;
  const double D = p.similarity_dim;
  const double eps = std::exp(-t);
  const double g = p.g();
  if (eps > g) return 0.0;
  double sd = 0.0;
  for (double r : ratios) sd += std::pow(r, d);
  if (!(sd < 1.0)) throw ValidationError("Σ r_i^d must be below 1 for λ_d(O) to be determined by λ_d(Γ)");
  const double lambda_o = p.gamma_volume / (1.0 - sd);
  double outer = 0.0;
  for (double r : ratios)
    if (eps > r * g) outer += std::pow(r, d);
  double v = std::pow(eps, D - d) * lambda_o * outer;
  const int m = p.piece_of(eps);
  for (int k = 0; k <= d; ++k) {
    const double c = p.kappa(m, k);
    if (c != 0.0) v += c * std::exp(-t * (D - k));
  }
  return v;
}

TimeSeries sample_forcing(const std::function<double(double)>& z, double t0, double dt, std::size_t n) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  TimeSeries ts;
  ts.t0 = t0;
  ts.dt = dt;
  ts.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) ts.values[i] = z(ts.t(i));
  return ts;
}

TimeSeries renewal_solve(const TimeSeries& z, const std::vector<double>& weights, const std::vector<double>& delays) {
  if (weights.size() != delays.size() || weights.empty()) throw ValidationError("weights and delays must match");
  if (!(z.dt > 0.0)) throw ValidationError("time step must be positive");
  std::vector<std::size_t> lag;
  for (double y : delays) {
    const double s = y / z.dt;
    const double n = std::round(s);
    if (n < 1.0 || std::abs(s - n) > 1e-9 * std::max(1.0, s))
      throw ValidationError("delay y_i must be a positive integer multiple of the grid step");
    lag.push_back(static_cast<std::size_t>(n));
  }
  const std::size_t max_lag = *std::max_element(lag.begin(), lag.end());
  if (z.values.size() <= max_lag) throw ValidationError("t range is shorter than the largest delay");
  TimeSeries Z = z;
  for (std::size_t n = 0; n < Z.values.size(); ++n) {
    double v = z.values[n];
    for (std::size_t i = 0; i < lag.size(); ++i)
      if (n >= lag[i]) v += weights[i] * Z.values[n - lag[i]];
    Z.values[n] = v;
  }
  return Z;
}

double lattice_limit(const std::function<double(double)>& z, double h, double eta, double t, double t_support_min) {
  if (!(h > 0.0) || !(eta > 0.0)) throw ValidationError("h and η must be positive");
  long l = static_cast<long>(std::floor((t - t_support_min) / h));
  double sum = 0.0;
  int quiet = 0;
  for (int guard = 0; guard < 100000 && quiet < 8; ++guard, --l) {
    const double v = z(t - static_cast<double>(l) * h);
    sum += v;
    quiet = std::abs(v) <= 1e-17 * std::abs(sum) ? quiet + 1 : 0;
  }
  return h / eta * sum;
}

double cesaro_mean(const TimeSeries& Z) {
  const std::size_t n = Z.values.size();
  if (n < 2) throw ValidationError("Cesàro mean needs at least two samples");
  double s = 0.5 * (Z.values.front() + Z.values.back());
  for (std::size_t i = 1; i + 1 < n; ++i) s += Z.values[i];
  return s / static_cast<double>(n - 1);
}

std::vector<AsymptoticRow> asymptotic_check(const Attractor& attractor, const OscillationProfile& profile, double factor,
                                            const std::vector<double>& eps, const VolumeMethod& method) {
  const VolumeCurve curve = parallel_volume(attractor, Domain::whole_space(attractor.dim()), eps, method);
  std::vector<AsymptoticRow> rows;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    AsymptoticRow row;
    row.eps = curve.epsilons[i];
    row.lhs = std::pow(row.eps, profile.similarity_dim - profile.ambient_dim) * curve.values[i];
    row.rhs = factor * profile.eval(row.eps);
    row.deviation = std::abs(row.lhs - row.rhs) / std::abs(row.rhs);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace minklab
