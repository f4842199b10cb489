#include "minklab/lattice.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "minklab/errors.hpp"

namespace minklab {
namespace {

void check_ratios(const std::vector<double>& ratios) {
  if (ratios.size() < 2) throw ValidationError("at least 2 ratios are required");
  for (double r : ratios)
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("ratios must lie in (0,1)");
}

double moran_sum(const std::vector<double>& ratios, double s) {
  double acc = 0.0;
  for (double r : ratios) acc += std::pow(r, s);
  return acc;
}

// Best rational approximation with bounded denominator, if within tol.
std::optional<std::pair<long, long>> rational_approx(double x, double tol, int max_den) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(y);
    long ai = static_cast<long>(a);
    long p2 = ai * p1 + p0;
    long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    if (std::abs(x - static_cast<double>(p2) / static_cast<double>(q2)) <= tol * std::max(1.0, std::abs(x)))
      return std::make_pair(p2, q2);
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = y - a;
    if (frac < 1e-300) break;
    y = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace

double similarity_dimension(const std::vector<double>& ratios) {
  check_ratios(ratios);
  double rmax = 0.0;
  for (double r : ratios) rmax = std::max(rmax, r);
  double lo = 0.0;
  double hi = std::log(static_cast<double>(ratios.size())) / std::log(1.0 / rmax);
  while (hi - lo > 1e-13) {
    double mid = 0.5 * (lo + hi);
    if (moran_sum(ratios, mid) > 1.0) lo = mid;
    else hi = mid;
  }
  double D = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    double f = -1.0, df = 0.0;
    for (double r : ratios) {
      const double p = std::pow(r, D);
      f += p;
      df += p * std::log(r);
    }
    const double next = D - f / df;
    if (!(next > lo - 1e-12 && next < hi + 1e-12)) break;
    D = next;
  }
  return D;
}

std::optional<int> exact_integer_dimension(const std::vector<Rational>& ratios) {
  std::vector<double> r;
  for (const auto& q : ratios) r.push_back(to_double(q));
  const double D = similarity_dimension(r);
  const int n0 = static_cast<int>(std::round(D));
  for (int n = std::max(1, n0 - 1); n <= n0 + 1; ++n) {
    Rational s(0);
    for (const auto& q : ratios) s += pow(q, n);
    if (s == 1) return n;
  }
  return std::nullopt;
}

double renewal_mean(const std::vector<double>& ratios, double D) {
  double eta = 0.0;
  for (double r : ratios) eta -= std::pow(r, D) * std::log(r);
  return eta;
}

LatticeInfo classify_lattice(const std::vector<double>& ratios, double D, double tol, int max_denominator) {
  check_ratios(ratios);
  LatticeInfo info;
  info.eta = renewal_mean(ratios, D);
  const double l1 = std::log(ratios.front());
  std::vector<long> num, den;
  for (double r : ratios) {
    auto pq = rational_approx(std::log(r) / l1, tol, max_denominator);
    if (!pq) return info;
    num.push_back(pq->first);
    den.push_back(pq->second);
  }
  long l = 1;
  for (long q : den) l = std::lcm(l, q);
  std::vector<long> m;
  long g = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    m.push_back(num[i] * (l / den[i]));
    g = std::gcd(g, m.back());
  }
  info.is_lattice = true;
  for (long mi : m) info.exponents.push_back(static_cast<int>(mi / g));
  info.base = std::pow(ratios.front(), static_cast<double>(g) / static_cast<double>(l));
  info.h = -std::log(info.base);
  return info;
}

LatticeInfo verify_lattice(const std::vector<double>& ratios, double D, double base, const std::vector<int>& exponents,
                           const std::optional<Rational>& exact_base,
                           const std::optional<std::vector<Rational>>& exact_ratios) {
  check_ratios(ratios);
  if (!(base > 0.0 && base < 1.0)) throw ValidationError("lattice base must lie in (0,1)");
  if (exponents.size() != ratios.size())
    throw ValidationError("lattice declares " + std::to_string(exponents.size()) + " exponents for " +
                          std::to_string(ratios.size()) + " maps");
  int g = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const int k = exponents[i];
    if (k < 1) throw ValidationError("lattice exponents must be positive integers");
    g = std::gcd(g, k);
    bool ok;
    if (exact_base && exact_ratios) {
      ok = pow(*exact_base, k) == (*exact_ratios)[i];
    } else {
      ok = std::abs(std::pow(base, k) - ratios[i]) <= 1e-12 * ratios[i];
    }
    if (!ok)
      throw ValidationError("declared lattice is inconsistent: base^" + std::to_string(k) + " != ratio of map " +
                            std::to_string(i));
  }
  if (g != 1)
    throw ValidationError("declared lattice base is not minimal: exponents share the factor " + std::to_string(g));
  LatticeInfo info;
  info.is_lattice = true;
  info.base = base;
  info.exact_base = exact_base;
  info.exponents = exponents;
  info.eta = renewal_mean(ratios, D);
  info.h = -std::log(base);
  info.declared = true;
  return info;
}

bool attach_exact_base(LatticeInfo& info, const std::vector<Rational>& exact_ratios) {
  if (!info.is_lattice || exact_ratios.size() != info.exponents.size()) return false;
  for (std::size_t i = 0; i < exact_ratios.size(); ++i) {
    if (info.exponents[i] != 1) continue;
    const Rational& base = exact_ratios[i];
    for (std::size_t j = 0; j < exact_ratios.size(); ++j)
      if (pow(base, info.exponents[j]) != exact_ratios[j]) return false;
    info.exact_base = base;
    return true;
  }
  return false;
}

}  // namespace minklab
