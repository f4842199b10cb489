#include "minklab/pluriphase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minklab/errors.hpp"

namespace minklab {

PluriphaseData PluriphaseData::from_exact(int d, double D, ExactPluriphase data) {
  PluriphaseData p;
  p.ambient_dim = d;
  p.similarity_dim = D;
  for (const auto& a : data.breakpoints) p.breakpoints.push_back(a.to_double());
  for (const auto& row : data.coeffs) {
    std::vector<double> r;
    for (const auto& c : row) r.push_back(c.to_double());
    p.coeffs.push_back(std::move(r));
  }
  p.gamma_volume = data.gamma_volume.to_double();
  p.exact = std::move(data);
  return p;
}

double PluriphaseData::a(int m) const {
  if (m == 0) return 0.0;
  return breakpoints.at(static_cast<std::size_t>(m - 1));
}

Surd PluriphaseData::a_exact(int m) const {
  if (!exact) throw ValidationError("pluriphase data has no exact form");
  if (m == 0) return Surd(0);
  return exact->breakpoints.at(static_cast<std::size_t>(m - 1));
}

double PluriphaseData::kappa(int m, int k) const {
  const int M = pieces();
  if (k < 0 || k > ambient_dim) throw ValidationError("coefficient index k out of range");
  if (m == M + 1) return k == ambient_dim ? gamma_volume : 0.0;
  if (m < 1 || m > M) throw ValidationError("piece index m out of range");
  return coeffs[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)];
}

Surd PluriphaseData::kappa_exact(int m, int k) const {
  if (!exact) throw ValidationError("pluriphase data has no exact form");
  const int M = pieces();
  if (k < 0 || k > ambient_dim) throw ValidationError("coefficient index k out of range");
  if (m == M + 1) return k == ambient_dim ? exact->gamma_volume : Surd(0);
  if (m < 1 || m > M) throw ValidationError("piece index m out of range");
  return exact->coeffs[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)];
}

int PluriphaseData::piece_of(double eps) const {
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), eps);
  return static_cast<int>(it - breakpoints.begin()) + 1;
}

double PluriphaseData::eval(double eps) const {
  if (eps < 0.0) throw ValidationError("ε must be nonnegative");
  if (eps == 0.0) return 0.0;
  const int m = piece_of(eps);
  if (m > pieces()) return gamma_volume;
  const auto& row = coeffs[static_cast<std::size_t>(m - 1)];
  double v = 0.0;
  for (int k = 0; k <= ambient_dim; ++k) v += row[static_cast<std::size_t>(k)] * std::pow(eps, ambient_dim - k);
  return v;
}

Surd PluriphaseData::eval_exact(const Surd& eps) const {
  if (!exact) throw ValidationError("pluriphase data has no exact form");
  if (eps.sign() < 0) throw ValidationError("ε must be nonnegative");
  if (eps.is_zero()) return Surd(0);
  int m = 1;
  while (m <= pieces() && eps > exact->breakpoints[static_cast<std::size_t>(m - 1)]) ++m;
  if (m > pieces()) return exact->gamma_volume;
  Surd v(0);
  for (int k = 0; k <= ambient_dim; ++k)
    v += exact->coeffs[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)] * pow(eps, ambient_dim - k);
  return v;
}

double eval(const PluriphaseData& p, double eps) { return p.eval(eps); }

bool is_monophase(const PluriphaseData& p) { return p.pieces() == 1; }

std::vector<std::string> validate(const PluriphaseData& p, int grid_points) {
  std::vector<std::string> out;
  const int d = p.ambient_dim;
  const int M = p.pieces();
  if (d < 1) out.push_back("ambient dimension must be at least 1");
  if (M < 1) {
    out.push_back("at least one piece (M >= 1) is required");
    return out;
  }
  if (static_cast<int>(p.coeffs.size()) != M) {
    out.push_back("coefficient rows (" + std::to_string(p.coeffs.size()) + ") do not match pieces (" +
                  std::to_string(M) + ")");
    return out;
  }
  for (int m = 1; m <= M; ++m)
    if (static_cast<int>(p.coeffs[static_cast<std::size_t>(m - 1)].size()) != d + 1) {
      out.push_back("coefficient row " + std::to_string(m) + " must have d+1 = " + std::to_string(d + 1) + " entries");
      return out;
    }
  for (int m = 1; m <= M; ++m)
    if (!(p.a(m) > p.a(m - 1))) out.push_back("breakpoints must be strictly increasing and positive");
  if (p.exact) {
    for (int m = 1; m <= M; ++m)
      if (!(p.a_exact(m) > p.a_exact(m - 1))) out.push_back("exact breakpoints must be strictly increasing");
  }
  if (!out.empty()) return out;

  double scale = std::abs(p.gamma_volume);
  for (const auto& row : p.coeffs)
    for (double c : row) scale = std::max(scale, std::abs(c));
  const double ztol = 1e-12 * std::max(scale, 1e-300);
  for (int k = 0; k <= d; ++k) {
    if (k < p.similarity_dim - 1e-9) continue;
    const bool zero = p.exact ? p.kappa_exact(1, k).is_zero() : std::abs(p.kappa(1, k)) <= ztol;
    if (!zero) {
      std::ostringstream os;
      os << "κ_{1,k}=0 for k≥D violated at k=" << k << " (κ_{1," << k << "} = " << p.kappa(1, k) << ")";
      out.push_back(os.str());
    }
  }
  for (int m = 2; m <= M; ++m) {
    bool differs = false;
    for (int k = 0; k <= d; ++k) {
      if (p.exact) differs = differs || p.kappa_exact(m, k) != p.kappa_exact(m - 1, k);
      else differs = differs || std::abs(p.kappa(m, k) - p.kappa(m - 1, k)) > ztol;
    }
    if (!differs) out.push_back("minimality violated: piece " + std::to_string(m) + " repeats piece " + std::to_string(m - 1));
  }
  if (p.gamma_volume < 0.0) out.push_back("λ_d(Γ) must be nonnegative");

  const double g = p.g();
  double vmax = std::abs(p.gamma_volume);
  std::vector<double> vals;
  for (int i = 1; i <= grid_points; ++i) {
    const double e = g * static_cast<double>(i) / grid_points;
    vals.push_back(p.eval(e));
    vmax = std::max(vmax, std::abs(vals.back()));
  }
  const double vtol = 1e-10 * std::max(vmax, 1e-300);
  bool neg = false, dec = false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] < -vtol) neg = true;
    if (i > 0 && vals[i] < vals[i - 1] - vtol) dec = true;
  }
  if (p.gamma_volume < vals.back() - vtol) dec = true;
  if (neg) out.push_back("volume is negative somewhere on (0, g]");
  if (dec) out.push_back("volume is not nondecreasing in ε");
  return out;
}

}  // namespace minklab
