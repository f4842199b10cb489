#include "minklab/parvol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "minklab/errors.hpp"
#include "minklab/parallel.hpp"

namespace minklab {

Domain Domain::whole_space(int dim) {
  Domain d;
  d.whole_ = true;
  d.dim_ = dim;
  d.label_ = "all";
  return d;
}

Domain Domain::of(const Region& region) {
  if (!region.is_bounded()) throw ValidationError("volume domain must be bounded");
  Domain d;
  d.whole_ = false;
  d.dim_ = region.dim();
  d.region_ = region;
  d.label_ = "region";
  return d;
}

Domain Domain::of(const GammaRegion& gamma_region) {
  Domain d;
  d.whole_ = false;
  d.dim_ = gamma_region.dim();
  d.gamma_ = gamma_region;
  d.label_ = "gamma";
  return d;
}

bool Domain::contains(const Vec& x) const {
  if (whole_) return true;
  if (gamma_) return gamma_->contains(x);
  return region_->contains(x);
}

BoxRelation Domain::relation(const BoundingBox& box) const {
  if (whole_) return BoxRelation::Inside;
  if (gamma_) return gamma_->relation(box);
  return region_->relation(box);
}

std::optional<BoundingBox> Domain::bounds() const {
  if (whole_) return std::nullopt;
  if (gamma_) return gamma_->bounds();
  return region_->bounds();
}

VolumeMethod VolumeMethod::grid(double h) {
  if (!(h > 0.0)) throw ValidationError("grid resolution must be positive");
  VolumeMethod m;
  m.kind = Kind::Grid;
  m.h = h;
  return m;
}

VolumeMethod VolumeMethod::qmc(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample count must be positive");
  VolumeMethod m;
  m.kind = Kind::Qmc;
  m.n = n;
  m.seed = seed;
  return m;
}

std::string VolumeMethod::tag() const {
  if (kind == Kind::Grid) return "grid";
  return "qmc";
}

std::vector<double> geometric_epsilons(double g, double rho, int n) {
  if (!(g > 0.0) || !(rho > 0.0 && rho < 1.0) || n < 1)
    throw ValidationError("geometric grid needs g > 0, rho in (0,1) and n >= 1");
  std::vector<double> eps;
  for (int j = n - 1; j >= 0; --j) eps.push_back(g * std::pow(rho, j));
  return eps;
}

namespace {

// Box containing F from a coarse point cover.
BoundingBox coarse_attractor_box(const Attractor& a) {
  const double diam = 2.0 * a.ball().radius;
  const int n = a.ifs().size();
  int depth = 0;
  double count = 1.0;
  while (count * n <= 4096.0 && depth < 12) {
    count *= n;
    ++depth;
  }
  return a.bounding_box(diam * std::pow(a.ifs().max_ratio(), depth));
}

void check_eps(const std::vector<double>& eps) {
  if (eps.empty()) throw ValidationError("at least one ε is required");
  for (double e : eps)
    if (!(e > 0.0) || !std::isfinite(e)) throw ValidationError("ε values must be positive and finite");
}

struct GridChunk {
  std::vector<std::int64_t> diff;
  std::vector<std::int64_t> boundary;
  std::size_t evaluations = 0;
};

class GridCounter {
 public:
  GridCounter(const Attractor& a, const Domain& dom, const std::vector<double>& eps, const BoundingBox& window,
              double h, double tol)
      : a_(a), dom_(dom), eps_(eps), lo_(window.lo), h_(h), tol_(tol), d_(window.dim()) {
    rho_c_ = 0.5 * h * std::sqrt(static_cast<double>(d_));
  }

  void block(const int* ilo, const int* ihi, int jlo, int jhi, bool inside, GridChunk& out) const {
    int cells_axis[kMaxDim];
    std::int64_t cells = 1;
    for (int k = 0; k < d_; ++k) {
      cells_axis[k] = ihi[k] - ilo[k];
      cells *= cells_axis[k];
    }
    BoxRelation rel = BoxRelation::Inside;
    if (!inside) {
      BoundingBox ext{Vec(d_), Vec(d_)};
      for (int k = 0; k < d_; ++k) {
        ext.lo(k) = lo_(k) + ilo[k] * h_;
        ext.hi(k) = lo_(k) + ihi[k] * h_;
      }
      rel = dom_.relation(ext);
      if (rel == BoxRelation::Outside) return;
    }
    const bool in_dom = rel == BoxRelation::Inside;
    if (cells == 1) {
      leaf(ilo, jlo, jhi, in_dom, out);
      return;
    }
    Vec c(d_);
    double r2 = 0.0;
    for (int k = 0; k < d_; ++k) {
      const double a = lo_(k) + (ilo[k] + 0.5) * h_;
      const double b = lo_(k) + (ihi[k] - 0.5) * h_;
      c(k) = 0.5 * (a + b);
      r2 += 0.25 * (b - a) * (b - a);
    }
    const double rho_b = std::sqrt(r2);
    const double margin = rho_b + rho_c_;
    const double tol = std::max(tol_, 0.25 * rho_b);
    DistanceBracket br = a_.bracket(c, tol, eps_[static_cast<std::size_t>(jhi - 1)] + margin + tol);
    ++out.evaluations;
    int nlo = jlo;
    while (nlo < jhi && br.lower - margin > eps_[static_cast<std::size_t>(nlo)]) ++nlo;
    int nhi = jhi;
    while (nhi > nlo && br.upper + margin <= eps_[static_cast<std::size_t>(nhi - 1)]) --nhi;
    if (nhi < jhi) {
      std::int64_t straddling = 0;
      std::int64_t members = in_dom ? cells : count_members(ilo, ihi, straddling);
      out.diff[static_cast<std::size_t>(nhi)] += members;
      out.diff[static_cast<std::size_t>(jhi)] -= members;
      for (int j = nhi; j < jhi; ++j) out.boundary[static_cast<std::size_t>(j)] += straddling;
    }
    if (nlo == nhi) return;
    // split every axis with more than one cell
    int mid[kMaxDim];
    for (int k = 0; k < d_; ++k) mid[k] = ilo[k] + cells_axis[k] / 2;
    for (int mask = 0; mask < (1 << d_); ++mask) {
      int clo[kMaxDim], chi[kMaxDim];
      bool empty = false;
      for (int k = 0; k < d_; ++k) {
        const bool upper = (mask >> k) & 1;
        if (cells_axis[k] == 1) {
          if (upper) empty = true;
          clo[k] = ilo[k];
          chi[k] = ihi[k];
        } else {
          clo[k] = upper ? mid[k] : ilo[k];
          chi[k] = upper ? ihi[k] : mid[k];
        }
      }
      if (!empty) block(clo, chi, nlo, nhi, in_dom, out);
    }
  }

 private:
  Vec center(const int* idx) const {
    Vec x(d_);
    for (int k = 0; k < d_; ++k) x(k) = lo_(k) + (idx[k] + 0.5) * h_;
    return x;
  }

  BoundingBox cell_box(const int* idx) const {
    BoundingBox b{Vec(d_), Vec(d_)};
    for (int k = 0; k < d_; ++k) {
      b.lo(k) = lo_(k) + idx[k] * h_;
      b.hi(k) = b.lo(k) + h_;
    }
    return b;
  }

  // Cells whose centers lie in the domain; cut counts cells the domain boundary may cross.
  std::int64_t count_members(const int* ilo, const int* ihi, std::int64_t& cut) const {
    std::int64_t count = 0;
    int idx[kMaxDim];
    for (int k = 0; k < d_; ++k) idx[k] = ilo[k];
    for (;;) {
      if (dom_.contains(center(idx))) ++count;
      if (dom_.relation(cell_box(idx)) == BoxRelation::Unknown) ++cut;
      int k = 0;
      while (k < d_) {
        if (++idx[k] < ihi[k]) break;
        idx[k] = ilo[k];
        ++k;
      }
      if (k == d_) break;
    }
    return count;
  }

  void leaf(const int* idx, int jlo, int jhi, bool in_dom, GridChunk& out) const {
    Vec x = center(idx);
    DistanceBracket br = a_.bracket(x, tol_, eps_[static_cast<std::size_t>(jhi - 1)] + rho_c_ + tol_);
    ++out.evaluations;
    if (!in_dom) {
      // The domain boundary may cross this cell: it is uncertain for every ε it can reach.
      for (int j = jlo; j < jhi; ++j)
        if (br.lower - rho_c_ <= eps_[static_cast<std::size_t>(j)]) ++out.boundary[static_cast<std::size_t>(j)];
      if (!dom_.contains(x)) return;
    }
    const double dhat = br.lower > eps_[static_cast<std::size_t>(jhi - 1)] ? br.lower : 0.5 * (br.lower + br.upper);
    auto first = std::lower_bound(eps_.begin() + jlo, eps_.begin() + jhi, dhat);
    const int jin = static_cast<int>(first - eps_.begin());
    if (jin < jhi) {
      out.diff[static_cast<std::size_t>(jin)] += 1;
      out.diff[static_cast<std::size_t>(jhi)] -= 1;
    }
    if (!in_dom) return;
    for (int j = jlo; j < jhi; ++j) {
      const double e = eps_[static_cast<std::size_t>(j)];
      if (br.lower - rho_c_ <= e && e < br.upper + rho_c_) ++out.boundary[static_cast<std::size_t>(j)];
    }
  }

  const Attractor& a_;
  const Domain& dom_;
  const std::vector<double>& eps_;
  Vec lo_;
  double h_;
  double tol_;
  int d_;
  double rho_c_ = 0.0;
};

VolumeCurve grid_volume(const Attractor& a, const Domain& dom, const std::vector<double>& eps,
                        const BoundingBox& window, const VolumeMethod& m, double tol) {
  const int d = window.dim();
  const double h = m.h;
  int n_axis[kMaxDim];
  double total = 1.0;
  for (int k = 0; k < d; ++k) {
    n_axis[k] = std::max(1, static_cast<int>(std::ceil((window.hi(k) - window.lo(k)) / h)));
    total *= n_axis[k];
  }
  if (total > static_cast<double>(m.max_cells))
    throw CapacityError("grid needs " + std::to_string(total) + " cells, above the cap of " +
                        std::to_string(m.max_cells));
  constexpr int kBlock = 64;
  int blocks_axis[kMaxDim];
  std::size_t n_blocks = 1;
  for (int k = 0; k < d; ++k) {
    blocks_axis[k] = (n_axis[k] + kBlock - 1) / kBlock;
    n_blocks *= static_cast<std::size_t>(blocks_axis[k]);
  }
  const int E = static_cast<int>(eps.size());
  std::vector<GridChunk> chunks(n_blocks);
  GridCounter counter(a, dom, eps, window, h, tol);
  parallel_chunks(n_blocks, [&](std::size_t b) {
    GridChunk& out = chunks[b];
    out.diff.assign(static_cast<std::size_t>(E + 1), 0);
    out.boundary.assign(static_cast<std::size_t>(E), 0);
    int ilo[kMaxDim], ihi[kMaxDim];
    std::size_t rem = b;
    for (int k = 0; k < d; ++k) {
      const int bk = static_cast<int>(rem % static_cast<std::size_t>(blocks_axis[k]));
      rem /= static_cast<std::size_t>(blocks_axis[k]);
      ilo[k] = bk * kBlock;
      ihi[k] = std::min(n_axis[k], ilo[k] + kBlock);
    }
    counter.block(ilo, ihi, 0, E, false, out);
  });
  std::vector<std::int64_t> diff(static_cast<std::size_t>(E + 1), 0), boundary(static_cast<std::size_t>(E), 0);
  VolumeCurve curve;
  for (const auto& c : chunks) {
    for (int j = 0; j <= E; ++j) diff[static_cast<std::size_t>(j)] += c.diff[static_cast<std::size_t>(j)];
    for (int j = 0; j < E; ++j) boundary[static_cast<std::size_t>(j)] += c.boundary[static_cast<std::size_t>(j)];
    curve.evaluations += c.evaluations;
  }
  const double cell_vol = std::pow(h, d);
  std::int64_t run = 0;
  for (int j = 0; j < E; ++j) {
    run += diff[static_cast<std::size_t>(j)];
    curve.values.push_back(static_cast<double>(run) * cell_vol);
    curve.std_errors.push_back(0.0);
    curve.error_bounds.push_back(static_cast<double>(boundary[static_cast<std::size_t>(j)]) * cell_vol);
  }
  curve.resolution = h;
  return curve;
}

std::uint64_t replicate_seed(std::uint64_t seed, int r) {
  return seed + 0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(r + 1);
}

VolumeCurve qmc_volume(const Attractor& a, const Domain& dom, const std::vector<double>& eps,
                       const BoundingBox& window, const VolumeMethod& m, double tol) {
  const int K = std::max(2, m.replicates);
  const std::size_t per = (m.n + static_cast<std::size_t>(K) - 1) / static_cast<std::size_t>(K);
  if (per * static_cast<std::size_t>(K) > m.max_samples) throw CapacityError("sample count exceeds the cap");
  const int E = static_cast<int>(eps.size());
  constexpr std::size_t kChunkPts = 4096;
  const std::size_t chunks_per = (per + kChunkPts - 1) / kChunkPts;
  const std::size_t n_chunks = chunks_per * static_cast<std::size_t>(K);
  std::vector<std::vector<std::int64_t>> diff(n_chunks);
  std::vector<QmcSequence> seqs;
  for (int r = 0; r < K; ++r) seqs.emplace_back(window.dim(), replicate_seed(m.seed, r));
  const double emax = eps.back();
  parallel_chunks(n_chunks, [&](std::size_t c) {
    const int r = static_cast<int>(c / chunks_per);
    const std::size_t start = (c % chunks_per) * kChunkPts;
    const std::size_t stop = std::min(per, start + kChunkPts);
    auto& dv = diff[c];
    dv.assign(static_cast<std::size_t>(E + 1), 0);
    for (std::size_t i = start; i < stop; ++i) {
      Vec x = seqs[static_cast<std::size_t>(r)].point_in(i, window);
      if (!dom.contains(x)) continue;
      DistanceBracket br = a.bracket(x, tol, emax + tol);
      if (br.lower > emax) continue;
      const double dhat = 0.5 * (br.lower + br.upper);
      auto it = std::lower_bound(eps.begin(), eps.end(), dhat);
      dv[static_cast<std::size_t>(it - eps.begin())] += 1;
    }
  });
  const double vol = window.volume();
  std::vector<std::vector<double>> rep(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(E)));
  for (int r = 0; r < K; ++r) {
    std::vector<std::int64_t> tot(static_cast<std::size_t>(E + 1), 0);
    for (std::size_t c = static_cast<std::size_t>(r) * chunks_per; c < static_cast<std::size_t>(r + 1) * chunks_per; ++c)
      for (int j = 0; j <= E; ++j) tot[static_cast<std::size_t>(j)] += diff[c][static_cast<std::size_t>(j)];
    std::int64_t run = 0;
    for (int j = 0; j < E; ++j) {
      run += tot[static_cast<std::size_t>(j)];
      rep[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
          vol * static_cast<double>(run) / static_cast<double>(per);
    }
  }
  VolumeCurve curve;
  for (int j = 0; j < E; ++j) {
    double mean = 0.0;
    for (int r = 0; r < K; ++r) mean += rep[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
    mean /= K;
    double ss = 0.0;
    for (int r = 0; r < K; ++r) {
      const double dv = rep[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] - mean;
      ss += dv * dv;
    }
    curve.values.push_back(mean);
    curve.std_errors.push_back(std::sqrt(ss / (K - 1) / K));
    curve.error_bounds.push_back(0.0);
  }
  curve.evaluations = per * static_cast<std::size_t>(K);
  curve.seed = m.seed;
  curve.resolution = 0.0;
  return curve;
}

}  // namespace

VolumeCurve parallel_volume(const Attractor& attractor, const Domain& domain, std::vector<double> eps,
                            const VolumeMethod& method, double dist_tol) {
  check_eps(eps);
  if (domain.dim() != attractor.dim()) throw ValidationError("domain dimension does not match the attractor");
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  double tol = dist_tol > 0.0 ? dist_tol : eps.front() / 1000.0;
  if (method.kind == VolumeMethod::Kind::Grid && dist_tol <= 0.0) tol = std::min(tol, method.h / 8.0);
  if (tol > eps.front() / 10.0 * (1.0 + 1e-12))
    throw ValidationError("distance tolerance must not exceed min(ε)/10");
  BoundingBox window = coarse_attractor_box(attractor).inflated(eps.back());
  if (auto b = domain.bounds()) window = box_intersection(window, *b);
  VolumeCurve curve;
  if (window.empty()) {
    curve.values.assign(eps.size(), 0.0);
    curve.std_errors.assign(eps.size(), 0.0);
    curve.error_bounds.assign(eps.size(), 0.0);
  } else if (method.kind == VolumeMethod::Kind::Grid) {
    curve = grid_volume(attractor, domain, eps, window, method, tol);
  } else {
    curve = qmc_volume(attractor, domain, eps, window, method, tol);
  }
  curve.epsilons = eps;
  curve.method = method.tag();
  curve.domain = domain.label();
  if (method.kind == VolumeMethod::Kind::Grid) curve.resolution = method.h;
  else curve.seed = method.seed;
  return curve;
}

namespace {

ResidualEstimate summarize(const std::vector<std::vector<double>>& terms_by_rep,
                           const std::function<double(const std::vector<double>&)>& signed_residual,
                           std::vector<std::string> labels) {
  const std::size_t K = terms_by_rep.size();
  const std::size_t T = terms_by_rep.front().size();
  ResidualEstimate est;
  est.labels = std::move(labels);
  est.terms.assign(T, 0.0);
  std::vector<double> res;
  for (const auto& t : terms_by_rep) {
    for (std::size_t k = 0; k < T; ++k) est.terms[k] += t[k] / static_cast<double>(K);
    res.push_back(signed_residual(t));
  }
  double mean = std::accumulate(res.begin(), res.end(), 0.0) / static_cast<double>(K);
  double ss = 0.0;
  for (double r : res) ss += (r - mean) * (r - mean);
  est.residual = std::abs(mean);
  est.std_error = std::sqrt(ss / static_cast<double>(K - 1) / static_cast<double>(K));
  return est;
}

}  // namespace

ResidualEstimate decomposition_residual(const Attractor& attractor, const Region& open_set, double eps,
                                        std::size_t n, std::uint64_t seed, int replicates) {
  if (!(eps > 0.0)) throw ValidationError("ε must be positive");
  const auto& ifs = attractor.ifs();
  const int N = ifs.size();
  const int K = std::max(2, replicates);
  const std::size_t per = std::max<std::size_t>(1, n / static_cast<std::size_t>(K));
  const BoundingBox window = coarse_attractor_box(attractor).inflated(eps);
  std::vector<Region> images;
  for (const auto& m : ifs.maps()) images.push_back(open_set.image(m));
  const GammaRegion gr(ifs, open_set);
  const double tol = eps / 1000.0;
  // counts: [0] total, [1..N] S_iO, [N+1] Γ, [N+2] outside O
  std::vector<std::vector<double>> terms(static_cast<std::size_t>(K));
  parallel_chunks(static_cast<std::size_t>(K), [&](std::size_t r) {
    QmcSequence seq(attractor.dim(), replicate_seed(seed, static_cast<int>(r)));
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(N + 3), 0);
    for (std::size_t i = 0; i < per; ++i) {
      Vec x = seq.point_in(i, window);
      DistanceBracket br = attractor.bracket(x, tol, eps + tol);
      if (br.lower > eps || 0.5 * (br.lower + br.upper) > eps) continue;
      ++cnt[0];
      for (int k = 0; k < N; ++k)
        if (images[static_cast<std::size_t>(k)].contains(x)) ++cnt[static_cast<std::size_t>(k + 1)];
      if (gr.contains(x)) ++cnt[static_cast<std::size_t>(N + 1)];
      if (!open_set.contains(x)) ++cnt[static_cast<std::size_t>(N + 2)];
    }
    auto& t = terms[r];
    for (auto c : cnt) t.push_back(window.volume() * static_cast<double>(c) / static_cast<double>(per));
  });
  std::vector<std::string> labels{"total"};
  for (int k = 0; k < N; ++k) labels.push_back("S_" + std::to_string(k) + "O");
  labels.push_back("gamma");
  labels.push_back("outside");
  return summarize(
      terms,
      [](const std::vector<double>& t) {
        double s = 0.0;
        for (std::size_t k = 1; k < t.size(); ++k) s += t[k];
        return t[0] - s;
      },
      labels);
}

ResidualEstimate scaling_residual(const Attractor& attractor, const Region& open_set, int i, double eps,
                                  std::size_t n, std::uint64_t seed, int replicates) {
  if (!(eps > 0.0)) throw ValidationError("ε must be positive");
  const auto& ifs = attractor.ifs();
  if (i < 0 || i >= ifs.size()) throw ValidationError("map index out of range");
  const auto& s = ifs.map(i);
  const int K = std::max(2, replicates);
  const std::size_t per = std::max<std::size_t>(1, n / static_cast<std::size_t>(K));
  const BoundingBox window = open_set.bounds();
  const double scale = std::pow(s.ratio(), attractor.dim()) * window.volume();
  const double big = eps / s.ratio();
  const double tol = eps / 1000.0;
  std::vector<std::vector<double>> terms(static_cast<std::size_t>(K));
  parallel_chunks(static_cast<std::size_t>(K), [&](std::size_t r) {
    QmcSequence seq(attractor.dim(), replicate_seed(seed, static_cast<int>(r)));
    std::int64_t a = 0, b = 0;
    for (std::size_t k = 0; k < per; ++k) {
      Vec y = seq.point_in(k, window);
      if (!open_set.contains(y)) continue;
      DistanceBracket bx = attractor.bracket(s.apply(y), tol, eps + tol);
      if (bx.lower <= eps && 0.5 * (bx.lower + bx.upper) <= eps) ++a;
      DistanceBracket by = attractor.bracket(y, tol / s.ratio(), big + tol / s.ratio());
      if (by.lower <= big && 0.5 * (by.lower + by.upper) <= big) ++b;
    }
    terms[r] = {scale * static_cast<double>(a) / static_cast<double>(per),
                scale * static_cast<double>(b) / static_cast<double>(per)};
  });
  return summarize(
      terms, [](const std::vector<double>& t) { return t[0] - t[1]; }, {"F_eps_in_SiO", "scaled_F_eps_over_ri_in_O"});
}

}  // namespace minklab
