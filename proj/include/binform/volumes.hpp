#pragma once

// Volumes of hyperbolic regions: the polynomials P_q behind I_q(T),
// Monte-Carlo volumes with deterministic sample streams, the product-of-
// local-volume constants, and checks on the regions D*_psi(X; v).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "binform/hyperbola.hpp"

namespace binform {

// ---------------------------------------------------------------------------
// P_q and I_q.

// A polynomial in L = log T with rational coefficients; coeffs[k] multiplies L^k.
struct PolyLog {
  std::vector<Rational> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  // P_q(L) = sum_{j=1}^q (-1)^{q-j} L^{j-1} / (j-1)!.
  static PolyLog P(int q) {
    if (q < 1) throw Error(ErrorCode::DomainError, "q must be at least 1");
    PolyLog p;
    Rational fact = 1;
    for (int k = 0; k < q; ++k) {
      if (k > 0) fact *= k;
      Rational c = 1 / fact;
      if ((q - 1 - k) % 2) c = -c;
      p.coeffs.push_back(c);
    }
    return p;
  }

  // The antiderivative vanishing at 0 plus (-1)^q, where q = degree() + 1:
  // the polynomial for q + 1 obtained by integrating I_q(T / x) over [1, T].
  PolyLog next() const {
    const int q = degree() + 1;
    PolyLog r;
    r.coeffs.push_back(q % 2 ? Rational(-1) : Rational(1));
    for (int k = 0; k <= degree(); ++k) r.coeffs.push_back(coeffs[k] / (k + 1));
    return r;
  }

  double operator()(double L) const {
    double acc = 0;
    for (int k = degree(); k >= 0; --k) acc = acc * L + coeffs[k].get_d();
    return acc;
  }

  friend bool operator==(const PolyLog& a, const PolyLog& b) { return a.coeffs == b.coeffs; }
};

// Volume of {x in [1, inf)^q : x_1 ... x_q < T}; zero for T <= 1.
inline double I_q(int q, double T) {
  if (q < 1) throw Error(ErrorCode::DomainError, "q must be at least 1");
  if (!(T > 1)) return 0;
  return T * PolyLog::P(q)(std::log(T)) + (q % 2 ? -1.0 : 1.0);
}

namespace detail {

template <class Fn>
double adaptive_simpson(Fn&& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15 * tol) return left + right + diff / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class Fn>
double integrate(Fn&& f, double a, double b, double tol) {
  if (b <= a) return 0;
  const double fa = f(a), fm = f((a + b) / 2), fb = f(b);
  return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 40);
}

}  // namespace detail

// I_q(T) by nested adaptive quadrature.  In logarithmic coordinates the
// first q - 1 variables range over {u >= 0, sum u <= log T} with Jacobian
// exp(u), and the last one contributes T exp(-sum u) - 1.
inline double I_q_quadrature(int q, double T, double tol = 1e-10) {
  if (q < 1) throw Error(ErrorCode::DomainError, "q must be at least 1");
  if (!(T > 1)) return 0;
  const double L = std::log(T);
  const double abs_tol = tol * std::max(1.0, I_q(q, T));
  std::function<double(int, double)> level = [&](int k, double S) -> double {
    if (k == 0) return T * std::exp(-S) - 1;
    return detail::integrate([&](double u) { return std::exp(u) * level(k - 1, S + u); }, 0, L - S,
                             abs_tol / std::pow(4.0, q - k));
  };
  return level(q - 1, 0);
}

// ---------------------------------------------------------------------------
// Monte Carlo.

struct McEstimate {
  double estimate = 0;
  double stderr_ = 0;
  double box_volume = 0;
  i64 hits = 0;
  i64 samples = 0;
};

namespace detail {

inline constexpr i64 kMcBatch = 1 << 16;

inline void check_box(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.empty() || lo.size() != hi.size()) throw Error(ErrorCode::DegenerateBox, "empty sampling box");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(hi[i] > lo[i]))
      throw Error(ErrorCode::DegenerateBox, "sampling box side " + std::to_string(i) + " is degenerate");
}

inline double box_volume(const std::vector<double>& lo, const std::vector<double>& hi) {
  double v = 1;
  for (size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

// Hit counts of each region on one sample stream.  Batch b draws from its own
// generator, so the counts do not depend on the number of threads.
inline std::vector<i64> shared_hits(const std::vector<const Region*>& regions, const std::vector<double>& lo,
                                    const std::vector<double>& hi, i64 N, std::uint64_t seed, int jobs) {
  const i64 batches = (N + kMcBatch - 1) / kMcBatch;
  const size_t dim = lo.size();
  std::vector<std::vector<i64>> per(batches, std::vector<i64>(regions.size(), 0));
  auto run = [&](i64 b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    std::vector<double> x(dim);
    const i64 n = std::min(kMcBatch, N - b * kMcBatch);
    for (i64 k = 0; k < n; ++k) {
      for (size_t j = 0; j < dim; ++j) x[j] = lo[j] + (hi[j] - lo[j]) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
      for (size_t r = 0; r < regions.size(); ++r) per[b][r] += regions[r]->contains(x);
    }
  };
  if (jobs <= 1) {
    for (i64 b = 0; b < batches; ++b) run(b);
  } else {
    std::atomic<i64> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (i64 b; (b = next++) < batches;) run(b);
      });
    for (auto& th : pool) th.join();
  }
  std::vector<i64> total(regions.size(), 0);
  for (const auto& row : per)
    for (size_t r = 0; r < row.size(); ++r) total[r] += row[r];
  return total;
}

inline McEstimate make_estimate(i64 hits, i64 N, double box) {
  McEstimate e;
  e.hits = hits;
  e.samples = N;
  e.box_volume = box;
  const double p = static_cast<double>(hits) / static_cast<double>(N);
  e.estimate = box * p;
  e.stderr_ = box * std::sqrt(p * (1 - p) / static_cast<double>(N));
  return e;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultMcSeed = 3405691582ULL;
inline constexpr i64 kDefaultMcSamples = 1000000;

// Uniform sampling in the bounding box of the region.
inline McEstimate mc_volume(const Region& region, i64 N = kDefaultMcSamples, std::uint64_t seed = kDefaultMcSeed,
                            int jobs = 1) {
  if (N < 1000) throw Error(ErrorCode::DomainError, "need at least 1000 samples");
  detail::check_box(region.lo, region.hi);
  auto hits = detail::shared_hits({&region}, region.lo, region.hi, N, seed, jobs);
  return detail::make_estimate(hits[0], N, detail::box_volume(region.lo, region.hi));
}

// Volumes of several regions from one sample stream over the union of their
// boxes, so that nested regions give nested hit sets.
inline std::vector<McEstimate> mc_volumes_shared(const std::vector<Region>& regions, i64 N = kDefaultMcSamples,
                                                 std::uint64_t seed = kDefaultMcSeed, int jobs = 1) {
  if (N < 1000) throw Error(ErrorCode::DomainError, "need at least 1000 samples");
  if (regions.empty()) return {};
  std::vector<double> lo = regions[0].lo, hi = regions[0].hi;
  std::vector<const Region*> ptrs;
  for (const auto& r : regions) {
    detail::check_box(r.lo, r.hi);
    if (r.lo.size() != lo.size()) throw Error(ErrorCode::DegenerateBox, "regions of different dimensions");
    for (size_t i = 0; i < lo.size(); ++i) {
      lo[i] = std::min(lo[i], r.lo[i]);
      hi[i] = std::max(hi[i], r.hi[i]);
    }
    ptrs.push_back(&r);
  }
  auto hits = detail::shared_hits(ptrs, lo, hi, N, seed, jobs);
  const double box = detail::box_volume(lo, hi);
  std::vector<McEstimate> out;
  for (i64 h : hits) out.push_back(detail::make_estimate(h, N, box));
  return out;
}

// ---------------------------------------------------------------------------
// Regions D*_s, D*_i and D*_{Omega', Omega''}.

struct TechnicalRegion {
  std::string name;
  Region region;
  double constant = 0;  // product of the local unit-sublevel volumes
  int q = 1;            // number of archimedean places
  double T = 1;         // argument of I_q
  double reference() const { return constant * I_q(q, T); }
};

namespace detail {

// vol {s in K_w : |s| <= 1}.
inline double unit_volume_s(const Place& pl) { return pl.real ? 2.0 : std::numbers::pi; }

inline std::complex<double> eval_form(const std::vector<std::complex<double>>& c, std::complex<double> s,
                                      std::complex<double> t) {
  std::complex<double> acc = 0, tp = 1;
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> tpow(d + 1);
  for (int j = 0; j <= d; ++j) {
    tpow[j] = tp;
    tp *= t;
  }
  for (int j = 0; j <= d; ++j) acc = acc * s + c[j] * tpow[j];
  return acc;
}

inline std::vector<std::complex<double>> embed_form(const NumberField& K, const BinaryForm& F, int place) {
  std::vector<std::complex<double>> c;
  for (const auto& a : F.coeffs) c.push_back(K.embed(a, place));
  return c;
}

inline void check_Z(double Z) {
  if (!(Z >= 1) || !std::isfinite(Z)) throw Error(ErrorCode::DomainError, "Z must be a finite number >= 1");
}

}  // namespace detail

// {s in K_inf : |s_w| >= 1 for all w, N(s) < Z}; coordinates follow the
// places, one per real place and (Re, Im) per complex place.
inline TechnicalRegion dstar_s(const NumberField& K, double Z) {
  detail::check_Z(Z);
  TechnicalRegion tr;
  tr.name = "D*_s";
  tr.q = K.num_places();
  tr.T = Z;
  tr.constant = 1;
  const int m = K.degree();
  tr.region.lo.assign(m, 0);
  tr.region.hi.assign(m, 0);
  std::vector<int> offs, lds;
  for (int p = 0; p < K.num_places(); ++p) {
    const auto& pl = K.places()[p];
    tr.constant *= detail::unit_volume_s(pl);
    const double R = std::pow(Z, 1.0 / pl.local_degree()) * (1 + kBoundaryGuard);
    for (int j = 0; j < pl.local_degree(); ++j) {
      tr.region.lo[K.place_offset(p) + j] = -R;
      tr.region.hi[K.place_offset(p) + j] = R;
    }
    offs.push_back(K.place_offset(p));
    lds.push_back(pl.local_degree());
  }
  tr.region.contains = [offs, lds, Z](std::span<const double> x) {
    double norm = 1;
    for (size_t p = 0; p < offs.size(); ++p) {
      double a2 = 0;
      for (int j = 0; j < lds[p]; ++j) a2 += x[offs[p] + j] * x[offs[p] + j];
      if (a2 < 1) return false;
      norm *= lds[p] == 1 ? std::sqrt(a2) : a2;
    }
    return norm < Z;
  };
  return tr;
}

struct LocalFormVolume {
  double volume = 0;         // vol {(s, t) in R^2 : |F(s, t)| <= 1}
  double min_on_circle = 0;  // min |F| on the unit circle, from a dense grid
};

// Area of {|F| <= 1} for a real binary form without real roots, as
// int_0^pi |F(cos a, sin a)|^{-2/d} da (trapezoid rule on a periodic integrand).
inline LocalFormVolume real_form_volume(const std::vector<double>& coeffs) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  auto F = [&](double a) {
    const double c = std::cos(a), s = std::sin(a);
    double acc = 0, sp = 1;
    std::vector<double> spow(d + 1);
    for (int j = 0; j <= d; ++j) {
      spow[j] = sp;
      sp *= s;
    }
    for (int j = 0; j <= d; ++j) acc = acc * c + coeffs[j] * spow[j];
    return acc;
  };
  const int n = 1 << 16;
  LocalFormVolume r;
  r.min_on_circle = INFINITY;
  double first_sign = 0;
  for (int k = 0; k < n; ++k) {
    const double v = F(std::numbers::pi * k / n);
    if (k == 0) first_sign = v;
    if (v * first_sign <= 0 || std::fabs(v) < 1e-12)
      throw Error(d <= 2 ? ErrorCode::InfiniteLocalVolume : ErrorCode::Unsupported,
                  d <= 2 ? "the form has a real root, so its unit sublevel set has infinite area"
                         : "the form has a real root, so the region has cusps to infinity and no sampling box");
    r.min_on_circle = std::min(r.min_on_circle, std::fabs(v));
    r.volume += std::pow(std::fabs(v), -2.0 / d);
  }
  r.volume *= std::numbers::pi / n;
  return r;
}

// {(s, t) in K_inf^2 : |F(s_w, t_w)| >= 1 for all w, N(F(s, t)) < Z}.
// Supported when every place is real and F has no real root there.
inline TechnicalRegion dstar_i(const NumberField& K, const BinaryForm& F, double Z) {
  detail::check_Z(Z);
  const int d = F.degree();
  if (d < 1) throw Error(ErrorCode::DomainError, "F must be non-constant");
  if (d == 1) throw Error(ErrorCode::InfiniteLocalVolume, "linear forms have unit sublevel sets of infinite area");
  const int m = K.degree();
  TechnicalRegion tr;
  tr.name = "D*_i";
  tr.q = K.num_places();
  tr.T = std::pow(Z, 2.0 / d);
  tr.constant = 1;
  tr.region.lo.assign(2 * m, 0);
  tr.region.hi.assign(2 * m, 0);
  std::vector<std::vector<double>> forms;
  for (int p = 0; p < K.num_places(); ++p) {
    if (!K.places()[p].real) {
      if (d <= 2) throw Error(ErrorCode::InfiniteLocalVolume, "forms of degree <= 2 factor at a complex place");
      throw Error(ErrorCode::Unsupported, "local volumes at complex places are not implemented");
    }
    std::vector<double> c;
    for (const auto& z : detail::embed_form(K, F, p)) c.push_back(z.real());
    auto lv = real_form_volume(c);
    tr.constant *= lv.volume;
    // |F| >= min r^d on the circle of radius r, and |F| < Z at each place.
    const double R = std::pow(Z / (lv.min_on_circle * 0.97), 1.0 / d);
    const int off = K.place_offset(p);
    tr.region.lo[off] = tr.region.lo[m + off] = -R;
    tr.region.hi[off] = tr.region.hi[m + off] = R;
    forms.push_back(std::move(c));
  }
  tr.region.contains = [forms, m, d, Z](std::span<const double> x) {
    double norm = 1;
    for (size_t p = 0; p < forms.size(); ++p) {
      const double s = x[p], t = x[m + p];
      double acc = 0, tp = 1;
      std::vector<double> tpow(d + 1);
      for (int j = 0; j <= d; ++j) {
        tpow[j] = tp;
        tp *= t;
      }
      for (int j = 0; j <= d; ++j) acc = acc * s + forms[p][j] * tpow[j];
      const double a = std::fabs(acc);
      if (a < 1) return false;
      norm *= a;
    }
    return norm < Z;
  };
  return tr;
}

// Real places in omega_prime carry (s_w, t_w) with s^2 + t^2 >= 1, the other
// places carry s_w with |s_w| >= 1; the product of (s^2 + t^2) and
// |s_w|^{m_w} is below Z.  Coordinates: place by place, pairs first.
inline TechnicalRegion dstar_mixed(const NumberField& K, const std::vector<bool>& omega_prime, double Z) {
  detail::check_Z(Z);
  if (static_cast<int>(omega_prime.size()) != K.num_places())
    throw Error(ErrorCode::DomainError, "need one flag per archimedean place");
  TechnicalRegion tr;
  tr.name = "D*_mixed";
  tr.q = K.num_places();
  tr.T = Z;
  tr.constant = 1;
  struct Slot {
    int offset, width;
    bool pair;
  };
  std::vector<Slot> slots;
  int off = 0;
  for (int p = 0; p < K.num_places(); ++p) {
    const auto& pl = K.places()[p];
    if (omega_prime[p]) {
      if (!pl.real) throw Error(ErrorCode::InfiniteLocalVolume, "s^2 + t^2 has infinite unit sublevel volume at a complex place");
      tr.constant *= std::numbers::pi;
      slots.push_back({off, 2, true});
      const double R = std::sqrt(Z) * (1 + kBoundaryGuard);
      for (int j = 0; j < 2; ++j) {
        tr.region.lo.push_back(-R);
        tr.region.hi.push_back(R);
      }
      off += 2;
    } else {
      tr.constant *= detail::unit_volume_s(pl);
      slots.push_back({off, pl.local_degree(), false});
      const double R = std::pow(Z, 1.0 / pl.local_degree()) * (1 + kBoundaryGuard);
      for (int j = 0; j < pl.local_degree(); ++j) {
        tr.region.lo.push_back(-R);
        tr.region.hi.push_back(R);
      }
      off += pl.local_degree();
    }
  }
  tr.region.contains = [slots, Z](std::span<const double> x) {
    double norm = 1;
    for (const auto& sl : slots) {
      double a2 = 0;
      for (int j = 0; j < sl.width; ++j) a2 += x[sl.offset + j] * x[sl.offset + j];
      if (a2 < 1) return false;
      // s^2 + t^2 at a pair slot, |s|^{m_w} otherwise.
      norm *= sl.pair ? a2 : (sl.width == 1 ? std::sqrt(a2) : a2);
    }
    return norm < Z;
  };
  return tr;
}

struct TechnicalVolumeReport {
  std::string name;
  McEstimate mc;
  double reference = 0;
  double sigmas = 0;
  bool ok() const { return sigmas <= 4; }
};

inline TechnicalVolumeReport technical_volume_check(const TechnicalRegion& tr, i64 N = kDefaultMcSamples,
                                                    std::uint64_t seed = kDefaultMcSeed, int jobs = 1) {
  TechnicalVolumeReport r;
  r.name = tr.name;
  r.mc = mc_volume(tr.region, N, seed, jobs);
  r.reference = tr.reference();
  const double diff = std::fabs(r.mc.estimate - r.reference);
  r.sigmas = r.mc.stderr_ > 0 ? diff / r.mc.stderr_ : (diff <= 1e-9 * std::max(1.0, r.reference) ? 0 : INFINITY);
  return r;
}

// ---------------------------------------------------------------------------
// D*_psi(X; v): D_psi(X; v) with small conjugates of s, t, the F_i and the
// linear factors of quadratic F_i that split at a place removed.

namespace detail {

inline std::vector<std::vector<std::vector<std::complex<double>>>> excluded_forms(const HyperbolaContext& ctx) {
  const auto& K = ctx.system().field();
  std::vector<std::vector<std::vector<std::complex<double>>>> out(K.num_places());
  for (int p = 0; p < K.num_places(); ++p) {
    auto& H = out[p];
    H.push_back({1.0, 0.0});  // s
    H.push_back({0.0, 1.0});  // t
    for (int i = 0; i < ctx.size(); ++i) {
      auto c = embed_form(K, ctx.system().pair(i).F, p);
      H.push_back(c);
      if (c.size() != 3) continue;
      const std::complex<double> a = c[0], b = c[1], cc = c[2];
      const std::complex<double> disc = b * b - 4.0 * a * cc;
      if (K.places()[p].real && disc.real() <= 0) continue;
      const std::complex<double> root = std::sqrt(disc);
      const std::complex<double> r1 = (-b + root) / (2.0 * a), r2 = (-b - root) / (2.0 * a);
      H.push_back({a, -a * r1});
      H.push_back({1.0, -r2});
    }
  }
  return out;
}

}  // namespace detail

inline Region omega_star_region(const HyperbolaContext& ctx, const PsiVector& psi, const std::vector<double>& v) {
  Region R = omega_region(ctx, psi, v);
  const auto& K = ctx.system().field();
  const int m = K.degree();
  auto H = detail::excluded_forms(ctx);
  std::vector<int> offs;
  std::vector<bool> real;
  for (int p = 0; p < K.num_places(); ++p) {
    offs.push_back(K.place_offset(p));
    real.push_back(K.places()[p].real);
  }
  auto base = R.contains;
  R.contains = [base, H, offs, real, m](std::span<const double> x) {
    for (size_t p = 0; p < offs.size(); ++p) {
      std::complex<double> s, t;
      if (real[p]) {
        s = {x[offs[p]], 0};
        t = {x[m + offs[p]], 0};
      } else {
        s = {x[offs[p]], x[offs[p] + 1]};
        t = {x[m + offs[p]], x[m + offs[p] + 1]};
      }
      for (const auto& h : H[p])
        if (std::abs(detail::eval_form(h, s, t)) < 1 - kBoundaryGuard) return false;
    }
    return base(x);
  };
  return R;
}

// vol D: the product of the ball volumes in K_w^2.
inline double domain_volume(const Triplet& T) {
  const auto& K = T.field();
  double vol = 1;
  for (int p = 0; p < K.num_places(); ++p) {
    const auto& b = T.balls()[p];
    const double r = b.radius;
    if (K.places()[p].real)
      vol *= b.norm == BallNorm::Max ? 4 * r * r : std::numbers::pi * r * r;
    else
      vol *= b.norm == BallNorm::Max ? std::pow(std::numbers::pi * r * r, 2)
                                     : std::numbers::pi * std::numbers::pi * std::pow(r, 4) / 2;
  }
  return vol;
}

struct MonotonicityReport {
  int index = 0;
  std::vector<double> grid;
  std::vector<McEstimate> estimates;
  bool monotone = true;           // hit counts non-increasing along the grid
  std::vector<double> deltas;     // omega(v + e_i) - omega(v) between grid neighbours
  std::vector<double> envelopes;  // X^{3/2} for linear F_i, X v^{2/d - 1} otherwise
};

// omega*_psi(X; v) along v_i over the grid, other coordinates as in base.
inline MonotonicityReport omega_monotonicity_check(const HyperbolaContext& ctx, const PsiVector& psi, int i,
                                                   const std::vector<double>& grid, std::vector<double> base = {},
                                                   i64 N = kDefaultMcSamples, std::uint64_t seed = kDefaultMcSeed,
                                                   int jobs = 1) {
  if (i < 0 || i >= ctx.size()) throw Error(ErrorCode::DomainError, "index out of range");
  if (base.empty()) base.assign(ctx.size(), 1.0);
  std::vector<Region> regions;
  for (double g : grid) {
    auto v = base;
    v[i] = g;
    regions.push_back(omega_star_region(ctx, psi, v));
  }
  MonotonicityReport r;
  r.index = i;
  r.grid = grid;
  r.estimates = mc_volumes_shared(regions, N, seed, jobs);
  const int d = ctx.system().pair(i).F.degree();
  for (size_t k = 1; k < grid.size(); ++k) {
    if (r.estimates[k].hits > r.estimates[k - 1].hits) r.monotone = false;
    r.deltas.push_back(r.estimates[k].estimate - r.estimates[k - 1].estimate);
    const double vi = std::max(grid[k - 1], 1.0);
    r.envelopes.push_back(d == 1 ? std::pow(ctx.X(), 1.5) : ctx.X() * std::pow(vi, 2.0 / d - 1));
  }
  return r;
}

struct OmegaTotalRow {
  double X = 0;
  McEstimate mc;
  double main = 0;   // X^2 vol D
  double ratio = 0;  // mc / main
  double scaled_gap = 0;  // |mc - main| / X^{2 - 1/(2m)}
};

struct OmegaTotalReport {
  std::vector<OmegaTotalRow> rows;
  double C = 0;  // largest scaled gap over all rows but the last
  bool last_within = true;  // last gap <= C X^{2 - 1/(2m)} + 4 sigma
};

// omega*_psi(X; (1, ..., 1)) against X^2 vol D over a range of X.
inline OmegaTotalReport omega_total_check(const HyperbolaContext& ctx, const PsiVector& psi, const std::vector<double>& Xs,
                                          i64 N = kDefaultMcSamples, std::uint64_t seed = kDefaultMcSeed, int jobs = 1) {
  OmegaTotalReport rep;
  const int m = ctx.system().field().degree();
  const double vol = domain_volume(ctx.triplet());
  const std::vector<double> ones(ctx.size(), 1.0);
  for (double X : Xs) {
    auto c = ctx.scaled_to(X);
    OmegaTotalRow row;
    row.X = X;
    row.mc = mc_volume(omega_star_region(c, psi, ones), N, seed, jobs);
    row.main = X * X * vol;
    row.ratio = row.mc.estimate / row.main;
    row.scaled_gap = std::fabs(row.mc.estimate - row.main) / std::pow(X, 2 - 1.0 / (2 * m));
    rep.rows.push_back(row);
  }
  for (size_t k = 0; k + 1 < rep.rows.size(); ++k) rep.C = std::max(rep.C, rep.rows[k].scaled_gap);
  if (rep.rows.size() >= 2) {
    const auto& last = rep.rows.back();
    rep.last_within =
        std::fabs(last.mc.estimate - last.main) <= rep.C * std::pow(last.X, 2 - 1.0 / (2 * m)) + 4 * last.mc.stderr_;
  }
  return rep;
}

}  // namespace binform
