#pragma once

// Limits of sampled statistics along deterministic n-grids.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "serieslab/numeric/ext_scalar.hpp"

namespace serieslab::limits {

using numeric::ExtScalar;
using numeric::Real;

struct GridSchedule {
  enum class Kind { Geometric, TowerGeometric };
  Kind kind = Kind::Geometric;
  // Geometric: n_j = round(n_start * ratio^j)
  long double n_start = 1000;
  long double ratio = 10;
  // TowerGeometric: n_j = exp^level(r_start + j * r_step)
  unsigned level = 2;
  long double r_start = 2;
  long double r_step = 1;
  int count = 12;

  static GridSchedule geometric(long double start, long double ratio, int count) {
    GridSchedule g;
    g.kind = Kind::Geometric;
    g.n_start = start;
    g.ratio = ratio;
    g.count = count;
    return g;
  }

  static GridSchedule tower(unsigned level, long double r_start, long double r_step, int count) {
    GridSchedule g;
    g.kind = Kind::TowerGeometric;
    g.level = level;
    g.r_start = r_start;
    g.r_step = r_step;
    g.count = count;
    return g;
  }

  /// "geometric:start,ratio,count" or "tower:level,r0,step,count".
  static GridSchedule parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("grid must look like geometric:... or tower:...");
    const std::string kind = text.substr(0, colon);
    std::vector<long double> v;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stold(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidArgument("bad grid field '" + item + "'");
      }
    }
    GridSchedule g;
    if (kind == "geometric" && v.size() == 3) {
      g = geometric(v[0], v[1], static_cast<int>(v[2]));
    } else if (kind == "tower" && v.size() == 4) {
      g = tower(static_cast<unsigned>(v[0]), v[1], v[2], static_cast<int>(v[3]));
    } else {
      throw InvalidArgument("grid '" + text + "' has the wrong number of fields");
    }
    g.validate();
    return g;
  }

  std::string to_string() const {
    auto num = [](long double x) {
      std::ostringstream o;
      o.precision(12);
      o << static_cast<double>(x);
      return o.str();
    };
    if (kind == Kind::Geometric)
      return "geometric:" + num(n_start) + "," + num(ratio) + "," + std::to_string(count);
    return "tower:" + std::to_string(level) + "," + num(r_start) + "," + num(r_step) + "," + std::to_string(count);
  }

  void validate() const {
    if (count < 1) throw InvalidArgument("grid count must be positive");
    if (kind == Kind::Geometric && (!(n_start >= 1) || !(ratio > 1)))
      throw InvalidArgument("geometric grid needs start >= 1 and ratio > 1");
    if (kind == Kind::TowerGeometric && (level < 1 || !(r_step > 0)))
      throw InvalidArgument("tower grid needs level >= 1 and a positive step");
  }
};

/// The grid points, strictly increasing. Geometric points are rounded to
/// integers; tower points are exact towers.
inline std::vector<ExtScalar> make_grid(const GridSchedule& g, const numeric::Precision& p = {}) {
  g.validate();
  const auto bits = static_cast<mpfr_prec_t>(p.significand_bits);
  std::vector<ExtScalar> out;
  if (g.kind == GridSchedule::Kind::Geometric) {
    const Real start(g.n_start, bits), ratio(g.ratio, bits);
    for (int j = 0; j < g.count; ++j) {
      Real x = start * pow(ratio, Real(static_cast<long>(j), bits));
      Real r = floor(x + Real(0.5L, bits));
      out.push_back(ExtScalar::from_real(r, p.max_tower_level));
    }
  } else {
    for (int j = 0; j < g.count; ++j) {
      const Real r = Real(g.r_start, bits) + Real(static_cast<long>(j), bits) * Real(g.r_step, bits);
      out.push_back(ExtScalar::tower(g.level, r, p.max_tower_level));
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (compare(out[i], out[i - 1]) <= 0) throw InvalidArgument("grid is not strictly increasing");
  return out;
}

struct Sample {
  ExtScalar n;
  ExtScalar value;
};

enum class Status { Converged, DivergedPos, DivergedNeg, NotConverged };
enum class Method { Plateau, Aitken, Richardson, Exact, None };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::DivergedPos: return "diverged(+inf)";
    case Status::DivergedNeg: return "diverged(-inf)";
    case Status::NotConverged: return "not-converged";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Plateau: return "plateau";
    case Method::Aitken: return "aitken";
    case Method::Richardson: return "richardson";
    case Method::Exact: return "exact";
    case Method::None: return "none";
  }
  return "?";
}

struct LimitEstimate {
  ExtScalar value;
  ExtScalar uncertainty;
  Status status = Status::NotConverged;
  std::size_t samples_used = 0;
  Method method = Method::None;
  std::string grid;  // schedule text, filled by callers that know it

  bool converged() const { return status == Status::Converged; }
  bool diverged() const { return status == Status::DivergedPos || status == Status::DivergedNeg; }

  static LimitEstimate exact(const ExtScalar& v) {
    LimitEstimate e;
    e.value = v;
    e.uncertainty = ExtScalar(0L);
    e.status = Status::Converged;
    e.method = Method::Exact;
    return e;
  }

  static LimitEstimate infinite(int sign) {
    LimitEstimate e;
    e.status = sign > 0 ? Status::DivergedPos : Status::DivergedNeg;
    e.method = Method::Exact;
    e.uncertainty = ExtScalar(0L);
    return e;
  }
};

struct EstimatorOptions {
  double tol_plateau = 1e-3;
  std::size_t window = 3;
  std::size_t min_samples = 8;
};

namespace detail {

inline Real spread(const std::vector<Real>& x, std::size_t w) {
  const auto first = x.end() - static_cast<long>(w);
  const auto [lo, hi] = std::minmax_element(first, x.end(),
                                            [](const Real& a, const Real& b) { return a < b; });
  return *hi - *lo;
}

inline Real max_dev(const std::vector<Real>& x, std::size_t w, const Real& v) {
  Real m(0L, v.precision());
  for (auto it = x.end() - static_cast<long>(w); it != x.end(); ++it) {
    const Real d = abs(*it - v);
    if (d > m) m = d;
  }
  return m;
}

inline Real scale_of(const Real& x) {
  const Real one(1L, x.precision());
  const Real a = abs(x);
  return a > one ? a : one;
}

// x_j - (dx)^2 / d2x over consecutive triples; nullopt where d2x == 0.
inline std::vector<std::optional<Real>> aitken(const std::vector<Real>& x) {
  std::vector<std::optional<Real>> out;
  for (std::size_t j = 2; j < x.size(); ++j) {
    const Real d1 = x[j] - x[j - 1];
    const Real d0 = x[j - 1] - x[j - 2];
    const Real d2 = d1 - d0;
    if (d2.is_zero()) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(x[j] - d1 * d1 / d2);
    }
  }
  return out;
}

// Value at h = 0 of the polynomial through (h_i, y_i) (Neville).
inline Real extrapolate_to_zero(const std::vector<Real>& h, std::vector<Real> y) {
  const std::size_t m = h.size();
  for (std::size_t k = 1; k < m; ++k)
    for (std::size_t i = 0; i + k < m; ++i) y[i] = (h[i + k] * y[i] - h[i] * y[i + 1]) / (h[i + k] - h[i]);
  return y[0];
}

}  // namespace detail

/// Limit of the samples. Plateau, then Aitken, then Richardson in
/// h = 1/ln_(d) n; the first stable answer wins.
inline LimitEstimate estimate_limit(const std::vector<Sample>& samples, const EstimatorOptions& opt = {}) {
  if (samples.size() < opt.min_samples)
    throw InvalidArgument("estimate_limit needs at least " + std::to_string(opt.min_samples) + " samples");
  const std::size_t N = samples.size();
  const std::size_t W = opt.window;
  LimitEstimate est;
  est.samples_used = N;

  // Tower-size statistic values are divergence outright.
  for (std::size_t i = N; i-- > 0;) {
    if (!samples[i].value.is_plain() && !samples[i].value.is_reciprocal()) {
      est.status = samples[i].value.sign() > 0 ? Status::DivergedPos : Status::DivergedNeg;
      est.value = samples[i].value;
      est.uncertainty = ExtScalar(0L);
      return est;
    }
  }
  const mpfr_prec_t bits = 256;
  std::vector<Real> x;
  for (const auto& s : samples) x.push_back(s.value.is_plain() ? s.value.to_real().with_precision(bits) : Real(0L, bits));
  const Real tol(static_cast<long double>(opt.tol_plateau), bits);

  // Divergence: geometric blow-up of the last three, or a monotone run with
  // growing steps that has at least doubled in size.
  {
    bool blow = true;
    for (std::size_t i = N - W; i < N; ++i) {
      const Real two(2L, bits);
      blow = blow && x[i].sign() == x[N - 1].sign() && !x[i - 1].is_zero() && x[i - 1].sign() == x[i].sign() &&
             abs(x[i]) >= two * abs(x[i - 1]) && abs(x[i]) > Real(1L, bits);
    }
    bool convex = true;
    const int dir = (x[N - 1] - x[N - 2]).sign();
    for (std::size_t i = 1; i < N && convex; ++i) convex = dir != 0 && (x[i] - x[i - 1]).sign() == dir;
    const std::size_t run = std::min<std::size_t>(N - 1, 6);
    for (std::size_t i = N - run + 1; i < N && convex; ++i)
      convex = abs(x[i] - x[i - 1]) >= abs(x[i - 1] - x[i - 2]);
    convex = convex && abs(x[N - 1]) > Real(2L, bits) * detail::scale_of(x[0]);
    if (blow || convex) {
      const int s = blow ? x[N - 1].sign() : dir;
      est.status = s > 0 ? Status::DivergedPos : Status::DivergedNeg;
      est.value = ExtScalar::from_real(x[N - 1]);
      est.uncertainty = ExtScalar(0L);
      return est;
    }
  }

  auto accept = [&](const std::vector<Real>& seq, Method m, const Real& value) {
    est.status = Status::Converged;
    est.method = m;
    est.value = ExtScalar::from_real(value);
    Real u = detail::max_dev(seq, W, value);
    const Real sp = detail::spread(seq, W);
    if (sp > u) u = sp;
    est.uncertainty = ExtScalar::from_real(u);
    return est;
  };

  // Plateau on the raw samples, cross-checked by one Aitken step.
  {
    const Real sp = detail::spread(x, W);
    const Real sc = detail::scale_of(x[N - 1]);
    if (sp <= tol * sc) {
      const auto a = detail::aitken(std::vector<Real>(x.end() - 3, x.end()));
      if (!a[0]) return accept(x, Method::Plateau, x[N - 1]);
      if (abs(*a[0] - x[N - 1]) <= tol * sc) return accept(x, Method::Plateau, *a[0]);
    }
  }

  // Acceleration is only trusted on a Cauchy tail: the late increments must
  // be clearly smaller than the early ones. A bare oscillation has none.
  {
    Real early(0L, bits), late(0L, bits);
    for (std::size_t i = 1; i <= W; ++i) {
      const Real d0 = abs(x[i] - x[i - 1]);
      const Real d1 = abs(x[N - i] - x[N - i - 1]);
      if (d0 > early) early = d0;
      if (d1 > late) late = d1;
    }
    if (!(late <= Real(0.5L, bits) * early)) {
      est.status = Status::NotConverged;
      est.value = ExtScalar::from_real(x.back());
      est.uncertainty = ExtScalar::from_real(detail::spread(x, W));
      return est;
    }
  }

  // Aitken sequence (holes where the second difference vanishes dropped).
  std::vector<Real> A;
  std::vector<std::size_t> A_idx;
  {
    const auto a = detail::aitken(x);
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j]) {
        A.push_back(*a[j]);
        A_idx.push_back(j + 2);
      }
    if (A.size() >= W + 2) {
      const Real sp = detail::spread(A, W);
      const Real sc = detail::scale_of(A.back());
      const auto aa = detail::aitken(std::vector<Real>(A.end() - 3, A.end()));
      if (sp <= tol * sc && (!aa[0] || abs(*aa[0] - A.back()) <= tol * sc)) return accept(A, Method::Aitken, A.back());
    }
  }

  // Richardson: polynomial extrapolation in h = 1/s over candidate scales
  // s = n, ln n, lnln n, ... and both the raw and the Aitken sequence.
  struct Candidate {
    Real spread;
    std::vector<Real> seq;
  };
  std::optional<Candidate> best;
  for (int depth = 0; depth <= 5; ++depth) {
    std::vector<Real> h;
    bool usable = true;
    for (const auto& s : samples) {
      ExtScalar v = s.n;
      try {
        v = numeric::iter_ln(static_cast<unsigned>(depth), s.n);
      } catch (const DomainError&) {
        usable = false;
        break;
      }
      if (v.sign() <= 0) {
        usable = false;
        break;
      }
      if (!v.is_plain()) {
        h.emplace_back(0L, bits);  // beyond plain range: h is 0 to working precision
      } else {
        h.push_back(Real(1L, bits) / v.to_real().with_precision(bits));
      }
    }
    if (!usable) continue;
    for (int source = 0; source < 2; ++source) {
      std::vector<Real> y, hh;
      if (source == 0) {
        y = x;
        hh = h;
      } else {
        y = A;
        for (std::size_t j : A_idx) hh.push_back(h[j]);
      }
      for (std::size_t deg = 1; deg <= 2; ++deg) {
        if (y.size() < deg + 1 + W) continue;
        std::vector<Real> R;
        bool ok = true;
        for (std::size_t i = 0; i + deg < y.size(); ++i) {
          std::vector<Real> hw(hh.begin() + static_cast<long>(i), hh.begin() + static_cast<long>(i + deg + 1));
          std::vector<Real> yw(y.begin() + static_cast<long>(i), y.begin() + static_cast<long>(i + deg + 1));
          for (std::size_t a = 1; a < hw.size(); ++a)
            if (hw[a] == hw[a - 1]) ok = false;
          if (!ok) break;
          R.push_back(detail::extrapolate_to_zero(hw, yw));
        }
        if (!ok || R.size() < W) continue;
        const Real sp = detail::spread(R, W);
        if (!best || sp < best->spread) best = Candidate{sp, R};
      }
    }
  }
  if (best && best->spread <= tol * detail::scale_of(best->seq.back()))
    return accept(best->seq, Method::Richardson, best->seq.back());

  est.status = Status::NotConverged;
  est.method = best ? Method::Richardson : Method::None;
  est.value = ExtScalar::from_real(best ? best->seq.back() : x.back());
  est.uncertainty = ExtScalar::from_real(best ? best->spread : detail::spread(x, W));
  return est;
}

/// Running sup and inf over sliding windows, each reduced to one sample at
/// the window's arg-extremum, then estimated as ordinary limits.
inline std::pair<LimitEstimate, LimitEstimate> estimate_limsup_liminf(const std::vector<Sample>& samples,
                                                                      const EstimatorOptions& opt = {}) {
  const std::size_t N = samples.size();
  if (N < opt.min_samples)
    throw InvalidArgument("estimate_limsup_liminf needs at least " + std::to_string(opt.min_samples) + " samples");
  const std::size_t width = std::clamp<std::size_t>(N / 4, 2, N > 7 ? N - 7 : 2);
  auto envelope = [&](bool upper) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i + width <= N; ++i) {
      std::size_t arg = i;
      for (std::size_t j = i + 1; j < i + width; ++j) {
        const int c = compare(samples[j].value, samples[arg].value);
        if (upper ? c > 0 : c < 0) arg = j;
      }
      if (out.empty() || compare(out.back().n, samples[arg].n) != 0) out.push_back(samples[arg]);
    }
    return out;
  };
  auto run = [&](const std::vector<Sample>& env) {
    if (env.size() < opt.min_samples) {
      LimitEstimate e;
      e.status = Status::NotConverged;
      e.value = env.back().value;
      e.uncertainty = ExtScalar(0L);
      e.samples_used = env.size();
      return e;
    }
    return estimate_limit(env, opt);
  };
  LimitEstimate sup = run(envelope(true));
  LimitEstimate inf = run(envelope(false));
  if (sup.converged() && inf.converged() && compare(sup.value, inf.value) < 0) {
    // Extrapolation can cross the two envelopes; they meet in the middle.
    const ExtScalar mid = (sup.value + inf.value) / ExtScalar(2L);
    const ExtScalar gap = abs(sup.value - inf.value);
    sup.value = inf.value = mid;
    sup.uncertainty = sup.uncertainty + gap;
    inf.uncertainty = inf.uncertainty + gap;
  }
  return {sup, inf};
}

}  // namespace serieslab::limits
