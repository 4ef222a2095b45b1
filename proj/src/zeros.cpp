#include "qpc/zeros.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "qpc/errors.hpp"
#include "qpc/parallel.hpp"
#include "qpc/spectra.hpp"

namespace qpc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxStep = std::numbers::pi / 4.0;

struct TrackFailure {};

double phase_step(const ScaledComplex& u, const ScaledComplex& v) {
  if (u.is_zero() || v.is_zero()) throw TrackFailure{};
  return std::arg(v.phase * std::conj(u.phase));
}

// Steps are also capped in log|f|, which forces refinement near zeros where
// a coarse step could alias a full turn of the phase.
bool tame(const ScaledComplex& u, const ScaledComplex& v, double dphi) {
  return std::abs(dphi) <= kMaxStep && std::abs(v.log_magnitude() - u.log_magnitude()) <= 1.0;
}

// Total change of arg h(t) for t in [t0, t1]. Steps are halved until each
// increment is at most pi/4 and agrees with the sum of its two halves.
double track_phase(const std::function<ScaledComplex(double)>& h, double t0, double t1, ScaledComplex v0,
                   ScaledComplex v1, int initial_segments) {
  struct Segment {
    double a, b;
    ScaledComplex va, vb;
    int depth;
  };
  std::vector<Segment> stack;
  std::vector<ScaledComplex> nodes(initial_segments + 1);
  nodes[0] = v0;
  nodes[initial_segments] = v1;
  for (int i = 1; i < initial_segments; ++i) nodes[i] = h(t0 + (t1 - t0) * i / initial_segments);
  for (int i = initial_segments; i-- > 0;) {
    const double a = t0 + (t1 - t0) * i / initial_segments;
    const double b = i + 1 == initial_segments ? t1 : t0 + (t1 - t0) * (i + 1) / initial_segments;
    stack.push_back({a, b, nodes[i], nodes[i + 1], 0});
  }
  double total = 0.0;
  while (!stack.empty()) {
    const Segment s = stack.back();
    stack.pop_back();
    const double whole = phase_step(s.va, s.vb);
    const double m = 0.5 * (s.a + s.b);
    const ScaledComplex vm = h(m);
    const double left = phase_step(s.va, vm), right = phase_step(vm, s.vb);
    const bool small = tame(s.va, s.vb, whole) && tame(s.va, vm, left) && tame(vm, s.vb, right);
    if (small && std::abs(left + right - whole) <= 1e-9) {
      total += left + right;
      continue;
    }
    if (s.depth >= 60 || !(m > s.a && m < s.b)) throw TrackFailure{};
    stack.push_back({m, s.b, vm, s.vb, s.depth + 1});
    stack.push_back({s.a, m, s.va, vm, s.depth + 1});
  }
  return total;
}

int snap_winding(double total) {
  const double turns = total / kTwoPi;
  const double n = std::round(turns);
  if (!(std::abs(turns - n) < 0.25) || n < 0.0) throw TrackFailure{};
  return static_cast<int>(n);
}

// Coordinates in which the quadtree lives: either z itself or w with z = e(w).
struct Plane {
  bool periodic = false;

  Complex to_z(Complex u) const {
    if (!periodic) return u;
    return unit_phase(u.real()) * std::exp(-kTwoPi * u.imag());
  }
  Complex from_z(Complex z) const {
    if (!periodic) return z;
    return {std::arg(z) / kTwoPi, -std::log(std::abs(z)) / kTwoPi};
  }
  /// |dz/du|.
  double z_scale(Complex u) const { return periodic ? kTwoPi * std::abs(to_z(u)) : 1.0; }
  /// Initial subdivision of an edge of length len.
  int segments(double len) const {
    return periodic ? static_cast<int>(std::clamp(std::ceil(256.0 * len), 8.0, 1024.0)) : 8;
  }
};

struct Box {
  double x0, x1, y0, y1;
  int count = 0;
  double size() const { return std::max(x1 - x0, y1 - y0); }
  Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

int box_winding(const Evaluator& f, const Plane& plane, const Box& b) {
  const std::array<Complex, 4> corner{Complex(b.x0, b.y0), Complex(b.x1, b.y0), Complex(b.x1, b.y1),
                                      Complex(b.x0, b.y1)};
  std::array<ScaledComplex, 4> val;
  for (int i = 0; i < 4; ++i) val[i] = f(plane.to_z(corner[i]));
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Complex a = corner[i], c = corner[(i + 1) % 4];
    const auto h = [&](double t) { return f(plane.to_z(a + t * (c - a))); };
    total += track_phase(h, 0.0, 1.0, val[i], val[(i + 1) % 4], plane.segments(std::abs(c - a)));
  }
  return snap_winding(total);
}

struct NewtonResult {
  Complex z{};
  double residual = INFINITY;
  bool ok = false;
};

double newton_residual(const Evaluator& f, Complex z, double h) {
  const ScaledComplex fz = f(z);
  if (fz.is_zero()) return 0.0;
  const ScaledComplex diff = f(z + h) - f(z - h);
  if (diff.is_zero()) return INFINITY;
  const Complex step = (fz / diff).value() * (2.0 * h);
  return std::abs(step) / std::abs(z);
}

NewtonResult newton(const Evaluator& f, Complex z, double h) {
  NewtonResult r;
  for (int it = 0; it < 80; ++it) {
    const ScaledComplex fz = f(z);
    if (fz.is_zero()) {
      r = {z, 0.0, true};
      return r;
    }
    const ScaledComplex diff = f(z + h) - f(z - h);
    if (diff.is_zero()) return r;
    const Complex step = (fz / diff).value() * (2.0 * h);
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return r;
    z -= step;
    if (std::abs(step) <= 4e-16 * std::abs(z)) break;
  }
  r.z = z;
  r.residual = newton_residual(f, z, h);
  r.ok = std::isfinite(r.residual);
  return r;
}

bool inside(const Plane& plane, const Box& b, Complex z) {
  Complex u = plane.from_z(z);
  if (plane.periodic) {
    double x = u.real();
    x -= std::floor((x - b.x0));
    u = {x, u.imag()};
  }
  return u.real() >= b.x0 && u.real() <= b.x1 && u.imag() >= b.y0 && u.imag() <= b.y1;
}

struct Search {
  const Evaluator& f;
  Plane plane;
  ZeroBudget budget;
  std::atomic<std::size_t>& boxes;
  std::atomic<bool>& exhausted;
};

Zero make_cluster(const Search& s, const Box& b) {
  const Complex z = s.plane.to_z(b.center());
  const double h = 1e-7 * std::max(b.size(), 1e-12) * s.plane.z_scale(b.center());
  return {z, newton_residual(s.f, z, h), b.count, b.count};
}

static constexpr double kSplits[] = {0.5, 0.5 + 0.0713, 0.5 - 0.0591};

void process(const Search& s, Box root, std::vector<Zero>& out, bool& incomplete) {
  std::vector<Box> stack{root};
  while (!stack.empty()) {
    const Box b = stack.back();
    stack.pop_back();
    if (b.count == 0) continue;
    if (s.boxes.fetch_add(1) >= s.budget.max_boxes) {
      s.exhausted = true;
      incomplete = true;
      return;
    }
    const double size = b.size();
    if (b.count == 1) {
      const Complex c = b.center();
      const double h = 1e-7 * size * s.plane.z_scale(c);
      const NewtonResult nr = newton(s.f, s.plane.to_z(c), h);
      if (nr.ok && nr.residual <= 1e-6 && inside(s.plane, b, nr.z)) {
        out.push_back({nr.z, nr.residual, 1, 1});
        continue;
      }
    }
    if (size < s.budget.min_box) {
      out.push_back(make_cluster(s, b));
      continue;
    }
    bool split = false;
    for (double frac : kSplits) {
      const double xm = b.x0 + frac * (b.x1 - b.x0);
      const double ym = b.y0 + frac * (b.y1 - b.y0);
      std::array<Box, 4> kids{Box{b.x0, xm, b.y0, ym}, Box{xm, b.x1, b.y0, ym}, Box{b.x0, xm, ym, b.y1},
                              Box{xm, b.x1, ym, b.y1}};
      try {
        int sum = 0;
        for (auto& k : kids) sum += k.count = box_winding(s.f, s.plane, k);
        if (sum != b.count) continue;
      } catch (const TrackFailure&) {
        continue;
      }
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
      split = true;
      break;
    }
    if (!split) {
      incomplete = true;
      out.push_back(make_cluster(s, b));
    }
  }
}

ZeroSet run_search(const Evaluator& f, const Plane& plane, const std::vector<Box>& top, const ZeroBudget& budget) {
  std::atomic<std::size_t> boxes{0};
  std::atomic<bool> exhausted{false};
  const Search s{f, plane, budget, boxes, exhausted};
  std::vector<std::vector<Zero>> found(top.size());
  std::vector<char> incomplete(top.size(), 0);
  parallel_for(top.size(), [&](std::size_t i) {
    bool inc = false;
    process(s, top[i], found[i], inc);
    incomplete[i] = inc;
  });
  ZeroSet zs;
  for (std::size_t i = 0; i < top.size(); ++i) {
    zs.zeros.insert(zs.zeros.end(), found[i].begin(), found[i].end());
    zs.box_count_sum += top[i].count;
    if (incomplete[i]) zs.incomplete = true;
  }
  zs.boxes = boxes.load();
  if (exhausted) zs.incomplete = zs.budget_exhausted = true;
  return zs;
}

// Perturbations applied to contours that pass too close to a zero.
static constexpr double kNudges[] = {0.0, 3.1e-11, -6.7e-11, 1e-10};

std::pair<double, double> annulus_y(double r_in, double r_out) {
  if (!(r_in > 0.0 && r_out > r_in)) throw DomainError("annulus: need 0 < r_in < r_out");
  return {-std::log(r_out) / kTwoPi, -std::log(r_in) / kTwoPi};
}

}  // namespace

Evaluator dirichlet_evaluator(const CocycleParams& params, std::int64_t N) {
  return [params, N](Complex z) { return dirichlet_det(params, z, 1, N); };
}

RealField log_abs(Evaluator f) {
  return [f = std::move(f)](Complex z) { return f(z).log_magnitude(); };
}

int count_zeros_disk(const Evaluator& f, Complex z0, double r) {
  if (!(r > 0.0)) throw DomainError("count_zeros_disk: radius must be positive");
  for (std::size_t k = 0; k < std::size(kNudges); ++k) {
    const double rr = r + kNudges[k];
    const auto h = [&](double t) { return f(z0 + rr * unit_phase(t)); };
    try {
      const ScaledComplex v = h(0.0);
      return snap_winding(track_phase(h, 0.0, 1.0, v, v, 64 << k));
    } catch (const TrackFailure&) {
    }
  }
  throw ContourError("count_zeros_disk: phase tracking failed on every perturbed circle");
}

int count_zeros_annulus(const Evaluator& f, double r_in, double r_out) {
  const auto [y0, y1] = annulus_y(r_in, r_out);
  const Plane plane{true};
  for (double nudge : kNudges) {
    const double off = 0.0123 + 1e3 * nudge;
    try {
      return box_winding(f, plane, Box{off, off + 1.0, y0 + nudge, y1 - nudge});
    } catch (const TrackFailure&) {
    }
  }
  throw ContourError("count_zeros_annulus: phase tracking failed on every perturbed contour");
}

int ZeroSet::counted() const {
  int n = 0;
  for (const auto& z : zeros) n += z.multiplicity;
  return n;
}

std::vector<Complex> ZeroSet::points() const {
  std::vector<Complex> p;
  for (const auto& z : zeros)
    for (int m = 0; m < z.multiplicity; ++m) p.push_back(z.z);
  return p;
}

double ZeroSet::max_residual() const {
  double m = 0.0;
  for (const auto& z : zeros) m = std::max(m, z.residual);
  return m;
}

ZeroSet locate_zeros_annulus(const Evaluator& f, double r_in, double r_out, const ZeroBudget& budget) {
  const auto [y0, y1] = annulus_y(r_in, r_out);
  const Plane plane{true};
  const int cols = std::clamp(static_cast<int>(std::ceil(1.0 / (y1 - y0))), 1, 4096);
  for (double nudge : kNudges) {
    const double off = 0.0123 / cols + 1e3 * nudge;
    std::vector<Box> top;
    try {
      for (int c = 0; c < cols; ++c) {
        Box b{off + static_cast<double>(c) / cols, off + static_cast<double>(c + 1) / cols, y0, y1};
        b.count = box_winding(f, plane, b);
        top.push_back(b);
      }
    } catch (const TrackFailure&) {
      continue;
    }
    ZeroSet zs = run_search(f, plane, top, budget);
    zs.r_in = r_in;
    zs.r_out = r_out;
    zs.total_count = count_zeros_annulus(f, r_in, r_out);
    return zs;
  }
  throw ContourError("locate_zeros_annulus: column contours failed");
}

ZeroSet locate_zeros_disk(const Evaluator& f, Complex z0, double r, const ZeroBudget& budget) {
  const Plane plane{false};
  constexpr int kGrid = 4;
  for (double nudge : kNudges) {
    // The grid is shifted off z0 so that no box edge runs along a line of
    // symmetry through the centre (the real axis for real polynomials).
    const double side = 2.0 * r * 1.02;
    const double x0 = z0.real() - r * 1.0123 + 1e3 * nudge, y0 = z0.imag() - r * 1.0077 + 1e3 * nudge;
    std::vector<Box> top;
    try {
      for (int j = 0; j < kGrid; ++j)
        for (int i = 0; i < kGrid; ++i) {
          Box b{x0 + side * i / kGrid, x0 + side * (i + 1) / kGrid, y0 + side * j / kGrid, y0 + side * (j + 1) / kGrid};
          b.count = box_winding(f, plane, b);
          top.push_back(b);
        }
    } catch (const TrackFailure&) {
      continue;
    }
    ZeroSet zs = run_search(f, plane, top, budget);
    std::erase_if(zs.zeros, [&](const Zero& z) { return !(std::abs(z.z - z0) < r); });
    zs.r_in = 0.0;
    zs.r_out = r;
    zs.total_count = count_zeros_disk(f, z0, r);
    return zs;
  }
  throw ContourError("locate_zeros_disk: box contours failed");
}

ZeroSet locate_zeros(const CocycleParams& params, std::int64_t N, Complex E, double rho, const ZeroBudget& budget) {
  if (!(rho > 0.0 && rho < params.potential.rho0 / 2.0 && rho < 1.0))
    throw DomainError("locate_zeros: rho must lie in (0, rho0 / 2)");
  const auto p = params.with_energy(E);
  ZeroSet zs = locate_zeros_annulus(dirichlet_evaluator(p, N), 1.0 - rho, 1.0 + rho, budget);
  zs.N = N;
  zs.energy = E;
  return zs;
}

double relative_magnitude(const CocycleParams& params, std::int64_t N, Complex z) {
  const double lf = dirichlet_det(params, z, 1, N).log_magnitude();
  return std::exp(lf - log_norm(monodromy(params, z, N)));
}

namespace {

// |D(0, r1) cap D(s, r2)| / (pi r2^2).
double lens_fraction(double s, double r1, double r2) {
  if (s <= r1 - r2) return 1.0;
  if (s >= r1 + r2) return 0.0;
  const double c1 = std::clamp((s * s + r2 * r2 - r1 * r1) / (2.0 * s * r2), -1.0, 1.0);
  const double c2 = std::clamp((s * s + r1 * r1 - r2 * r2) / (2.0 * s * r1), -1.0, 1.0);
  const double k = (-s + r2 + r1) * (s + r2 - r1) * (s - r2 + r1) * (s + r2 + r1);
  const double area = r2 * r2 * std::acos(c1) + r1 * r1 * std::acos(c2) - 0.5 * std::sqrt(std::max(k, 0.0));
  return area / (std::numbers::pi * r2 * r2);
}

double circle_mean(const RealField& u, Complex z0, double s, int m) {
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    double t = (k + 0.5) / m;
    double v = u(z0 + s * unit_phase(t));
    for (int tries = 0; !std::isfinite(v) && tries < 4; ++tries) {
      t += 1e-9;
      v = u(z0 + s * unit_phase(t));
    }
    if (!std::isfinite(v)) throw PrecisionError("jensen_average: non-finite sample");
    sum += v;
  }
  return sum / m;
}

// Panel edges on [a, b], graded geometrically towards `toward`.
std::vector<double> graded_edges(double a, double b, int panels, bool toward_b) {
  std::vector<double> e;
  for (int i = 0; i <= panels; ++i) e.push_back(a + (b - a) * i / panels);
  const double h = (b - a) / panels;
  for (int k = 1; k <= 12; ++k) e.push_back(toward_b ? b - h * std::ldexp(1.0, -k) : a + h * std::ldexp(1.0, -k));
  std::sort(e.begin(), e.end());
  return e;
}

double jensen_level(const RealField& u, Complex z0, double r1, double r2, int panels, int m) {
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  const double ref = circle_mean(u, z0, r1, m);
  const auto integrand = [&](double s) {
    const double w = lens_fraction(s, r1, r2) - (s < r1 ? 1.0 : 0.0);
    if (w == 0.0) return 0.0;
    return w * s * (circle_mean(u, z0, s, m) - ref);
  };
  double total = 0.0;
  // The indicator jumps at r1; the lens factor has square-root type edges at r1 -+ r2.
  for (const auto& [a, b, toward_b] : {std::tuple{r1 - r2, r1, false}, std::tuple{r1, r1 + r2, true}}) {
    const auto edges = graded_edges(a, b, panels, toward_b);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) total += Gauss::integrate(integrand, edges[i], edges[i + 1]);
  }
  return 2.0 / (r1 * r1) * total;
}

}  // namespace

JensenAverage jensen_average(const RealField& u, Complex z0, double r1, double r2, int quadrature_n) {
  if (!(r2 > 0.0 && r2 < r1)) throw DomainError("jensen_average: need 0 < r2 < r1");
  if (quadrature_n < 8) throw DomainError("jensen_average: quadrature_n must be >= 8");
  JensenAverage ja{z0, r1, r2, 0.0, INFINITY};
  constexpr int kLevels = 4;
  double prev = jensen_level(u, z0, r1, r2, 4, quadrature_n);
  for (int level = 1; level < kLevels; ++level) {
    const double cur = jensen_level(u, z0, r1, r2, 4 << level, quadrature_n << level);
    ja.value = cur;
    ja.error_estimate = std::abs(cur - prev);
    if (ja.error_estimate <= 1e-9 * std::max(1.0, std::abs(cur))) break;
    prev = cur;
  }
  if (ja.error_estimate > 1e-3 * std::max(1.0, std::abs(ja.value)))
    throw PrecisionError("jensen_average: quadrature refinements disagree by " + std::to_string(ja.error_estimate));
  return ja;
}

ZeroSeparation zero_separation(std::span<const Complex> zeros, std::int64_t N) {
  if (zeros.size() < 2) throw DomainError("zero_separation: need at least two zeros");
  ZeroSeparation sep;
  sep.min_distance = INFINITY;
  std::vector<double> nearest(zeros.size(), INFINITY);
  for (std::size_t i = 0; i < zeros.size(); ++i)
    for (std::size_t j = i + 1; j < zeros.size(); ++j) {
      const double d = std::abs(zeros[i] - zeros[j]);
      nearest[i] = std::min(nearest[i], d);
      nearest[j] = std::min(nearest[j], d);
      if (d < sep.min_distance) {
        sep.min_distance = d;
        sep.closest = {i, j};
      }
    }
  for (int e = -16; e <= 1; ++e) {
    const double lo = e == -16 ? 0.0 : std::pow(10.0, e - 1), hi = std::pow(10.0, e);
    const auto c = std::count_if(nearest.begin(), nearest.end(), [&](double d) { return d >= lo && d < hi; });
    sep.histogram.emplace_back(static_cast<double>(e), static_cast<std::size_t>(c));
  }
  for (double delta : {0.3, 0.5}) {
    const double thr = std::exp(-std::pow(static_cast<double>(N), delta));
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < zeros.size(); ++i)
      for (std::size_t j = i + 1; j < zeros.size(); ++j)
        if (std::abs(zeros[i] - zeros[j]) < thr) ++pairs;
    sep.ladder.emplace_back(delta, thr, pairs);
  }
  return sep;
}

ZeroSeparation zero_separation(const ZeroSet& zs) {
  const auto p = zs.points();
  return zero_separation(p, zs.N);
}

int per_disk_count(std::span<const Complex> points, double r0) {
  if (!(r0 > 0.0)) throw DomainError("per_disk_count: radius must be positive");
  if (points.empty()) return 0;
  // An open disk of radius r0 holds as many points as some closed disk of a
  // slightly smaller radius, and an optimal closed disk can be moved until
  // its boundary passes through two points (or it is centred on one).
  const double r = r0 * (1.0 - 1e-9);
  const double cell = 2.0 * r;
  auto key = [&](Complex z) {
    return std::pair<long long, long long>(static_cast<long long>(std::floor(z.real() / cell)),
                                           static_cast<long long>(std::floor(z.imag() / cell)));
  };
  struct Hash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 1000003LL ^ k.second);
    }
  };
  const bool bucketed = std::isfinite(cell) && cell > 0.0 &&
                        std::all_of(points.begin(), points.end(), [&](Complex z) {
                          return std::abs(z.real() / cell) < 1e15 && std::abs(z.imag() / cell) < 1e15;
                        });
  std::unordered_map<std::pair<long long, long long>, std::vector<std::size_t>, Hash> grid;
  if (bucketed)
    for (std::size_t i = 0; i < points.size(); ++i) grid[key(points[i])].push_back(i);
  auto neighbours = [&](Complex c) {
    std::vector<std::size_t> out;
    if (!bucketed) {
      out.resize(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) out[i] = i;
      return out;
    }
    const auto [kx, ky] = key(c);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({kx + dx, ky + dy});
        if (it != grid.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    return out;
  };
  auto count_at = [&](Complex c) {
    int n = 0;
    for (std::size_t i : neighbours(c))
      if (std::abs(points[i] - c) <= r * (1.0 + 1e-12)) ++n;
    return n;
  };
  int best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    best = std::max(best, count_at(points[i]));
    for (std::size_t j : neighbours(points[i])) {
      if (j <= i) continue;
      const Complex d = points[j] - points[i];
      const double dist = std::abs(d);
      if (dist == 0.0 || dist > 2.0 * r) continue;
      const Complex mid = 0.5 * (points[i] + points[j]);
      const double h = std::sqrt(std::max(r * r - 0.25 * dist * dist, 0.0));
      const Complex normal = Complex(-d.imag(), d.real()) / dist;
      best = std::max({best, count_at(mid + h * normal), count_at(mid - h * normal)});
    }
  }
  return best;
}

int per_disk_count(const ZeroSet& zs, double r0) {
  const auto p = zs.points();
  return per_disk_count(p, r0);
}

double star_discrepancy(std::vector<double> u) {
  if (u.empty()) throw DomainError("star_discrepancy: empty sample");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

Equidistribution equidistribution_stats(std::span<const Complex> zeros) {
  if (zeros.size() < 10) throw DomainError("equidistribution_stats: need at least 10 zeros");
  Equidistribution eq;
  std::vector<double> radial, angle;
  for (Complex z : zeros) {
    radial.push_back(std::abs(std::abs(z) - 1.0));
    double t = std::arg(z) / kTwoPi;
    if (t < 0.0) t += 1.0;
    angle.push_back(t >= 1.0 ? 0.0 : t);
  }
  for (double q : {0.5, 0.9, 0.99, 1.0}) eq.radial_quantiles.emplace_back(q, quantile(radial, q));
  eq.max_radial = *std::max_element(radial.begin(), radial.end());
  eq.angular_discrepancy = star_discrepancy(std::move(angle));
  return eq;
}

Equidistribution equidistribution_stats(const ZeroSet& zs) {
  const auto p = zs.points();
  return equidistribution_stats(p);
}

void write_svg(std::ostream& out, const ZeroSet& zs, const SvgOptions& opts) {
  constexpr double kSize = 640.0;
  const double extent = 1.0 + 2.0 * opts.rho;
  const double scale = 0.5 * kSize / (extent * 1.05);
  char buf[256];
  auto px = [&](Complex z) { return std::pair{0.5 * kSize + scale * z.real(), 0.5 * kSize - scale * z.imag()}; };
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                kSize, kSize, kSize, kSize);
  out << buf;
  if (!opts.reproducible) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "<!-- generated " << buf << " -->\n";
  }
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    std::snprintf(buf, sizeof buf, "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">");
    out << buf;
    for (char c : opts.title) {
      if (c == '<') out << "&lt;";
      else if (c == '>') out << "&gt;";
      else if (c == '&') out << "&amp;";
      else out << c;
    }
    out << "</text>\n";
  }
  const auto circle = [&](double radius, const char* style) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"none\" %s/>\n", 0.5 * kSize,
                  0.5 * kSize, scale * radius, style);
    out << buf;
  };
  circle(1.0, "stroke=\"black\" stroke-width=\"1\"");
  circle(1.0 - opts.rho, "stroke=\"gray\" stroke-dasharray=\"4 4\"");
  circle(1.0 + opts.rho, "stroke=\"gray\" stroke-dasharray=\"4 4\"");
  for (const auto& z : zs.zeros) {
    const auto [x, y] = px(z.z);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.1f\" fill=\"%s\"/>\n", x, y,
                  z.multiplicity > 1 ? 3.5 : 2.0, z.multiplicity > 1 ? "crimson" : "navy");
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace qpc
