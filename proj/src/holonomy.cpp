#include "riccati/holonomy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace riccati {

// ---------------------------------------------------------------------------------------------
// Local models

const char* to_string(ModelCase c) {
  switch (c) {
    case ModelCase::A: return "A";
    case ModelCase::B: return "B";
    case ModelCase::C: return "C";
    case ModelCase::D: return "D";
    case ModelCase::E: return "E";
  }
  return "?";
}

ModelCase model_case_from_string(const std::string& s) {
  if (s == "A") return ModelCase::A;
  if (s == "B") return ModelCase::B;
  if (s == "C") return ModelCase::C;
  if (s == "D") return ModelCase::D;
  if (s == "E") return ModelCase::E;
  throw Error(ErrorKind::ParseError, "unknown local model case '" + s + "'");
}

LocalModel LocalModel::case_c(Complex center, Complex alpha1, Complex alpha2) {
  LocalModel m;
  m.case_tag = ModelCase::C;
  m.center = center;
  m.alpha1 = alpha1;
  m.alpha2 = alpha2;
  return m;
}

LocalModel LocalModel::case_d(Complex center, Complex alpha2) {
  LocalModel m;
  m.case_tag = ModelCase::D;
  m.center = center;
  m.alpha1 = alpha2;
  m.alpha2 = alpha2;
  return m;
}

LocalModel LocalModel::case_e(Complex center, Complex nu) {
  LocalModel m;
  m.case_tag = ModelCase::E;
  m.center = center;
  m.nu = nu;
  return m;
}

LocalModel LocalModel::case_b(Complex center, Complex mu, Complex nu, int winding) {
  LocalModel m;
  m.case_tag = ModelCase::B;
  m.center = center;
  m.mu = mu;
  m.nu = nu;
  m.lambda = alpha_from_lambda(mu, winding);
  return m;
}

LocalModel LocalModel::case_a(Complex center, Complex mu) {
  LocalModel m;
  m.case_tag = ModelCase::A;
  m.center = center;
  m.mu = mu;
  return m;
}

void LocalModel::validate() const {
  if (case_tag == ModelCase::B || case_tag == ModelCase::A)
    if (mu == Complex(0.0)) throw Error(ErrorKind::InvalidArgument, "local model needs mu != 0");
  if (case_tag == ModelCase::B && std::abs(std::exp(kTwoPiI * lambda) - mu) > 1e-10 * std::abs(mu))
    throw Error(ErrorKind::InvalidArgument, "case B needs exp(2 pi i lambda) = mu");
}

namespace {

// Fiber part of the model as M (u, v)^T + b, to be divided by (x - center).
std::pair<Matrix2c, Vector2c> model_linear_part(const LocalModel& m) {
  m.validate();
  Matrix2c M = Matrix2c::Zero();
  Vector2c b = Vector2c::Zero();
  switch (m.case_tag) {
    case ModelCase::C: M.diagonal() << m.alpha1, m.alpha2; break;
    case ModelCase::D: M.diagonal() << m.alpha2, m.alpha2; break;
    case ModelCase::E: M(0, 1) = m.nu / kTwoPiI; break;
    case ModelCase::B:
      M << m.lambda, m.nu / (kTwoPiI * m.mu), 0.0, m.lambda;
      break;
    case ModelCase::A:
      M(0, 1) = m.mu / kTwoPiI;
      b << -m.mu * m.mu / (2.0 * kTwoPiI), m.mu / kTwoPiI;
      break;
  }
  return {M, b};
}

}  // namespace

AffineFiberMap::AffineFiberMap() : linear_(Matrix2c::Identity()), translation_(Vector2c::Zero()) {}

AffineFiberMap::AffineFiberMap(const Matrix2c& linear, const Vector2c& translation)
    : linear_(linear), translation_(translation) {
  if (!all_finite(linear) || !all_finite(translation))
    throw Error(ErrorKind::InvalidArgument, "affine map has non-finite entries");
  if (std::abs(linear.determinant()) < 1e-12) throw Error(ErrorKind::DegenerateMatrix, "affine map is not invertible");
}

AffineFiberMap AffineFiberMap::compose(const AffineFiberMap& inner) const {
  return {linear_ * inner.linear_, linear_ * inner.translation_ + translation_};
}

AffineFiberMap AffineFiberMap::inverse() const {
  const Matrix2c inv = linear_.inverse();
  return {inv, -inv * translation_};
}

Matrix3c AffineFiberMap::embed() const {
  Matrix3c m = Matrix3c::Identity();
  m.topLeftCorner<2, 2>() = linear_;
  m.topRightCorner<2, 1>() = translation_;
  return m;
}

PolyVectorField local_model_field(const LocalModel& m) {
  const auto [M, b] = model_linear_part(m);
  const std::vector<std::string> vars{"x", "u", "v"};
  const MultiPoly x = MultiPoly::variable(vars, 0);
  const MultiPoly u = MultiPoly::variable(vars, 1), v = MultiPoly::variable(vars, 2);
  auto c = [&](Complex z) { return MultiPoly::constant(vars, z); };
  return make_field("uv", {x - c(m.center), M(0, 0) * u + M(0, 1) * v + c(b(0)), M(1, 0) * u + M(1, 1) * v + c(b(1))});
}

AffineFiberMap analytic_holonomy(const LocalModel& m) {
  // Once around the center, d(u,v)/dtheta = i (M (u,v) + b); the affine flow is the
  // exponential of the augmented generator.
  const auto [M, b] = model_linear_part(m);
  Matrix3c gen = Matrix3c::Zero();
  gen.topLeftCorner<2, 2>() = kTwoPiI * M;
  gen.topRightCorner<2, 1>() = kTwoPiI * b;
  const Matrix3c e = mat_exp(gen);
  return {e.topLeftCorner<2, 2>(), e.topRightCorner<2, 1>()};
}

namespace {

Complex branch_log(const LocalModel& m, Complex x, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "gluing radius must be positive");
  const Complex w = (x - m.center) / (0.5 * r);
  if (w == Complex(0.0)) throw Error(ErrorKind::BranchCutHit, "log argument is zero");
  if (w.real() <= 0.0 && std::abs(w.imag()) <= 1e-14 * std::abs(w))
    throw Error(ErrorKind::BranchCutHit, "log argument lies on the cut (-inf, 0]");
  return std::log(w);
}

}  // namespace

AffineFiberMap gluing_map(const LocalModel& m, Complex x, double r) {
  m.validate();
  const Complex L = branch_log(m, x, r);
  Matrix2c lin = Matrix2c::Identity();
  Vector2c t = Vector2c::Zero();
  switch (m.case_tag) {
    case ModelCase::C: lin.diagonal() << std::exp(m.alpha1 * L), std::exp(m.alpha2 * L); break;
    case ModelCase::D: lin.diagonal() << std::exp(m.alpha2 * L), std::exp(m.alpha2 * L); break;
    case ModelCase::E: lin(0, 1) = m.nu / kTwoPiI * L; break;
    case ModelCase::B: {
      const Complex s = std::exp(m.lambda * L);
      lin << s, s * m.nu / (kTwoPiI * m.mu) * L, 0.0, s;
      break;
    }
    case ModelCase::A: {
      const Complex k = m.mu / kTwoPiI;
      lin(0, 1) = k * L;
      t << k * k * L * L / 2.0 - m.mu * m.mu / (2.0 * kTwoPiI) * L, k * L;
      break;
    }
  }
  return {lin, t};
}

AffineFiberMap gluing_pullback(const LocalModel& m, Complex x, double r) { return gluing_map(m, x, r).inverse(); }

LocalModel model_for_normal_form(const Matrix3c& J, JordanCase c, Complex center) {
  const Complex l0 = J(0, 0), l1 = J(1, 1), l2 = J(2, 2);
  switch (c) {
    case JordanCase::I: return LocalModel::case_c(center, alpha_from_lambda(l0 / l2), alpha_from_lambda(l1 / l2));
    case JordanCase::II1: return LocalModel::case_d(center, alpha_from_lambda(l0 / l2));
    case JordanCase::II2: return LocalModel::case_b(center, l0 / l2, J(0, 1) / l2);
    case JordanCase::III1: return LocalModel::case_c(center, 0.0, 0.0);
    case JordanCase::III2: return LocalModel::case_e(center, J(0, 1) / l0);
    case JordanCase::III3: return LocalModel::case_a(center, J(0, 1) / l0);
  }
  throw Error(ErrorKind::UnclassifiableGenerator, "unknown Jordan case");
}

// ---------------------------------------------------------------------------------------------
// Paths

PathSegment PathSegment::line(Complex from, Complex to) {
  PathSegment s;
  s.kind = Kind::Line;
  s.from = from;
  s.to = to;
  return s;
}

PathSegment PathSegment::arc(Complex center, double radius, double theta0, double theta1) {
  PathSegment s;
  s.kind = Kind::Arc;
  s.center = center;
  s.radius = radius;
  s.theta0 = theta0;
  s.theta1 = theta1;
  return s;
}

Complex PathSegment::position(double s) const {
  if (kind == Kind::Line) {
    if (s == 1.0) return to;
    return from + s * (to - from);
  }
  return center + std::polar(radius, theta0 + s * (theta1 - theta0));
}

Complex PathSegment::derivative(double s) const {
  if (kind == Kind::Line) return to - from;
  return Complex(0.0, theta1 - theta0) * std::polar(radius, theta0 + s * (theta1 - theta0));
}

PathSegment PathSegment::reversed() const {
  return kind == Kind::Line ? line(to, from) : arc(center, radius, theta1, theta0);
}

double PathSegment::distance_to(Complex p) const {
  if (kind == Kind::Line) {
    const Complex d = to - from;
    const double len2 = std::norm(d);
    const double t = len2 == 0.0 ? 0.0 : std::clamp((std::conj(d) * (p - from)).real() / len2, 0.0, 1.0);
    return std::abs(p - (from + t * d));
  }
  double best = std::min(std::abs(p - start()), std::abs(p - end()));
  const double sweep = theta1 - theta0;
  if (std::abs(sweep) >= 2.0 * kPi || std::abs(p - center) == 0.0) return std::min(best, std::abs(std::abs(p - center) - radius));
  const double phi = std::arg(p - center);
  for (int k = -3; k <= 3; ++k) {
    const double t = (phi + 2.0 * kPi * k - theta0) / sweep;
    if (t >= 0.0 && t <= 1.0) best = std::min(best, std::abs(std::abs(p - center) - radius));
  }
  return best;
}

LoopPath LoopPath::circle(Complex center, double radius, double theta0) {
  LoopPath l;
  l.base_point = center + std::polar(radius, theta0);
  l.segments.push_back(PathSegment::arc(center, radius, theta0, theta0 + 2.0 * kPi));
  return l;
}

LoopPath LoopPath::reversed() const {
  LoopPath l;
  l.base_point = base_point;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) l.segments.push_back(it->reversed());
  return l;
}

LoopPath LoopPath::concatenated(const LoopPath& next) const {
  LoopPath l = *this;
  l.segments.insert(l.segments.end(), next.segments.begin(), next.segments.end());
  return l;
}

bool LoopPath::is_closed(double tol) const {
  if (segments.empty()) return true;
  const double scale = 1.0 + std::abs(base_point);
  if (std::abs(segments.front().start() - base_point) > tol * scale) return false;
  if (std::abs(segments.back().end() - base_point) > tol * scale) return false;
  for (size_t i = 1; i < segments.size(); ++i)
    if (std::abs(segments[i].start() - segments[i - 1].end()) > tol * scale) return false;
  return true;
}

double LoopPath::distance_to(Complex p) const {
  double d = std::abs(p - base_point);
  for (const auto& s : segments) d = std::min(d, s.distance_to(p));
  return d;
}

// ---------------------------------------------------------------------------------------------
// Numerical lifting

namespace {

// Dense evaluation of a polynomial in (x, a, b).
class CompiledPoly {
 public:
  explicit CompiledPoly(const MultiPoly& p) {
    for (const auto& [e, c] : p.terms()) {
      terms_.push_back({c, e[0], e[1], e[2]});
      for (int i = 0; i < 3; ++i) max_[i] = std::max(max_[i], e[i]);
    }
  }
  int max_degree(int i) const { return max_[i]; }
  Complex eval(const std::array<const Complex*, 3>& powers) const {
    Complex s = 0.0;
    for (const auto& t : terms_) s += t.c * powers[0][t.ex] * powers[1][t.ea] * powers[2][t.eb];
    return s;
  }

 private:
  struct Term {
    Complex c;
    int ex, ea, eb;
  };
  std::vector<Term> terms_;
  std::array<int, 3> max_{0, 0, 0};
};

// Fiber components of one affine chart of the ℂP(2) fiber.
struct ChartRhs {
  CompiledPoly base, first, second;
  int max_x, max_a, max_b;

  explicit ChartRhs(const PolyVectorField& f)
      : base(f.components[0]), first(f.components[1]), second(f.components[2]) {
    max_x = std::max({base.max_degree(0), first.max_degree(0), second.max_degree(0)});
    max_a = std::max({base.max_degree(1), first.max_degree(1), second.max_degree(1)});
    max_b = std::max({base.max_degree(2), first.max_degree(2), second.max_degree(2)});
  }

  // (dY/dx) * dx/ds, i.e. gamma'(s) * F_fiber / F_base.
  Vector2c operator()(Complex x, Complex dx, const Vector2c& y) const {
    Complex px[16], pa[16], pb[16];
    fill(px, x, max_x);
    fill(pa, y(0), max_a);
    fill(pb, y(1), max_b);
    const std::array<const Complex*, 3> powers{px, pa, pb};
    const Complex scale = dx / base.eval(powers);
    return Vector2c(first.eval(powers) * scale, second.eval(powers) * scale);
  }

  static void fill(Complex* out, Complex z, int n) {
    if (n >= 16) throw Error(ErrorKind::InvalidArgument, "polynomial degree too large for the integrator");
    out[0] = 1.0;
    for (int i = 1; i <= n; ++i) out[i] = out[i - 1] * z;
  }
};

// Chart 0: (h0, h1) / h2.  Chart 1 (u, v): (h2, h1) / h0.  Chart 2 (t, s): (h0, h2) / h1.
constexpr std::array<std::array<int, 3>, 3> kChartLayout{{{0, 1, 2}, {2, 1, 0}, {0, 2, 1}}};

Vector2c to_chart(const Vector3c& h, int chart) {
  const auto& l = kChartLayout[chart];
  return Vector2c(h(l[0]) / h(l[2]), h(l[1]) / h(l[2]));
}

Vector3c from_chart(const Vector2c& y, int chart) {
  const auto& l = kChartLayout[chart];
  Vector3c h;
  h(l[0]) = y(0);
  h(l[1]) = y(1);
  h(l[2]) = 1.0;
  return h;
}

int best_chart(const Vector3c& h) {
  int idx = 0;
  double best = -1.0;
  // Chart c divides by component kChartLayout[c][2].
  for (int c = 0; c < 3; ++c) {
    const double m = std::abs(h(kChartLayout[c][2]));
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      idx = c;
    }
  }
  return idx;
}

struct ChartSystem {
  std::array<ChartRhs, 3> charts;

  explicit ChartSystem(const PolyVectorField& X)
      : charts{ChartRhs(X), ChartRhs(checked(fiber_chart_cp2(X))), ChartRhs(checked(fiber_chart_cp2_second(X)))} {}

  static PolyVectorField checked(const ChartChangeResult& r) {
    if (r.clearing_exponent != 0) throw Error(ErrorKind::NotRiccati, "chart change of the field has poles");
    return r.field;
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

// Carries h along one segment; returns the end point in homogeneous coordinates.
Vector3c lift_segment(const ChartSystem& sys, const PathSegment& seg, Vector3c h, const LiftOptions& opt,
                      IntegratorStats& stats) {
  int chart = best_chart(h);
  Vector2c y = to_chart(h, chart);
  auto f = [&](double s, const Vector2c& state) { return sys.charts[chart](seg.position(s), seg.derivative(s), state); };

  double s = 0.0;
  double step = 0.02;
  double err_prev = 1.0;
  long steps_here = 0;
  Vector2c k1 = f(s, y);
  while (s < 1.0) {
    if (++steps_here > opt.max_steps) throw Error(ErrorKind::IntegrationFailure, "step budget exhausted");
    if (step < 1e-13) throw Error(ErrorKind::IntegrationFailure, "step size underflow");
    const double hstep = std::min(step, 1.0 - s);
    const Vector2c k2 = f(s + c2 * hstep, y + hstep * (a21 * k1));
    const Vector2c k3 = f(s + c3 * hstep, y + hstep * (a31 * k1 + a32 * k2));
    const Vector2c k4 = f(s + c4 * hstep, y + hstep * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector2c k5 = f(s + c5 * hstep, y + hstep * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector2c k6 = f(s + hstep, y + hstep * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector2c y_new = y + hstep * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double s_new = hstep == 1.0 - s ? 1.0 : s + hstep;
    const Vector2c k7 = f(s_new, y_new);
    const Vector2c err_vec = hstep * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = opt.tol + opt.tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      err = std::max(err, std::abs(err_vec(i)) / sc);
    }
    if (!std::isfinite(err) || !all_finite(y_new)) err = 1e10;

    if (err <= 1.0) {
      ++stats.steps;
      s = s_new;
      y = y_new;
      k1 = k7;
      const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      step = hstep * std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      if (std::max(std::abs(y(0)), std::abs(y(1))) > opt.switch_threshold) {
        h = from_chart(y, chart);
        chart = best_chart(h);
        y = to_chart(h, chart);
        k1 = f(s, y);
        ++stats.chart_switches;
      }
    } else {
      ++stats.rejected;
      step = hstep * std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  return normalize_point(from_chart(y, chart));
}

void check_path_clearance(const PolyVectorField& X, const std::vector<PathSegment>& path, const LiftOptions& opt) {
  const auto check = check_riccati_cp2(X);
  if (!check.accepted()) throw Error(ErrorKind::NotRiccati, "field is not in the Riccati normal form");
  const FiberSet fibers = invariant_fibers(*check.form, X);
  if (fibers.all_invariant) throw Error(ErrorKind::NotRiccati, "every fiber is invariant (p = 0)");
  for (const auto& root : fibers.finite_fibers)
    for (const auto& seg : path)
      if (seg.distance_to(root.value) < opt.min_clearance * (1.0 + std::abs(root.value)))
        throw Error(ErrorKind::PoleOnPath, "path meets the invariant fiber over a zero of p");
}

}  // namespace

std::vector<Vector3c> lift_path(const PolyVectorField& X, const std::vector<PathSegment>& path, const Vector3c& h0,
                                const LiftOptions& options, IntegratorStats* stats) {
  check_path_clearance(X, path, options);
  const ChartSystem sys(X);
  IntegratorStats local;
  std::vector<Vector3c> out{normalize_point(h0)};
  for (const auto& seg : path) out.push_back(lift_segment(sys, seg, out.back(), options, local));
  if (stats) {
    stats->steps += local.steps;
    stats->rejected += local.rejected;
    stats->chart_switches += local.chart_switches;
  }
  return out;
}

std::vector<Vector3c> fiber_samples(int n, std::uint64_t seed) {
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "at least four fiber samples are needed");
  // Two points dominated by each homogeneous coordinate, in general position.
  const std::array<Vector3c, 6> fixed{
      Vector3c(1.0, Complex(0.31, -0.12), Complex(-0.27, 0.18)),
      Vector3c(Complex(0.85, 0.2), Complex(-0.4, 0.33), Complex(0.22, 0.41)),
      Vector3c(Complex(0.15, 0.37), 1.0, Complex(-0.33, -0.21)),
      Vector3c(Complex(-0.42, 0.11), Complex(0.9, -0.3), Complex(0.38, 0.26)),
      Vector3c(Complex(0.29, -0.35), Complex(0.17, 0.23), 1.0),
      Vector3c(Complex(-0.21, -0.44), Complex(0.36, -0.19), Complex(0.8, 0.35)),
  };
  std::vector<Vector3c> out;
  for (int i = 0; i < std::min(n, 6); ++i) out.push_back(normalize_point(fixed[i]));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (static_cast<int>(out.size()) < n) {
    Vector3c h;
    for (int i = 0; i < 3; ++i) h(i) = Complex(u(rng), u(rng));
    if (h.norm() > 0.1) out.push_back(normalize_point(h));
  }
  return out;
}

HolonomyResult numeric_holonomy(const PolyVectorField& X, const LoopPath& loop, const LiftOptions& options) {
  if (!loop.is_closed(1e-9)) throw Error(ErrorKind::InvalidArgument, "loop is not closed");
  check_path_clearance(X, loop.segments, options);
  const ChartSystem sys(X);

  HolonomyResult out;
  out.starts = fiber_samples(options.n_samples, options.seed);
  out.n_samples = options.n_samples;
  std::vector<Correspondence> corrs;
  for (const auto& start : out.starts) {
    Vector3c h = start;
    for (const auto& seg : loop.segments) h = lift_segment(sys, seg, h, options, out.stats);
    out.ends.push_back(h);
    corrs.push_back({start, h});
  }
  const ProjectiveFit fit = fit_projective(corrs);
  out.map = fit.map;
  out.residual = fit.residual;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Generators

namespace {

// Straight path from a to b, bent around fibers closer than 2c along arcs of radius 2c on the
// side away from the fiber (fibers exactly on the line are passed on the right).
std::vector<PathSegment> route(Complex a, Complex b, const std::vector<Complex>& fibers, double c) {
  const double len = std::abs(b - a);
  if (len == 0.0) return {};
  const Complex dir = (b - a) / len;
  struct Obstacle {
    double t_in, t_out;
    Complex fiber;
    bool ccw;
  };
  std::vector<Obstacle> obstacles;
  const double rad = 2.0 * c;
  for (const Complex f : fibers) {
    const Complex rel = std::conj(dir) * (f - a);
    const double t = rel.real(), perp = rel.imag();
    if (std::abs(perp) >= rad) continue;
    const double w = std::sqrt(rad * rad - perp * perp);
    const double t_in = t - w, t_out = t + w;
    if (t_out <= 0.0 || t_in >= len) continue;
    if (t_in <= 0.0 || t_out >= len) throw Error(ErrorKind::RoutingFailure, "path endpoint too close to a fiber");
    obstacles.push_back({t_in, t_out, f, perp >= 0.0});
  }
  std::sort(obstacles.begin(), obstacles.end(), [](const Obstacle& x, const Obstacle& y) { return x.t_in < y.t_in; });
  for (size_t i = 1; i < obstacles.size(); ++i)
    if (obstacles[i].t_in < obstacles[i - 1].t_out) throw Error(ErrorKind::RoutingFailure, "detours overlap");

  std::vector<PathSegment> out;
  Complex cursor = a;
  for (const auto& o : obstacles) {
    const Complex entry = a + o.t_in * dir, exit = a + o.t_out * dir;
    out.push_back(PathSegment::line(cursor, entry));
    const double th0 = std::arg(entry - o.fiber);
    double th1 = std::arg(exit - o.fiber);
    if (o.ccw)
      while (th1 <= th0) th1 += 2.0 * kPi;
    else
      while (th1 >= th0) th1 -= 2.0 * kPi;
    PathSegment arc = PathSegment::arc(o.fiber, rad, th0, th1);
    out.push_back(arc);
    cursor = arc.end();
  }
  out.push_back(PathSegment::line(cursor, b));
  return out;
}

LoopPath lasso(Complex base, const std::vector<PathSegment>& approach, const PathSegment& circle) {
  LoopPath l;
  l.base_point = base;
  l.segments = approach;
  l.segments.push_back(circle);
  for (auto it = approach.rbegin(); it != approach.rend(); ++it) l.segments.push_back(it->reversed());
  return l;
}

double wrap_positive(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

}  // namespace

std::vector<GeneratorResult> holonomy_generators(const PolyVectorField& X, Complex b, const GeneratorOptions& options) {
  const auto check = check_riccati_cp2(X);
  if (!check.accepted()) throw Error(ErrorKind::NotRiccati, "field is not in the Riccati normal form");
  const FiberSet fibers = invariant_fibers(*check.form, X);
  if (fibers.all_invariant) throw Error(ErrorKind::NotRiccati, "every fiber is invariant (p = 0)");

  std::vector<Complex> xs;
  for (const auto& r : fibers.finite_fibers) xs.push_back(r.value);
  double d_pairs = std::numeric_limits<double>::infinity(), d_base = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < xs.size(); ++i) {
    d_base = std::min(d_base, std::abs(xs[i] - b));
    for (size_t j = i + 1; j < xs.size(); ++j) d_pairs = std::min(d_pairs, std::abs(xs[i] - xs[j]));
  }
  const double c = options.clearance ? *options.clearance : std::min({0.5, d_pairs / 5.0, d_base / 3.0});
  if (!(c > 1e-9)) throw Error(ErrorKind::RoutingFailure, "no usable clearance around the fibers");
  if (d_pairs <= 4.0 * c) throw Error(ErrorKind::RoutingFailure, "fibers closer than four clearances");
  if (d_base <= 2.0 * c) throw Error(ErrorKind::RoutingFailure, "base point too close to a fiber");

  // Spoke directions, measured from the middle of the widest angular gap.
  std::vector<double> angles;
  for (const Complex x : xs) angles.push_back(std::arg(x - b));
  double psi = 0.0;
  if (!angles.empty()) {
    std::vector<double> sorted = angles;
    std::sort(sorted.begin(), sorted.end());
    double widest = -1.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
      const double next = i + 1 < sorted.size() ? sorted[i + 1] : sorted[0] + 2.0 * kPi;
      if (next - sorted[i] > widest) {
        widest = next - sorted[i];
        psi = sorted[i] + widest / 2.0;
      }
    }
  }
  std::vector<size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    const double ai = wrap_positive(angles[i] - psi), aj = wrap_positive(angles[j] - psi);
    if (std::abs(ai - aj) > 1e-12) return ai < aj;
    return std::abs(xs[i] - b) > std::abs(xs[j] - b);
  });

  std::vector<GeneratorResult> out;
  for (size_t idx : order) {
    const Complex xj = xs[idx];
    const Complex toward = (b - xj) / std::abs(b - xj);
    std::vector<Complex> others;
    for (size_t k = 0; k < xs.size(); ++k)
      if (k != idx) others.push_back(xs[k]);
    const double th = std::arg(toward);
    GeneratorResult g;
    g.fiber = xj;
    g.loop = lasso(b, route(b, xj + c * toward, others, c), PathSegment::arc(xj, c, th, th + 2.0 * kPi));
    g.holonomy = numeric_holonomy(X, g.loop, options.lift);
    out.push_back(std::move(g));
  }

  if (fibers.infinity_invariant) {
    double radius = 1.0;
    for (const Complex x : xs) radius = std::max(radius, std::abs(x - b) + 3.0 * c);
    const LoopPath around =
        lasso(b, route(b, b + std::polar(radius, psi), xs, c), PathSegment::arc(b, radius, psi, psi + 2.0 * kPi));
    GeneratorResult g;
    g.at_infinity = true;
    g.loop = around.reversed();
    g.holonomy = numeric_holonomy(X, g.loop, options.lift);
    out.push_back(std::move(g));
  }
  return out;
}

double product_relation_defect(const std::vector<GeneratorResult>& generators) {
  Matrix3c prod = Matrix3c::Identity();
  for (const auto& g : generators) prod = g.holonomy.map.normalized() * prod;
  return projective_distance(ProjMap(prod), ProjMap());
}

// ---------------------------------------------------------------------------------------------
// Synthesis

namespace {

double sup_distance(const HolonomyResult& h, const Matrix3c& expected) {
  double d = 0.0;
  for (size_t i = 0; i < h.starts.size(); ++i) d = std::max(d, sin_angle(h.ends[i], expected * h.starts[i]));
  return d;
}

}  // namespace

SynthesisReport verify_synthesis(const std::vector<ProjMap>& generators, const SynthesisOptions& options) {
  SynthesisReport report;
  Matrix3c prod = Matrix3c::Identity();
  for (const auto& f : generators) prod = prod * f.normalized();
  std::vector<ProjMap> all;
  try {
    all.push_back(ProjMap(prod).inverse());
  } catch (const Error& e) {
    throw Error(ErrorKind::UnclassifiableGenerator, std::string("product is not invertible: ") + e.what());
  }
  all.insert(all.end(), generators.begin(), generators.end());

  Matrix3c full = Matrix3c::Identity(), rebuilt = Matrix3c::Identity();
  report.passed = true;
  for (size_t j = 0; j < all.size(); ++j) {
    GeneratorCheck g;
    g.index = static_cast<int>(j);
    g.input = all[j];
    try {
      g.classification = classify(all[j], options.tol_eigen);
    } catch (const Error& e) {
      throw Error(ErrorKind::UnclassifiableGenerator, "generator " + std::to_string(j) + ": " + e.what());
    }
    const Matrix3c J = g.classification.normal_form.matrix();
    g.model = model_for_normal_form(J, g.classification.jordan_case, 0.0);
    g.analytic = analytic_holonomy(g.model);
    const Matrix3c H = g.analytic.embed();
    g.analytic_vs_normal_form = projective_distance(ProjMap(H), ProjMap(J));
    if (options.numeric_check) {
      const HolonomyResult num =
          numeric_holonomy(local_model_field(g.model), LoopPath::circle(0.0, options.radius), options.lift);
      g.numeric_vs_analytic = sup_distance(num, H);
      g.numeric_residual = num.residual;
    }
    const Matrix3c& P = g.classification.conjugator;
    const Matrix3c back = P.inverse() * H * P;
    g.reconstruction = projective_distance(ProjMap(back), all[j]);
    g.passed = g.analytic_vs_normal_form <= 1e-10 && g.numeric_vs_analytic <= 1e-6 && g.reconstruction <= 1e-8;
    report.passed = report.passed && g.passed;

    full = full * all[j].normalized();
    rebuilt = rebuilt * normalize_projective(back);
    report.generators.push_back(std::move(g));
  }
  report.product_defect = projective_distance(ProjMap(full), ProjMap());
  report.reconstructed_product_defect = projective_distance(ProjMap(rebuilt), ProjMap());
  report.passed = report.passed && report.product_defect <= 1e-8 && report.reconstructed_product_defect <= 1e-8;
  return report;
}

}  // namespace riccati
