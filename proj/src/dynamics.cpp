#include "blochstab/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "blochstab/analysis.hpp"

namespace blochstab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Sums {
  double x = 0.0;
  double y = 0.0;
};

Sums weighted_sums(std::span<const Vec3> spins,
                   std::span<const double> weights, std::size_t n) {
  Sums s;
  for (std::size_t i = 0; i < n; ++i) {
    s.x += weights[i] * spins[i].x();
    s.y += weights[i] * spins[i].y();
  }
  return s;
}

Sums plain_sums(std::span<const Vec3> spins) {
  Sums s;
  for (const auto& v : spins) {
    s.x += v.x();
    s.y += v.y();
  }
  return s;
}

std::vector<Vec3> raw(const std::vector<SpinState>& spins) {
  std::vector<Vec3> out;
  out.reserve(spins.size());
  for (const auto& s : spins) out.push_back(s.vec());
  return out;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": size mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

void validate(const ControlLaw& law, std::size_t p) {
  std::visit(Overloaded{
                 [&](const law::Truncated& t) {
                   if (t.n < 1 || t.n > p) {
                     std::ostringstream msg;
                     msg << "Truncated feedback needs 1 <= N <= p (N = " << t.n
                         << ", p = " << p << ")";
                     throw std::invalid_argument(msg.str());
                   }
                 },
                 [&](const law::RadiationDamping& r) {
                   if (!(r.rate > 0.0)) {
                     throw std::invalid_argument(
                         "radiation damping rate must be > 0");
                   }
                   if (r.sign != 1 && r.sign != -1) {
                     throw std::invalid_argument(
                         "radiation damping sign must be +1 or -1");
                   }
                   if (p < 1) {
                     throw std::invalid_argument(
                         "radiation damping needs at least one spin");
                   }
                 },
                 [](const auto&) {},
             },
             law);
}

bool is_feedback(const ControlLaw& law) {
  return std::holds_alternative<law::FullSum>(law) ||
         std::holds_alternative<law::Weighted>(law) ||
         std::holds_alternative<law::Truncated>(law);
}

std::string to_string(const ControlLaw& law) {
  return std::visit(
      Overloaded{
          [](const law::Zero&) -> std::string { return "zero"; },
          [](const law::FullSum&) -> std::string { return "fullsum"; },
          [](const law::Weighted&) -> std::string { return "weighted"; },
          [](const law::Truncated& t) -> std::string {
            return "truncated:" + std::to_string(t.n);
          },
          [](const law::RadiationDamping& r) -> std::string {
            std::ostringstream os;
            os.precision(17);
            os << "rde:" << r.rate << ":" << (r.sign > 0 ? "+1" : "-1");
            return os.str();
          },
      },
      law);
}

ControlLaw parse_control_law(const std::string& text) {
  if (text == "zero") return law::Zero{};
  if (text == "fullsum") return law::FullSum{};
  if (text == "weighted") return law::Weighted{};
  const auto bad = [&] {
    return std::invalid_argument("unknown control law '" + text +
                                 "' (expected zero, fullsum, weighted, "
                                 "truncated:N or rde:RATE:SIGN)");
  };
  if (text.starts_with("truncated:")) {
    const std::string n = text.substr(10);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(n, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != n.size() || v < 1) throw bad();
    return law::Truncated{static_cast<std::size_t>(v)};
  }
  if (text.starts_with("rde:")) {
    const std::string rest = text.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw bad();
    double rate = 0.0;
    int sign = 0;
    const char* const a = rest.data();
    const char* const b = a + colon;
    const char* const end = a + rest.size();
    const auto r1 = std::from_chars(a, b, rate);
    const char* const sign_begin = (b + 1 < end && b[1] == '+') ? b + 2 : b + 1;
    const auto r2 = std::from_chars(sign_begin, end, sign);
    if (r1.ec != std::errc() || r1.ptr != b || r2.ec != std::errc() ||
        r2.ptr != end || !(rate > 0.0) || !std::isfinite(rate) ||
        (sign != 1 && sign != -1)) {
      throw bad();
    }
    return law::RadiationDamping{rate, sign};
  }
  throw bad();
}

ControlValue control_value(const ControlLaw& law, std::span<const Vec3> spins,
                           std::span<const double> weights) {
  check_sizes(spins.size(), weights.size(), "control_value");
  return std::visit(
      Overloaded{
          [](const law::Zero&) { return ControlValue{}; },
          [&](const law::FullSum&) {
            const Sums s = plain_sums(spins);
            return ControlValue{s.y, s.x};
          },
          [&](const law::Weighted&) {
            const Sums s = weighted_sums(spins, weights, spins.size());
            return ControlValue{s.y, s.x};
          },
          [&](const law::Truncated& t) {
            if (t.n < 1 || t.n > spins.size()) validate(t, spins.size());
            const Sums s = weighted_sums(spins, weights, t.n);
            return ControlValue{s.y, s.x};
          },
          [&](const law::RadiationDamping&) {
            const Sums s = plain_sums(spins);
            const double p = static_cast<double>(spins.size());
            return ControlValue{s.y / p, s.x / p};
          },
      },
      law);
}

ControlValue control_value(const ControlLaw& law, const EnsembleState& s) {
  return control_value(law, raw(s.spins()), s.weights());
}

void bloch_rhs(std::span<const Vec3> spins, std::span<const double> freqs,
               const ControlValue& u, std::span<Vec3> out) {
  check_sizes(spins.size(), freqs.size(), "bloch_rhs");
  check_sizes(spins.size(), out.size(), "bloch_rhs");
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const double e = freqs[i];
    const Vec3& v = spins[i];
    out[i] = Vec3(-e * v.y() + u.u2 * v.z(), e * v.x() + u.u1 * v.z(),
                  -u.u2 * v.x() - u.u1 * v.y());
  }
}

TangentCollection bloch_rhs(const EnsembleState& s, const ControlValue& u) {
  const auto spins = raw(s.spins());
  TangentCollection out(s.size());
  bloch_rhs(spins, s.freqs(), u, out);
  return out;
}

double cutoff_scalar(double x, double b) { return std::clamp(x, -b, b); }

Vec3 cutoff_radial(const Vec3& w, double a) {
  const double n = w.norm();
  return n <= a ? w : Vec3(a * w / n);
}

TangentCollection cutoff_rhs(std::span<const Vec3> spins,
                             std::span<const double> freqs,
                             std::span<const double> weights,
                             const CutoffParams& params) {
  check_sizes(spins.size(), freqs.size(), "cutoff_rhs");
  check_sizes(spins.size(), weights.size(), "cutoff_rhs");
  if (!(params.a > 1.0) || !(params.b > 1.0)) {
    throw std::invalid_argument("cutoff_rhs: a and b must exceed 1");
  }
  // Generators of the Larmor rotation and of the two transverse controls.
  Eigen::Matrix3d A;
  A << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  Eigen::Matrix3d B;
  B << 0, 0, 1, 0, 0, 0, -1, 0, 0;
  Eigen::Matrix3d C;
  C << 0, 0, 0, 0, 0, 1, 0, -1, 0;

  const Sums s = weighted_sums(spins, weights, spins.size());
  const double ux = cutoff_scalar(s.x, params.b);
  const double uy = cutoff_scalar(s.y, params.b);

  TangentCollection out(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const Vec3 w = cutoff_radial(spins[i], params.a);
    const Vec3 a = A * w;
    const Vec3 b = B * w;
    const Vec3 c = C * w;
    // Summation order matches bloch_rhs so both agree bit-for-bit on S.
    out[i] = Vec3(freqs[i] * a.x() + ux * b.x(), freqs[i] * a.y() + uy * c.y(),
                  ux * b.z() + uy * c.z());
  }
  return out;
}

void rde_rhs(std::span<const Vec3> spins, std::span<const double> freqs,
             double rate, int sign, std::span<Vec3> out) {
  check_sizes(spins.size(), freqs.size(), "rde_rhs");
  check_sizes(spins.size(), out.size(), "rde_rhs");
  if (!(rate > 0.0)) throw std::invalid_argument("rde_rhs: rate must be > 0");
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("rde_rhs: sign must be +1 or -1");
  }
  if (spins.empty()) throw std::invalid_argument("rde_rhs: need p >= 1");
  const Sums s = plain_sums(spins);
  const double p = static_cast<double>(spins.size());
  const double xbar = s.x / p;
  const double ybar = s.y / p;
  const double sg = static_cast<double>(sign);
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const double e = freqs[i];
    const Vec3& v = spins[i];
    out[i] = sg * Vec3(-e * v.y() - rate * v.z() * xbar,
                       e * v.x() - rate * v.z() * ybar,
                       rate * (v.x() * xbar + v.y() * ybar));
  }
}

TangentCollection rde_rhs(const EnsembleState& s, double rate, int sign) {
  const auto spins = raw(s.spins());
  TangentCollection out(s.size());
  rde_rhs(spins, s.freqs(), rate, sign, out);
  return out;
}

void closed_loop_rhs(const ControlLaw& law, std::span<const Vec3> spins,
                     std::span<const double> freqs,
                     std::span<const double> weights, std::span<Vec3> out) {
  if (const auto* r = std::get_if<law::RadiationDamping>(&law)) {
    rde_rhs(spins, freqs, r->rate, r->sign, out);
    return;
  }
  bloch_rhs(spins, freqs, control_value(law, spins, weights), out);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Rk4Renormalized:
      return "rk4";
    case Method::LieEulerRodrigues:
      return "lie";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "rk4") return Method::Rk4Renormalized;
  if (text == "lie") return Method::LieEulerRodrigues;
  throw std::invalid_argument("unknown integrator method '" + text +
                              "' (expected rk4 or lie)");
}

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) {
    throw std::invalid_argument("integrator step h must be > 0");
  }
  if (!(cfg.t_final >= cfg.h) || !std::isfinite(cfg.t_final)) {
    throw std::invalid_argument("integrator t_final must be >= h");
  }
}

Vec3 rodrigues_rotate(const Vec3& v, const Vec3& omega, double h) {
  const double speed = omega.norm();
  if (speed == 0.0) return v;
  const Vec3 k = omega / speed;
  const double theta = speed * h;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
}

namespace {

// Stepping on flat buffers; shared by step() and integrate().
class Stepper {
 public:
  Stepper(const ControlLaw& law, std::span<const double> freqs,
          std::span<const double> weights, Method method)
      : law_(law),
        freqs_(freqs),
        weights_(weights),
        method_(method),
        k1_(freqs.size()),
        k2_(freqs.size()),
        k3_(freqs.size()),
        k4_(freqs.size()),
        tmp_(freqs.size()) {}

  void advance(std::vector<Vec3>& x, double h) {
    if (method_ == Method::Rk4Renormalized) {
      rk4(x, h);
    } else {
      lie(x, h);
    }
  }

 private:
  void rhs(std::span<const Vec3> x, std::span<Vec3> out) {
    closed_loop_rhs(law_, x, freqs_, weights_, out);
  }

  void rk4(std::vector<Vec3>& x, double h) {
    const std::size_t p = x.size();
    rhs(x, k1_);
    for (std::size_t i = 0; i < p; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
    rhs(tmp_, k2_);
    for (std::size_t i = 0; i < p; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    rhs(tmp_, k3_);
    for (std::size_t i = 0; i < p; ++i) tmp_[i] = x[i] + h * k3_[i];
    rhs(tmp_, k4_);
    for (std::size_t i = 0; i < p; ++i) {
      x[i] += (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
      x[i].normalize();
    }
  }

  // Angular velocity of spin i under the frozen feedback: the field is
  // X' = omega_i x X.
  void lie(std::vector<Vec3>& x, double h) {
    const std::size_t p = x.size();
    if (const auto* r = std::get_if<law::RadiationDamping>(&law_)) {
      const ControlValue avg = control_value(law_, x, weights_);
      const double sg = static_cast<double>(r->sign);
      for (std::size_t i = 0; i < p; ++i) {
        const Vec3 omega(sg * r->rate * avg.u1, -sg * r->rate * avg.u2,
                         sg * freqs_[i]);
        x[i] = rodrigues_rotate(x[i], omega, h);
      }
      return;
    }
    const ControlValue u = control_value(law_, x, weights_);
    for (std::size_t i = 0; i < p; ++i) {
      x[i] = rodrigues_rotate(x[i], Vec3(-u.u1, u.u2, freqs_[i]), h);
    }
  }

  const ControlLaw& law_;
  std::span<const double> freqs_;
  std::span<const double> weights_;
  Method method_;
  std::vector<Vec3> k1_, k2_, k3_, k4_, tmp_;
};

std::vector<SpinState> wrap(const std::vector<Vec3>& x) {
  std::vector<SpinState> out;
  out.reserve(x.size());
  for (const auto& v : x) out.push_back(SpinState::from_unit(v));
  return out;
}

}  // namespace

EnsembleState step(const EnsembleState& s, const ControlLaw& law,
                   const IntegratorConfig& cfg) {
  validate(law, s.size());
  if (!(cfg.h > 0.0)) throw std::invalid_argument("step: h must be > 0");
  auto x = raw(s.spins());
  Stepper stepper(law, s.freqs(), s.weights(), cfg.method);
  stepper.advance(x, cfg.h);
  return s.with_spins(wrap(x));
}

EnsembleState Trajectory::state_at(std::size_t k) const {
  return EnsembleState(freqs, weights, spins.at(k));
}

Trajectory integrate(const EnsembleState& s0, const ControlLaw& law,
                     const IntegratorConfig& cfg, std::size_t stride) {
  validate(law, s0.size());
  validate(cfg);
  if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
  // Checks the weight convention up front.
  (void)lyapunov(law, s0);

  Trajectory traj;
  traj.freqs = s0.freqs();
  traj.weights = s0.weights();
  traj.law = law;
  traj.config = cfg;
  traj.sample_stride = stride;

  const auto n_steps = static_cast<std::size_t>(
      std::ceil(cfg.t_final / cfg.h - 1e-9));
  const std::size_t n_samples = n_steps / stride + 2;
  traj.times.reserve(n_samples);
  traj.spins.reserve(n_samples);
  traj.controls.reserve(n_samples);
  traj.lyapunov.reserve(n_samples);

  auto x = raw(s0.spins());
  Stepper stepper(law, traj.freqs, traj.weights, cfg.method);

  const auto record = [&](double t, double v) {
    traj.times.push_back(t);
    traj.spins.push_back(wrap(x));
    traj.controls.push_back(control_value(law, x, traj.weights));
    traj.lyapunov.push_back(v);
  };

  double v_prev = lyapunov(law, x, traj.weights);
  record(0.0, v_prev);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t = k == n_steps ? cfg.t_final : static_cast<double>(k) * cfg.h;
    const double h =
        k == n_steps ? t - static_cast<double>(k - 1) * cfg.h : cfg.h;
    stepper.advance(x, h);

    double drift = 0.0;
    for (const auto& v : x) {
      const double n = v.norm();
      if (!std::isfinite(n)) {
        std::ostringstream msg;
        msg << "integrate: non-finite state at t = " << t << " (step " << k
            << ", law " << to_string(law) << ")";
        throw std::runtime_error(msg.str());
      }
      drift = std::max(drift, std::abs(n - 1.0));
    }
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);

    const double v = lyapunov(law, x, traj.weights);
    traj.max_lyapunov_increase = std::max(traj.max_lyapunov_increase, v - v_prev);
    v_prev = v;

    if (k % stride == 0 || k == n_steps) record(t, v);
  }
  traj.steps = n_steps;
  return traj;
}

}  // namespace blochstab
