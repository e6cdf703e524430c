#include "twostrain/simulate.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "twostrain/format.h"

namespace twostrain {
namespace {

constexpr int kMaxDim = 5;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

// Dormand-Prince 5(4) tableau, error weights and dense-output weights.
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                 a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                 e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double kSafe = 0.9;
constexpr double kFacl = 0.2;
constexpr double kFacr = 10.0;
constexpr double kBeta = 0.04;

constexpr double kInvarianceSlack = 1e-6;
constexpr double kFinalBoundSlack = 1e-3;
constexpr double kConvergenceDistance = 1e-3;

Vec pack(const State& x) {
  Vec y(x.R ? 5 : 4);
  y.head<4>() = x.vec();
  if (x.R) y[4] = *x.R;
  return y;
}

State unpack(const Vec& y) {
  State x = State::from(y.head<4>());
  if (y.size() == 5) x.R = y[4];
  return x;
}

class Rhs {
 public:
  explicit Rhs(const Model& model) : model_(model) {}

  // False when the stage state is non-finite, so the step is rejected
  // rather than the run aborted.
  bool operator()(const Vec& y, Vec& out) const {
    if (!y.allFinite()) return false;
    out = pack(vector_field(model_, unpack(y)));
    return out.allFinite();
  }

 private:
  const Model& model_;
};

double scaled_rms(const Vec& v, const Vec& scale) {
  return std::sqrt((v.array() / scale.array()).square().mean());
}

double initial_step(const Rhs& rhs, const Vec& y, const Vec& f0,
                    const IntegratorOptions& opts) {
  const Vec sk = (opts.atol + opts.rtol * y.array().abs()).matrix();
  const double dy = scaled_rms(y, sk);
  const double df = scaled_rms(f0, sk);
  double h0 = (dy < 1e-5 || df < 1e-5) ? 1e-6 : 0.01 * dy / df;
  h0 = std::min({h0, opts.max_step, opts.t_end});
  Vec f1;
  if (!rhs(y + h0 * f0, f1)) return h0 * 1e-3;
  const double ddf = scaled_rms(f1 - f0, sk) / h0;
  const double m = std::max(df, ddf);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                               : std::pow(0.01 / m, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, opts.max_step, opts.t_end});
}

std::vector<double> output_times(const IntegratorOptions& opts) {
  if (!opts.sample_times.empty()) return opts.sample_times;
  std::vector<double> out;
  const double dt = opts.sample_interval;
  const auto n = static_cast<long>(std::floor(opts.t_end / dt * (1.0 + 1e-12)));
  out.reserve(static_cast<std::size_t>(n) + 2);
  for (long i = 0; i <= n; ++i) out.push_back(std::min(i * dt, opts.t_end));
  if (out.back() < opts.t_end) out.push_back(opts.t_end);
  return out;
}

// Continuous extension of one accepted step.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec r1, r2, r3, r4, r5;

  Vec at(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
};

bool in_omega1(const State& x, const ModelParams& p) {
  return x.S <= p.S0() && x.V1 <= p.V10();
}

// Zero components in (-atol, 0). Returns the index of the first component
// below -atol, or -1.
int clamp_negative(Vec& y, double atol) {
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0) {
      if (y[i] < -atol) return i;
      y[i] = 0.0;
    }
  }
  return -1;
}

constexpr const char* kComponentNames[] = {"S", "V1", "I1", "I2", "R"};

TrajectoryEvent tolerance_failure(double t, int component, double value) {
  std::ostringstream msg;
  msg << "component " << kComponentNames[component] << " = " << value
      << " below -atol";
  return {t, EventKind::kToleranceFailure, std::nullopt, msg.str()};
}

}  // namespace

void IntegratorOptions::validate() const {
  if (!(rtol > 0.0) || !std::isfinite(rtol))
    throw DomainError("integrator: rtol must be > 0");
  if (!(atol > 0.0) || !std::isfinite(atol))
    throw DomainError("integrator: atol must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw DomainError("integrator: t_end must be > 0");
  if (!(max_step > 0.0)) throw DomainError("integrator: max_step must be > 0");
  if (!(convergence_tol > 0.0))
    throw DomainError("integrator: convergence_tol must be > 0");
  if (!(tail_window >= 0.0))
    throw DomainError("integrator: tail_window must be >= 0");
  if (max_steps <= 0) throw DomainError("integrator: max_steps must be > 0");
  if (sample_times.empty()) {
    if (!(sample_interval > 0.0) || !std::isfinite(sample_interval))
      throw DomainError("integrator: sample_interval must be > 0");
  } else {
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      const double t = sample_times[i];
      if (!(t >= 0.0 && t <= t_end))
        throw DomainError("integrator: sample_times must lie in [0, t_end]");
      if (i > 0 && !(t > sample_times[i - 1]))
        throw DomainError("integrator: sample_times must be strictly increasing");
    }
  }
}

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::kEnteredOmega1:
      return "EnteredOmega1";
    case EventKind::kConvergedTo:
      return "ConvergedTo";
    case EventKind::kToleranceFailure:
      return "ToleranceFailure";
  }
  return "?";
}

bool Trajectory::truncated() const {
  return find(EventKind::kToleranceFailure) != nullptr;
}

const TrajectoryEvent* Trajectory::find(EventKind kind) const {
  for (const auto& e : events)
    if (e.kind == kind) return &e;
  return nullptr;
}

Trajectory integrate(const Model& model, const State& x0,
                     const IntegratorOptions& opts) {
  opts.validate();
  const Vec y0 = pack(x0);
  if (!y0.allFinite() || (y0.array() < 0.0).any())
    throw DomainError("integrate: initial state must be finite and >= 0");

  const Rhs rhs(model);
  const std::vector<double> samples = output_times(opts);
  std::size_t next_sample = 0;

  Trajectory traj;
  traj.times.reserve(samples.size());
  traj.states.reserve(samples.size());

  bool inside_omega1 = in_omega1(x0, model.params);
  if (inside_omega1) traj.events.push_back({0.0, EventKind::kEnteredOmega1, {}, {}});

  Vec y = y0;
  double t = 0.0;
  if (!samples.empty() && samples.front() == 0.0) {
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    ++next_sample;
  }

  Vec k1, k2, k3, k4, k5, k6, k7;
  if (!rhs(y, k1)) throw DomainError("integrate: vector field not finite at x0");
  double h = initial_step(rhs, y, k1, opts);
  double facold = 1e-4;
  bool rejected = false;

  auto step_underflow = [&](const char* why) {
    std::ostringstream msg;
    msg << "integrate: " << why << " at t = " << t << " (h = " << h << ")";
    throw IntegrationError(msg.str(), t, unpack(y));
  };

  while (t < opts.t_end) {
    if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps)
      step_underflow("step budget exhausted");

    h = std::min(h, opts.max_step);
    bool last = false;
    if (t + h >= opts.t_end) {
      h = opts.t_end - t;
      last = true;
    }
    if (h <= 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      step_underflow("step size underflow");

    Vec y_new;
    bool ok =
        rhs(y + h * a21 * k1, k2) &&
        rhs(y + h * (a31 * k1 + a32 * k2), k3) &&
        rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4) &&
        rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5) &&
        rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
    if (ok) {
      y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      ok = rhs(y_new, k7);
    }
    if (!ok) {
      h *= kFacl;
      rejected = true;
      ++traj.rejected_steps;
      continue;
    }

    const Vec err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Vec sk = (opts.atol + opts.rtol * y.array().abs().max(y_new.array().abs())).matrix();
    const double err = scaled_rms(err_vec, sk);

    const double fac11 = std::pow(err, 0.2 - kBeta * 0.75);
    double fac = fac11 / std::pow(facold, kBeta);
    fac = std::clamp(fac / kSafe, 1.0 / kFacr, 1.0 / kFacl);
    double h_new = h / fac;

    if (err > 1.0) {
      h /= std::min(1.0 / kFacl, fac11 / kSafe);
      rejected = true;
      ++traj.rejected_steps;
      continue;
    }

    ++traj.accepted_steps;
    facold = std::max(err, 1e-4);
    if (rejected) h_new = std::min(h_new, h);
    rejected = false;

    const double t_new = last ? opts.t_end : t + h;

    DenseStep dense;
    dense.t0 = t;
    dense.h = h;
    dense.r1 = y;
    dense.r2 = y_new - y;
    dense.r3 = h * k1 - dense.r2;
    dense.r4 = dense.r2 - h * k7 - dense.r3;
    dense.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    bool failed = false;
    while (next_sample < samples.size() && samples[next_sample] <= t_new) {
      const double ts = samples[next_sample];
      Vec ys = (ts == t_new) ? y_new : dense.at(ts);
      if (const int bad = clamp_negative(ys, opts.atol); bad >= 0) {
        traj.events.push_back(tolerance_failure(ts, bad, ys[bad]));
        failed = true;
        break;
      }
      traj.times.push_back(ts);
      traj.states.push_back(unpack(ys));
      ++next_sample;
    }
    if (failed) break;

    const Vec unclamped = y_new;
    if (const int bad = clamp_negative(y_new, opts.atol); bad >= 0) {
      traj.events.push_back(tolerance_failure(t_new, bad, y_new[bad]));
      break;
    }

    y = y_new;
    t = t_new;
    h = h_new;
    if (y == unclamped) {
      k1 = k7;
    } else if (!rhs(y, k1)) {
      step_underflow("vector field not finite after clamping");
    }

    if (!inside_omega1 && in_omega1(unpack(y), model.params)) {
      inside_omega1 = true;
      traj.events.push_back({t, EventKind::kEnteredOmega1, {}, {}});
    }
  }
  return traj;
}

InvarianceReport monitor_invariance(const Trajectory& traj,
                                    const ModelParams& params) {
  if (traj.empty())
    throw PreconditionError("monitor_invariance: empty trajectory");

  const double N_max = params.N_max();
  const double S0 = params.S0();
  const double V10 = params.V10();

  InvarianceReport report;
  auto flag = [&report](double t, std::string what) {
    ++report.violations;
    if (!report.first_violation) report.first_violation = {t, std::move(what)};
  };

  bool in_omega = false;
  bool in_omega1 = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& x = traj.states[i];
    const double t = traj.times[i];
    const double N = x.total();

    if (in_omega && N > N_max * (1.0 + kInvarianceSlack)) {
      report.omega_ok = false;
      flag(t, "N = " + format_double(N) + " left Omega (Lambda/mu = " +
                  format_double(N_max) + ")");
    }
    if (N <= N_max) in_omega = true;

    if (in_omega1 && (x.S > S0 * (1.0 + kInvarianceSlack) ||
                      x.V1 > V10 * (1.0 + kInvarianceSlack))) {
      report.omega1_ok = false;
      flag(t, "(S, V1) = (" + format_double(x.S) + ", " + format_double(x.V1) +
                  ") left Omega1");
    }
    if (x.S <= S0 && x.V1 <= V10) in_omega1 = true;
  }

  report.final_N = traj.states.back().total();
  if (report.final_N > N_max * (1.0 + kFinalBoundSlack)) {
    report.final_bound_ok = false;
    flag(traj.times.back(), "final N = " + format_double(report.final_N) +
                                " exceeds Lambda/mu (1 + 1e-3)");
  }
  return report;
}

double relative_distance(const State& x, const State& target) {
  const double scale = target.vec().cwiseAbs().maxCoeff();
  const double diff = (x.vec() - target.vec()).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

std::optional<TrajectoryEvent> detect_convergence(
    const Model& model, const Trajectory& traj,
    std::span<const Equilibrium> candidates, const IntegratorOptions& opts) {
  if (traj.empty() || candidates.empty()) return std::nullopt;

  const State& final_state = traj.states.back();
  const Equilibrium* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : candidates) {
    const double d = relative_distance(final_state, e.point);
    if (d < best) {
      best = d;
      nearest = &e;
    }
  }

  const double t_start = traj.times.back() - opts.tail_window;
  double worst_field = 0.0;
  double worst_distance = 0.0;
  for (std::size_t i = traj.size(); i-- > 0 && traj.times[i] >= t_start;) {
    const double field = residual_norm(model, traj.states[i]);
    const double dist = relative_distance(traj.states[i], nearest->point);
    if (!(field < opts.convergence_tol) || !(dist < kConvergenceDistance))
      return std::nullopt;
    worst_field = std::max(worst_field, field);
    worst_distance = std::max(worst_distance, dist);
  }

  std::ostringstream detail;
  detail << "tail max |f| = " << worst_field
         << ", max relative distance = " << worst_distance;
  return TrajectoryEvent{traj.times.back(), EventKind::kConvergedTo,
                         nearest->kind, detail.str()};
}

PersistenceProxy persistence_proxy(const Trajectory& traj,
                                   double burn_in_fraction) {
  if (traj.empty())
    throw PreconditionError("persistence_proxy: empty trajectory");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction <= 0.5))
    throw PreconditionError(
        "persistence_proxy: trajectory must span at least twice the burn-in "
        "(burn_in_fraction in [0, 0.5])");

  const double t0 = traj.times.front();
  const double cut = t0 + burn_in_fraction * (traj.times.back() - t0);
  PersistenceProxy out{std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < cut) continue;
    out.min_I1_tail = std::min(out.min_I1_tail, traj.states[i].I1);
    out.min_I2_tail = std::min(out.min_I2_tail, traj.states[i].I2);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const bool with_R = !traj.empty() && traj.states.front().R.has_value();
  os << "t,S,V1,I1,I2" << (with_R ? ",R" : "") << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& x = traj.states[i];
    os << format_double(traj.times[i]) << ',' << format_double(x.S) << ','
       << format_double(x.V1) << ',' << format_double(x.I1) << ','
       << format_double(x.I2);
    if (with_R) os << ',' << format_double(x.R.value_or(0.0));
    os << '\n';
  }
}

}  // namespace twostrain
