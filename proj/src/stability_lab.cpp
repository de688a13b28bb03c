#include "vtol/stability_lab.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numbers>
#include <thread>

#include "vtol/errors.hpp"

namespace vtol::lab {

namespace {

Mat3 projector(const Vec3& u) { return Mat3::Identity() - u * u.transpose(); }

DesiredFrame make_frame(const Rotation& frame, const Vec3& j_d, FlightRegime regime) {
  DesiredFrame f;
  f.i_bar = frame.i();
  f.j_bar = frame.j();
  f.k_bar = frame.k();
  f.i_d = frame.i();
  f.j_d = j_d;
  f.regime = regime;
  f.complete = true;
  return f;
}

// Least-squares slope of log E against t over samples [from, end) with E above
// a floor; returns -slope.
double fit_rate(const std::vector<double>& t, const std::vector<double>& E, std::size_t from) {
  constexpr double kFloor = 1e-26;
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = from; i < t.size(); ++i) {
    if (!(E[i] > kFloor)) break;
    const double y = std::log(E[i]);
    n += 1;
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double den = n * stt - st * st;
  if (n < 3 || den <= 0) return std::numeric_limits<double>::infinity();
  return -(n * sty - st * sy) / den;
}

}  // namespace

double lyap_E(const Rotation& R, const Rotation& frame) {
  return 0.5 * (R.matrix() - frame.matrix()).squaredNorm();
}

double lyap_E_axes(const Rotation& R, const Rotation& frame) {
  return (1.0 - R.i().dot(frame.i())) + (1.0 - R.j().dot(frame.j())) +
         (1.0 - R.k().dot(frame.k()));
}

double lyap_E_trace(const Rotation& R, const Rotation& frame) {
  return (Mat3::Identity() - R.matrix() * frame.matrix().transpose()).trace();
}

double identity_check(const Mat3& Rt, const Vec3& a) {
  const Mat3 Pa = antisym(Rt);
  const double lhs = a.dot(Pa * Pa * a);
  const double rhs = -0.5 * a.dot((Mat3::Identity() - Rt * Rt) * a);
  return std::abs(lhs - rhs);
}

Mat3 q_matrix(double k_k, double k_j, const Vec3& k_bar, const Vec3& j_bar, double k_i,
              const Vec3& i_bar) {
  Mat3 q = k_k * projector(k_bar) + k_j * projector(j_bar);
  if (k_i != 0.0) q += k_i * projector(i_bar);
  return q;
}

double q_rate_bound(double k_k, double k_j, const Vec3& k_bar, const Vec3& j_bar) {
  // Q = (k_k + k_j) I - M with M = k_k kk^T + k_j jj^T, whose nonzero
  // eigenvalues live in span{k, j}.
  const double c = k_bar.normalized().dot(j_bar.normalized());
  const double tr = k_k + k_j;
  const double det = k_k * k_j * (1.0 - c * c);
  const double mu_max = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
  return std::max(0.0, tr - mu_max);
}

double lyap_rate(const Rotation& R, const Rotation& frame, const Mat3& Q) {
  const Mat3 Rt = R.matrix() * frame.matrix().transpose();
  const Vec3 x = vex(antisym(Rt));
  return -2.0 * x.dot(Q * x);
}

void KinematicTrial::validate() const {
  if (!(dt > 0.0 && dt <= 0.01)) throw ContractViolation("kinematic trial: dt must lie in (0, 0.01]");
  if (!(horizon > 0.0)) throw ContractViolation("kinematic trial: horizon must be positive");
  if (!(airspeed >= 0.0) || !(eps > 0.0)) throw ContractViolation("kinematic trial: bad airspeed/eps");
  if (!frame_rate.allFinite()) throw ContractViolation("kinematic trial: non-finite frame rate");
  gains.validate();
}

Rotation KinematicTrial::frame_at(double t) const {
  const double w = frame_rate.norm();
  if (w == 0.0) return frame0;
  return Rotation::about_axis(frame_rate / w, w * t) * frame0;
}

Vec3 KinematicTrial::lateral_target(const Rotation& frame) const {
  const Vec3 v_a = airspeed * frame.i();
  const Vec3 c = frame.k().cross(v_a);
  return c / (eps + c.norm());
}

Mat3 KinematicTrial::q() const {
  if (law == RateLaw::FullFrame)
    return q_matrix(gains.k_k, gains.k_j, frame0.k(), frame0.j(), gains.k_i, frame0.i());
  const double kj_eff = gains.k_j * lateral_target(frame0).norm();
  return q_matrix(gains.k_k, kj_eff, frame0.k(), frame0.j());
}

Vec3 trial_omega_star(const KinematicTrial& trial, const Mat3& R, double t) {
  const Rotation frame = trial.frame_at(t);
  const Rotation Rr = Rotation::unchecked(R);
  FrameRate rate{trial.frame_rate, true};
  Vec3 body;
  if (trial.law == RateLaw::FullFrame) {
    body = omega_star_high(make_frame(frame, frame.j(), FlightRegime::HighSpeed), Rr, rate,
                           trial.gains);
  } else {
    body = omega_star_low(trial.lateral_target(frame), frame.k(), Rr, rate, trial.gains);
  }
  return R * body;
}

KinematicTrace simulate_kinematic(const KinematicTrial& trial) {
  trial.validate();
  KinematicTrace tr;
  const Mat3 Q = trial.q();
  tr.lambda_min_q = Eigen::SelfAdjointEigenSolver<Mat3>(Q, Eigen::EigenvaluesOnly).eigenvalues()(0);

  const int steps = static_cast<int>(std::ceil(trial.horizon / trial.dt - 1e-9));
  tr.t.reserve(steps + 1);
  tr.E.reserve(steps + 1);
  tr.k_misalignment.reserve(steps + 1);

  Rotation R = trial.R0;
  auto record = [&](double t) {
    const Rotation f = trial.frame_at(t);
    tr.t.push_back(t);
    tr.E.push_back(lyap_E(R, f));
    tr.k_misalignment.push_back(1.0 - R.k().dot(f.k()));
  };
  record(0.0);

  const double h = trial.dt;
  auto rhs = [&](const Mat3& M, double t) -> Mat3 { return skew(trial_omega_star(trial, M, t)) * M; };
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const Mat3& M = R.matrix();
    const Mat3 k1 = rhs(M, t);
    const Mat3 k2 = rhs(M + 0.5 * h * k1, t + 0.5 * h);
    const Mat3 k3 = rhs(M + 0.5 * h * k2, t + 0.5 * h);
    const Mat3 k4 = rhs(M + h * k3, t + h);
    const Mat3 next = M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    try {
      R = reorthonormalize(next);
    } catch (const NumericalDivergence& e) {
      tr.diverged = true;
      tr.failure = e.what();
      break;
    }
    record((n + 1) * h);
  }
  tr.fitted_rate = fit_rate(tr.t, tr.E, tr.t.size() / 2);
  return tr;
}

double k_axis_closed_form(double misalignment0, double k_k, double t) {
  const double x0 = 0.5 * misalignment0;
  const double decay = std::exp(-2.0 * k_k * t);
  return 2.0 * x0 * decay / (1.0 - x0 + x0 * decay);
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::Vector4d q;
  do {
    q = Eigen::Vector4d(n01(rng), n01(rng), n01(rng), n01(rng));
  } while (q.norm() < 1e-6);
  return Rotation::from_quaternion(q.normalized());
}

namespace {

Eigen::Vector4d quat_of(const Rotation& R) { return R.quaternion(); }

}  // namespace

TrialOutcome run_full_frame_trial(const KinematicTrial& trial, const Prop1Options& opt) {
  TrialOutcome out;
  out.q0 = quat_of(trial.R0);
  out.frame_q = quat_of(trial.frame0);
  const Mat3 Rt0 = trial.R0.matrix() * trial.frame0.matrix().transpose();
  if (rotation_angle(Rt0) > std::numbers::pi - opt.antipodal_exclusion) {
    out.excluded = true;
    out.passed = true;
    return out;
  }
  const KinematicTrace tr = simulate_kinematic(trial);
  if (tr.diverged) {
    out.reason = "diverged: " + tr.failure;
    return out;
  }
  for (std::size_t i = 1; i < tr.E.size(); ++i) {
    // Below ~1e-24 the samples are rounding noise.
    if (tr.E[i - 1] < 1e-24) break;
    if (!(tr.E[i] < tr.E[i - 1])) {
      out.reason = "E not decreasing at t=" + std::to_string(tr.t[i]);
      return out;
    }
  }
  if (tr.E.front() == 0.0) {
    out.passed = true;
    out.rate_ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  out.rate_ratio = tr.lambda_min_q > 0 ? tr.fitted_rate / tr.lambda_min_q : 0.0;
  if (!(tr.fitted_rate >= opt.rate_factor * tr.lambda_min_q)) {
    out.reason = "fitted rate " + std::to_string(tr.fitted_rate) + " below " +
                 std::to_string(opt.rate_factor) + " * lambda_min " +
                 std::to_string(tr.lambda_min_q);
    return out;
  }
  out.passed = true;
  return out;
}

TrialOutcome run_k_axis_trial(const KinematicTrial& trial, const Prop1Options& opt) {
  TrialOutcome out;
  out.q0 = quat_of(trial.R0);
  out.frame_q = quat_of(trial.frame0);
  const double c = std::clamp(trial.R0.k().dot(trial.frame0.k()), -1.0, 1.0);
  if (std::acos(c) > std::numbers::pi - opt.antipodal_exclusion) {
    out.excluded = true;
    out.passed = true;
    return out;
  }
  const KinematicTrace tr = simulate_kinematic(trial);
  if (tr.diverged) {
    out.reason = "diverged: " + tr.failure;
    return out;
  }
  const double m0 = tr.k_misalignment.front();
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const double err =
        std::abs(tr.k_misalignment[i] - k_axis_closed_form(m0, trial.gains.k_k, tr.t[i]));
    out.ode_error = std::max(out.ode_error, err);
  }
  if (!(out.ode_error <= opt.ode_tolerance)) {
    out.reason = "k-axis trajectory deviates from closed form by " + std::to_string(out.ode_error);
    return out;
  }
  if (!(tr.k_misalignment.back() <= opt.convergence_floor)) {
    out.reason = "k did not converge: 1 - k.k_bar = " + std::to_string(tr.k_misalignment.back());
    return out;
  }
  out.passed = true;
  return out;
}

Prop1Report prop1_montecarlo(int trials, std::uint64_t seed, const Prop1Options& opt) {
  if (trials < 1) throw ContractViolation("prop1_montecarlo: trials must be >= 1");

  std::vector<TrialOutcome> full(trials), kax(trials);
  auto run_one = [&](int i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    KinematicTrial t;
    t.gains = opt.gains;
    t.dt = opt.dt;
    t.law = RateLaw::LowSpeed;
    // The first trial starts on the target as a trivial case.
    t.frame0 = random_rotation(rng);
    t.R0 = i == 0 ? t.frame0 : random_rotation(rng);
    t.airspeed = opt.airspeed;
    t.horizon = opt.horizon_full;
    full[i] = run_full_frame_trial(t, opt);

    t.R0 = random_rotation(rng);
    t.frame0 = random_rotation(rng);
    t.airspeed = 0.0;
    t.horizon = opt.horizon_k;
    kax[i] = run_k_axis_trial(t, opt);
  };

  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) run_one(i);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  Prop1Report rep;
  rep.trials = trials;
  rep.seed = seed;
  auto summarize = [&](const std::vector<TrialOutcome>& v, RegimeSummary& s, const char* regime) {
    double sum = 0;
    int counted = 0;
    s.min_rate_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& o = v[i];
      if (o.excluded) {
        ++s.excluded;
        continue;
      }
      if (o.passed) ++s.passed; else ++s.failed;
      if (std::isfinite(o.rate_ratio) && o.rate_ratio > 0) {
        s.min_rate_ratio = std::min(s.min_rate_ratio, o.rate_ratio);
        sum += o.rate_ratio;
        ++counted;
      }
      s.max_ode_error = std::max(s.max_ode_error, o.ode_error);
      if (!o.passed) {
        rep.counterexamples.push_back({{"regime", regime},
                                       {"trial", i},
                                       {"R0_wxyz", {o.q0(0), o.q0(1), o.q0(2), o.q0(3)}},
                                       {"frame_wxyz", {o.frame_q(0), o.frame_q(1), o.frame_q(2), o.frame_q(3)}},
                                       {"reason", o.reason}});
      }
    }
    if (counted == 0) s.min_rate_ratio = 0.0;
    s.mean_rate_ratio = counted ? sum / counted : 0.0;
  };
  summarize(full, rep.full_frame, "full_frame");
  summarize(kax, rep.k_axis, "k_axis");
  return rep;
}

nlohmann::json to_json(const Prop1Report& r) {
  auto regime = [](const RegimeSummary& s) {
    return nlohmann::json{{"passed", s.passed},
                          {"failed", s.failed},
                          {"excluded", s.excluded},
                          {"min_rate_ratio", s.min_rate_ratio},
                          {"mean_rate_ratio", s.mean_rate_ratio},
                          {"max_ode_error", s.max_ode_error}};
  };
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"all_passed", r.all_passed()},
          {"full_frame", regime(r.full_frame)},
          {"k_axis", regime(r.k_axis)},
          {"counterexamples", r.counterexamples}};
}

}  // namespace vtol::lab
