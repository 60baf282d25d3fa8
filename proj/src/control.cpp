#include "mvtk/control.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace mvtk {

ControlChannel ControlChannel::current(std::vector<double> j1, std::string label) {
  ControlChannel ch;
  ch.kind = Kind::current_coupling;
  ch.j_profile.push_back(std::move(j1));
  ch.label = std::move(label);
  return ch;
}

ControlChannel ControlChannel::current2(std::vector<double> j1, std::vector<double> j2,
                                        std::string label) {
  ControlChannel ch;
  ch.kind = Kind::current_coupling;
  ch.j_profile.push_back(std::move(j1));
  ch.j_profile.push_back(std::move(j2));
  ch.label = std::move(label);
  return ch;
}

ControlChannel ControlChannel::shaping(std::vector<double> w, std::string label) {
  ControlChannel ch;
  ch.kind = Kind::casimir_shaping;
  ch.w = std::move(w);
  ch.label = std::move(label);
  return ch;
}

double ControlSignal::operator()(double t) const {
  switch (kind) {
    case Kind::constant:
      return amplitude;
    case Kind::sinusoid:
      return amplitude * std::sin(frequency * t + phase);
    case Kind::piecewise: {
      if (times.empty()) return 0.0;
      if (t < times.front()) return 0.0;
      std::size_t i = 0;
      while (i + 1 < times.size() && times[i + 1] <= t) ++i;
      return values.at(i);
    }
  }
  return 0.0;
}

bool channel_evaluable(const ControlChannel& ch) {
  return ch.kind == ControlChannel::Kind::casimir_shaping;
}

double channel_value(const ControlChannel& ch, const State& z, const PhaseGrid& grid) {
  if (!channel_evaluable(ch))
    throw std::invalid_argument(
        "channel_value: current-coupling functionals are affine in the vector "
        "potential and are evaluated only through derivatives and generators");
  validate_phase_shape(ch.w, grid, "ControlChannel.w");
  double acc = 0.0;
  if (grid.config == GridConfig::ES_1D1V) {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j = 0; j < grid.Nv; ++j) {
        const std::size_t k = grid.idx(ix, j);
        acc += grid.vweight(j) * ch.w[k] * z.f[k] * z.f[k];
      }
  } else {
    for (int ix = 0; ix < grid.Nx; ++ix)
      for (int j1 = 0; j1 < grid.Nv; ++j1)
        for (int j2 = 0; j2 < grid.Nv; ++j2) {
          const std::size_t k = grid.idx(ix, j1, j2);
          acc += grid.vweight(j1) * grid.vweight(j2) * ch.w[k] * z.f[k] * z.f[k];
        }
  }
  return 0.5 * acc * grid.dx();
}

FunctionalDerivative channel_functional_derivative(const ControlChannel& ch,
                                                   const State& z,
                                                   const PhaseGrid& grid) {
  validate_state(z, grid);
  FunctionalDerivative d = FunctionalDerivative::zeros(grid);
  if (ch.kind == ControlChannel::Kind::casimir_shaping) {
    validate_phase_shape(ch.w, grid, "ControlChannel.w");
    for (std::size_t k = 0; k < z.f.size(); ++k) d.d_f[k] = ch.w[k] * z.f[k];
    return d;
  }
  if (ch.j_profile.empty() ||
      static_cast<int>(ch.j_profile.size()) > grid.vdim())
    throw std::invalid_argument("ControlChannel: current profile component count");
  validate_field_shape(ch.j_profile[0], grid, "ControlChannel.j_profile[0]");
  d.d_A1 = ch.j_profile[0];
  if (ch.j_profile.size() > 1) {
    validate_field_shape(ch.j_profile[1], grid, "ControlChannel.j_profile[1]");
    d.d_A2 = ch.j_profile[1];
  }
  return d;
}

StateTangent control_generator(const ControlChannel& ch, const State& z,
                               const PhaseGrid& grid, const Fourier& fx) {
  return hamiltonian_vector_field(channel_functional_derivative(ch, z, grid), z, grid, fx);
}

StateTangent controlled_rhs(const State& z, const PhaseGrid& grid, const Fourier& fx,
                            const std::vector<ControlChannel>& channels,
                            const ControlSchedule& schedule, double t) {
  if (channels.size() != schedule.u.size())
    throw std::invalid_argument("controlled_rhs: schedule/channel count mismatch");
  StateTangent out = rhs(z, grid, fx);
  for (std::size_t a = 0; a < channels.size(); ++a) {
    const double ua = schedule(a, t);
    if (ua == 0.0) continue;
    const StateTangent g = control_generator(channels[a], z, grid, fx);
    for (std::size_t i = 0; i < out.df.size(); ++i) out.df[i] += ua * g.df[i];
    for (std::size_t i = 0; i < out.dE1.size(); ++i) out.dE1[i] += ua * g.dE1[i];
    for (std::size_t i = 0; i < out.dE2.size(); ++i) out.dE2[i] += ua * g.dE2[i];
    for (std::size_t i = 0; i < out.dB3.size(); ++i) out.dB3[i] += ua * g.dB3[i];
  }
  return out;
}

double channel_power(const ControlChannel& ch, const State& z, const PhaseGrid& grid,
                     const Fourier& fx) {
  const FunctionalDerivative Hd = energy_derivative(z, grid);
  const FunctionalDerivative Bd = channel_functional_derivative(ch, z, grid);
  return mv_bracket(Hd, Bd, z, grid, fx);
}

PairingReport symmetry_breaking_pairing(const ControlChannel& ch, const Equilibrium& eq,
                                        const PhaseGrid& grid, const Fourier& fx) {
  PairingReport rep;
  const StateTangent dz = translation_direction(eq.state, grid, fx);
  const double n = tangent_norm2(dz, grid);
  if (n < 1e-13 * std::max(1.0, state_norm2(eq.state, grid))) {
    rep.trivially_zero = true;
    return rep;
  }
  const StateTangent g = control_generator(ch, eq.state, grid, fx);
  double acc = phase_inner(g.df, dz.df, grid) + field_inner(g.dE1, dz.dE1, grid);
  if (grid.config == GridConfig::EM_1D2V)
    acc += field_inner(g.dE2, dz.dE2, grid) + field_inner(g.dB3, dz.dB3, grid);
  rep.value = acc;
  return rep;
}

std::string ShiftReport::to_json() const {
  nlohmann::ordered_json j;
  j["u_star"] = std::vector<double>(u_star.data(), u_star.data() + u_star.size());
  j["residual_before"] = residual_before;
  j["residual_after"] = residual_after;
  j["rank_deficient"] = rank_deficient;
  j["inert_channels"] = inert_channels;
  return j.dump(2);
}

ShiftReport solve_equilibrium_shift(const Equilibrium& eq,
                                    const std::vector<ControlChannel>& channels,
                                    const CasimirProfile& profile,
                                    const PhaseGrid& grid) {
  if (!eq.homogeneous || !eq.profile)
    throw std::invalid_argument("solve_equilibrium_shift: homogeneous equilibrium required");
  if (grid.config != GridConfig::ES_1D1V)
    throw std::invalid_argument("solve_equilibrium_shift: ES_1D1V only");
  if (channels.empty())
    throw std::invalid_argument("solve_equilibrium_shift: need at least one channel");

  // first-variation residual field of H + C on the delta-f slot, plus the
  // field slot E0; weighted so the least squares uses the L2 grid norm
  const auto f0 = eq.f0_velocity(grid);
  const int nv = grid.Nv;
  const int rows = nv + grid.Nx;  // velocity profile block + field block
  Eigen::VectorXd g0 = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd wsq(rows);
  for (int j = 0; j < nv; ++j) {
    g0(j) = 0.5 * grid.v(j) * grid.v(j) + profile.phi_prime(f0[j]);
    wsq(j) = std::sqrt(grid.vweight(j) * grid.L);
  }
  for (int ix = 0; ix < grid.Nx; ++ix) {
    g0(nv + ix) = eq.state.E1[ix];
    wsq(nv + ix) = std::sqrt(grid.dx());
  }

  const int m = static_cast<int>(channels.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(rows, m);
  ShiftReport rep;
  for (int a = 0; a < m; ++a) {
    const auto& ch = channels[a];
    if (ch.kind == ControlChannel::Kind::current_coupling) {
      rep.inert_channels.push_back(a);  // no static first variation in (f,E,B)
      continue;
    }
    validate_phase_shape(ch.w, grid, "ControlChannel.w");
    // dB/df at the homogeneous state, averaged over x onto the velocity block
    for (int j = 0; j < nv; ++j) {
      double avg = 0.0;
      for (int ix = 0; ix < grid.Nx; ++ix) avg += ch.w[grid.idx(ix, j)];
      avg /= grid.Nx;
      G(j, a) = avg * f0[j];
    }
  }

  const Eigen::VectorXd g0w = wsq.asDiagonal() * g0;
  const Eigen::MatrixXd Gw = wsq.asDiagonal() * G;
  rep.residual_before = g0w.norm();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Gw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  rep.u_star = svd.solve(-g0w);
  rep.rank_deficient = svd.rank() < m;
  rep.residual_after = (g0w + Gw * rep.u_star).norm();
  return rep;
}

ControlledSecondVariation controlled_second_variation(
    const Equilibrium& eq, const Eigen::VectorXd& u_star,
    const std::vector<ControlChannel>& channels, const CasimirProfile& profile,
    const PhaseGrid& grid, const Eigen::MatrixXcd* projector) {
  if (u_star.size() != static_cast<Eigen::Index>(channels.size()))
    throw std::invalid_argument("controlled_second_variation: u*/channel count mismatch");
  ControlledSecondVariation out;
  out.form = second_variation_form(eq, profile, grid);
  for (std::size_t a = 0; a < channels.size(); ++a) {
    const auto& ch = channels[a];
    if (ch.kind == ControlChannel::Kind::current_coupling) continue;  // linear: d2 B = 0
    validate_phase_shape(ch.w, grid, "ControlChannel.w");
    // require a v-dependent-only weight so the form stays mode-diagonal
    for (int j = 0; j < grid.Nv; ++j) {
      const double w0 = ch.w[grid.idx(0, j)];
      for (int ix = 1; ix < grid.Nx; ++ix)
        if (std::abs(ch.w[grid.idx(ix, j)] - w0) > 1e-12 * (1.0 + std::abs(w0)))
          throw std::invalid_argument(
              "controlled_second_variation: shaping weight must depend on v only");
      out.form.f_weight[j] += u_star(a) * w0;
    }
  }
  out.report = definiteness_report(out.form, grid, projector);
  return out;
}

RhsFn make_control_forcing(const std::vector<ControlChannel>& channels,
                           const ControlSchedule& schedule, const PhaseGrid& grid,
                           const Fourier& fx) {
  return [&channels, &schedule, &grid, &fx](const State& z, double t) {
    StateTangent out = StateTangent::zeros(grid);
    for (std::size_t a = 0; a < channels.size(); ++a) {
      const double ua = schedule(a, t);
      if (ua == 0.0) continue;
      const StateTangent g = control_generator(channels[a], z, grid, fx);
      for (std::size_t i = 0; i < out.df.size(); ++i) out.df[i] += ua * g.df[i];
      for (std::size_t i = 0; i < out.dE1.size(); ++i) out.dE1[i] += ua * g.dE1[i];
      for (std::size_t i = 0; i < out.dE2.size(); ++i) out.dE2[i] += ua * g.dE2[i];
      for (std::size_t i = 0; i < out.dB3.size(); ++i) out.dB3[i] += ua * g.dB3[i];
    }
    return out;
  };
}

}  // namespace mvtk
