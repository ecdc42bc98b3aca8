// Copyright 2026 The reigate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reigate/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>

#include "dormand_prince.hpp"

namespace reigate {

using detail::Batch;

void IntegratorSettings::validate() const {
  auto in_range = [](double v) { return v >= 1e-12 && v <= 1e-3; };
  if (!in_range(rel_tol) || !in_range(abs_tol)) {
    throw ValidationError("integrator: tolerances must lie in [1e-12, 1e-3]");
  }
  if (max_step_us < 0.0) throw ValidationError("integrator: max_step must be non-negative");
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw ValidationError("density matrix must be square");
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-12) throw ValidationError("pure state must be normalized");
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis(int dim, int k) {
  Matrix m = Matrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_density_matrix(const Matrix& rho, double rel_tol, std::string_view context) {
  const DensityMatrix d(rho);
  const std::string where = context.empty() ? std::string() : " (" + std::string(context) + ")";
  const double herm = d.hermiticity_defect();
  if (herm > 1e-10) {
    throw IntegrationError("Hermiticity defect " + std::to_string(herm) + where);
  }
  const double trace_dev = std::abs(d.trace() - 1.0);
  if (trace_dev > 10.0 * rel_tol) {
    throw IntegrationError("trace deviation " + std::to_string(trace_dev) + where);
  }
  const double lmin = d.min_eigenvalue();
  if (lmin < -10.0 * rel_tol) {
    throw IntegrationError("negative eigenvalue " + std::to_string(lmin) + where);
  }
}

Matrix conjugate(const Matrix& rho, const Matrix& u) { return u * rho * u.adjoint(); }

SimulationModel apply_error_mask(const SimulationModel& model, const ErrorSourceMask& mask) {
  return model.with_mask(mask);
}

namespace {

// Plain complex arithmetic; std::complex products go through the
// NaN-recovering __muldc3 path, which dominates the inner loops otherwise.
inline Complex cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// dst += c * src over n complex entries.
inline void axpy(Complex c, const Complex* src, Complex* dst, Eigen::Index n) {
  const double cr = c.real();
  const double ci = c.imag();
  const double* __restrict s = reinterpret_cast<const double*>(src);
  double* __restrict o = reinterpret_cast<double*>(dst);
  for (Eigen::Index i = 0; i < 2 * n; i += 2) {
    const double sr = s[i];
    const double si = s[i + 1];
    o[i] += cr * sr - ci * si;
    o[i + 1] += cr * si + ci * sr;
  }
}

// dst = c * src
inline void scale_row(Complex c, const Complex* src, Complex* dst, Eigen::Index n) {
  const double cr = c.real();
  const double ci = c.imag();
  const double* __restrict s = reinterpret_cast<const double*>(src);
  double* __restrict o = reinterpret_cast<double*>(dst);
  for (Eigen::Index i = 0; i < 2 * n; i += 2) {
    const double sr = s[i];
    const double si = s[i + 1];
    o[i] = cr * sr - ci * si;
    o[i + 1] = cr * si + ci * sr;
  }
}

struct CouplingTerm {
  int tone = 0;
  Complex weight;      // (1/2) e^{i phase} * scale * sqrt(f / f_ref)
  double omega = 0.0;  // rad/us; coupling carries exp(-i omega t)
  std::vector<std::pair<int, int>> entries;  // (excited-side row, ground-side col)
};

struct CompiledSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<Envelope> envelopes;
  std::vector<CouplingTerm> terms;
};

struct JumpTerm {
  int dest_row, dest_col, src_row, src_col;
  Complex coeff;
};

}  // namespace

struct Propagator::Impl {
  int d = 0;
  double duration = 0.0;
  IntegratorSettings settings;
  std::vector<CompiledSegment> segments;
  Eigen::VectorXcd heff_diag;  // interaction - (i/2) sum L^dag L (diagonal part)
  struct Offdiag {
    int row, col;
    Complex value;
  };
  std::vector<Offdiag> heff_offdiag;
  std::vector<JumpTerm> jumps;
  bool dissipative = false;

  // X = H_eff R for the static part plus the time-dependent couplings.
  void apply_h(const CompiledSegment& seg, double t, const Batch& r, Batch& x,
               std::vector<Complex>& env) const {
    const Eigen::Index n = r.cols();
    for (int i = 0; i < d; ++i) scale_row(heff_diag(i), &r(i, 0), &x(i, 0), n);
    for (const auto& o : heff_offdiag) axpy(o.value, &r(o.col, 0), &x(o.row, 0), n);
    env.resize(seg.envelopes.size());
    for (std::size_t k = 0; k < seg.envelopes.size(); ++k) {
      env[k] = envelope_value(seg.envelopes[k], t - seg.t0);
    }
    for (const auto& term : seg.terms) {
      const Complex z = env[static_cast<std::size_t>(term.tone)];
      if (z == Complex(0.0, 0.0)) continue;
      const Complex c = cmul(cmul(z, term.weight), std::polar(1.0, -term.omega * t));
      const Complex cc = std::conj(c);
      for (const auto& [row, col] : term.entries) {
        axpy(c, &r(col, 0), &x(row, 0), n);
        axpy(cc, &r(row, 0), &x(col, 0), n);
      }
    }
  }

  void rhs_density(const CompiledSegment& seg, double t, const Batch& r, Batch& out,
                   Batch& x, std::vector<Complex>& env) const {
    apply_h(seg, t, r, x, env);
    // Y = -i X; out_k = Y_k + Y_k^dagger for each d x d block, i.e.
    // out(i, j) = -i X(i, j) + i conj(X(j, i)).
    const Eigen::Index k_count = r.cols() / d;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const Eigen::Index off = k * d;
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const Complex a = x(i, off + j);
          const Complex b = x(j, off + i);
          // -i a + i conj(b) = (a.im + b.im, -a.re + b.re)
          const Complex v(a.imag() + b.imag(), b.real() - a.real());
          out(i, off + j) = v;
          out(j, off + i) = std::conj(v);
        }
      }
      for (const auto& jt : jumps) {
        out(jt.dest_row, off + jt.dest_col) += cmul(jt.coeff, r(jt.src_row, off + jt.src_col));
      }
    }
  }

  void rhs_pure(const CompiledSegment& seg, double t, const Batch& r, Batch& out,
                std::vector<Complex>& env) const {
    apply_h(seg, t, r, out, env);
    Complex* p = out.data();
    for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = Complex(p[i].imag(), -p[i].real());
  }

  template <class Observer>
  void run(Batch& y, bool pure, IntegrationStats& stats, Observer&& observe) const {
    detail::DormandPrince dp(settings);
    Batch x(y.rows(), y.cols());
    std::vector<Complex> env;
    double hint = 0.0;
    for (const auto& seg : segments) {
      if (pure) {
        auto f = [&](double t, const Batch& r, Batch& out) { rhs_pure(seg, t, r, out, env); };
        hint = dp.integrate(f, seg.t0, seg.t1, y, stats, 0.0, observe);
      } else {
        auto f = [&](double t, const Batch& r, Batch& out) {
          rhs_density(seg, t, r, out, x, env);
        };
        hint = dp.integrate(f, seg.t0, seg.t1, y, stats, 0.0, observe);
      }
    }
    (void)hint;
  }
};

namespace {

std::vector<CouplingTerm> compile_tones(const SimulationModel& model,
                                        const std::vector<Tone>& tones) {
  std::vector<CouplingTerm> terms;
  const bool crosstalk = model.mask().internal_crosstalk;
  for (std::size_t k = 0; k < tones.size(); ++k) {
    const Tone& tone = tones[k];
    if (tone.ion < 0 || tone.ion >= model.num_ions()) {
      throw ValidationError("tone addresses ion " + std::to_string(tone.ion) +
                            " which the model does not contain");
    }
    const IonSite& site = model.ion(tone.ion);
    const LevelScheme& s = site.scheme;
    int gt = 0;
    int et = 0;
    try {
      gt = s.ground_index(tone.target.ground);
      et = s.excited_index(tone.target.excited);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("unknown transition label: ") + e.what());
    }
    const double f_ref = tone.reference_strength.value_or(s.strength(gt, et));
    if (!(f_ref > 0.0)) {
      throw ValidationError("tone target transition has zero oscillator strength");
    }
    const double nu_tone = s.transition_mhz(gt, et) + tone.detuning_mhz;
    const int ng = s.num_ground();
    const int n_other = model.num_ions() == 2 ? model.levels_per_ion(1 - tone.ion) : 1;

    for (int g = 0; g < ng; ++g) {
      for (int e = 0; e < s.num_excited(); ++e) {
        if (!crosstalk && (g != gt || e != et)) continue;
        const double f = s.strength(g, e);
        if (f <= 0.0) continue;
        CouplingTerm term;
        term.tone = static_cast<int>(k);
        term.weight = 0.5 * tone.rabi_scale * std::sqrt(f / f_ref) * std::polar(1.0, tone.phase);
        term.omega = kTwoPi * (nu_tone - s.transition_mhz(g, e));
        for (int other = 0; other < n_other; ++other) {
          int row = 0;
          int col = 0;
          if (model.num_ions() == 1) {
            row = ng + e;
            col = g;
          } else if (tone.ion == 0) {
            row = model.product_index(ng + e, other);
            col = model.product_index(g, other);
          } else {
            row = model.product_index(other, ng + e);
            col = model.product_index(other, g);
          }
          term.entries.emplace_back(row, col);
        }
        terms.push_back(std::move(term));
      }
    }
  }
  return terms;
}

}  // namespace

Propagator::Propagator(const SimulationModel& model, const GateSchedule& schedule,
                       IntegratorSettings settings)
    : impl_(std::make_unique<Impl>()) {
  settings.validate();
  auto& m = *impl_;
  m.settings = settings;
  m.d = model.dimension();

  double t = 0.0;
  for (const auto& seg : schedule.segments()) {
    CompiledSegment c;
    c.t0 = t;
    c.t1 = t + segment_duration(seg);
    if (const auto* p = std::get_if<PulseSegment>(&seg)) {
      for (const auto& tone : p->tones) c.envelopes.push_back(tone.envelope);
      c.terms = compile_tones(model, p->tones);
    }
    t = c.t1;
    m.segments.push_back(std::move(c));
  }
  m.duration = t;

  // Static part: dipole interaction and the anti-Hermitian decay term.
  const RealVector inter = model.interaction_diagonal();
  Matrix heff = Matrix::Zero(m.d, m.d);
  for (int i = 0; i < m.d; ++i) heff(i, i) = inter(i);
  const auto ops = model.collapse_ops();
  for (const auto& op : ops) {
    if (op.rate < 0.0) throw ValidationError("collapse operator with negative rate");
    if (op.rate == 0.0) continue;
    m.dissipative = true;
    Matrix l = Matrix::Zero(m.d, m.d);
    for (const auto& e : op.entries) l(e.row, e.col) += e.value;
    heff -= Complex(0.0, 0.5 * op.rate) * (l.adjoint() * l);
    for (const auto& a : op.entries) {
      for (const auto& b : op.entries) {
        m.jumps.push_back({a.row, b.row, a.col, b.col, op.rate * a.value * std::conj(b.value)});
      }
    }
  }
  // Merge jump terms sharing destination and source.
  std::map<std::tuple<int, int, int, int>, Complex> merged;
  for (const auto& j : m.jumps) merged[{j.dest_row, j.dest_col, j.src_row, j.src_col}] += j.coeff;
  m.jumps.clear();
  for (const auto& [key, c] : merged) {
    const auto [dr, dc, sr, sc] = key;
    m.jumps.push_back({dr, dc, sr, sc, c});
  }
  m.heff_diag = heff.diagonal();
  for (int i = 0; i < m.d; ++i) {
    for (int j = 0; j < m.d; ++j) {
      if (i != j && heff(i, j) != Complex(0.0, 0.0)) m.heff_offdiag.push_back({i, j, heff(i, j)});
    }
  }
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

int Propagator::dimension() const { return impl_->d; }
double Propagator::duration() const { return impl_->duration; }
const IntegratorSettings& Propagator::settings() const { return impl_->settings; }
bool Propagator::has_dissipation() const { return impl_->dissipative; }

namespace {

Batch pack(const std::vector<Matrix>& states, int d) {
  Batch b(d, d * static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].rows() != d || states[k].cols() != d) {
      throw ValidationError("state dimension does not match the model");
    }
    b.block(0, static_cast<Eigen::Index>(k) * d, d, d) = states[k];
  }
  return b;
}

std::vector<Matrix> unpack(const Batch& b, int d) {
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < b.cols() / d; ++k) {
    Matrix m = b.block(0, k * d, d, d);
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

}  // namespace

std::vector<Matrix> Propagator::evolve(const std::vector<Matrix>& states,
                                       IntegrationStats* stats) const {
  if (states.empty()) return {};
  Batch y = pack(states, impl_->d);
  IntegrationStats local;
  impl_->run(y, false, local, detail::NoObserver{});
  if (stats) *stats += local;
  // Hermiticity is asserted before the symmetrization in unpack().
  for (Eigen::Index k = 0; k < y.cols() / impl_->d; ++k) {
    const Matrix m = y.block(0, k * impl_->d, impl_->d, impl_->d);
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
      throw IntegrationError("Hermiticity defect " + std::to_string(defect));
    }
  }
  return unpack(y, impl_->d);
}

DensityMatrix Propagator::evolve(const DensityMatrix& rho0, IntegrationStats* stats) const {
  auto out = evolve(std::vector<Matrix>{rho0.matrix()}, stats);
  check_density_matrix(out.front(), impl_->settings.rel_tol, "final state");
  return DensityMatrix(std::move(out.front()));
}

Matrix Propagator::evolve_pure(const Matrix& columns, IntegrationStats* stats) const {
  if (impl_->dissipative) {
    throw ValidationError("pure-state evolution requires a model without collapse operators");
  }
  if (columns.rows() != impl_->d) throw ValidationError("state dimension does not match the model");
  Batch y = columns;
  IntegrationStats local;
  impl_->run(y, true, local, detail::NoObserver{});
  if (stats) *stats += local;
  return y;
}

Trajectory Propagator::trajectory(const DensityMatrix& rho0,
                                  std::vector<std::pair<int, int>> coherences, int every) const {
  Trajectory traj;
  traj.coherence_indices = std::move(coherences);
  const int d = impl_->d;
  auto record = [&](double t, const Batch& y) {
    TrajectorySample s;
    s.t_us = t;
    for (int i = 0; i < d; ++i) s.populations.push_back(y(i, i).real());
    for (const auto& [i, j] : traj.coherence_indices) s.coherences.push_back(y(i, j));
    traj.samples.push_back(std::move(s));
  };
  Batch y = pack({rho0.matrix()}, d);
  record(0.0, y);
  std::uint64_t counter = 0;
  const int stride = std::max(1, every);
  auto observe = [&](double t, const Batch& state) {
    if (++counter % static_cast<std::uint64_t>(stride) == 0) record(t, state);
  };
  impl_->run(y, false, traj.stats, observe);
  if (traj.samples.back().t_us != impl_->duration) record(impl_->duration, y);
  Matrix final_rho = y.block(0, 0, d, d);
  check_density_matrix(final_rho, impl_->settings.rel_tol, "trajectory end");
  traj.final_state = DensityMatrix(0.5 * (final_rho + final_rho.adjoint()));
  return traj;
}

namespace {

// Index of the image for basis element (i, j) with i <= j; `imag` selects
// i(E_ij - E_ji) instead of E_ij + E_ji.
std::size_t basis_slot(int m, int i, int j, bool imag) {
  if (i == j) return static_cast<std::size_t>(i);
  // pairs enumerated row by row: (0,1), (0,2), ..., (1,2), ...
  const int before = i * m - i * (i + 1) / 2 + (j - i - 1);
  return static_cast<std::size_t>(m + 2 * before + (imag ? 1 : 0));
}

}  // namespace

ProcessMap Propagator::process(const std::vector<int>& subspace, IntegrationStats* stats) const {
  const int d = impl_->d;
  const int m = static_cast<int>(subspace.size());
  for (int s : subspace) {
    if (s < 0 || s >= d) throw ValidationError("process subspace index out of range");
  }
  std::vector<Matrix> basis(static_cast<std::size_t>(m * m), Matrix::Zero(d, d));
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const int a = subspace[static_cast<std::size_t>(i)];
      const int b = subspace[static_cast<std::size_t>(j)];
      if (i == j) {
        basis[basis_slot(m, i, j, false)](a, a) = 1.0;
        continue;
      }
      auto& s = basis[basis_slot(m, i, j, false)];
      s(a, b) = 1.0;
      s(b, a) = 1.0;
      auto& an = basis[basis_slot(m, i, j, true)];
      an(a, b) = kI;
      an(b, a) = -kI;
    }
  }
  ProcessMap map;
  map.subspace = subspace;
  map.images = evolve(basis, stats);
  return map;
}

Matrix ProcessMap::apply(const Matrix& rho_sub) const {
  const int m = static_cast<int>(subspace.size());
  if (rho_sub.rows() != m || rho_sub.cols() != m) {
    throw ValidationError("process input has the wrong dimension");
  }
  Matrix out = Matrix::Zero(dim(), dim());
  for (int i = 0; i < m; ++i) {
    out += rho_sub(i, i) * images[basis_slot(m, i, i, false)];
    for (int j = i + 1; j < m; ++j) {
      const Complex alpha = 0.5 * (rho_sub(i, j) + rho_sub(j, i));
      const Complex beta = (rho_sub(i, j) - rho_sub(j, i)) / Complex(0.0, 2.0);
      if (alpha != Complex(0.0, 0.0)) out += alpha * images[basis_slot(m, i, j, false)];
      if (beta != Complex(0.0, 0.0)) out += beta * images[basis_slot(m, i, j, true)];
    }
  }
  return out;
}

Matrix Propagator::superoperator(IntegrationStats* stats) const {
  const int d = impl_->d;
  std::vector<int> all(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) all[static_cast<std::size_t>(i)] = i;
  const ProcessMap map = process(all, stats);
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Matrix sop(n, n);
  auto vec = [&](const Matrix& x) { return Eigen::Map<const Vector>(x.data(), n); };
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Matrix img;
      if (a == b) {
        img = map.images[basis_slot(d, a, a, false)];
      } else {
        const int i = std::min(a, b);
        const int j = std::max(a, b);
        const Matrix& s = map.images[basis_slot(d, i, j, false)];
        const Matrix& an = map.images[basis_slot(d, i, j, true)];
        // E_ij = (S - iA)/2, E_ji = (S + iA)/2
        img = a < b ? Matrix(0.5 * (s - kI * an)) : Matrix(0.5 * (s + kI * an));
      }
      sop.col(a + static_cast<Eigen::Index>(b) * d) = vec(img);
    }
  }
  return sop;
}

DensityMatrix integrate(const SimulationModel& model, const GateSchedule& schedule,
                        const DensityMatrix& rho0, const IntegratorSettings& settings,
                        IntegrationStats* stats) {
  if (rho0.dim() != model.dimension()) {
    throw ValidationError("initial state dimension does not match the model");
  }
  return Propagator(model, schedule, settings).evolve(rho0, stats);
}

Matrix assemble_hamiltonian(const SimulationModel& model, const GateSchedule& schedule,
                            double t_us) {
  const int d = model.dimension();
  Matrix h = Matrix::Zero(d, d);
  const RealVector inter = model.interaction_diagonal();
  for (int i = 0; i < d; ++i) h(i, i) = inter(i);
  double t0 = 0.0;
  for (const auto& seg : schedule.segments()) {
    const double t1 = t0 + segment_duration(seg);
    const auto* p = std::get_if<PulseSegment>(&seg);
    if (p && t_us >= t0 && t_us <= t1) {
      const auto terms = compile_tones(model, p->tones);
      for (const auto& term : terms) {
        const Complex z = envelope_value(p->tones[static_cast<std::size_t>(term.tone)].envelope,
                                         t_us - t0);
        const Complex c = z * term.weight * std::polar(1.0, -term.omega * t_us);
        for (const auto& [row, col] : term.entries) {
          h(row, col) += c;
          h(col, row) += std::conj(c);
        }
      }
      break;
    }
    t0 = t1;
  }
  return h;
}

void Trajectory::write_csv(std::ostream& out) const {
  out << "t_us";
  const std::size_t n = samples.empty() ? 0 : samples.front().populations.size();
  for (std::size_t i = 0; i < n; ++i) out << ",p" << i;
  for (const auto& [i, j] : coherence_indices) {
    out << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
  }
  out << '\n' << std::setprecision(12);
  for (const auto& s : samples) {
    out << s.t_us;
    for (double p : s.populations) out << ',' << p;
    for (const auto& c : s.coherences) out << ',' << c.real() << ',' << c.imag();
    out << '\n';
  }
}

}  // namespace reigate
