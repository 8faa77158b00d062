#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lrghz/error.hpp"
#include "lrghz/geometry.hpp"

namespace lrghz {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Default refusal threshold on the number of amplitudes (q^n).
inline constexpr std::size_t kDefaultMaxAmplitudes = std::size_t{1} << 26;

// Dense state of n q-level sites. Flat basis index is base-q little-endian
// over lattice site order: site s contributes digit_s * q^s.
template <typename Real>
struct BasicStateVector {
  int q = 2;
  int n = 0;
  CVector<Real> amps;

  std::size_t dimension() const { return static_cast<std::size_t>(amps.size()); }

  std::size_t stride(std::size_t site) const {
    std::size_t s = 1;
    for (std::size_t k = 0; k < site; ++k) s *= static_cast<std::size_t>(q);
    return s;
  }

  int digit(std::size_t index, std::size_t site) const {
    return static_cast<int>((index / stride(site)) % static_cast<std::size_t>(q));
  }

  // Sequential sum, so repeated calls on equal data agree bit for bit.
  Real norm_squared() const {
    Real total = 0;
    for (Eigen::Index i = 0; i < amps.size(); ++i) total += std::norm(amps[i]);
    return total;
  }
};

using StateVector = BasicStateVector<double>;

template <typename Real>
struct BasicGate {
  CMatrix<Real> matrix;
  std::size_t site = 0;
};

using Gate = BasicGate<double>;

// Uniform diagonal coupling J * sum_j sum_{mu in control, nu in target_j}
// w(l_mu) w(l_nu) with level weight w(l) = l (the |1><1| projector at q = 2).
template <typename Real>
struct BasicPhaseCoupling {
  std::vector<std::size_t> control;
  std::vector<std::vector<std::size_t>> targets;
  Real strength = 0;
};

using PhaseCoupling = BasicPhaseCoupling<double>;

inline std::size_t checked_dimension(int q, std::size_t n, std::size_t max_amplitudes) {
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "levels per site must be >= 2");
  std::size_t dim = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (dim > max_amplitudes / static_cast<std::size_t>(q)) {
      throw Error(ErrorCode::kMemoryCap, "state of " + std::to_string(n) + " sites with q=" +
                                             std::to_string(q) + " exceeds the cap of " +
                                             std::to_string(max_amplitudes) + " amplitudes");
    }
    dim *= static_cast<std::size_t>(q);
  }
  return dim;
}

template <typename Real>
bool is_unitary(const CMatrix<Real>& u, Real tol = Real(1e-12)) {
  if (u.rows() != u.cols()) return false;
  const CMatrix<Real> residual = u.adjoint() * u - CMatrix<Real>::Identity(u.rows(), u.cols());
  return residual.cwiseAbs().maxCoeff() <= tol;
}

template <typename Real = double>
CMatrix<Real> hadamard() {
  const Real s = Real(1) / std::sqrt(Real(2));
  CMatrix<Real> h(2, 2);
  h << s, s, s, -s;
  return h;
}

// e^{2 pi i k / q}, exact at multiples of a quarter turn.
template <typename Real = double>
std::complex<Real> root_of_unity(long long k, int q) {
  const long long r = ((k % q) + q) % q;
  if (4 * r % q == 0) {
    switch (4 * r / q) {
      case 0: return {1, 0};
      case 1: return {0, 1};
      case 2: return {-1, 0};
      default: return {0, -1};
    }
  }
  return std::polar(Real(1), 2 * std::numbers::pi_v<Real> * static_cast<Real>(r) / q);
}

// q-point discrete Fourier transform F_{jk} = e^{2 pi i jk / q} / sqrt(q).
// F_2 is exactly the Hadamard gate.
template <typename Real = double>
CMatrix<Real> dft(int q) {
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "DFT size must be >= 2");
  CMatrix<Real> f(q, q);
  const Real norm = Real(1) / std::sqrt(static_cast<Real>(q));
  for (int j = 0; j < q; ++j) {
    for (int k = 0; k < q; ++k) f(j, k) = norm * root_of_unity<Real>(static_cast<long long>(j) * k, q);
  }
  return f;
}

template <typename Real>
Real normalization_error(const CVector<Real>& v) {
  return std::abs(v.squaredNorm() - Real(1));
}

// Tensor product of single-site states in site order.
template <typename Real>
BasicStateVector<Real> init_product(const LatticeSpec& lattice,
                                    const std::vector<CVector<Real>>& site_states,
                                    std::size_t max_amplitudes = kDefaultMaxAmplitudes) {
  lattice.validate();
  const std::size_t n = lattice.site_count();
  if (site_states.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "need one state per lattice site");
  }
  const std::size_t dim = checked_dimension(lattice.q, n, max_amplitudes);
  for (const auto& s : site_states) {
    if (s.size() != lattice.q) throw Error(ErrorCode::kShapeMismatch, "site state has wrong size");
    if (normalization_error(s) > Real(1e-10)) {
      throw Error(ErrorCode::kNotNormalized, "site state is not normalized");
    }
  }
  BasicStateVector<Real> state{lattice.q, static_cast<int>(n), CVector<Real>(static_cast<Eigen::Index>(dim))};
  state.amps.setZero();
  state.amps[0] = 1;
  // Grow the product one site at a time; site s becomes digit s.
  std::size_t filled = 1;
  for (std::size_t s = 0; s < n; ++s) {
    for (int level = lattice.q - 1; level >= 0; --level) {
      for (std::size_t i = 0; i < filled; ++i) {
        state.amps[static_cast<Eigen::Index>(level * filled + i)] =
            state.amps[static_cast<Eigen::Index>(i)] * site_states[s][level];
      }
    }
    filled *= static_cast<std::size_t>(lattice.q);
  }
  return state;
}

template <typename Real = double>
CVector<Real> level_state(int q, int level) {
  CVector<Real> v = CVector<Real>::Zero(q);
  v[level] = 1;
  return v;
}

template <typename Real = double>
BasicStateVector<Real> zero_state(const LatticeSpec& lattice,
                                  std::size_t max_amplitudes = kDefaultMaxAmplitudes) {
  std::vector<CVector<Real>> states(lattice.site_count(), level_state<Real>(lattice.q, 0));
  return init_product<Real>(lattice, states, max_amplitudes);
}

template <typename Real>
void apply_gate(BasicStateVector<Real>& state, const BasicGate<Real>& gate) {
  if (gate.site >= static_cast<std::size_t>(state.n)) {
    throw Error(ErrorCode::kOutOfBounds, "gate site out of range");
  }
  if (gate.matrix.rows() != state.q || !is_unitary(gate.matrix)) {
    throw Error(ErrorCode::kNotUnitary, "gate is not a unitary q x q matrix");
  }
  const std::size_t q = static_cast<std::size_t>(state.q);
  const std::size_t stride = state.stride(gate.site);
  const std::size_t block = stride * q;
  std::vector<std::complex<Real>> m(q * q);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t k = 0; k < q; ++k) m[i * q + k] = gate.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }
  std::complex<Real>* amps = state.amps.data();
  // Plain real arithmetic; std::complex multiplication adds NaN recovery.
  auto mul = [](std::complex<Real> a, std::complex<Real> b) {
    return std::complex<Real>(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
  };
  if (q == 2) {
    for (std::size_t high = 0; high < state.dimension(); high += block) {
      for (std::size_t low = 0; low < stride; ++low) {
        std::complex<Real>* base = amps + high + low;
        const std::complex<Real> a = base[0];
        const std::complex<Real> b = base[stride];
        base[0] = mul(m[0], a) + mul(m[1], b);
        base[stride] = mul(m[2], a) + mul(m[3], b);
      }
    }
    return;
  }
  std::vector<std::complex<Real>> local(q);
  for (std::size_t high = 0; high < state.dimension(); high += block) {
    for (std::size_t low = 0; low < stride; ++low) {
      std::complex<Real>* base = amps + high + low;
      for (std::size_t k = 0; k < q; ++k) local[k] = base[k * stride];
      for (std::size_t i = 0; i < q; ++i) {
        std::complex<Real> acc = 0;
        for (std::size_t k = 0; k < q; ++k) acc += mul(m[i * q + k], local[k]);
        base[i * stride] = acc;
      }
    }
  }
}

// |l>_control |x>_target -> |l>_control |x + power*l mod q>_target.
// power = 1 is CNOT at q = 2; power = q - 1 is the inverse.
template <typename Real>
void apply_controlled_increment(BasicStateVector<Real>& state, std::size_t control,
                                std::size_t target, int power = 1) {
  if (control == target) throw Error(ErrorCode::kInvalidArgument, "control and target coincide");
  if (control >= static_cast<std::size_t>(state.n) || target >= static_cast<std::size_t>(state.n)) {
    throw Error(ErrorCode::kOutOfBounds, "site out of range");
  }
  const std::size_t q = static_cast<std::size_t>(state.q);
  const std::size_t shift_unit = static_cast<std::size_t>(((power % state.q) + state.q) % state.q);
  if (shift_unit == 0) return;
  const std::size_t cs = state.stride(control);
  const std::size_t ts = state.stride(target);
  std::complex<Real>* amps = state.amps.data();
  if (q == 2) {
    // Strides are powers of two: swap the target pair wherever the control bit is set.
    for (std::size_t i = 0; i < state.dimension(); ++i) {
      if ((i & ts) == 0 && (i & cs) != 0) std::swap(amps[i], amps[i + ts]);
    }
    return;
  }
  std::vector<std::complex<Real>> ring(q);
  // Visit each index whose target digit is 0 and rotate its q-element ring.
  for (std::size_t high = 0; high < state.dimension(); high += ts * q) {
    for (std::size_t low = 0; low < ts; ++low) {
      const std::size_t i = high + low;
      const std::size_t shift = (shift_unit * ((i / cs) % q)) % q;
      if (shift == 0) continue;
      for (std::size_t x = 0; x < q; ++x) ring[(x + shift) % q] = amps[i + x * ts];
      for (std::size_t x = 0; x < q; ++x) amps[i + x * ts] = ring[x];
    }
  }
}

// Exact evolution for `duration` under the diagonal coupling: basis state z
// picks up exp(-i duration J w_c(z) sum_j w_j(z)), w = level sum over a mask.
template <typename Real>
void evolve_phase(BasicStateVector<Real>& state, const BasicPhaseCoupling<Real>& coupling,
                  Real duration) {
  const std::size_t n = static_cast<std::size_t>(state.n);
  // role: 0 idle, 1 control, 2 target.
  std::vector<int> role(n, 0);
  for (std::size_t s : coupling.control) {
    if (s >= n) throw Error(ErrorCode::kOutOfBounds, "coupling site out of range");
    role[s] = 1;
  }
  std::size_t target_sites = 0;
  for (const auto& mask : coupling.targets) {
    for (std::size_t s : mask) {
      if (s >= n) throw Error(ErrorCode::kOutOfBounds, "coupling site out of range");
      if (role[s] != 0) throw Error(ErrorCode::kInvalidArgument, "coupling masks overlap");
      role[s] = 2;
      ++target_sites;
    }
  }
  const int q = state.q;
  const std::size_t max_wc = static_cast<std::size_t>(q - 1) * coupling.control.size();
  const std::size_t max_wt = static_cast<std::size_t>(q - 1) * target_sites;
  // Phases only depend on (w_c, w_t); tabulate them once.
  CMatrix<Real> table(static_cast<Eigen::Index>(max_wc + 1), static_cast<Eigen::Index>(max_wt + 1));
  for (std::size_t a = 0; a <= max_wc; ++a) {
    for (std::size_t b = 0; b <= max_wt; ++b) {
      const Real angle = -duration * coupling.strength * static_cast<Real>(a) * static_cast<Real>(b);
      table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = std::polar(Real(1), angle);
    }
  }
  std::vector<int> digits(n, 0);
  std::size_t wc = 0;
  std::size_t wt = 0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    state.amps[static_cast<Eigen::Index>(i)] *=
        table(static_cast<Eigen::Index>(wc), static_cast<Eigen::Index>(wt));
    // Little-endian odometer: site 0 is the fastest digit.
    for (std::size_t s = 0; s < n; ++s) {
      if (digits[s] + 1 < q) {
        ++digits[s];
        if (role[s] == 1) ++wc;
        if (role[s] == 2) ++wt;
        break;
      }
      if (role[s] == 1) wc -= static_cast<std::size_t>(q - 1);
      if (role[s] == 2) wt -= static_cast<std::size_t>(q - 1);
      digits[s] = 0;
    }
  }
}

// Power-law legality: J <= 1/dist(mu, nu)^alpha for every control/target pair.
template <typename Real>
bool coupling_is_power_law(const BasicPhaseCoupling<Real>& coupling, const LatticeSpec& lattice,
                           double alpha) {
  for (std::size_t mu : coupling.control) {
    const Coord a = lattice.coord_of(mu);
    for (const auto& mask : coupling.targets) {
      for (std::size_t nu : mask) {
        const double dist = euclidean_distance(a, lattice.coord_of(nu));
        if (static_cast<double>(coupling.strength) > std::pow(dist, -alpha) * (1.0 + 1e-12)) {
          return false;
        }
      }
    }
  }
  return true;
}

template <typename Real>
Real fidelity(const BasicStateVector<Real>& x, const BasicStateVector<Real>& y) {
  if (x.q != y.q || x.n != y.n || x.amps.size() != y.amps.size()) {
    throw Error(ErrorCode::kShapeMismatch, "states have different shapes");
  }
  const Real f = std::norm(x.amps.dot(y.amps));
  return std::clamp(f, Real(0), Real(1));
}

// sum_l a_l |l...l>_region, tensored with the per-site background on the
// complement (|0> where `background` is empty).
template <typename Real>
BasicStateVector<Real> expected_ghz(const Region& region, const LatticeSpec& lattice,
                                    const CVector<Real>& coefficients,
                                    const std::vector<CVector<Real>>& background = {},
                                    std::size_t max_amplitudes = kDefaultMaxAmplitudes) {
  if (coefficients.size() != lattice.q) {
    throw Error(ErrorCode::kShapeMismatch, "need q coefficients");
  }
  if (normalization_error(coefficients) > Real(1e-10)) {
    throw Error(ErrorCode::kNotNormalized, "coefficients are not normalized");
  }
  const auto mask = site_mask(region, lattice);
  std::vector<CVector<Real>> sites =
      background.empty() ? std::vector<CVector<Real>>(lattice.site_count(), level_state<Real>(lattice.q, 0))
                         : background;
  for (std::size_t s : mask) sites.at(s) = level_state<Real>(lattice.q, 0);
  const BasicStateVector<Real> rest = init_product<Real>(lattice, sites, max_amplitudes);

  std::size_t unit = 0;
  for (std::size_t s : mask) unit += rest.stride(s);
  BasicStateVector<Real> out{rest.q, rest.n, CVector<Real>::Zero(rest.amps.size())};
  for (std::size_t i = 0; i < rest.dimension(); ++i) {
    const auto amp = rest.amps[static_cast<Eigen::Index>(i)];
    if (amp == std::complex<Real>(0)) continue;
    for (int level = 0; level < lattice.q; ++level) {
      out.amps[static_cast<Eigen::Index>(i + static_cast<std::size_t>(level) * unit)] +=
          coefficients[level] * amp;
    }
  }
  return out;
}

// One digit per site, site 0 first.
template <typename Real>
std::string basis_label(const BasicStateVector<Real>& state, std::size_t index) {
  std::string label;
  for (std::size_t s = 0; s < static_cast<std::size_t>(state.n); ++s) {
    const int dgt = state.digit(index, s);
    label += dgt < 10 ? static_cast<char>('0' + dgt) : static_cast<char>('a' + dgt - 10);
  }
  return label;
}

}  // namespace lrghz
