#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "monret/distribution.hpp"
#include "monret/spectral_model.hpp"

namespace monret {

inline constexpr double kDefaultResonanceTol = 1e-8;
// Systems 1 - z*Gamma with a reciprocal condition estimate below this are
// treated as singular.
inline constexpr double kSingularRcond = 1e-13;

// Kronecker product with [A x B]_{ij,kl} = A_ik B_jl, compound index
// (i, j) -> i * rows(B) + j.
Eigen::MatrixXcd kronecker(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// An off-diagonal pair (j1 != j2) whose averaged phase <exp(i(E_j1 - E_j2)tau)>
// lies within resonance_tol of 1.
struct ResonantPair {
  std::size_t j1;
  std::size_t j2;
  Complex value;
};

// The time-averaged N^2 x N^2 evolution matrices on the doubled (bra, ket)
// index space. Compound index (j1, j2) -> j1 * N + j2, bra index first.
//
//   dhat  = <D^* x D>, diagonal, entry (j1,j2) = <exp(i(shift + E_j1 - E_j2) tau)>
//   chat  = (1 - E Pi) x (1 - E Pi)
//   gamma = dhat * chat
//   ghat  = dhat * (E Pi x E Pi)               (rank one: dhat (p x p)^T)
//   c1    = (<D^*>(1 - E Pi)) x 1              (bra-only step)
//   c2    = 1 x (<D>(1 - E Pi))                (ket-only step)
//
// Immutable after build(). dhat and gamma are stored densely; ghat, c1 and c2
// are factored and materialized on request.
class SuperoperatorSet {
 public:
  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return n_ * n_; }
  double omega_shift() const noexcept { return omega_shift_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& energies() const noexcept { return energies_; }

  const Eigen::VectorXcd& dhat_diagonal() const noexcept { return dhat_; }
  Eigen::MatrixXcd dhat() const { return dhat_.asDiagonal(); }
  const Eigen::MatrixXcd& chat() const noexcept { return chat_; }
  const Eigen::MatrixXcd& gamma() const noexcept { return gamma_; }
  Eigen::MatrixXcd ghat() const;
  Eigen::MatrixXcd c1() const;
  Eigen::MatrixXcd c2() const;

  // N x N factors: c1 = bra_step x 1, c2 = 1 x ket_step.
  const Eigen::MatrixXcd& bra_step() const noexcept { return bra_step_; }
  const Eigen::MatrixXcd& ket_step() const noexcept { return ket_step_; }

  // p x p as an N^2 vector; Tr[M ghat] = pp^T M dhat.
  const Eigen::VectorXd& weight_pairs() const noexcept { return pp_; }

  const std::vector<ResonantPair>& resonances() const noexcept { return resonances_; }
  bool near_resonance() const noexcept { return !resonances_.empty(); }

  // Throws ResonanceError listing the resonant pairs, if any.
  void require_off_resonance() const;

 private:
  friend SuperoperatorSet build(const CanonicalSpectralModel&, const TimeDistribution&, double,
                                double);
  SuperoperatorSet() = default;

  std::size_t n_ = 0;
  double omega_shift_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> energies_;
  Eigen::VectorXcd dhat_;
  Eigen::MatrixXcd chat_;
  Eigen::MatrixXcd gamma_;
  Eigen::MatrixXcd bra_step_;
  Eigen::MatrixXcd ket_step_;
  Eigen::VectorXd pp_;
  std::vector<ResonantPair> resonances_;
};

SuperoperatorSet build(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                       double omega_shift = 0.0, double resonance_tol = kDefaultResonanceTol);

// <|phi_k|^2> = Tr[gamma^{k-1} ghat]. Throws NumericalHealthError if the trace
// has an imaginary part above 1e-12.
double avg_return_prob(const SuperoperatorSet& s, std::size_t k);

// avg_return_prob for k = 1..K in one pass (index k-1).
std::vector<double> return_probabilities(const SuperoperatorSet& s, std::size_t K);

// <phi_k^* phi_kp>.
Complex correlator(const SuperoperatorSet& s, std::size_t k, std::size_t kp);

// All correlators with k, kp <= K; entry (k-1, kp-1).
Eigen::MatrixXcd correlator_matrix(const SuperoperatorSet& s, std::size_t K);

// LU factorization of 1 - z*gamma with a singularity check.
class ShiftedSystem {
 public:
  // Throws ResonanceError if the reciprocal condition estimate is below
  // kSingularRcond.
  ShiftedSystem(const SuperoperatorSet& s, Complex z);

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const { return lu_.solve(rhs); }
  double rcond() const noexcept { return rcond_; }
  Complex determinant() const { return lu_.determinant(); }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double rcond_ = 0.0;
};

struct IdentityResiduals {
  // max over columns of |sum_rows [W (dhat^-1 - chat)] - p_j3 p_j4|
  double weighted_column_sums = 0.0;
  // max over (j1, j2) of |sum_{j3,j4} [dhat^-1 - chat]^-1 - delta_j1j2 / p_j1|
  double row_sums = 0.0;
  double rcond = 0.0;
  std::vector<Complex> row_sum_values;  // T_{j1 j2}, compound index
};

// Checks the two algebraic identities that force <|phi~(omega)|^2> = 1. Uses
// [dhat^-1 - chat]^-1 = (1 - gamma)^-1 dhat, so dhat need not be invertible.
IdentityResiduals verify_identities(const SuperoperatorSet& s);

// Largest eigenvalue modulus of gamma.
double spectral_radius(const SuperoperatorSet& s);

// CSV with header row,col,re,im, one line per nonzero entry.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m);

}  // namespace monret
