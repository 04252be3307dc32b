#include "monret/superoperator.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "monret/errors.hpp"

namespace monret {
namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kImagTraceTol = 1e-12;

// 1 - E Pi, with (E Pi)_{ik} = p_k.
Eigen::MatrixXcd complement_projector(const std::vector<double>& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) -= p[static_cast<std::size_t>(k)];
  return m;
}

// (A x 1) v on the compound index space.
Eigen::VectorXcd apply_bra(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& v) {
  const auto n = a.rows();
  Eigen::VectorXcd out(v.size());
  Eigen::Map<const RowMajorMatrix> in(v.data(), n, n);
  Eigen::Map<RowMajorMatrix>(out.data(), n, n) = a * in;
  return out;
}

// (1 x B) v on the compound index space.
Eigen::VectorXcd apply_ket(const Eigen::MatrixXcd& b, const Eigen::VectorXcd& v) {
  const auto n = b.rows();
  Eigen::VectorXcd out(v.size());
  Eigen::Map<const RowMajorMatrix> in(v.data(), n, n);
  Eigen::Map<RowMajorMatrix>(out.data(), n, n) = in * b.transpose();
  return out;
}

double checked_real(Complex trace, std::size_t k) {
  if (std::abs(trace.imag()) > kImagTraceTol) {
    std::ostringstream os;
    os << "return probability at k=" << k << " has imaginary part " << trace.imag();
    throw NumericalHealthError(os.str());
  }
  return trace.real();
}

}  // namespace

Eigen::MatrixXcd kronecker(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  return out;
}

Eigen::MatrixXcd SuperoperatorSet::ghat() const {
  return dhat_ * pp_.cast<Complex>().transpose();
}

Eigen::MatrixXcd SuperoperatorSet::c1() const {
  const auto n = static_cast<Eigen::Index>(n_);
  return kronecker(bra_step_, Eigen::MatrixXcd::Identity(n, n));
}

Eigen::MatrixXcd SuperoperatorSet::c2() const {
  const auto n = static_cast<Eigen::Index>(n_);
  return kronecker(Eigen::MatrixXcd::Identity(n, n), ket_step_);
}

void SuperoperatorSet::require_off_resonance() const {
  if (resonances_.empty()) return;
  std::ostringstream os;
  os.precision(17);
  os << "resonant energy gaps: averaged phase within tolerance of 1 for";
  for (const auto& r : resonances_) os << " (" << r.j1 << "," << r.j2 << ")";
  os << "; 1 - Gamma is singular and fluctuations diverge";
  throw ResonanceError(os.str(), 0.0);
}

SuperoperatorSet build(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                       double omega_shift, double resonance_tol) {
  if (!std::isfinite(omega_shift)) throw InvalidInput("omega_shift must be finite");
  if (!(resonance_tol > 0.0)) throw InvalidInput("resonance_tol must be positive");

  SuperoperatorSet s;
  const std::size_t n = model.dimension();
  const auto ni = static_cast<Eigen::Index>(n);
  s.n_ = n;
  s.omega_shift_ = omega_shift;
  s.weights_ = model.weights();
  s.energies_ = model.energies();

  s.dhat_.resize(ni * ni);
  s.pp_.resize(ni * ni);
  for (std::size_t j1 = 0; j1 < n; ++j1) {
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      const auto idx = static_cast<Eigen::Index>(j1 * n + j2);
      const Complex v = dist.char_fn(omega_shift + model.energy(j1) - model.energy(j2));
      s.dhat_(idx) = v;
      s.pp_(idx) = model.weight(j1) * model.weight(j2);
      if (j1 != j2 && std::abs(1.0 - v) < resonance_tol) s.resonances_.push_back({j1, j2, v});
    }
  }

  const Eigen::MatrixXcd comp = complement_projector(model.weights());
  s.chat_ = kronecker(comp, comp);
  s.gamma_ = s.dhat_.asDiagonal() * s.chat_;

  Eigen::VectorXcd bra_avg(ni), ket_avg(ni);
  for (Eigen::Index j = 0; j < ni; ++j) {
    const double e = model.energy(static_cast<std::size_t>(j));
    bra_avg(j) = dist.char_fn(e);   // <exp(+i E_j tau)> = <D^*>_jj
    ket_avg(j) = dist.char_fn(-e);  // <exp(-i E_j tau)> = <D>_jj
  }
  s.bra_step_ = bra_avg.asDiagonal() * comp;
  s.ket_step_ = ket_avg.asDiagonal() * comp;
  return s;
}

std::vector<double> return_probabilities(const SuperoperatorSet& s, std::size_t K) {
  std::vector<double> out;
  out.reserve(K);
  const Eigen::VectorXcd pp = s.weight_pairs().cast<Complex>();
  Eigen::VectorXcd v = s.dhat_diagonal();  // gamma^{k-1} ghat, kept as its column factor
  for (std::size_t k = 1; k <= K; ++k) {
    out.push_back(checked_real(pp.dot(v), k));
    if (k < K) v = s.gamma() * v;
  }
  return out;
}

double avg_return_prob(const SuperoperatorSet& s, std::size_t k) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  return return_probabilities(s, k).back();
}

Complex correlator(const SuperoperatorSet& s, std::size_t k, std::size_t kp) {
  if (k < 1 || kp < 1) throw InvalidInput("k and kp must be at least 1");
  Eigen::VectorXcd v = s.dhat_diagonal();
  for (std::size_t i = 1; i < std::min(k, kp); ++i) v = s.gamma() * v;
  if (k >= kp) {
    for (std::size_t i = 0; i < k - kp; ++i) v = apply_bra(s.bra_step(), v);
  } else {
    for (std::size_t i = 0; i < kp - k; ++i) v = apply_ket(s.ket_step(), v);
  }
  // pp is real: a plain (non-conjugating) contraction.
  return (s.weight_pairs().cast<Complex>().transpose() * v)(0);
}

Eigen::MatrixXcd correlator_matrix(const SuperoperatorSet& s, std::size_t K) {
  if (K < 1) throw InvalidInput("K must be at least 1");
  const auto Ki = static_cast<Eigen::Index>(K);
  // columns: gamma^{j} dhat for j = 0..K-1
  Eigen::MatrixXcd shared(static_cast<Eigen::Index>(s.dim()), Ki);
  shared.col(0) = s.dhat_diagonal();
  for (Eigen::Index j = 1; j < Ki; ++j) shared.col(j) = s.gamma() * shared.col(j - 1);

  // rows: pp^T c1^m and pp^T c2^m for m = 0..K-1; pp^T (A x 1) = ((A^T x 1) pp)^T
  const Eigen::MatrixXcd bra_t = s.bra_step().transpose();
  const Eigen::MatrixXcd ket_t = s.ket_step().transpose();
  Eigen::MatrixXcd left_bra(Ki, static_cast<Eigen::Index>(s.dim()));
  Eigen::MatrixXcd left_ket(Ki, static_cast<Eigen::Index>(s.dim()));
  Eigen::VectorXcd lb = s.weight_pairs().cast<Complex>();
  Eigen::VectorXcd lk = lb;
  for (Eigen::Index m = 0; m < Ki; ++m) {
    left_bra.row(m) = lb.transpose();
    left_ket.row(m) = lk.transpose();
    if (m + 1 < Ki) {
      lb = apply_bra(bra_t, lb);
      lk = apply_ket(ket_t, lk);
    }
  }

  Eigen::MatrixXcd out(Ki, Ki);
  for (Eigen::Index k = 0; k < Ki; ++k) {
    for (Eigen::Index kp = 0; kp < Ki; ++kp) {
      if (k >= kp)
        out(k, kp) = (left_bra.row(k - kp) * shared.col(kp)).value();
      else
        out(k, kp) = (left_ket.row(kp - k) * shared.col(k)).value();
    }
  }
  return out;
}

ShiftedSystem::ShiftedSystem(const SuperoperatorSet& s, Complex z) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  lu_.compute(Eigen::MatrixXcd::Identity(d, d) - z * s.gamma());
  rcond_ = lu_.rcond();
  if (!(rcond_ >= kSingularRcond)) {
    std::ostringstream os;
    os << "1 - z*Gamma is singular at z = " << z << " (reciprocal condition " << rcond_ << ")";
    throw ResonanceError(os.str(), rcond_);
  }
}

IdentityResiduals verify_identities(const SuperoperatorSet& s) {
  const std::size_t n = s.n();
  const auto d = static_cast<Eigen::Index>(s.dim());
  const auto& p = s.weights();
  IdentityResiduals r;

  // W (dhat^-1 - chat): W is supported on j1 == j2 rows only, where dhat is
  // <exp(i*shift*tau)>; only those entries are inverted.
  Eigen::MatrixXcd wm = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = static_cast<Eigen::Index>(j * n + j);
    wm.row(row) = -p[j] * s.chat().row(row);
    wm(row, row) += p[j] / s.dhat_diagonal()(row);
  }
  const Eigen::RowVectorXcd column_sums = wm.colwise().sum();
  r.weighted_column_sums = (column_sums - s.weight_pairs().cast<Complex>().transpose()).cwiseAbs().maxCoeff();

  const ShiftedSystem sys(s, 1.0);
  r.rcond = sys.rcond();
  const Eigen::VectorXcd t = sys.solve(s.dhat_diagonal());
  r.row_sum_values.assign(t.data(), t.data() + t.size());
  for (std::size_t j1 = 0; j1 < n; ++j1) {
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      const Complex expected = j1 == j2 ? Complex(1.0 / p[j1]) : Complex(0.0);
      r.row_sums = std::max(r.row_sums, std::abs(t(static_cast<Eigen::Index>(j1 * n + j2)) - expected));
    }
  }
  return r;
}

double spectral_radius(const SuperoperatorSet& s) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(s.gamma(), false);
  if (solver.info() != Eigen::Success) throw NumericalHealthError("eigensolver failed on Gamma");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
  const auto old_precision = os.precision(17);
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != Complex(0.0)) os << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << '\n';
  os.precision(old_precision);
}

}  // namespace monret
