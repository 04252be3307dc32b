#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "monret/errors.hpp"
#include "monret/trajectory.hpp"

namespace monret {
namespace {

constexpr std::int64_t kChunkSize = 4096;

// Runs body(chunk) for chunk in [0, chunks) on `threads` workers.
template <class Body>
void for_each_chunk(std::int64_t chunks, int threads, Body&& body) {
  const int workers = static_cast<int>(std::min<std::int64_t>(std::max(threads, 1), chunks));
  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t c = next++; c < chunks && !failed; c = next++) {
        try {
          body(c);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct MomentSums {
  std::vector<double> k;   // sum of k^m, m = 1..2*max_order
  std::vector<double> t;
  std::int64_t count = 0;
  std::int64_t censored = 0;
  std::vector<std::int64_t> histogram;
};

EstimateWithError estimate(double sum, double sum_sq, std::int64_t n) {
  if (n == 0) return {};
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = n > 1 ? std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0)) : 0.0;
  return {mean, std::sqrt(var / dn)};
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MONRET_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

FirstDetectionStats estimate_first_detection(const CanonicalSpectralModel& model,
                                             const TimeDistribution& dist,
                                             const MonteCarloOptions& opts) {
  if (opts.samples < 1) throw InvalidInput("samples must be positive");
  if (opts.max_order < 1) throw InvalidInput("max_order must be positive");
  const std::int64_t chunks = (opts.samples + kChunkSize - 1) / kChunkSize;
  const auto orders = static_cast<std::size_t>(2 * opts.max_order);
  std::vector<MomentSums> parts(static_cast<std::size_t>(chunks));

  for_each_chunk(chunks, resolve_threads(opts.threads), [&](std::int64_t c) {
    RandomStream rng(opts.seed, static_cast<std::uint64_t>(c));
    const std::int64_t begin = c * kChunkSize;
    const std::int64_t end = std::min(opts.samples, begin + kChunkSize);
    MomentSums& s = parts[static_cast<std::size_t>(c)];
    s.k.assign(orders, 0.0);
    s.t.assign(orders, 0.0);
    for (std::int64_t i = begin; i < end; ++i) {
      const auto smp = sample_first_detection(model, dist, rng, opts.k_max);
      if (smp.censored) {
        ++s.censored;
        continue;
      }
      ++s.count;
      double kp = 1.0, tp = 1.0;
      for (std::size_t m = 0; m < orders; ++m) {
        kp *= static_cast<double>(smp.k);
        tp *= smp.t;
        s.k[m] += kp;
        s.t[m] += tp;
      }
      if (s.histogram.size() < static_cast<std::size_t>(smp.k)) s.histogram.resize(static_cast<std::size_t>(smp.k), 0);
      ++s.histogram[static_cast<std::size_t>(smp.k - 1)];
    }
  });

  MomentSums total;
  total.k.assign(orders, 0.0);
  total.t.assign(orders, 0.0);
  for (const auto& s : parts) {
    for (std::size_t m = 0; m < orders; ++m) {
      total.k[m] += s.k[m];
      total.t[m] += s.t[m];
    }
    total.count += s.count;
    total.censored += s.censored;
    if (total.histogram.size() < s.histogram.size()) total.histogram.resize(s.histogram.size(), 0);
    for (std::size_t i = 0; i < s.histogram.size(); ++i) total.histogram[i] += s.histogram[i];
  }

  FirstDetectionStats out;
  out.seed = opts.seed;
  out.samples = opts.samples;
  out.censored = total.censored;
  out.histogram = std::move(total.histogram);
  for (int m = 1; m <= opts.max_order; ++m) {
    const auto i = static_cast<std::size_t>(m - 1);
    const auto i2 = static_cast<std::size_t>(2 * m - 1);
    out.moments_k.push_back(estimate(total.k[i], total.k[i2], total.count));
    out.moments_t.push_back(estimate(total.t[i], total.t[i2], total.count));
  }
  return out;
}

AmplitudeStats estimate_amplitude_correlations(const CanonicalSpectralModel& model,
                                               const TimeDistribution& dist, std::size_t K,
                                               std::int64_t realizations, std::uint64_t seed,
                                               int threads) {
  if (K < 1) throw InvalidInput("K must be at least 1");
  if (realizations < 2) throw InvalidInput("need at least two realizations");
  const auto n = static_cast<Eigen::Index>(K);
  const std::int64_t chunks = (realizations + kChunkSize - 1) / kChunkSize;

  struct Part {
    Eigen::MatrixXcd sum;
    Eigen::MatrixXd sum_sq;  // |x|^2 summed, for the pooled variance
  };
  std::vector<Part> parts(static_cast<std::size_t>(chunks));

  for_each_chunk(chunks, resolve_threads(threads), [&](std::int64_t c) {
    RandomStream rng(seed, static_cast<std::uint64_t>(c));
    Part& p = parts[static_cast<std::size_t>(c)];
    p.sum = Eigen::MatrixXcd::Zero(n, n);
    p.sum_sq = Eigen::MatrixXd::Zero(n, n);
    const std::int64_t begin = c * kChunkSize;
    const std::int64_t end = std::min(realizations, begin + kChunkSize);
    for (std::int64_t r = begin; r < end; ++r) {
      const auto tr = sample_trajectory(model, dist, rng, K);
      Eigen::Map<const Eigen::VectorXcd> phi(tr.amplitudes.data(), n);
      const Eigen::MatrixXcd outer = phi.conjugate() * phi.transpose();
      p.sum += outer;
      p.sum_sq += outer.cwiseAbs2();
    }
  });

  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : parts) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const double dn = static_cast<double>(realizations);
  AmplitudeStats out;
  out.seed = seed;
  out.realizations = realizations;
  out.mean = sum / dn;
  const Eigen::MatrixXd var =
      ((sum_sq - dn * out.mean.cwiseAbs2()) / (dn - 1.0)).cwiseMax(0.0);
  out.std_error = (var / dn).cwiseSqrt();
  return out;
}

}  // namespace monret
