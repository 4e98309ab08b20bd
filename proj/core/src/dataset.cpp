#include "hyperwind/dataset.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "hyperwind/error.hpp"
#include "hyperwind/rng.hpp"

namespace hyperwind {

void MomentAccumulator::add(std::span<const double> x) {
  if (x.size() != dim_) throw DomainError("accumulator dimension mismatch");
  MomentAccumulator one(dim_);
  one.count_ = 1;
  std::copy(x.begin(), x.end(), one.mean_.begin());
  merge(one);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (other.dim_ != dim_) throw DomainError("accumulator dimension mismatch");
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  std::vector<double> delta(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      m2_[i * dim_ + j] += other.m2_[i * dim_ + j] + delta[i] * delta[j] * na * nb / n;
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta[i] * nb / n;
  count_ += other.count_;
}

std::vector<double> MomentAccumulator::covariance() const {
  std::vector<double> c(dim_ * dim_, 0.0);
  if (count_ < 2) return c;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = m2_[i] / static_cast<double>(count_ - 1);
  return c;
}

double MomentAccumulator::variance(std::size_t i) const {
  return count_ < 2 ? 0.0 : m2_[i * dim_ + i] / static_cast<double>(count_ - 1);
}

double MomentAccumulator::standard_error(std::size_t i) const {
  return count_ < 2 ? 0.0 : std::sqrt(variance(i) / static_cast<double>(count_));
}

void accumulate(Dataset& data) {
  const std::size_t d = data.paths.empty() ? 0 : data.paths.front().dim;
  data.escape = MomentAccumulator(1);
  data.winding = MomentAccumulator(d);
  std::vector<double> w(d);
  for (const auto& p : data.paths) {
    if (p.steps.empty() || p.horizon == 0) continue;
    const double n = static_cast<double>(p.horizon);
    const double rate = p.t.back() / n;
    MomentAccumulator e(1), x(d);
    e.add(std::span(&rate, 1));
    const auto last = p.winding_at(p.steps.size() - 1);
    for (std::size_t i = 0; i < d; ++i) w[i] = static_cast<double>(last[i]) / std::sqrt(n);
    x.add(w);
    data.escape.merge(e);
    data.winding.merge(x);
  }
}

Dataset batch_run(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t master_seed, std::size_t paths,
                  std::size_t workers) {
  Dataset data;
  data.master_seed = master_seed;
  data.paths.resize(paths);
  workers = std::max<std::size_t>(1, std::min(workers, paths));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::optional<PathError> first_error;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= paths) return;
      try {
        data.paths[i] = sample_path(spec, plan, mix_seed(master_seed, i), i);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || first_error->index() > i) first_error.emplace(i, e.what());
        next = paths;
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) throw *first_error;
  accumulate(data);
  return data;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("HYPERWIND_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace hyperwind
