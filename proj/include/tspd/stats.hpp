#pragma once

#include <cmath>
#include <cstddef>

namespace tspd
{
    // Welford single-pass mean/variance with Chan et al. merging.  Merging
    // partial accumulators in a fixed order gives results that do not depend
    // on how the samples were split across workers.
    class RunningStats
    {
    public:
        void add(double x) noexcept
        {
            count_++;
            const double delta = x - mean_;
            mean_ += delta / static_cast<double>(count_);
            m2_ += delta * (x - mean_);
        }

        void merge(const RunningStats &other) noexcept
        {
            if (other.count_ == 0)
            {
                return;
            }
            if (count_ == 0)
            {
                *this = other;
                return;
            }
            const double na = static_cast<double>(count_);
            const double nb = static_cast<double>(other.count_);
            const double delta = other.mean_ - mean_;
            const double n = na + nb;
            mean_ += delta * nb / n;
            m2_ += other.m2_ + delta * delta * na * nb / n;
            count_ += other.count_;
        }

        std::size_t count() const noexcept { return count_; }
        double mean() const noexcept { return mean_; }

        // Unbiased sample variance.
        double variance() const noexcept
        {
            return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
        }

        double stderr_of_mean() const noexcept
        {
            return count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
        }

    private:
        std::size_t count_ = 0;
        double mean_ = 0.0;
        double m2_ = 0.0;
    };
}
