#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dpa/random.hpp"

namespace dpa::ml {

inline constexpr double kMinBandwidth = 0.01;

// Gaussian-product kernel density over a fixed set of dimensions. Bandwidths
// follow Silverman's rule per dimension, floored so flag variables with zero
// variance still get a usable kernel. With fewer than two samples the model
// degenerates to a point mass around the single sample.
class DensityModel {
public:
    DensityModel() = default;

    explicit DensityModel(std::vector<std::vector<double>> samples)
        : samples_(std::move(samples)) {
        if (samples_.empty()) throw std::invalid_argument("DensityModel: no samples");
        dim_ = samples_[0].size();
        bandwidth_.assign(dim_, kMinBandwidth);
        lo_.assign(dim_, 0.0);
        hi_.assign(dim_, 0.0);
        const double n = static_cast<double>(samples_.size());
        for (std::size_t d = 0; d < dim_; ++d) {
            double mean = 0, var = 0;
            lo_[d] = hi_[d] = samples_[0][d];
            for (const auto& s : samples_) {
                mean += s[d];
                lo_[d] = std::min(lo_[d], s[d]);
                hi_[d] = std::max(hi_[d], s[d]);
            }
            mean /= n;
            for (const auto& s : samples_) var += (s[d] - mean) * (s[d] - mean);
            if (n > 1) {
                double sigma = std::sqrt(var / (n - 1));
                bandwidth_[d] = std::max(kMinBandwidth, 1.06 * sigma * std::pow(n, -0.2));
            }
        }
    }

    std::size_t dim() const { return dim_; }
    std::size_t sample_count() const { return samples_.size(); }
    const std::vector<double>& bandwidth() const { return bandwidth_; }

    double logpdf(const std::vector<double>& x) const {
        if (x.size() != dim_) throw std::invalid_argument("DensityModel: dim mismatch");
        // log-sum-exp over kernel components
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(samples_.size());
        double log_norm = 0;
        for (std::size_t d = 0; d < dim_; ++d)
            log_norm += std::log(bandwidth_[d] * std::sqrt(2 * std::numbers::pi));
        for (const auto& s : samples_) {
            double e = 0;
            for (std::size_t d = 0; d < dim_; ++d) {
                double z = (x[d] - s[d]) / bandwidth_[d];
                e -= 0.5 * z * z;
            }
            e -= log_norm;
            terms.push_back(e);
            best = std::max(best, e);
        }
        double acc = 0;
        for (double t : terms) acc += std::exp(t - best);
        return best + std::log(acc / static_cast<double>(samples_.size()));
    }

    double pdf(const std::vector<double>& x) const { return std::exp(logpdf(x)); }

    // Draws stay within the observed range widened by three bandwidths.
    std::vector<double> sample(Rng& rng) const {
        const auto& base = samples_[uniform_int(rng, 0, static_cast<int>(samples_.size()) - 1)];
        std::vector<double> x(dim_);
        for (std::size_t d = 0; d < dim_; ++d) {
            double v = base[d] + gaussian(rng, 0.0, bandwidth_[d]);
            x[d] = std::clamp(v, lo_[d] - 3 * bandwidth_[d], hi_[d] + 3 * bandwidth_[d]);
        }
        return x;
    }

    std::vector<std::vector<double>> sample(int n, Rng& rng) const {
        std::vector<std::vector<double>> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) out.push_back(sample(rng));
        return out;
    }

    const std::vector<std::vector<double>>& samples() const { return samples_; }

private:
    std::vector<std::vector<double>> samples_;
    std::vector<double> bandwidth_;
    std::vector<double> lo_, hi_;
    std::size_t dim_ = 0;
};

// Projects full states onto the given variable indices and fits a density.
inline DensityModel fit_density(const std::vector<std::vector<double>>& states,
                                const std::vector<int>& vars) {
    std::vector<std::vector<double>> proj;
    proj.reserve(states.size());
    for (const auto& s : states) {
        std::vector<double> p;
        p.reserve(vars.size());
        for (int v : vars) p.push_back(s[v]);
        proj.push_back(std::move(p));
    }
    return DensityModel(std::move(proj));
}

}  // namespace dpa::ml
