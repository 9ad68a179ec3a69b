#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dpa/random.hpp"

namespace dpa::ml {

// RBF-kernel support vector machine trained with sequential minimal
// optimization, with a Platt-style sigmoid fitted on the decision values so
// classify() returns a probability of the positive class. A single-class
// training set degenerates to a flagged constant classifier.
class ProbabilisticClassifier {
public:
    ProbabilisticClassifier() = default;

    static ProbabilisticClassifier constant(double probability) {
        ProbabilisticClassifier c;
        c.constant_ = true;
        c.constant_value_ = probability;
        c.training_accuracy_ = 1.0;
        return c;
    }

    bool is_constant() const { return constant_; }
    double training_accuracy() const { return training_accuracy_; }

    double classify(const std::vector<double>& x) const {
        if (constant_) return constant_value_;
        double f = decision(x);
        return 1.0 / (1.0 + std::exp(platt_a_ * f + platt_b_));
    }

    double decision(const std::vector<double>& x) const { return raw_decision(project(x)); }

    // Dimensions the classifier actually looks at; empty means all.
    const std::vector<int>& feature_dims() const { return feature_dims_; }

    static ProbabilisticClassifier train(const std::vector<std::vector<double>>& positives,
                                         const std::vector<std::vector<double>>& negatives,
                                         std::uint64_t seed, double c_param = 10.0,
                                         std::vector<int> feature_dims = {}) {
        if (positives.empty() && negatives.empty()) return constant(0.5);
        if (negatives.empty()) return constant(1.0);
        if (positives.empty()) return constant(0.0);

        ProbabilisticClassifier m;
        m.feature_dims_ = std::move(feature_dims);
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (const auto& p : positives) {
            xs.push_back(m.project(p));
            ys.push_back(1.0);
        }
        for (const auto& n : negatives) {
            xs.push_back(m.project(n));
            ys.push_back(-1.0);
        }
        const int n = static_cast<int>(xs.size());
        const std::size_t dim = xs[0].size();

        // gamma = 1 / (dim * mean variance), the usual "scale" heuristic
        double total_var = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            double mean = 0, var = 0;
            for (const auto& x : xs) mean += x[d];
            mean /= n;
            for (const auto& x : xs) var += (x[d] - mean) * (x[d] - mean);
            total_var += var / n;
        }
        double mean_var = total_var / static_cast<double>(dim);
        m.gamma_ = mean_var > 1e-12 ? 1.0 / (static_cast<double>(dim) * mean_var) : 1.0;

        std::vector<double> alpha(n, 0.0);
        double b = 0.0;
        const double tol = 1e-3;
        Rng rng(derive_seed(seed, 0x5f3759df));

        std::vector<std::vector<double>> k(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                k[i][j] = k[j][i] = m.rbf(xs[i], xs[j]);

        auto f_of = [&](int i) {
            double f = b;
            for (int j = 0; j < n; ++j)
                if (alpha[j] != 0.0) f += alpha[j] * ys[j] * k[j][i];
            return f;
        };

        // simplified SMO
        int passes = 0;
        const int max_passes = 5;
        int guard = 200 * n;
        while (passes < max_passes && guard-- > 0) {
            int changed = 0;
            for (int i = 0; i < n; ++i) {
                double ei = f_of(i) - ys[i];
                if ((ys[i] * ei < -tol && alpha[i] < c_param) ||
                    (ys[i] * ei > tol && alpha[i] > 0)) {
                    int j = uniform_int(rng, 0, n - 2);
                    if (j >= i) ++j;
                    double ej = f_of(j) - ys[j];
                    double ai_old = alpha[i], aj_old = alpha[j];
                    double lo, hi;
                    if (ys[i] != ys[j]) {
                        lo = std::max(0.0, aj_old - ai_old);
                        hi = std::min(c_param, c_param + aj_old - ai_old);
                    } else {
                        lo = std::max(0.0, ai_old + aj_old - c_param);
                        hi = std::min(c_param, ai_old + aj_old);
                    }
                    if (lo >= hi) continue;
                    double eta = 2 * k[i][j] - k[i][i] - k[j][j];
                    if (eta >= 0) continue;
                    alpha[j] = std::clamp(aj_old - ys[j] * (ei - ej) / eta, lo, hi);
                    if (std::abs(alpha[j] - aj_old) < 1e-5) continue;
                    alpha[i] = ai_old + ys[i] * ys[j] * (aj_old - alpha[j]);
                    double b1 = b - ei - ys[i] * (alpha[i] - ai_old) * k[i][i] -
                                ys[j] * (alpha[j] - aj_old) * k[i][j];
                    double b2 = b - ej - ys[i] * (alpha[i] - ai_old) * k[i][j] -
                                ys[j] * (alpha[j] - aj_old) * k[j][j];
                    if (alpha[i] > 0 && alpha[i] < c_param)
                        b = b1;
                    else if (alpha[j] > 0 && alpha[j] < c_param)
                        b = b2;
                    else
                        b = (b1 + b2) / 2;
                    ++changed;
                }
            }
            passes = changed == 0 ? passes + 1 : 0;
        }

        m.bias_ = b;
        for (int i = 0; i < n; ++i) {
            if (alpha[i] > 1e-8) {
                m.sv_.push_back(xs[i]);
                m.sv_coef_.push_back(alpha[i] * ys[i]);
            }
        }

        std::vector<double> dec(n);
        int correct = 0;
        for (int i = 0; i < n; ++i) {
            dec[i] = m.raw_decision(xs[i]);
            if ((dec[i] >= 0) == (ys[i] > 0)) ++correct;
        }
        m.training_accuracy_ = static_cast<double>(correct) / n;
        m.fit_platt(dec, ys);
        return m;
    }

private:
    std::vector<double> project(const std::vector<double>& x) const {
        if (feature_dims_.empty()) return x;
        std::vector<double> out;
        out.reserve(feature_dims_.size());
        for (int d : feature_dims_) out.push_back(x[d]);
        return out;
    }

    double raw_decision(const std::vector<double>& px) const {
        double f = bias_;
        for (std::size_t i = 0; i < sv_.size(); ++i) f += sv_coef_[i] * kernel(sv_[i], px);
        return f;
    }

    double rbf(const std::vector<double>& a, const std::vector<double>& b) const {
        double d = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double t = a[i] - b[i];
            d += t * t;
        }
        return std::exp(-gamma_ * d);
    }

    double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
        return rbf(a, b);
    }

    // Platt 1999 sigmoid fit as revised by Lin, Lin & Weng (2007).
    void fit_platt(const std::vector<double>& dec, const std::vector<double>& ys) {
        const int n = static_cast<int>(dec.size());
        double prior1 = 0, prior0 = 0;
        for (double y : ys) (y > 0 ? prior1 : prior0) += 1;
        double hi_t = (prior1 + 1.0) / (prior1 + 2.0);
        double lo_t = 1.0 / (prior0 + 2.0);
        std::vector<double> t(n);
        for (int i = 0; i < n; ++i) t[i] = ys[i] > 0 ? hi_t : lo_t;

        double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
        const double min_step = 1e-10, sigma = 1e-12;
        auto objective = [&](double pa, double pb) {
            double obj = 0;
            for (int i = 0; i < n; ++i) {
                double f = pa * dec[i] + pb;
                if (f >= 0)
                    obj += t[i] * f + std::log1p(std::exp(-f));
                else
                    obj += (t[i] - 1) * f + std::log1p(std::exp(f));
            }
            return obj;
        };
        double fval = objective(a, b);
        for (int it = 0; it < 100; ++it) {
            double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
            for (int i = 0; i < n; ++i) {
                double f = a * dec[i] + b;
                double p, q;
                if (f >= 0) {
                    p = std::exp(-f) / (1.0 + std::exp(-f));
                    q = 1.0 / (1.0 + std::exp(-f));
                } else {
                    p = 1.0 / (1.0 + std::exp(f));
                    q = std::exp(f) / (1.0 + std::exp(f));
                }
                double d2 = p * q;
                h11 += dec[i] * dec[i] * d2;
                h22 += d2;
                h21 += dec[i] * d2;
                double d1 = t[i] - p;
                g1 += dec[i] * d1;
                g2 += d1;
            }
            if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
            double det = h11 * h22 - h21 * h21;
            double da = -(h22 * g1 - h21 * g2) / det;
            double db = -(-h21 * g1 + h11 * g2) / det;
            double gd = g1 * da + g2 * db;
            double step = 1.0;
            while (step >= min_step) {
                double na = a + step * da, nb = b + step * db;
                double nf = objective(na, nb);
                if (nf < fval + 1e-4 * step * gd) {
                    a = na;
                    b = nb;
                    fval = nf;
                    break;
                }
                step /= 2;
            }
            if (step < min_step) break;
        }
        platt_a_ = a;
        platt_b_ = b;
    }

    bool constant_ = false;
    double constant_value_ = 0.5;
    double gamma_ = 1.0;
    double bias_ = 0.0;
    double platt_a_ = -1.0;
    double platt_b_ = 0.0;
    double training_accuracy_ = 0.0;
    std::vector<std::vector<double>> sv_;
    std::vector<double> sv_coef_;
    std::vector<int> feature_dims_;
};

inline ProbabilisticClassifier train_classifier(const std::vector<std::vector<double>>& positives,
                                                const std::vector<std::vector<double>>& negatives,
                                                std::uint64_t seed) {
    return ProbabilisticClassifier::train(positives, negatives, seed);
}

// Deterministic size cap used before the heavier trainings.
inline std::vector<std::vector<double>> subsample(const std::vector<std::vector<double>>& xs,
                                                  std::size_t cap, Rng& rng) {
    if (xs.size() <= cap) return xs;
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < cap; ++i) {
        std::size_t j = i + uniform_int(rng, 0, static_cast<int>(idx.size() - i) - 1);
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::vector<double>> out;
    out.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(xs[idx[i]]);
    return out;
}

}  // namespace dpa::ml
