#pragma once

#include <cmath>
#include <deque>
#include <vector>

namespace dpa::ml {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

// Standard density-reachability DBSCAN under Euclidean distance.
// Returns one label per point, -1 for noise.
inline std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps,
                               int min_pts) {
    const int n = static_cast<int>(points.size());
    const double eps2 = eps * eps;
    constexpr int kUndef = -2;
    std::vector<int> labels(n, kUndef);

    auto neighbors = [&](int i) {
        std::deque<int> out;
        for (int j = 0; j < n; ++j)
            if (sq_dist(points[i], points[j]) <= eps2) out.push_back(j);
        return out;
    };

    int cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] != kUndef) continue;
        std::deque<int> seeds = neighbors(i);
        if (static_cast<int>(seeds.size()) < min_pts) {
            labels[i] = -1;
            continue;
        }
        labels[i] = cluster;
        while (!seeds.empty()) {
            int j = seeds.front();
            seeds.pop_front();
            if (labels[j] == -1) labels[j] = cluster;  // border point
            if (labels[j] != kUndef) continue;
            labels[j] = cluster;
            std::deque<int> more = neighbors(j);
            if (static_cast<int>(more.size()) >= min_pts)
                seeds.insert(seeds.end(), more.begin(), more.end());
        }
        ++cluster;
    }
    return labels;
}

}  // namespace dpa::ml
