#pragma once

// Independent brute-force references used by the unit and acceptance suites.
// Everything here is deliberately naive and kept away from the library
// implementations it checks.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "dpa/random.hpp"

namespace dpa::testing {

inline double odist2(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

struct DbscanReference {
    std::vector<bool> core;
    std::vector<int> core_component;  // -1 for non-core
};

// Density-reachability by explicit connected components over core points.
inline DbscanReference dbscan_reference(const std::vector<std::vector<double>>& pts, double eps,
                                        int min_pts) {
    const int n = static_cast<int>(pts.size());
    const double eps2 = eps * eps;
    DbscanReference ref;
    ref.core.assign(n, false);
    ref.core_component.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        int cnt = 0;
        for (int j = 0; j < n; ++j)
            if (odist2(pts[i], pts[j]) <= eps2) ++cnt;
        ref.core[i] = cnt >= min_pts;
    }
    // union-find over core points
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (ref.core[i] && ref.core[j] && odist2(pts[i], pts[j]) <= eps2)
                parent[find(i)] = find(j);
    std::map<int, int> rename;
    for (int i = 0; i < n; ++i)
        if (ref.core[i]) {
            int r = find(i);
            if (!rename.count(r)) rename[r] = static_cast<int>(rename.size());
            ref.core_component[i] = rename[r];
        }
    return ref;
}

// Checks labels against the reference semantics: noise is exact, core points
// must induce the same partition up to renaming, and every border point must
// carry the component of some core point within eps.
inline bool dbscan_labels_match(const std::vector<std::vector<double>>& pts, double eps,
                                int min_pts, const std::vector<int>& labels) {
    const int n = static_cast<int>(pts.size());
    const double eps2 = eps * eps;
    DbscanReference ref = dbscan_reference(pts, eps, min_pts);

    std::map<int, int> label_to_comp;
    std::map<int, int> comp_to_label;
    for (int i = 0; i < n; ++i) {
        if (ref.core[i]) {
            if (labels[i] < 0) return false;
            int comp = ref.core_component[i];
            auto [it1, fresh1] = label_to_comp.emplace(labels[i], comp);
            if (!fresh1 && it1->second != comp) return false;
            auto [it2, fresh2] = comp_to_label.emplace(comp, labels[i]);
            if (!fresh2 && it2->second != labels[i]) return false;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (ref.core[i]) continue;
        bool near_core = false;
        std::set<int> reachable_comps;
        for (int j = 0; j < n; ++j)
            if (ref.core[j] && odist2(pts[i], pts[j]) <= eps2) {
                near_core = true;
                reachable_comps.insert(ref.core_component[j]);
            }
        if (!near_core) {
            if (labels[i] != -1) return false;
        } else {
            if (!label_to_comp.count(labels[i])) return false;
            if (!reachable_comps.count(label_to_comp[labels[i]])) return false;
        }
    }
    return true;
}

inline std::vector<std::vector<double>> random_point_cloud(dpa::Rng& rng, int blobs,
                                                           int per_blob, double spread) {
    std::vector<std::vector<double>> pts;
    for (int b = 0; b < blobs; ++b) {
        double cx = uniform_real(rng, 0, 1), cy = uniform_real(rng, 0, 1);
        for (int i = 0; i < per_blob; ++i)
            pts.push_back({cx + gaussian(rng, 0, spread), cy + gaussian(rng, 0, spread)});
    }
    return pts;
}

}  // namespace dpa::testing
