#include "gcce/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_set>

#include "gcce/error.hpp"

namespace gcce {

std::size_t ConnectivityGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& adj : adjacency) n += adj.size();
    return n / 2;
}

bool ConnectivityGraph::connected(int a, int b) const {
    const auto& adj = adjacency.at(static_cast<std::size_t>(a));
    return std::binary_search(adj.begin(), adj.end(), b);
}

ConnectivityGraph build_connectivity(std::span<const Vec3> positions, double r_dipole) {
    if (!(r_dipole > 0.0)) throw ConfigError("r_dipole must be positive");
    ConnectivityGraph g;
    g.adjacency.resize(positions.size());
    if (positions.empty()) return g;

    // Cell list with cells of edge r_dipole.
    Vec3 lo = positions[0];
    for (const auto& p : positions) lo = lo.cwiseMin(p);
    using Key = std::tuple<long, long, long>;
    std::map<Key, std::vector<int>> cells;
    auto key_of = [&](const Vec3& p) {
        const Vec3 q = (p - lo) / r_dipole;
        return Key{static_cast<long>(std::floor(q.x())), static_cast<long>(std::floor(q.y())),
                   static_cast<long>(std::floor(q.z()))};
    };
    for (std::size_t i = 0; i < positions.size(); ++i) cells[key_of(positions[i])].push_back(static_cast<int>(i));

    const double r2 = r_dipole * r_dipole;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto [cx, cy, cz] = key_of(positions[i]);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy)
                for (long dz = -1; dz <= 1; ++dz) {
                    auto it = cells.find(Key{cx + dx, cy + dy, cz + dz});
                    if (it == cells.end()) continue;
                    for (int j : it->second) {
                        if (j <= static_cast<int>(i)) continue;
                        if ((positions[i] - positions[static_cast<std::size_t>(j)]).squaredNorm() <= r2) {
                            g.adjacency[i].push_back(j);
                            g.adjacency[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
                        }
                    }
                }
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
}

ConnectivityGraph build_connectivity(std::span<const BathSpin> bath, double r_dipole) {
    std::vector<Vec3> positions;
    positions.reserve(bath.size());
    for (const auto& s : bath) positions.push_back(s.position);
    return build_connectivity(positions, r_dipole);
}

std::size_t ClusterHash::operator()(const std::vector<int>& members) const {
    std::size_t h = members.size();
    for (int m : members) h ^= std::hash<int>{}(m) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

ClusterSet::ClusterSet(std::vector<Cluster> clusters, ConnectivityGraph graph)
    : clusters_(std::move(clusters)), graph_(std::move(graph)) {
    std::sort(clusters_.begin(), clusters_.end());
    index_.reserve(clusters_.size());
    for (std::size_t i = 0; i < clusters_.size(); ++i) index_.emplace(clusters_[i].members, i);
}

std::size_t ClusterSet::max_order() const { return clusters_.empty() ? 0 : clusters_.back().order(); }

std::pair<std::size_t, std::size_t> ClusterSet::order_range(std::size_t order) const {
    auto lo = std::partition_point(clusters_.begin(), clusters_.end(), [&](const Cluster& c) { return c.order() < order; });
    auto hi = std::partition_point(lo, clusters_.end(), [&](const Cluster& c) { return c.order() <= order; });
    return {static_cast<std::size_t>(lo - clusters_.begin()), static_cast<std::size_t>(hi - clusters_.begin())};
}

long ClusterSet::find(const std::vector<int>& members) const {
    auto it = index_.find(members);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
}

ClusterSet enumerate_clusters(const ConnectivityGraph& graph, std::size_t max_order, std::size_t cluster_cap) {
    if (max_order < 1) throw ConfigError("cluster order must be at least 1");
    const std::size_t n = graph.size();
    std::vector<Cluster> all;
    auto overflow = [&]() {
        std::ostringstream msg;
        const double degree = n ? 2.0 * static_cast<double>(graph.edge_count()) / static_cast<double>(n) : 0.0;
        msg << "cluster enumeration exceeds cap of " << cluster_cap << " (" << n << " spins, mean " << degree
            << " neighbours within the dipolar cutoff); reduce r_dipole, r_bath or the order";
        throw EnumerationOverflowError(msg.str());
    };
    if (n > cluster_cap) overflow();

    std::vector<std::vector<int>> layer;
    for (std::size_t i = 0; i < n; ++i) layer.push_back({static_cast<int>(i)});
    for (auto& m : layer) all.push_back(Cluster{m});

    for (std::size_t order = 2; order <= max_order && !layer.empty(); ++order) {
        std::unordered_set<std::vector<int>, ClusterHash> next;
        for (const auto& members : layer) {
            for (int m : members)
                for (int v : graph.adjacency[static_cast<std::size_t>(m)]) {
                    if (std::binary_search(members.begin(), members.end(), v)) continue;
                    std::vector<int> grown = members;
                    grown.insert(std::upper_bound(grown.begin(), grown.end(), v), v);
                    next.insert(std::move(grown));
                }
            if (all.size() + next.size() > cluster_cap) overflow();
        }
        layer.assign(next.begin(), next.end());
        std::sort(layer.begin(), layer.end());
        for (auto& m : layer) all.push_back(Cluster{m});
    }
    return ClusterSet(std::move(all), graph);
}

std::vector<std::size_t> subcluster_indices(const Cluster& c, const ClusterSet& set) {
    std::vector<std::size_t> out;
    const std::size_t k = c.order();
    if (k <= 1) return out;
    if (k > 20) throw ConfigError("subcluster enumeration limited to 20 members");
    const unsigned full = (1u << k) - 1u;
    for (unsigned mask = 1; mask < full; ++mask) {
        std::vector<int> sub;
        for (std::size_t b = 0; b < k; ++b)
            if (mask & (1u << b)) sub.push_back(c.members[b]);
        const long idx = set.find(sub);
        if (idx >= 0) out.push_back(static_cast<std::size_t>(idx));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Cluster> subclusters(const Cluster& c, const ClusterSet& set) {
    std::vector<Cluster> out;
    for (std::size_t idx : subcluster_indices(c, set)) out.push_back(set.clusters()[idx]);
    return out;
}

} // namespace gcce
