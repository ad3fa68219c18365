#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "gcce/structure.hpp"

namespace gcce {

// Undirected graph over bath indices; adjacency lists sorted ascending.
struct ConnectivityGraph {
    std::vector<std::vector<int>> adjacency;

    std::size_t size() const { return adjacency.size(); }
    std::size_t edge_count() const;
    bool connected(int a, int b) const;
};

// Edge iff pairwise distance <= r_dipole.
ConnectivityGraph build_connectivity(std::span<const BathSpin> bath, double r_dipole);
ConnectivityGraph build_connectivity(std::span<const Vec3> positions, double r_dipole);

struct Cluster {
    std::vector<int> members; // sorted, unique

    std::size_t order() const { return members.size(); }
    auto operator<=>(const Cluster& other) const {
        if (members.size() != other.members.size()) return members.size() <=> other.members.size();
        return members <=> other.members;
    }
    bool operator==(const Cluster&) const = default;
};

struct ClusterHash {
    std::size_t operator()(const std::vector<int>& members) const;
};

// All connected clusters up to the maximum order, sorted by (order, members).
class ClusterSet {
public:
    ClusterSet() = default;
    ClusterSet(std::vector<Cluster> clusters, ConnectivityGraph graph);

    const std::vector<Cluster>& clusters() const { return clusters_; }
    const ConnectivityGraph& graph() const { return graph_; }
    std::size_t size() const { return clusters_.size(); }
    std::size_t max_order() const;
    // [begin, end) index range of clusters with the given order.
    std::pair<std::size_t, std::size_t> order_range(std::size_t order) const;

    // Index of the cluster with these members, or -1.
    long find(const std::vector<int>& members) const;

private:
    std::vector<Cluster> clusters_;
    ConnectivityGraph graph_;
    std::unordered_map<std::vector<int>, std::size_t, ClusterHash> index_;
};

// Throws EnumerationOverflowError when more than cluster_cap clusters would be produced.
ClusterSet enumerate_clusters(const ConnectivityGraph& graph, std::size_t max_order, std::size_t cluster_cap = 20'000'000);

// Every proper nonempty subset of c present in the set, sorted like the set.
std::vector<Cluster> subclusters(const Cluster& c, const ClusterSet& set);
// Same, as indices into set.clusters().
std::vector<std::size_t> subcluster_indices(const Cluster& c, const ClusterSet& set);

} // namespace gcce
