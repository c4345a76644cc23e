#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsn/types.hpp"

namespace wsn {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double dist2(const Position& a, const Position& b);

// Unit-disk neighbor graph with inclusive boundary: edge (u,v) iff
// Euclidean distance <= radius. Immutable during a run except for explicit
// new-node arrivals; node death masks membership elsewhere, it does not
// mutate the graph.
class NeighborGraph {
public:
    // Throws std::invalid_argument on non-positive radius or duplicate
    // positions (duplicates break nearest-neighbor tie-breaking).
    static NeighborGraph build(const std::vector<Position>& positions, double radius);

    NodeId add_node(const Position& pos);

    std::span<const NodeId> neighbors(NodeId n) const;
    std::size_t degree(NodeId n) const;  // |N(n)|, throws on unknown id
    bool adjacent(NodeId a, NodeId b) const;
    const Position& position(NodeId n) const;
    std::size_t size() const { return positions_.size(); }
    double radius() const { return radius_; }
    std::size_t edge_count() const;

private:
    void check(NodeId n) const;

    double radius_ = 0.0;
    std::vector<Position> positions_;
    std::vector<std::vector<NodeId>> adjacency_;  // sorted ascending
};

}  // namespace wsn
