#include "wsn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsn {

double dist2(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

NeighborGraph NeighborGraph::build(const std::vector<Position>& positions, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("radius must be positive");
    }
    for (const auto& p : positions) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument("positions must be finite");
        }
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (positions[i].x == positions[j].x && positions[i].y == positions[j].y) {
                throw std::invalid_argument("duplicate positions");
            }
        }
    }

    NeighborGraph g;
    g.radius_ = radius;
    g.positions_ = positions;
    g.adjacency_.assign(positions.size(), {});
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (dist2(positions[i], positions[j]) <= r2) {
                g.adjacency_[i].push_back(static_cast<NodeId>(j));
                g.adjacency_[j].push_back(static_cast<NodeId>(i));
            }
        }
    }
    for (auto& adj : g.adjacency_) {
        std::sort(adj.begin(), adj.end());
    }
    return g;
}

NodeId NeighborGraph::add_node(const Position& pos) {
    if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) {
        throw std::invalid_argument("positions must be finite");
    }
    for (const auto& p : positions_) {
        if (p.x == pos.x && p.y == pos.y) {
            throw std::invalid_argument("duplicate positions");
        }
    }
    const NodeId id = static_cast<NodeId>(positions_.size());
    const double r2 = radius_ * radius_;
    std::vector<NodeId> adj;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (dist2(positions_[i], pos) <= r2) {
            adj.push_back(static_cast<NodeId>(i));
            auto& other = adjacency_[i];
            other.insert(std::upper_bound(other.begin(), other.end(), id), id);
        }
    }
    positions_.push_back(pos);
    adjacency_.push_back(std::move(adj));
    return id;
}

std::span<const NodeId> NeighborGraph::neighbors(NodeId n) const {
    check(n);
    return adjacency_[n];
}

std::size_t NeighborGraph::degree(NodeId n) const {
    check(n);
    return adjacency_[n].size();
}

bool NeighborGraph::adjacent(NodeId a, NodeId b) const {
    check(a);
    check(b);
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
}

const Position& NeighborGraph::position(NodeId n) const {
    check(n);
    return positions_[n];
}

std::size_t NeighborGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& adj : adjacency_) total += adj.size();
    return total / 2;
}

void NeighborGraph::check(NodeId n) const {
    if (n >= positions_.size()) {
        throw std::out_of_range("unknown node id");
    }
}

}  // namespace wsn
