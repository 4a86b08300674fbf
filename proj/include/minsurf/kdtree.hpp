#pragma once

#include "minsurf/common.hpp"

#include <algorithm>
#include <numeric>

namespace minsurf {

/// Static 3-D k-d tree over a point set. Queries return neighbors ordered by
/// (distance, index), so ties are always broken toward the lower index.
/// Small sets (N <= 256) skip the tree and scan directly.
class SpatialIndex {
  public:
    explicit SpatialIndex(const std::vector<Vec3>& points) : points_(points) {
        const std::size_t n = points_.size();
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), 0u);
        if (n > kBruteForceLimit) {
            nodes_.reserve(2 * n / kLeafSize + 2);
            root_ = build(0, n);
        }
    }

    std::size_t size() const { return points_.size(); }

    /// Indices of the k nearest points to `query`, ascending by (distance, index).
    std::vector<std::size_t> knn(const Vec3& query, std::size_t k) const {
        if (k > points_.size()) throw std::domain_error("SpatialIndex::knn: k exceeds point count");
        std::vector<Entry> heap;  // max-heap on (dist2, index)
        heap.reserve(k + 1);
        if (nodes_.empty()) {
            for (std::size_t i = 0; i < points_.size(); ++i)
                push_candidate(heap, k, {(points_[i] - query).squaredNorm(), i});
        } else {
            search(root_, query, k, heap);
        }
        std::sort(heap.begin(), heap.end(), entry_less);
        std::vector<std::size_t> out(heap.size());
        for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].index;
        return out;
    }

    /// Distance to the nearest point.
    double nearest_distance(const Vec3& query) const {
        return std::sqrt((points_[knn(query, 1)[0]] - query).squaredNorm());
    }

  private:
    static constexpr std::size_t kBruteForceLimit = 256;
    static constexpr std::size_t kLeafSize = 16;

    struct Entry {
        double dist2;
        std::size_t index;
    };
    static bool entry_less(const Entry& a, const Entry& b) {
        return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
    }

    struct Node {
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        std::size_t left = 0, right = 0;  // children for interior nodes
        std::size_t begin = 0, end = 0;   // perm_ range for leaves
    };

    std::size_t build(std::size_t begin, std::size_t end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return nodes_.size() - 1;
        }
        Vec3 lo = points_[perm_[begin]], hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            lo = lo.cwiseMin(points_[perm_[i]]);
            hi = hi.cwiseMax(points_[perm_[i]]);
        }
        int axis;
        (hi - lo).maxCoeff(&axis);
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             const double ca = points_[a][axis], cb = points_[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        node.axis = axis;
        node.split = points_[perm_[mid]][axis];
        nodes_.push_back(node);
        const std::size_t self = nodes_.size() - 1;
        const std::size_t l = build(begin, mid);
        const std::size_t r = build(mid, end);
        nodes_[self].left = l;
        nodes_[self].right = r;
        return self;
    }

    static void push_candidate(std::vector<Entry>& heap, std::size_t k, Entry e) {
        if (heap.size() < k) {
            heap.push_back(e);
            std::push_heap(heap.begin(), heap.end(), entry_less);
        } else if (entry_less(e, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), entry_less);
            heap.back() = e;
            std::push_heap(heap.begin(), heap.end(), entry_less);
        }
    }

    void search(std::size_t node_id, const Vec3& query, std::size_t k,
                std::vector<Entry>& heap) const {
        const Node& node = nodes_[node_id];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = perm_[i];
                push_candidate(heap, k, {(points_[idx] - query).squaredNorm(), idx});
            }
            return;
        }
        const double delta = query[node.axis] - node.split;
        const std::size_t near = delta < 0.0 ? node.left : node.right;
        const std::size_t far = delta < 0.0 ? node.right : node.left;
        search(near, query, k, heap);
        if (heap.size() < k || delta * delta <= heap.front().dist2) search(far, query, k, heap);
    }

    const std::vector<Vec3>& points_;
    std::vector<std::size_t> perm_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

}  // namespace minsurf
