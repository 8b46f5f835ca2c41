#pragma once

// Site graph of a finite spin cluster. Sites carry 1-based labels in the
// public API; site k occupies bit (k-1) of a basis index (see operators.hpp).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tfim/errors.hpp"

namespace tfim {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Edge {
    int i = 0; // 1-based, i < j
    int j = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Image of each site under a spatial map: mapping[k-1] = image of site k.
struct SitePermutation {
    std::vector<int> mapping;

    int size() const { return static_cast<int>(mapping.size()); }
    int operator()(int site) const { return mapping.at(site - 1); }

    bool is_bijection() const {
        std::vector<int> sorted = mapping;
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k < size(); ++k)
            if (sorted[k] != k + 1) return false;
        return true;
    }

    static SitePermutation identity(int n) {
        SitePermutation p;
        p.mapping.resize(n);
        for (int k = 0; k < n; ++k) p.mapping[k] = k + 1;
        return p;
    }

    // (this ∘ other): apply other first.
    SitePermutation compose(const SitePermutation& other) const {
        SitePermutation p;
        p.mapping.resize(other.mapping.size());
        for (int k = 1; k <= other.size(); ++k) p.mapping[k - 1] = (*this)(other(k));
        return p;
    }

    SitePermutation power(int k) const {
        SitePermutation p = identity(size());
        for (int r = 0; r < k; ++r) p = compose(p);
        return p;
    }

    int order() const {
        const SitePermutation id = identity(size());
        SitePermutation p = *this;
        for (int k = 1; k <= 720; ++k) {
            if (p.mapping == id.mapping) return k;
            p = compose(p);
        }
        return -1;
    }

    friend bool operator==(const SitePermutation&, const SitePermutation&) = default;
};

class SpinLattice {
public:
    SpinLattice() = default;

    SpinLattice(int n_sites, std::vector<Edge> edges, std::vector<Point2> positions = {},
                std::optional<int> center_site = std::nullopt, std::string name = "custom")
        : n_sites_(n_sites), positions_(std::move(positions)), center_(center_site),
          name_(std::move(name)) {
        if (n_sites_ <= 0) throw ConfigError("lattice needs at least one site");
        if (n_sites_ > 24) throw ConfigError("lattice too large for dense 2^N storage");
        if (!positions_.empty() && static_cast<int>(positions_.size()) != n_sites_)
            throw ConfigError("positions must have one entry per site");
        std::set<Edge> seen;
        for (Edge e : edges) {
            if (e.i > e.j) std::swap(e.i, e.j);
            if (e.i < 1 || e.j > n_sites_) throw ConfigError("edge references an invalid site");
            if (e.i == e.j) throw ConfigError("edge joins a site to itself");
            if (!seen.insert(e).second) throw ConfigError("duplicate edge");
            edges_.push_back(e);
        }
    }

    int n_sites() const { return n_sites_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Point2>& positions() const { return positions_; }
    std::optional<int> center_site() const { return center_; }
    const std::string& name() const { return name_; }
    std::size_t dim() const { return std::size_t{1} << n_sites_; }

    bool valid_site(int site) const { return site >= 1 && site <= n_sites_; }

    int degree(int site) const { return static_cast<int>(neighbors(site).size()); }

    std::vector<int> neighbors(int site) const {
        if (!valid_site(site)) throw ConfigError("site index " + std::to_string(site) + " out of range");
        std::vector<int> out;
        for (const Edge& e : edges_) {
            if (e.i == site) out.push_back(e.j);
            if (e.j == site) out.push_back(e.i);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool has_edge(int a, int b) const {
        Edge e{std::min(a, b), std::max(a, b)};
        return std::find(edges_.begin(), edges_.end(), e) != edges_.end();
    }

    double distance(int a, int b) const {
        if (positions_.empty()) throw ConfigError("lattice has no coordinates");
        if (!valid_site(a) || !valid_site(b)) throw ConfigError("site index out of range");
        const Point2 p = positions_[a - 1], q = positions_[b - 1];
        return std::hypot(p.x - q.x, p.y - q.y);
    }

    std::set<Edge> edge_set() const { return {edges_.begin(), edges_.end()}; }

    std::set<Edge> permuted_edge_set(const SitePermutation& perm) const {
        if (perm.size() != n_sites_) throw ConfigError("permutation size does not match lattice");
        std::set<Edge> out;
        for (const Edge& e : edges_) {
            int a = perm(e.i), b = perm(e.j);
            out.insert(Edge{std::min(a, b), std::max(a, b)});
        }
        return out;
    }

private:
    int n_sites_ = 0;
    std::vector<Edge> edges_;
    std::vector<Point2> positions_;
    std::optional<int> center_;
    std::string name_ = "custom";
};

namespace detail {
inline const std::vector<Edge>& wheel7_edges() {
    static const std::vector<Edge> edges{{1, 2}, {1, 3}, {1, 4}, {2, 4}, {2, 5}, {3, 4},
                                         {4, 5}, {3, 6}, {4, 6}, {4, 7}, {5, 7}, {6, 7}};
    return edges;
}
} // namespace detail

// Seven-site triangular cluster: rows of 2-3-2 sites, center = 4.
//
//     1   2
//   3   4   5
//     6   7
inline SpinLattice build_wheel7() {
    const double h = std::sqrt(3.0) / 2.0;
    std::vector<Point2> pos{{-0.5, h}, {0.5, h}, {-1.0, 0.0}, {0.0, 0.0},
                            {1.0, 0.0}, {-0.5, -h}, {0.5, -h}};
    return SpinLattice(7, detail::wheel7_edges(), std::move(pos), 4, "wheel7");
}

inline bool is_wheel7(const SpinLattice& lat) {
    if (lat.n_sites() != 7) return false;
    const auto& ref = detail::wheel7_edges();
    return lat.edge_set() == std::set<Edge>(ref.begin(), ref.end());
}

inline std::vector<int> neighbors(const SpinLattice& lat, int site) { return lat.neighbors(site); }

// Sixty-degree rotation of the wheel: ring 1→2→5→7→6→3→1, center fixed.
inline SitePermutation rotation_permutation(const SpinLattice& lat) {
    if (!is_wheel7(lat))
        throw UnsupportedError("rotation symmetry is only available for the wheel7 lattice");
    SitePermutation p;
    p.mapping = {2, 5, 1, 4, 7, 3, 6};
    return p;
}

// Custom lattice: {"n_sites": int, "edges": [[i,j],...]} with 1-based sites.
inline SpinLattice lattice_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("n_sites") || !doc.contains("edges"))
        throw ConfigError("lattice document needs \"n_sites\" and \"edges\"");
    const int n = doc.at("n_sites").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("each edge must be a pair [i,j]");
        edges.push_back(Edge{e[0].get<int>(), e[1].get<int>()});
    }
    SpinLattice lat(n, std::move(edges));
    if (is_wheel7(lat)) return build_wheel7();
    return lat;
}

inline nlohmann::json lattice_to_json(const SpinLattice& lat) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : lat.edges()) edges.push_back({e.i, e.j});
    return {{"n_sites", lat.n_sites()}, {"edges", edges}};
}

// Open chain 1-2-...-n; used by tests and small demos.
inline SpinLattice build_chain(int n) {
    std::vector<Edge> edges;
    for (int k = 1; k < n; ++k) edges.push_back({k, k + 1});
    std::vector<Point2> pos;
    for (int k = 0; k < n; ++k) pos.push_back({static_cast<double>(k), 0.0});
    return SpinLattice(n, std::move(edges), std::move(pos), std::nullopt, "chain" + std::to_string(n));
}

} // namespace tfim
