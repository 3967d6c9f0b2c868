#include "gcflite/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gcflite/rng.hpp"

namespace gcflite {
namespace {

constexpr index_t kNone = std::numeric_limits<index_t>::max();

// Working graph for one level of the multilevel scheme. Vertex weights
// count finest-level vertices, so balance caps stay in one unit system
// throughout. Adjacency rows are kept sorted for deterministic tie-breaks.
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::uint64_t> xadj;
    std::vector<index_t> adjncy;
    std::vector<double> adjwgt;
    std::vector<std::uint64_t> vwgt;
};

template <class T>
LevelGraph from_csr(const CsrMatrix<T>& a) {
    LevelGraph g;
    g.n = a.rows;
    g.xadj.assign(a.rows + 1, 0);
    g.vwgt.assign(a.rows, 1);
    g.adjncy.reserve(a.nnz());
    g.adjwgt.reserve(a.nnz());
    for (std::size_t v = 0; v < a.rows; ++v) {
        for (std::uint64_t e = a.row_ptr[v]; e < a.row_ptr[v + 1]; ++e)
            if (a.col_idx[e] != v && a.values[e] != T{0}) {
                g.adjncy.push_back(a.col_idx[e]);
                g.adjwgt.push_back(static_cast<double>(a.values[e]));
            }
        g.xadj[v + 1] = g.adjncy.size();
    }
    return g;
}

std::vector<index_t> shuffled(std::size_t n, Rng& rng) {
    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
    return order;
}

// Heavy-edge matching: each vertex pairs with its heaviest unmatched
// neighbor whose combined weight stays within one part's ideal size.
LevelGraph coarsen(const LevelGraph& g, std::uint64_t max_vwgt, Rng& rng,
                   std::vector<index_t>& cmap) {
    std::vector<index_t> match(g.n, kNone);
    for (index_t v : shuffled(g.n, rng)) {
        if (match[v] != kNone) continue;
        index_t best = v;
        double best_w = -1.0;
        for (std::uint64_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
            const index_t u = g.adjncy[e];
            if (match[u] != kNone || g.vwgt[v] + g.vwgt[u] > max_vwgt) continue;
            if (g.adjwgt[e] > best_w || (g.adjwgt[e] == best_w && u < best)) {
                best = u;
                best_w = g.adjwgt[e];
            }
        }
        match[v] = best;
        match[best] = v;
    }

    cmap.assign(g.n, kNone);
    std::size_t nc = 0;
    for (std::size_t v = 0; v < g.n; ++v) {
        if (cmap[v] != kNone) continue;
        cmap[v] = static_cast<index_t>(nc);
        cmap[match[v]] = static_cast<index_t>(nc);
        ++nc;
    }

    LevelGraph c;
    c.n = nc;
    c.xadj.assign(nc + 1, 0);
    c.vwgt.assign(nc, 0);
    for (std::size_t v = 0; v < g.n; ++v) c.vwgt[cmap[v]] += g.vwgt[v];

    std::vector<double> acc(nc, 0.0);
    std::vector<index_t> touched;
    std::vector<index_t> members(nc, kNone);   // first member per coarse vertex
    std::vector<index_t> second(nc, kNone);
    for (std::size_t v = 0; v < g.n; ++v) {
        index_t& slot = members[cmap[v]] == kNone ? members[cmap[v]] : second[cmap[v]];
        slot = static_cast<index_t>(v);
    }
    for (std::size_t cv = 0; cv < nc; ++cv) {
        touched.clear();
        for (index_t v : {members[cv], second[cv]}) {
            if (v == kNone) continue;
            for (std::uint64_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
                const index_t cu = cmap[g.adjncy[e]];
                if (cu == cv) continue;
                if (acc[cu] == 0.0) touched.push_back(cu);
                acc[cu] += g.adjwgt[e];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (index_t cu : touched) {
            c.adjncy.push_back(cu);
            c.adjwgt.push_back(acc[cu]);
            acc[cu] = 0.0;
        }
        c.xadj[cv + 1] = c.adjncy.size();
    }
    return c;
}

struct PartState {
    std::vector<index_t> labels;
    std::vector<std::uint64_t> part_w;      // finest-unit weight
    std::vector<std::size_t> part_count;    // vertices at this level
};

// Greedy region growing: parts are carved out one at a time by repeatedly
// absorbing the unassigned frontier vertex most connected to the region,
// reseeding when the frontier dries up (disconnected graphs).
PartState initial_partition(const LevelGraph& g, std::size_t c, std::uint64_t cap, Rng& rng) {
    PartState st;
    st.labels.assign(g.n, kNone);
    st.part_w.assign(c, 0);
    st.part_count.assign(c, 0);

    std::uint64_t remaining = std::accumulate(g.vwgt.begin(), g.vwgt.end(), std::uint64_t{0});
    std::size_t unassigned = g.n;
    std::vector<double> conn(g.n, 0.0);
    std::vector<index_t> frontier;

    auto pick_seed = [&]() -> index_t {
        std::uint64_t skip = rng.below(unassigned);
        for (std::size_t v = 0; v < g.n; ++v)
            if (st.labels[v] == kNone && skip-- == 0) return static_cast<index_t>(v);
        return kNone;
    };

    for (std::size_t k = 0; k < c; ++k) {
        const std::uint64_t target =
            (k + 1 == c) ? remaining : (remaining + (c - k) - 1) / (c - k);
        frontier.clear();

        while (st.part_w[k] < target && unassigned > 0) {
            index_t v = kNone;
            double best = -1.0;
            for (index_t f : frontier)
                if (st.labels[f] == kNone && (conn[f] > best || (conn[f] == best && f < v)))
                    v = f, best = conn[f];
            if (v == kNone) v = pick_seed();
            if (st.part_w[k] + g.vwgt[v] > cap && k + 1 < c) {
                // over the hard cap: strike this vertex from the frontier
                conn[v] = -1.0;
                std::erase(frontier, v);
                bool any_left = false;
                for (index_t f : frontier)
                    any_left |= (st.labels[f] == kNone && conn[f] >= 0.0);
                if (!any_left && st.part_w[k] > 0) break;   // part done
                continue;
            }
            st.labels[v] = static_cast<index_t>(k);
            st.part_w[k] += g.vwgt[v];
            st.part_count[k] += 1;
            remaining -= g.vwgt[v];
            --unassigned;
            for (std::uint64_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
                const index_t u = g.adjncy[e];
                if (st.labels[u] != kNone || conn[u] < 0.0) continue;
                if (conn[u] == 0.0) frontier.push_back(u);
                conn[u] += g.adjwgt[e];
            }
        }
        for (index_t f : frontier) conn[f] = 0.0;
        for (std::size_t v = 0; v < g.n; ++v)
            if (conn[v] < 0.0) conn[v] = 0.0;
    }
    return st;
}

// Connectivity of v to every part it touches, via a scratch accumulator.
void part_connections(const LevelGraph& g, const std::vector<index_t>& labels, index_t v,
                      std::vector<double>& acc, std::vector<index_t>& touched) {
    touched.clear();
    for (std::uint64_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const index_t q = labels[g.adjncy[e]];
        if (acc[q] == 0.0) touched.push_back(q);
        acc[q] += g.adjwgt[e];
    }
}

// Restore hard invariants after projection: no empty part, no part above
// the cap. At the finest level (unit weights) both fixes always succeed.
void rebalance(const LevelGraph& g, PartState& st, std::size_t c, std::uint64_t cap) {
    std::vector<double> acc(c, 0.0);
    std::vector<index_t> touched;

    for (std::size_t q = 0; q < c; ++q) {
        while (st.part_count[q] == 0) {
            std::size_t donor = c;
            for (std::size_t p = 0; p < c; ++p)
                if (st.part_count[p] > 1 && (donor == c || st.part_w[p] > st.part_w[donor]))
                    donor = p;
            if (donor == c) break;   // nothing can donate (n < c handled upstream)
            index_t best_v = kNone;
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t v = 0; v < g.n; ++v) {
                if (st.labels[v] != static_cast<index_t>(donor)) continue;
                part_connections(g, st.labels, static_cast<index_t>(v), acc, touched);
                const double cost = acc[donor];
                for (index_t p : touched) acc[p] = 0.0;
                if (cost < best_cost) best_cost = cost, best_v = static_cast<index_t>(v);
            }
            if (best_v == kNone) break;
            st.labels[best_v] = static_cast<index_t>(q);
            st.part_w[donor] -= g.vwgt[best_v];
            st.part_count[donor] -= 1;
            st.part_w[q] += g.vwgt[best_v];
            st.part_count[q] += 1;
        }
    }

    for (std::size_t guard = 0; guard < g.n + c; ++guard) {
        std::size_t p = c;
        for (std::size_t i = 0; i < c; ++i)
            if (st.part_w[i] > cap && (p == c || st.part_w[i] > st.part_w[p])) p = i;
        if (p == c) return;
        std::size_t q = c;
        for (std::size_t i = 0; i < c; ++i)
            if (i != p && (q == c || st.part_w[i] < st.part_w[q])) q = i;

        index_t best_v = kNone;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < g.n; ++v) {
            if (st.labels[v] != static_cast<index_t>(p)) continue;
            if (st.part_w[q] + g.vwgt[v] > cap) continue;
            part_connections(g, st.labels, static_cast<index_t>(v), acc, touched);
            const double gain = acc[q] - acc[p];
            for (index_t i : touched) acc[i] = 0.0;
            if (gain > best_gain) best_gain = gain, best_v = static_cast<index_t>(v);
        }
        if (best_v == kNone) return;   // coarse-level dead end; finer levels retry
        st.labels[best_v] = static_cast<index_t>(q);
        st.part_w[p] -= g.vwgt[best_v];
        st.part_count[p] -= 1;
        st.part_w[q] += g.vwgt[best_v];
        st.part_count[q] += 1;
    }
}

// Greedy positive-gain boundary passes (the FM-style refinement step,
// without the lock/rollback machinery: moves are applied immediately).
void refine(const LevelGraph& g, PartState& st, std::size_t c, std::uint64_t cap) {
    std::vector<double> acc(c, 0.0);
    std::vector<index_t> touched;
    for (int pass = 0; pass < 8; ++pass) {
        bool moved = false;
        for (std::size_t v = 0; v < g.n; ++v) {
            const index_t p = st.labels[v];
            if (st.part_count[p] <= 1) continue;
            part_connections(g, st.labels, static_cast<index_t>(v), acc, touched);
            index_t best_q = p;
            double best_gain = 0.0;
            const double here = acc[p];
            for (index_t q : touched) {
                if (q == p || st.part_w[q] + g.vwgt[v] > cap) continue;
                const double gain = acc[q] - here;
                if (gain > best_gain || (gain == best_gain && best_q != p && q < best_q))
                    best_gain = gain, best_q = q;
            }
            for (index_t q : touched) acc[q] = 0.0;
            if (best_q != p && best_gain > 0.0) {
                st.labels[v] = best_q;
                st.part_w[p] -= g.vwgt[v];
                st.part_count[p] -= 1;
                st.part_w[best_q] += g.vwgt[v];
                st.part_count[best_q] += 1;
                moved = true;
            }
        }
        if (!moved) break;
    }
}

} // namespace

template <class T>
Partitioning partition_graph(const CsrMatrix<T>& a, std::size_t c, std::uint64_t seed,
                             double balance_factor) {
    require(a.rows == a.cols, "partition: adjacency must be square");
    require(c >= 1, "partition: c must be >= 1");
    require(c <= a.rows, "partition: c exceeds vertex count");
    require(balance_factor >= 1.0, "partition: balance_factor must be >= 1");

    const std::size_t n = a.rows;
    const std::uint64_t ceil_sz = (n + c - 1) / c;
    const auto cap = std::max<std::uint64_t>(
        ceil_sz, static_cast<std::uint64_t>(balance_factor * double(ceil_sz) + 1e-9));

    Rng rng(mix64(seed, 0x9a27));

    std::vector<LevelGraph> graphs;
    std::vector<std::vector<index_t>> cmaps;
    graphs.push_back(from_csr(a));
    const std::size_t coarsen_target = std::max<std::size_t>(4 * c, 128);
    while (graphs.back().n > coarsen_target && graphs.back().n >= 2 * c) {
        std::vector<index_t> cmap;
        LevelGraph coarse = coarsen(graphs.back(), ceil_sz, rng, cmap);
        if (coarse.n > graphs.back().n * 95 / 100) break;   // matching stalled
        graphs.push_back(std::move(coarse));
        cmaps.push_back(std::move(cmap));
    }

    PartState st = initial_partition(graphs.back(), c, cap, rng);
    rebalance(graphs.back(), st, c, cap);
    refine(graphs.back(), st, c, cap);

    for (std::size_t lvl = graphs.size(); lvl-- > 1;) {
        const LevelGraph& fine = graphs[lvl - 1];
        PartState fst;
        fst.labels.resize(fine.n);
        fst.part_w.assign(c, 0);
        fst.part_count.assign(c, 0);
        for (std::size_t v = 0; v < fine.n; ++v) {
            const index_t lab = st.labels[cmaps[lvl - 1][v]];
            fst.labels[v] = lab;
            fst.part_w[lab] += fine.vwgt[v];
            fst.part_count[lab] += 1;
        }
        st = std::move(fst);
        rebalance(fine, st, c, cap);
        refine(fine, st, c, cap);
    }

    Partitioning out;
    out.num_parts = c;
    out.labels = std::move(st.labels);
    out.part_sizes.assign(c, 0);
    for (index_t lab : out.labels) out.part_sizes[lab] += 1;
    for (std::size_t k = 0; k < c; ++k) {
        require(out.part_sizes[k] > 0, "partition: produced an empty part");
        require(out.part_sizes[k] <= cap, "partition: balance cap violated");
    }
    return out;
}

Partitioning random_partition(std::size_t n, std::size_t c, std::uint64_t seed) {
    require(c >= 1 && c <= n, "partition: c must lie in [1, n]");
    Rng rng(mix64(seed, 0x51d3));
    Partitioning out;
    out.num_parts = c;
    out.labels.resize(n);
    out.part_sizes.assign(c, 0);
    const std::vector<index_t> order = shuffled(n, rng);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<index_t>(i % c);
        out.labels[order[i]] = k;
        out.part_sizes[k] += 1;
    }
    return out;
}

template <class T>
SparseAssignment<T> init_assignment(const Partitioning& part, std::size_t t, double w_star,
                                    std::uint64_t seed) {
    const std::size_t c = part.num_parts;
    const std::size_t n = part.labels.size();
    require(t >= 1, "init_assignment: t must be >= 1");
    require(t <= c, "init_assignment: t exceeds c");
    require(w_star > 0.0 && w_star <= 1.0, "init_assignment: w_star must lie in (0, 1]");
    if (t == 1) w_star = 1.0;

    Rng rng(mix64(seed, 0xa51c));
    SparseAssignment<T> s;
    s.n_entities = n;
    s.n_codes = c;
    s.t = t;
    s.row_ptr.assign(n + 1, 0);
    s.col_idx.reserve(n * t);
    s.weights.reserve(n * t);
    s.anchor.resize(n);

    const T companion_w = t > 1 ? static_cast<T>((1.0 - w_star) / double(t - 1)) : T{0};
    std::vector<index_t> row;
    for (std::size_t p = 0; p < n; ++p) {
        const index_t q_star = part.labels[p];
        row.assign(1, q_star);
        while (row.size() < t) {
            const auto q = static_cast<index_t>(rng.below(c));
            if (std::find(row.begin(), row.end(), q) == row.end()) row.push_back(q);
        }
        std::sort(row.begin(), row.end());
        for (index_t q : row) {
            s.col_idx.push_back(q);
            s.weights.push_back(q == q_star ? static_cast<T>(w_star) : companion_w);
        }
        s.row_ptr[p + 1] = s.col_idx.size();
        s.anchor[p] = q_star;
    }
    s.validate();
    return s;
}

template <class T>
double edge_cut(const CsrMatrix<T>& a, const std::vector<index_t>& labels) {
    double cut = 0.0;
    for (std::size_t p = 0; p < a.rows; ++p)
        for (std::uint64_t e = a.row_ptr[p]; e < a.row_ptr[p + 1]; ++e)
            if (a.col_idx[e] > p && labels[p] != labels[a.col_idx[e]])
                cut += static_cast<double>(a.values[e]);
    return cut;
}

template Partitioning partition_graph(const CsrMatrix<float>&, std::size_t, std::uint64_t, double);
template Partitioning partition_graph(const CsrMatrix<double>&, std::size_t, std::uint64_t, double);
template SparseAssignment<float> init_assignment<float>(const Partitioning&, std::size_t, double,
                                                        std::uint64_t);
template SparseAssignment<double> init_assignment<double>(const Partitioning&, std::size_t, double,
                                                          std::uint64_t);
template double edge_cut(const CsrMatrix<float>&, const std::vector<index_t>&);
template double edge_cut(const CsrMatrix<double>&, const std::vector<index_t>&);

} // namespace gcflite
