#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace frustra {

struct MatchingEdge {
    int u = 0;
    int v = 0;
    double weight = 0.0;
};

namespace detail {

// Edmonds' blossom algorithm for maximum-weight matching, primal-dual
// formulation with explicit blossom bookkeeping (after Galil's exposition).
// Blossoms occupy slots [n, 2n). Dual variables and slacks are doubles;
// zero tests use an absolute tolerance derived from the weight scale, which
// is safe here because callers compare whole matchings, not single slacks.
class MaxWeightMatching {
public:
    MaxWeightMatching(int nvertex, const std::vector<MatchingEdge>& edges,
                      bool max_cardinality)
        : nv_(nvertex), edges_(edges), maxcard_(max_cardinality) {
        const int ne = static_cast<int>(edges_.size());
        maxweight_ = 0.0;
        for (const auto& e : edges_) {
            if (e.u < 0 || e.u >= nv_ || e.v < 0 || e.v >= nv_ || e.u == e.v)
                throw std::invalid_argument("matching: bad edge");
            maxweight_ = std::max(maxweight_, e.weight);
        }
        tol_ = 1e-12 * (1.0 + std::fabs(maxweight_));

        endpoint_.resize(2 * ne);
        for (int k = 0; k < ne; ++k) {
            endpoint_[2 * k] = edges_[k].u;
            endpoint_[2 * k + 1] = edges_[k].v;
        }
        neighbend_.assign(nv_, {});
        for (int k = 0; k < ne; ++k) {
            neighbend_[edges_[k].u].push_back(2 * k + 1);
            neighbend_[edges_[k].v].push_back(2 * k);
        }

        mate_.assign(nv_, -1);
        label_.assign(2 * nv_, 0);
        labelend_.assign(2 * nv_, -1);
        inblossom_.resize(nv_);
        for (int v = 0; v < nv_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * nv_, -1);
        blossomchilds_.assign(2 * nv_, {});
        blossombase_.assign(2 * nv_, -1);
        for (int v = 0; v < nv_; ++v) blossombase_[v] = v;
        blossomendps_.assign(2 * nv_, {});
        bestedge_.assign(2 * nv_, -1);
        blossombestedges_.assign(2 * nv_, {});
        has_bestedges_.assign(2 * nv_, false);
        for (int b = 2 * nv_ - 1; b >= nv_; --b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * nv_, 0.0);
        for (int v = 0; v < nv_; ++v) dualvar_[v] = maxweight_;
        allowedge_.assign(ne, false);
    }

    /// Returns mate[v] = matched partner vertex or -1.
    std::vector<int> solve() {
        for (int stage = 0; stage < nv_; ++stage) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = nv_; b < 2 * nv_; ++b) {
                blossombestedges_[b].clear();
                has_bestedges_[b] = false;
            }
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < nv_; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0)
                    assign_label(v, 1, -1);

            bool augmented = false;
            long substage_guard = 0;
            const long substage_limit =
                static_cast<long>(edges_.size()) + 4L * nv_ + 64;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    const int v = queue_.back();
                    queue_.pop_back();
                    for (int p : neighbend_[v]) {
                        const int k = p / 2;
                        const int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        double kslack = 0.0;
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            if (kslack <= tol_) allowedge_[k] = true;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                const int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            const int b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b]))
                                bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w]))
                                bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                if (++substage_guard > substage_limit)
                    throw std::runtime_error("matching: dual updates stalled");

                int deltatype = -1;
                double delta = 0.0;
                int deltaedge = -1, deltablossom = -1;

                if (!maxcard_) {
                    deltatype = 1;
                    delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + nv_);
                }
                for (int v = 0; v < nv_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        const double d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * nv_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 &&
                        bestedge_[b] != -1) {
                        const double d = slack(bestedge_[b]) / 2.0;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 &&
                        label_[b] == 2 && (deltatype == -1 || dualvar_[b] < delta)) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    // No improvement possible: max-cardinality optimum.
                    deltatype = 1;
                    delta = std::max(
                        0.0, *std::min_element(dualvar_.begin(), dualvar_.begin() + nv_));
                }

                for (int v = 0; v < nv_; ++v) {
                    if (label_[inblossom_[v]] == 1)
                        dualvar_[v] -= delta;
                    else if (label_[inblossom_[v]] == 2)
                        dualvar_[v] += delta;
                }
                for (int b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1)
                            dualvar_[b] += delta;
                        else if (label_[b] == 2)
                            dualvar_[b] -= delta;
                    }
                }

                if (deltatype == 1) {
                    break;
                } else if (deltatype == 2) {
                    allowedge_[deltaedge] = true;
                    int i = edges_[deltaedge].u;
                    int j = edges_[deltaedge].v;
                    if (label_[inblossom_[i]] == 0) std::swap(i, j);
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = true;
                    queue_.push_back(edges_[deltaedge].u);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;

            for (int b = nv_; b < 2 * nv_; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 &&
                    label_[b] == 1 && dualvar_[b] <= tol_)
                    expand_blossom(b, true);
            }
        }

        std::vector<int> result(nv_, -1);
        for (int v = 0; v < nv_; ++v)
            if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
        return result;
    }

private:
    double slack(int k) const {
        return dualvar_[edges_[k].u] + dualvar_[edges_[k].v] - 2.0 * edges_[k].weight;
    }

    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < nv_) {
            out.push_back(b);
            return;
        }
        for (int t : blossomchilds_[b]) blossom_leaves(t, out);
    }

    void assign_label(int w, int t, int p) {
        const int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            scratch_leaves_.clear();
            blossom_leaves(b, scratch_leaves_);
            for (int leaf : scratch_leaves_) queue_.push_back(leaf);
        } else if (t == 2) {
            const int base = blossombase_[b];
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    // Trace back from both ends of edge (v,w); returns the base of the new
    // blossom, or -1 if the paths lead to different roots (augmenting path).
    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].u;
        int w = edges_[k].v;
        const int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];

        const int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;

        std::vector<int>& path = blossomchilds_[b];
        std::vector<int>& endps = blossomendps_[b];
        path.clear();
        endps.clear();

        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }

        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0.0;

        scratch_leaves_.clear();
        blossom_leaves(b, scratch_leaves_);
        for (int leaf : scratch_leaves_) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }

        // Merge the children's least-slack edge lists.
        std::vector<int> bestedgeto(2 * nv_, -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (!has_bestedges_[child]) {
                scratch_leaves_.clear();
                blossom_leaves(child, scratch_leaves_);
                for (int leaf : scratch_leaves_) {
                    nblists.emplace_back();
                    for (int p : neighbend_[leaf]) nblists.back().push_back(p / 2);
                }
            } else {
                nblists.push_back(blossombestedges_[child]);
            }
            for (const auto& nblist : nblists) {
                for (int ek : nblist) {
                    int i = edges_[ek].u;
                    int j = edges_[ek].v;
                    if (inblossom_[j] == b) std::swap(i, j);
                    const int bj = inblossom_[j];
                    if (bj != b && label_[bj] == 1 &&
                        (bestedgeto[bj] == -1 || slack(ek) < slack(bestedgeto[bj])))
                        bestedgeto[bj] = ek;
                }
            }
            blossombestedges_[child].clear();
            has_bestedges_[child] = false;
            bestedge_[child] = -1;
        }
        blossombestedges_[b].clear();
        for (int ek : bestedgeto)
            if (ek != -1) blossombestedges_[b].push_back(ek);
        has_bestedges_[b] = true;

        bestedge_[b] = -1;
        for (int ek : blossombestedges_[b])
            if (bestedge_[b] == -1 || slack(ek) < slack(bestedge_[b]))
                bestedge_[b] = ek;
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < nv_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] <= tol_) {
                expand_blossom(s, endstage);
            } else {
                scratch_leaves_.clear();
                blossom_leaves(s, scratch_leaves_);
                for (int leaf : scratch_leaves_) inblossom_[leaf] = s;
            }
        }

        if (!endstage && label_[b] == 2) {
            const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            const int nchilds = static_cast<int>(blossomchilds_[b].size());
            int j = 0;
            for (; j < nchilds; ++j)
                if (blossomchilds_[b][j] == entrychild) break;
            int jstep, endptrick;
            if (j & 1) {
                j -= nchilds;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            auto child_at = [&](int idx) {
                return blossomchilds_[b][(idx % nchilds + nchilds) % nchilds];
            };
            auto endp_at = [&](int idx) {
                return blossomendps_[b][(idx % nchilds + nchilds) % nchilds];
            };
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endp_at(j - endptrick) / 2] = true;
                j += jstep;
                p = endp_at(j - endptrick) ^ endptrick;
                allowedge_[p / 2] = true;
                j += jstep;
            }
            const int bv = child_at(j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (child_at(j) != entrychild) {
                const int bw = child_at(j);
                if (label_[bw] == 1) {
                    j += jstep;
                    continue;
                }
                scratch_leaves_.clear();
                blossom_leaves(bw, scratch_leaves_);
                int reached = -1;
                for (int leaf : scratch_leaves_) {
                    if (label_[leaf] != 0) {
                        reached = leaf;
                        break;
                    }
                }
                if (reached >= 0) {
                    label_[reached] = 0;
                    label_[endpoint_[mate_[blossombase_[bw]]]] = 0;
                    assign_label(reached, 2, labelend_[reached]);
                }
                j += jstep;
            }
        }

        label_[b] = -1;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        has_bestedges_[b] = false;
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    // Swap matched/unmatched edges over the alternating path through
    // blossom b between its base and vertex v.
    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= nv_) augment_blossom(t, v);

        const int nchilds = static_cast<int>(blossomchilds_[b].size());
        int i = 0;
        for (; i < nchilds; ++i)
            if (blossomchilds_[b][i] == t) break;
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= nchilds;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        auto child_at = [&](int idx) {
            return blossomchilds_[b][(idx % nchilds + nchilds) % nchilds];
        };
        auto endp_at = [&](int idx) {
            return blossomendps_[b][(idx % nchilds + nchilds) % nchilds];
        };
        while (j != 0) {
            j += jstep;
            t = child_at(j);
            const int p = endp_at(j - endptrick) ^ endptrick;
            if (t >= nv_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = child_at(j);
            if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }

        std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i,
                    blossomchilds_[b].end());
        std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i,
                    blossomendps_[b].end());
        blossombase_[b] = blossombase_[blossomchilds_[b][0]];
        assert(blossombase_[b] == v);
    }

    void augment_matching(int k) {
        const int kv = edges_[k].u;
        const int kw = edges_[k].v;
        const std::pair<int, int> starts[2] = {{kv, 2 * k + 1}, {kw, 2 * k}};
        for (const auto& [s0, p0] : starts) {
            int s = s0;
            int p = p0;
            while (true) {
                const int bs = inblossom_[s];
                if (bs >= nv_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const int t = endpoint_[labelend_[bs]];
                const int bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                const int j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= nv_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int nv_;
    std::vector<MatchingEdge> edges_;
    bool maxcard_;
    double maxweight_;
    double tol_;

    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
    std::vector<int> scratch_leaves_;
};

} // namespace detail

/// Maximum-weight matching; mate[v] = partner or -1.
inline std::vector<int> max_weight_matching(int nvertex,
                                            const std::vector<MatchingEdge>& edges,
                                            bool max_cardinality) {
    if (nvertex == 0 || edges.empty())
        return std::vector<int>(nvertex, -1);
    detail::MaxWeightMatching solver(nvertex, edges, max_cardinality);
    return solver.solve();
}

struct PerfectMatching {
    std::vector<std::pair<int, int>> pairs; // u < v
    double weight = 0.0;
};

/// Minimum-weight perfect matching. The edge list must admit a perfect
/// matching (callers pass complete graphs on an even vertex set); solved by
/// flipping weights and asking for a maximum-cardinality maximum-weight
/// matching.
inline PerfectMatching min_weight_perfect_matching(int nvertex,
                                                   const std::vector<MatchingEdge>& edges) {
    if (nvertex % 2 != 0)
        throw std::invalid_argument("perfect matching needs an even vertex count");
    PerfectMatching result;
    if (nvertex == 0) return result;

    double wmax = edges.front().weight;
    for (const auto& e : edges) wmax = std::max(wmax, e.weight);
    std::vector<MatchingEdge> flipped = edges;
    for (auto& e : flipped) e.weight = wmax - e.weight;

    const std::vector<int> mate = max_weight_matching(nvertex, flipped, true);
    for (int v = 0; v < nvertex; ++v)
        if (mate[v] == -1)
            throw std::runtime_error("perfect matching: graph has no perfect matching");

    // Recover pair weights from the original list, taking the cheapest edge
    // between each matched pair in case of parallels.
    std::vector<double> best(nvertex, 0.0);
    std::vector<char> have(nvertex, 0);
    for (const auto& e : edges) {
        if (mate[e.u] == e.v) {
            if (!have[e.u] || e.weight < best[e.u]) {
                best[e.u] = e.weight;
                have[e.u] = 1;
            }
            if (!have[e.v] || e.weight < best[e.v]) {
                best[e.v] = e.weight;
                have[e.v] = 1;
            }
        }
    }
    for (int v = 0; v < nvertex; ++v) {
        if (v < mate[v]) {
            result.pairs.emplace_back(v, mate[v]);
            result.weight += best[v];
        }
    }
    return result;
}

} // namespace frustra
