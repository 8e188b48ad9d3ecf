#pragma once
// Exact finite-tree engine for adapted processes.  A tree node is one state
// at one time step; a payload vector assigns a process value to every node.
// Together they form a finite substrate for filtered probability spaces on
// which martingale statements can be checked as exact rational equalities:
// conditional expectations and suprema, Doob-Levy martingales, the Snell
// envelope with its Doob decomposition, stopping-time safety oracles,
// admissibilization of e- and p-processes, implied alternatives, and the
// conditional crossing-probability check.

#include <anytime/rational.hpp>
#include <anytime/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace anytime {

// Rooted tree with exact per-edge conditional probabilities.  Nodes are added
// parent-first (parent index < child index); finalize() validates and freezes
// it.  Every leaf must sit at the same depth, so depth equals time.
struct FiniteTree {
    struct Node {
        int parent = -1;
        Rat prob = 1;  // conditional probability of this node given its parent
        std::vector<int> children;
        int depth = 0;
    };

    std::vector<Node> nodes;

    int add_node(int parent, const Rat& prob) {
        if (finalized_) throw std::logic_error("FiniteTree: frozen after finalize");
        int id = static_cast<int>(nodes.size());
        if ((id == 0) != (parent == -1))
            throw std::invalid_argument("FiniteTree: exactly the first node is the root");
        if (id > 0 && (parent < 0 || parent >= id))
            throw std::invalid_argument("FiniteTree: parent must precede child");
        Node n;
        n.parent = parent;
        n.prob = prob;
        nodes.push_back(std::move(n));
        return id;
    }

    void finalize() {
        if (nodes.empty()) throw std::invalid_argument("FiniteTree: empty");
        if (!(nodes[0].prob == 1)) throw std::invalid_argument("FiniteTree: root probability must be 1");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            nodes[i].children.clear();
        }
        reach_.assign(nodes.size(), Rat(0));
        reach_[0] = 1;
        depth_ = 0;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            if (nodes[i].prob < 0)
                throw std::invalid_argument("FiniteTree: node " + std::to_string(i) +
                                            ": negative probability");
            int p = nodes[i].parent;
            nodes[std::size_t(p)].children.push_back(static_cast<int>(i));
            nodes[i].depth = nodes[std::size_t(p)].depth + 1;
            depth_ = std::max(depth_, nodes[i].depth);
            reach_[i] = reach_[std::size_t(p)] * nodes[i].prob;
        }
        leaves_.clear();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!nodes[i].children.empty()) {
                Rat sum = 0;
                for (int c : nodes[i].children) sum += nodes[std::size_t(c)].prob;
                if (!(sum == 1))
                    throw std::invalid_argument("FiniteTree: node " + std::to_string(i) +
                                                ": child probabilities sum to " + rat_str(sum));
            } else {
                if (nodes[i].depth != depth_)
                    throw std::invalid_argument("FiniteTree: node " + std::to_string(i) +
                                                ": leaf above the terminal depth");
                leaves_.push_back(static_cast<int>(i));
            }
        }
        finalized_ = true;
    }

    int size() const { return static_cast<int>(nodes.size()); }
    int depth() const { return depth_; }
    bool is_leaf(int v) const { return nodes[std::size_t(v)].children.empty(); }
    const std::vector<int>& leaves() const { return leaves_; }
    const Rat& reach(int v) const { return reach_[std::size_t(v)]; }  // unconditional

    static FiniteTree uniform_binary(int depth) {
        FiniteTree t;
        t.add_node(-1, 1);
        std::vector<int> level = {0};
        Rat half(1, 2);
        for (int d = 0; d < depth; ++d) {
            std::vector<int> next;
            for (int v : level) {
                next.push_back(t.add_node(v, half));
                next.push_back(t.add_node(v, half));
            }
            level = std::move(next);
        }
        t.finalize();
        return t;
    }

private:
    int depth_ = 0;
    std::vector<int> leaves_;
    std::vector<Rat> reach_;
    bool finalized_ = false;
};

namespace detail {
inline void require_payload(const FiniteTree& tree, const std::vector<Rat>& payload,
                            const char* who) {
    if (payload.size() != std::size_t(tree.size()))
        throw std::invalid_argument(std::string(who) + ": payload size does not match tree");
}
}  // namespace detail

// E[payload at depth from_depth | node], for every node at depth <= from_depth.
// Entries below from_depth are zero.  Exact probability-weighted averages.
inline std::vector<Rat> cond_expectation(const FiniteTree& tree, const std::vector<Rat>& payload,
                                         int from_depth) {
    detail::require_payload(tree, payload, "cond_expectation");
    if (from_depth < 0 || from_depth > tree.depth())
        throw std::invalid_argument("cond_expectation: bad depth");
    std::vector<Rat> out(payload.size(), Rat(0));
    for (int v = tree.size() - 1; v >= 0; --v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (n.depth == from_depth) {
            out[std::size_t(v)] = payload[std::size_t(v)];
        } else if (n.depth < from_depth) {
            Rat s = 0;
            for (int c : n.children) s += tree.nodes[std::size_t(c)].prob * out[std::size_t(c)];
            out[std::size_t(v)] = s;
        }
    }
    return out;
}

// Smallest measurable upper bound: max over descendants reachable with
// positive probability.  Zero-probability branches are ignored.
inline std::vector<Rat> cond_supremum(const FiniteTree& tree, const std::vector<Rat>& payload,
                                      int from_depth) {
    detail::require_payload(tree, payload, "cond_supremum");
    if (from_depth < 0 || from_depth > tree.depth())
        throw std::invalid_argument("cond_supremum: bad depth");
    std::vector<Rat> out(payload.size(), Rat(0));
    for (int v = tree.size() - 1; v >= 0; --v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (n.depth == from_depth) {
            out[std::size_t(v)] = payload[std::size_t(v)];
        } else if (n.depth < from_depth) {
            bool first = true;
            for (int c : n.children) {
                if (tree.nodes[std::size_t(c)].prob == 0) continue;
                if (first || out[std::size_t(c)] > out[std::size_t(v)]) {
                    out[std::size_t(v)] = out[std::size_t(c)];
                    first = false;
                }
            }
        }
    }
    return out;
}

// M_t = E[Y | F_t] for a terminal payload Y; an exact martingale.
inline std::vector<Rat> doob_levy(const FiniteTree& tree, const std::vector<Rat>& payload) {
    return cond_expectation(tree, payload, tree.depth());
}

struct SnellResult {
    std::vector<Rat> envelope;     // L: smallest supermartingale above the payload
    std::vector<Rat> martingale;   // M = L + A
    std::vector<Rat> compensator;  // A: nondecreasing along paths, 0 at the root
    std::vector<char> stop;        // payload attains the envelope here
};

// Backward induction L_v = max(payload_v, E[L | children]), plus the additive
// decomposition M = L + A with A predictable (all children of a node share
// one increment).
inline SnellResult snell_doob(const FiniteTree& tree, const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "snell_doob");
    for (const Rat& x : payload)
        if (x < 0) throw std::invalid_argument("snell_doob: negative payload");
    SnellResult r;
    r.envelope.assign(payload.size(), Rat(0));
    r.compensator.assign(payload.size(), Rat(0));
    r.martingale.assign(payload.size(), Rat(0));
    r.stop.assign(payload.size(), 0);
    for (int v = tree.size() - 1; v >= 0; --v) {
        const auto& n = tree.nodes[std::size_t(v)];
        Rat cont = 0;
        for (int c : n.children) cont += tree.nodes[std::size_t(c)].prob * r.envelope[std::size_t(c)];
        r.envelope[std::size_t(v)] =
            n.children.empty() ? payload[std::size_t(v)] : std::max(payload[std::size_t(v)], cont);
        r.stop[std::size_t(v)] = payload[std::size_t(v)] == r.envelope[std::size_t(v)];
    }
    for (int v = 0; v < tree.size(); ++v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (n.children.empty()) continue;
        Rat cont = 0;
        for (int c : n.children) cont += tree.nodes[std::size_t(c)].prob * r.envelope[std::size_t(c)];
        Rat inc = r.envelope[std::size_t(v)] - cont;  // >= 0 by construction
        for (int c : n.children) r.compensator[std::size_t(c)] = r.compensator[std::size_t(v)] + inc;
    }
    for (int v = 0; v < tree.size(); ++v)
        r.martingale[std::size_t(v)] = r.envelope[std::size_t(v)] + r.compensator[std::size_t(v)];
    return r;
}

// Number of stopping times on the tree (each path stops exactly once, the
// decision at a node may use everything seen so far).
inline BigInt count_stopping_times(const FiniteTree& tree) {
    std::vector<BigInt> cnt(std::size_t(tree.size()));
    for (int v = tree.size() - 1; v >= 0; --v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (n.children.empty()) {
            cnt[std::size_t(v)] = 1;
        } else {
            BigInt prod = 1;
            for (int c : n.children) prod *= cnt[std::size_t(c)];
            cnt[std::size_t(v)] = 1 + prod;
        }
    }
    return cnt[0];
}

struct SafetyResult {
    Rat value;                  // max over stopping times of E[payload at stop]
    bool safe = false;          // value <= 1
    std::vector<char> stop_at;  // earliest optimal stopping region
    bool enumerated = false;    // full enumeration ran (vs envelope + certificate)
    BigInt n_stopping_times;
};

enum class SafetyMode { automatic, enumerate_all, envelope };

namespace detail {
// All achievable E[payload at stop | subtree of v], one entry per stopping
// time of the subtree.  Sizes grow doubly exponentially; callers gate on the
// stopping-time count.
inline std::vector<Rat> stopping_values(const FiniteTree& tree, const std::vector<Rat>& payload,
                                        int v) {
    const auto& n = tree.nodes[std::size_t(v)];
    if (n.children.empty()) return {payload[std::size_t(v)]};
    std::vector<Rat> acc = {Rat(0)};
    for (int c : n.children) {
        std::vector<Rat> child = stopping_values(tree, payload, c);
        std::vector<Rat> next;
        next.reserve(acc.size() * child.size());
        const Rat& q = tree.nodes[std::size_t(c)].prob;
        for (const Rat& a : acc)
            for (const Rat& x : child) next.push_back(a + q * x);
        acc = std::move(next);
    }
    acc.push_back(payload[std::size_t(v)]);
    return acc;
}
}  // namespace detail

// Exact optimal-stopping value of the payload.  Enumeration mode evaluates
// every stopping time; envelope mode takes the Snell root and certifies
// attainment by evaluating the earliest optimal rule.  Automatic mode
// enumerates when the stopping-time count is small and cross-checks the two.
inline SafetyResult brute_force_safety(const FiniteTree& tree, const std::vector<Rat>& payload,
                                       SafetyMode mode = SafetyMode::automatic) {
    detail::require_payload(tree, payload, "brute_force_safety");
    SafetyResult res;
    res.n_stopping_times = count_stopping_times(tree);
    SnellResult snell = snell_doob(tree, payload);
    res.stop_at = snell.stop;
    res.value = snell.envelope[0];

    // value of the earliest optimal rule: stop where the payload attains L
    std::vector<Rat> rule(payload.size(), Rat(0));
    for (int v = tree.size() - 1; v >= 0; --v) {
        if (snell.stop[std::size_t(v)]) {
            rule[std::size_t(v)] = payload[std::size_t(v)];
        } else {
            Rat s = 0;
            for (int c : tree.nodes[std::size_t(v)].children)
                s += tree.nodes[std::size_t(c)].prob * rule[std::size_t(c)];
            rule[std::size_t(v)] = s;
        }
    }
    if (!(rule[0] == res.value))
        throw std::logic_error("brute_force_safety: optimal rule does not attain the envelope");

    bool enumerate = mode == SafetyMode::enumerate_all;
    if (mode == SafetyMode::automatic) enumerate = res.n_stopping_times <= 1000000;
    if (enumerate) {
        if (res.n_stopping_times > 2000000)
            throw std::invalid_argument("brute_force_safety: tree too large to enumerate (" +
                                        res.n_stopping_times.str() + " stopping times)");
        std::vector<Rat> all = detail::stopping_values(tree, payload, 0);
        Rat best = all[0];
        for (const Rat& x : all) best = std::max(best, x);
        if (!(best == res.value))
            throw std::logic_error("brute_force_safety: enumeration disagrees with envelope");
        res.enumerated = true;
    }
    res.safe = res.value <= 1;
    return res;
}

// Lifts a safe e-payload to the exact martingale that dominates it: the Snell
// martingale shifted so the root is exactly 1.  Identity on martingales that
// already have root value 1.
inline std::vector<Rat> admissibilize_e(const FiniteTree& tree, const std::vector<Rat>& payload) {
    SnellResult snell = snell_doob(tree, payload);
    if (snell.envelope[0] > 1)
        throw std::invalid_argument("admissibilize_e: payload is not safe, sup E = " +
                                    rat_str(snell.envelope[0]));
    Rat shift = Rat(1) - snell.envelope[0];
    std::vector<Rat> out = snell.martingale;
    for (Rat& x : out) x += shift;
    return out;
}

// Running minimum of 1 and 1/e along each path; the p-process implied by an
// e-process.  Zero e-values contribute nothing (1/0 is above any bound).
inline std::vector<Rat> tree_e_to_p(const FiniteTree& tree, const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "tree_e_to_p");
    std::vector<Rat> out(payload.size());
    for (int v = 0; v < tree.size(); ++v) {
        const Rat& e = payload[std::size_t(v)];
        if (e < 0) throw std::invalid_argument("tree_e_to_p: negative e-value");
        Rat here = e > 1 ? Rat(1) / e : Rat(1);
        int p = tree.nodes[std::size_t(v)].parent;
        out[std::size_t(v)] = p < 0 ? here : std::min(out[std::size_t(p)], here);
    }
    return out;
}

// Running minimum of the payload along each path.
inline std::vector<Rat> running_inf_payload(const FiniteTree& tree,
                                            const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "running_inf_payload");
    std::vector<Rat> out(payload.size());
    for (int v = 0; v < tree.size(); ++v) {
        int p = tree.nodes[std::size_t(v)].parent;
        out[std::size_t(v)] =
            p < 0 ? payload[std::size_t(v)] : std::min(out[std::size_t(p)], payload[std::size_t(v)]);
    }
    return out;
}

// Exact distribution of a terminal payload over positive-probability leaves:
// sorted support with point masses.
inline std::vector<std::pair<Rat, Rat>> terminal_law(const FiniteTree& tree,
                                                     const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "terminal_law");
    std::vector<std::pair<Rat, Rat>> pts;
    for (int leaf : tree.leaves()) {
        if (tree.reach(leaf) == 0) continue;
        pts.emplace_back(payload[std::size_t(leaf)], tree.reach(leaf));
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Rat, Rat>> law;
    for (auto& p : pts) {
        if (!law.empty() && law.back().first == p.first)
            law.back().second += p.second;
        else
            law.push_back(p);
    }
    return law;
}

inline std::vector<std::pair<Rat, Rat>> running_inf_law(const FiniteTree& tree,
                                                        const std::vector<Rat>& payload) {
    return terminal_law(tree, running_inf_payload(tree, payload));
}

// Admissibilization of a p-payload: with F the exact distribution function of
// the terminal running infimum, the output at a node is the largest F(inf)
// among leaves still reachable with positive probability.  Requires validity,
// F(x) <= x, which is checked exactly on the support.
inline std::vector<Rat> admissibilize_p(const FiniteTree& tree, const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "admissibilize_p");
    for (const Rat& x : payload)
        if (x < 0 || x > 1) throw std::invalid_argument("admissibilize_p: payload outside [0,1]");
    std::vector<Rat> inf = running_inf_payload(tree, payload);
    std::vector<std::pair<Rat, Rat>> law = terminal_law(tree, inf);
    std::vector<Rat> support, cdf;
    Rat acc = 0;
    for (auto& [x, p] : law) {
        acc += p;
        support.push_back(x);
        cdf.push_back(acc);
        if (acc > x)
            throw std::invalid_argument("admissibilize_p: not a valid p-process, F(" + rat_str(x) +
                                        ") = " + rat_str(acc));
    }
    auto F = [&](const Rat& x) -> Rat {
        // largest cdf value at support <= x
        std::size_t lo = 0, hi = support.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (support[mid] <= x)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo == 0 ? Rat(0) : cdf[lo - 1];
    };
    std::vector<Rat> out(payload.size(), Rat(0));
    for (int v = tree.size() - 1; v >= 0; --v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (n.children.empty()) {
            out[std::size_t(v)] = F(inf[std::size_t(v)]);
        } else {
            bool first = true;
            for (int c : n.children) {
                if (tree.nodes[std::size_t(c)].prob == 0) continue;
                if (first || out[std::size_t(c)] > out[std::size_t(v)]) {
                    out[std::size_t(v)] = out[std::size_t(c)];
                    first = false;
                }
            }
        }
        if (out[std::size_t(v)] > payload[std::size_t(v)])
            throw std::logic_error("admissibilize_p: output exceeds input at node " +
                                   std::to_string(v));
    }
    return out;
}

// Reweights the tree so the likelihood ratio against the original equals the
// martingale at every node: q'_c = q_c * M_c / M_v.  Children of a zero node
// keep their original probabilities.
inline FiniteTree implied_alternative(const FiniteTree& tree, const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "implied_alternative");
    if (!(payload[0] == 1))
        throw std::invalid_argument("implied_alternative: root value must be 1");
    for (int v = 0; v < tree.size(); ++v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (payload[std::size_t(v)] < 0)
            throw std::invalid_argument("implied_alternative: negative martingale value");
        if (n.children.empty()) continue;
        Rat mean = 0;
        for (int c : n.children) mean += tree.nodes[std::size_t(c)].prob * payload[std::size_t(c)];
        if (!(mean == payload[std::size_t(v)]))
            throw std::invalid_argument("implied_alternative: not a martingale at node " +
                                        std::to_string(v) + " (mean " + rat_str(mean) + " vs " +
                                        rat_str(payload[std::size_t(v)]) + ")");
    }
    FiniteTree out;
    out.add_node(-1, 1);
    for (int v = 1; v < tree.size(); ++v) {
        const auto& n = tree.nodes[std::size_t(v)];
        const Rat& mv = payload[std::size_t(n.parent)];
        Rat q = mv == 0 ? n.prob : n.prob * payload[std::size_t(v)] / mv;
        out.add_node(n.parent, q);
    }
    out.finalize();
    return out;
}

struct CondVilleReport {
    bool pass = true;
    bool is_nsm = true;
    int nsm_witness = -1;   // node where the supermartingale property fails
    int witness = -1;       // node whose conditional crossing probability exceeds alpha
    Rat witness_prob = 0;   // that probability
};

namespace detail {
inline Rat crossing_prob(const FiniteTree& tree, const std::vector<Rat>& payload, int v,
                         const Rat& threshold) {
    if (payload[std::size_t(v)] >= threshold) return 1;
    const auto& n = tree.nodes[std::size_t(v)];
    if (n.children.empty()) return 0;
    Rat s = 0;
    for (int c : n.children)
        s += tree.nodes[std::size_t(c)].prob * crossing_prob(tree, payload, c, threshold);
    return s;
}
}  // namespace detail

// From every node s with value > 0, the conditional probability that the
// process later reaches value_s / alpha must be at most alpha.  (At value 0
// the ratio threshold degenerates, so such nodes are skipped.)
inline CondVilleReport conditional_ville_check(const FiniteTree& tree,
                                               const std::vector<Rat>& payload, const Rat& alpha) {
    detail::require_payload(tree, payload, "conditional_ville_check");
    if (!(alpha > 0 && alpha <= 1))
        throw std::invalid_argument("conditional_ville_check: alpha must be in (0,1]");
    CondVilleReport rep;
    for (int v = 0; v < tree.size(); ++v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (payload[std::size_t(v)] < 0) {
            rep.is_nsm = false;
            if (rep.nsm_witness < 0) rep.nsm_witness = v;
            continue;
        }
        if (n.children.empty()) continue;
        Rat mean = 0;
        for (int c : n.children) mean += tree.nodes[std::size_t(c)].prob * payload[std::size_t(c)];
        if (mean > payload[std::size_t(v)]) {
            rep.is_nsm = false;
            if (rep.nsm_witness < 0) rep.nsm_witness = v;
        }
    }
    for (int v = 0; v < tree.size(); ++v) {
        if (!(payload[std::size_t(v)] > 0)) continue;
        Rat pr = detail::crossing_prob(tree, payload, v, payload[std::size_t(v)] / alpha);
        if (rep.witness < 0 || pr > rep.witness_prob) {
            rep.witness = v;
            rep.witness_prob = pr;
        }
    }
    bool crossing_ok = rep.witness_prob <= alpha;
    if (crossing_ok) rep.witness = -1;  // witness names a violation only
    rep.pass = rep.is_nsm && crossing_ok;
    return rep;
}

struct EquivalenceResult {
    Rat prob_union;          // probability the event sequence ever fires
    Rat best_random_time;    // sup over arbitrary (non-adapted) times
    Rat best_stopping_time;  // sup over stopping times
};

// The three uniform-error quantities computed by three different routes;
// on a finite tree they must coincide exactly.
inline EquivalenceResult equivalence_check(const FiniteTree& tree,
                                           const std::vector<char>& events) {
    if (events.size() != std::size_t(tree.size()))
        throw std::invalid_argument("equivalence_check: events size does not match tree");
    EquivalenceResult r;

    std::vector<Rat> hit(events.size(), Rat(0));
    for (int v = tree.size() - 1; v >= 0; --v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (events[std::size_t(v)]) {
            hit[std::size_t(v)] = 1;
        } else if (!n.children.empty()) {
            Rat s = 0;
            for (int c : n.children) s += tree.nodes[std::size_t(c)].prob * hit[std::size_t(c)];
            hit[std::size_t(v)] = s;
        }
    }
    r.prob_union = hit[0];

    // a non-adapted time may target, on each path, any step where the event
    // fires, so its best value is the mass of paths that ever fire
    std::vector<char> fired(events.size(), 0);
    Rat mass = 0;
    for (int v = 0; v < tree.size(); ++v) {
        int p = tree.nodes[std::size_t(v)].parent;
        fired[std::size_t(v)] = events[std::size_t(v)] || (p >= 0 && fired[std::size_t(p)]);
        if (tree.is_leaf(v) && fired[std::size_t(v)]) mass += tree.reach(v);
    }
    r.best_random_time = mass;

    std::vector<Rat> indicator(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) indicator[i] = events[i] ? 1 : 0;
    r.best_stopping_time = snell_doob(tree, indicator).envelope[0];
    return r;
}

// --- serialization ---------------------------------------------------------
// One node per line: "id parent prob payload", probabilities and payloads as
// exact rationals ("3/4" or "2").  '#' starts a comment; ids must be 0,1,2,...
// in order with the root first (parent -1).

inline std::string tree_to_text(const FiniteTree& tree, const std::vector<Rat>& payload) {
    detail::require_payload(tree, payload, "tree_to_text");
    std::ostringstream out;
    out << "# id parent prob payload\n";
    for (int v = 0; v < tree.size(); ++v) {
        const auto& n = tree.nodes[std::size_t(v)];
        out << v << ' ' << n.parent << ' ' << rat_str(n.prob) << ' '
            << rat_str(payload[std::size_t(v)]) << '\n';
    }
    return out.str();
}

struct ParsedTree {
    FiniteTree tree;
    std::vector<Rat> payload;
};

inline ParsedTree tree_from_text(const std::string& text) {
    ParsedTree result;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int expected_id = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() != 4) fail("expected 4 fields (id parent prob payload), got " +
                                  std::to_string(tok.size()));
        long id = -1, parent = -2;
        try {
            std::size_t pos = 0;
            id = std::stol(tok[0], &pos);
            if (pos != tok[0].size()) fail("bad node id '" + tok[0] + "'");
            parent = std::stol(tok[1], &pos);
            if (pos != tok[1].size()) fail("bad parent id '" + tok[1] + "'");
        } catch (const std::invalid_argument&) {
            fail("bad integer field");
        } catch (const std::out_of_range&) {
            fail("integer field out of range");
        }
        if (id != expected_id) fail("node ids must be consecutive from 0, got " + tok[0]);
        ++expected_id;
        Rat prob, value;
        try {
            prob = rat_parse(tok[2]);
            value = rat_parse(tok[3]);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        try {
            result.tree.add_node(static_cast<int>(parent), prob);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        result.payload.push_back(value);
    }
    if (result.payload.empty()) throw std::invalid_argument("line 0: empty tree description");
    result.tree.finalize();  // structural errors carry node ids
    return result;
}

// --- random corpus ---------------------------------------------------------

// Random tree with exact probabilities; every leaf at the given depth.
// Occasional zero-probability branches exercise the null-set rules.
inline FiniteTree random_tree(Rng& rng, int depth, int max_branch = 3,
                              bool allow_zero_prob = true) {
    if (depth < 1 || max_branch < 2) throw std::invalid_argument("random_tree: bad shape");
    FiniteTree t;
    t.add_node(-1, 1);
    std::vector<int> level = {0};
    for (int d = 0; d < depth; ++d) {
        std::vector<int> next;
        for (int v : level) {
            int k = 2 + static_cast<int>(rng.next_u64() % std::uint64_t(max_branch - 1));
            std::vector<long> w(static_cast<std::size_t>(k));
            long total = 0;
            for (auto& wi : w) {
                wi = 1 + long(rng.next_u64() % 5);
                total += wi;
            }
            if (allow_zero_prob && k > 1 && rng.uniform01() < 0.2) {
                std::size_t z = std::size_t(rng.next_u64() % std::uint64_t(k));
                total -= w[z];
                w[z] = 0;
            }
            for (int i = 0; i < k; ++i) next.push_back(t.add_node(v, Rat(w[std::size_t(i)], total)));
        }
        level = std::move(next);
    }
    t.finalize();
    return t;
}

// Exact nonnegative martingale payload with root value 1: children values are
// random targets rescaled so the conditional mean is exact.  Hits zero now
// and then, which is then absorbing.
inline std::vector<Rat> random_nm_payload(Rng& rng, const FiniteTree& tree) {
    std::vector<Rat> m(std::size_t(tree.size()));
    m[0] = 1;
    for (int v = 0; v < tree.size(); ++v) {
        const auto& n = tree.nodes[std::size_t(v)];
        if (n.children.empty()) continue;
        if (m[std::size_t(v)] == 0) {
            for (int c : n.children) m[std::size_t(c)] = 0;
            continue;
        }
        std::vector<long> r(n.children.size());
        Rat mu = 0;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            r[i] = long(rng.next_u64() % 9);  // 0..8; zero children become absorbing
            mu += tree.nodes[std::size_t(n.children[i])].prob * r[i];
        }
        if (mu == 0) {
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (tree.nodes[std::size_t(n.children[i])].prob > 0) {
                    mu += tree.nodes[std::size_t(n.children[i])].prob;  // r[i] 0 -> 1
                    r[i] = 1;
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < n.children.size(); ++i)
            m[std::size_t(n.children[i])] = r[i] * m[std::size_t(v)] / mu;
    }
    return m;
}

inline std::vector<Rat> random_nonneg_payload(Rng& rng, const FiniteTree& tree) {
    std::vector<Rat> out(std::size_t(tree.size()));
    for (auto& x : out) x = Rat(long(rng.next_u64() % 13), 1 + long(rng.next_u64() % 6));
    return out;
}

// Valid p-payload: the p-process of a random exact martingale.  Validity
// (F(x) <= x) then holds exactly by the crossing inequality.
inline std::vector<Rat> random_p_payload(Rng& rng, const FiniteTree& tree) {
    return tree_e_to_p(tree, random_nm_payload(rng, tree));
}

inline std::vector<char> random_events(Rng& rng, const FiniteTree& tree, double rate = 0.15) {
    std::vector<char> out(std::size_t(tree.size()));
    for (auto& e : out) e = rng.uniform01() < rate;
    return out;
}

}  // namespace anytime
