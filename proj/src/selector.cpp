#include "keystep/selector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "keystep/error.hpp"

namespace keystep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string list_str(const std::set<std::size_t>& s) {
    std::string out;
    for (auto v : s) out += (out.empty() ? "" : ",") + std::to_string(v);
    return out;
}

// Range-relative feasibility checks shared by the DP and the brute-force oracle.
void check_instance(std::size_t T, std::size_t k, const std::set<std::size_t>& pinned,
                    const std::set<std::size_t>& excluded) {
    if (T < 2) throw ConstraintError("selection needs at least 2 frames in range", {"range"});
    if (k < 2) throw ConstraintError("k must be >= 2", {"k"});
    if (!pinned.empty() && *pinned.rbegin() >= T) throw ConstraintError("pinned frame outside range", {"pinned"});
    if (!excluded.empty() && *excluded.rbegin() >= T) {
        throw ConstraintError("excluded frame outside range", {"excluded"});
    }
    for (auto p : pinned) {
        if (excluded.count(p)) {
            throw ConstraintError("frame " + std::to_string(p) + " both pinned and excluded", {"pinned", "excluded"});
        }
    }
    if (excluded.count(0) || excluded.count(T - 1)) {
        throw ConstraintError("range endpoints cannot be excluded", {"excluded"});
    }
    std::set<std::size_t> required = pinned;
    required.insert(0);
    required.insert(T - 1);
    if (required.size() > k) {
        throw ConstraintError("k=" + std::to_string(k) + " too small for " + std::to_string(required.size()) +
                                  " mandatory frames (endpoints + pinned)",
                              {"k", "pinned"});
    }
    if (k > T - excluded.size()) {
        throw ConstraintError("k=" + std::to_string(k) + " exceeds the " + std::to_string(T - excluded.size()) +
                                  " selectable frames",
                              {"k", "excluded"});
    }
}

double forward_total(const std::vector<std::size_t>& steps, const PairCostFn& cost) {
    double total = 0.0;
    for (std::size_t i = 1; i < steps.size(); ++i) total += cost(steps[i - 1], steps[i]);
    return total;
}

}  // namespace

void validate_params(const SelectionParams& p, std::size_t frame_count) {
    std::vector<std::string> bad;
    std::string why;
    auto fail = [&](std::vector<std::string> fields, const std::string& msg) {
        for (auto& f : fields) {
            if (std::find(bad.begin(), bad.end(), f) == bad.end()) bad.push_back(f);
        }
        why += (why.empty() ? "" : "; ") + msg;
    };
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) fail({"alpha"}, "alpha must lie in [0, 1]");
    if (!(p.beta >= 0.0 && p.beta <= 1.0)) fail({"beta"}, "beta must lie in [0, 1]");
    if (!(std::abs(p.alpha + p.beta - 1.0) <= 1e-9)) fail({"alpha", "beta"}, "alpha + beta must equal 1");
    if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) fail({"gamma"}, "gamma must be >= 0");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) fail({"sigma"}, "sigma must be > 0");
    if (p.k < 2) fail({"k"}, "k must be >= 2");
    const auto& r = p.range;
    if (r.start >= r.end || r.end >= frame_count) {
        fail({"range"}, "range " + std::to_string(r.start) + ":" + std::to_string(r.end) + " invalid for " +
                            std::to_string(frame_count) + " frames");
    } else {
        for (auto v : p.pinned) {
            if (!r.contains(v)) fail({"pinned"}, "pinned frame " + std::to_string(v) + " outside range");
        }
        for (auto v : p.excluded) {
            if (!r.contains(v)) fail({"excluded"}, "excluded frame " + std::to_string(v) + " outside range");
        }
        if (p.excluded.count(r.start) || p.excluded.count(r.end)) fail({"excluded"}, "range endpoints cannot be excluded");
        std::set<std::size_t> required = p.pinned;
        required.insert(r.start);
        required.insert(r.end);
        if (p.k >= 2 && required.size() > p.k) fail({"k", "pinned"}, "k too small for endpoints + pinned frames");
        if (p.k > r.length() - std::min(r.length(), p.excluded.size())) {
            fail({"k"}, "k exceeds the number of selectable frames in range");
        }
    }
    for (auto v : p.pinned) {
        if (p.excluded.count(v)) fail({"pinned", "excluded"}, "frame " + std::to_string(v) + " both pinned and excluded");
    }
    if (!bad.empty()) throw ConstraintError(why, bad);
}

double distance_cost(std::size_t i, std::size_t j, std::size_t n, std::size_t k, double gamma, double sigma) {
    const double d = i > j ? static_cast<double>(i - j) : static_cast<double>(j - i);
    return 1.0 - gamma * std::tanh(d / (sigma * static_cast<double>(n) / static_cast<double>(k)));
}

PairBreakdown pair_breakdown(std::size_t i, std::size_t j, const SelectionParams& p, const CostMatrix& structural,
                             std::span<const double> stat) {
    PairBreakdown b;
    b.from = i;
    b.to = j;
    b.structural = structural.size() > 0 ? structural(i, j) : 0.0;
    b.statistical = stat.empty() ? 0.0 : statistical_cost(stat[i], stat[j]);
    b.distance = distance_cost(i, j, p.range.length(), p.k, p.gamma, p.sigma);
    b.combined = p.alpha * b.structural + p.beta * b.statistical + b.distance;
    return b;
}

double combined_cost(std::size_t i, std::size_t j, const SelectionParams& p, const CostMatrix& structural,
                     std::span<const double> stat) {
    return pair_breakdown(i, j, p, structural, stat).combined;
}

CostMatrix combined_cost_matrix(const SelectionParams& p, const CostMatrix& structural, std::span<const double> stat) {
    const std::size_t T = p.range.length();
    if (p.alpha > 0.0 && structural.size() != T) {
        throw ConstraintError("structural matrix is " + std::to_string(structural.size()) + "x" +
                                  std::to_string(structural.size()) + ", range has " + std::to_string(T) + " frames",
                              {"range"});
    }
    if (p.beta > 0.0 && stat.size() != T) {
        throw ConstraintError("statistical series length " + std::to_string(stat.size()) + " != range length " +
                                  std::to_string(T),
                              {"range"});
    }
    const double scale = p.sigma * static_cast<double>(T) / static_cast<double>(p.k);
    CostMatrix m(T);
    for (std::size_t i = 0; i < T; ++i) {
        m(i, i) = (p.alpha > 0.0 ? p.alpha * structural(i, i) : 0.0) +
                  (p.beta > 0.0 ? p.beta * statistical_cost(stat[i], stat[i]) : 0.0) + 1.0;
        for (std::size_t j = i + 1; j < T; ++j) {
            double c = 1.0 - p.gamma * std::tanh(static_cast<double>(j - i) / scale);
            if (p.alpha > 0.0) c += p.alpha * structural(i, j);
            if (p.beta > 0.0) c += p.beta * statistical_cost(stat[i], stat[j]);
            m(i, j) = c;
            m(j, i) = c;
        }
    }
    return m;
}

Selection select_salient(const CostMatrix& cost, std::size_t k, const std::set<std::size_t>& pinned,
                         const std::set<std::size_t>& excluded) {
    const std::size_t T = cost.size();
    check_instance(T, k, pinned, excluded);

    std::vector<std::size_t> cand;
    cand.reserve(T);
    for (std::size_t i = 0; i < T; ++i) {
        if (!excluded.count(i)) cand.push_back(i);
    }
    const std::size_t m = cand.size();

    // limit[p]: furthest candidate position reachable from p without skipping a pinned frame.
    std::vector<std::size_t> limit(m, m - 1);
    {
        std::size_t next_pin = m - 1;
        for (std::size_t p = m; p-- > 0;) {
            limit[p] = next_pin;
            if (pinned.count(cand[p])) next_pin = p;
        }
    }

    // best[c][p]: cheapest chain of c frames starting at candidate p and ending at T-1.
    // Filled from the end so that, scanning successors in increasing order with a
    // strict comparison, backtracking from the start yields the lexicographically
    // smallest optimum.
    std::vector<double> best((k + 1) * m, kInf);
    std::vector<std::uint32_t> next((k + 1) * m, 0);
    best[1 * m + (m - 1)] = 0.0;
    for (std::size_t c = 2; c <= k; ++c) {
        const double* prev = best.data() + (c - 1) * m;
        double* cur = best.data() + c * m;
        std::uint32_t* nxt = next.data() + c * m;
        for (std::size_t p = 0; p + 1 < m; ++p) {
            const double* row = cost.row(cand[p]);
            double b = kInf;
            std::uint32_t arg = 0;
            for (std::size_t q = p + 1; q <= limit[p]; ++q) {
                const double v = row[cand[q]] + prev[q];
                if (v < b) {
                    b = v;
                    arg = static_cast<std::uint32_t>(q);
                }
            }
            cur[p] = b;
            nxt[p] = arg;
        }
    }
    if (!std::isfinite(best[k * m + 0])) {
        throw ConstraintError("no feasible selection for k=" + std::to_string(k) + " with pinned {" +
                                  list_str(pinned) + "}",
                              {"k", "pinned"});
    }

    Selection out;
    std::size_t p = 0;
    out.steps.push_back(cand[p]);
    for (std::size_t c = k; c >= 2; --c) {
        p = next[c * m + p];
        out.steps.push_back(cand[p]);
    }
    for (std::size_t i = 1; i < out.steps.size(); ++i) out.total_cost += cost(out.steps[i - 1], out.steps[i]);
    return out;
}

Selection select_salient(std::size_t T, std::size_t k, const PairCostFn& cost, const std::set<std::size_t>& pinned,
                         const std::set<std::size_t>& excluded) {
    check_instance(T, k, pinned, excluded);
    // Only forward pairs are ever read.
    CostMatrix memo(T, kInf);
    for (std::size_t i = 0; i < T; ++i) {
        if (excluded.count(i)) continue;
        for (std::size_t j = i + 1; j < T; ++j) {
            if (!excluded.count(j)) memo(i, j) = cost(i, j);
        }
    }
    return select_salient(memo, k, pinned, excluded);
}

Selection brute_force_select(std::size_t T, std::size_t k, const PairCostFn& cost, const std::set<std::size_t>& pinned,
                             const std::set<std::size_t>& excluded) {
    check_instance(T, k, pinned, excluded);
    // guard: C(T-2, k-2) <= 1e6
    {
        const std::size_t n = T - 2, r = k - 2;
        double combos = 1.0;
        for (std::size_t i = 0; i < r; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (combos > 1e6) throw ConstraintError("brute force refused: C(T-2, k-2) > 1e6", {"k"});
    }

    std::vector<std::size_t> inner;  // candidate middle frames
    for (std::size_t i = 1; i + 1 < T; ++i) {
        if (!excluded.count(i)) inner.push_back(i);
    }
    const std::size_t r = k - 2;
    std::vector<std::size_t> must;
    for (auto p : pinned) {
        if (p != 0 && p != T - 1) must.push_back(p);
    }

    Selection best;
    best.total_cost = kInf;
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    std::vector<std::size_t> steps(k);
    steps.front() = 0;
    steps.back() = T - 1;
    const std::size_t n = inner.size();
    if (r > n) throw ConstraintError("not enough candidate frames", {"k"});
    while (true) {
        for (std::size_t i = 0; i < r; ++i) steps[i + 1] = inner[idx[i]];
        const bool has_pins = std::all_of(must.begin(), must.end(), [&](std::size_t p) {
            return std::binary_search(steps.begin(), steps.end(), p);
        });
        if (has_pins) {
            const double total = forward_total(steps, cost);
            if (total < best.total_cost) {
                best.total_cost = total;
                best.steps = steps;
            }
        }
        // next combination in lexicographic order
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (best.steps.empty()) throw ConstraintError("no feasible selection", {"k", "pinned"});
    return best;
}

SelectionResult run_selection(const SelectionParams& params, const CostMatrix& structural, std::span<const double> stat) {
    const auto& r = params.range;
    if (r.start >= r.end) throw ConstraintError("range needs start < end", {"range"});
    validate_params(params, r.end + 1);
    const auto combined = combined_cost_matrix(params, structural, stat);

    std::set<std::size_t> pinned, excluded;
    for (auto v : params.pinned) pinned.insert(v - r.start);
    for (auto v : params.excluded) excluded.insert(v - r.start);
    const auto sel = select_salient(combined, params.k, pinned, excluded);

    SelectionResult out;
    out.params = params;
    out.steps.reserve(sel.steps.size());
    for (auto s : sel.steps) out.steps.push_back(s + r.start);
    for (std::size_t i = 1; i < sel.steps.size(); ++i) {
        auto b = pair_breakdown(sel.steps[i - 1], sel.steps[i], params, structural, stat);
        b.combined = combined(sel.steps[i - 1], sel.steps[i]);
        b.from += r.start;
        b.to += r.start;
        out.pair_costs.push_back(b);
    }
    out.total_cost = sel.total_cost;
    return out;
}

std::vector<std::size_t> even_selection(std::size_t T, std::size_t k) {
    if (k < 2 || k > T) {
        throw ConstraintError("even selection needs 2 <= k <= T (k=" + std::to_string(k) + ", T=" + std::to_string(T) + ")",
                              {"k"});
    }
    std::vector<std::size_t> out(k);
    const std::size_t den = k - 1;
    for (std::size_t i = 0; i < k; ++i) out[i] = (2 * i * (T - 1) + den) / (2 * den);
    return out;
}

std::vector<Point2> normalize_trajectory(std::span<const Point2> points) {
    std::vector<Point2> out(points.begin(), points.end());
    if (out.empty()) return out;
    double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
    for (const auto& p : out) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    const double diag = std::hypot(x1 - x0, y1 - y0);
    if (!(diag > 0.0)) return out;
    for (auto& p : out) p = {(p.x - x0) / diag, (p.y - y0) / diag};
    return out;
}

std::vector<std::size_t> arc_based_selection(std::span<const Point2> points, const ArcThresholds& th) {
    const std::size_t n = points.size();
    if (n < 2) throw BoundsError("arc-based selection needs at least 2 points");
    if (!(th.eps > 0.0) || !(th.theta > 0.0) || !(th.mix >= 0.0 && th.mix <= 1.0)) {
        throw ConstraintError("arc thresholds need eps > 0, theta > 0, mix in [0, 1]", {"eps", "theta", "mix"});
    }
    std::vector<std::size_t> out{0};
    double arc = 0.0, turn = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ax = points[i].x - points[i - 1].x, ay = points[i].y - points[i - 1].y;
        const double bx = points[i + 1].x - points[i].x, by = points[i + 1].y - points[i].y;
        arc += std::hypot(ax, ay);
        const double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
        if (na > 0.0 && nb > 0.0) turn += std::abs(std::atan2(ax * by - ay * bx, ax * bx + ay * by));
        if (th.mix * arc / th.eps + (1.0 - th.mix) * turn / th.theta >= 1.0) {
            out.push_back(i);
            arc = 0.0;
            turn = 0.0;
        }
    }
    out.push_back(n - 1);
    return out;
}

}  // namespace keystep
