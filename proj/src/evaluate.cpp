#include "keystep/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "keystep/aggregation.hpp"
#include "keystep/analysis.hpp"
#include "keystep/embedding.hpp"
#include "keystep/error.hpp"
#include "keystep/reconstruct.hpp"

namespace keystep {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

EvalMethod parse_eval_method(const std::string& name) {
    if (name == "dp") return EvalMethod::Dp;
    if (name == "even") return EvalMethod::Even;
    if (name == "arc") return EvalMethod::Arc;
    throw ConstraintError("unknown method '" + name + "' (expected dp, even or arc)", {"methods"});
}

const char* to_string(EvalMethod method) {
    switch (method) {
        case EvalMethod::Dp: return "dp";
        case EvalMethod::Even: return "even";
        case EvalMethod::Arc: return "arc";
    }
    return "?";
}

std::optional<std::vector<std::size_t>> arc_selection_with_k(std::span<const Point2> points, std::size_t k,
                                                              const ArcThresholds& base) {
    auto run = [&](double scale) {
        ArcThresholds t = base;
        t.eps *= scale;
        t.theta *= scale;
        return arc_based_selection(points, t);
    };
    if (k < 2 || k > points.size()) return std::nullopt;
    // Smaller scales pick more frames; bisect in log space.
    double lo = -30.0, hi = 30.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto sel = run(std::exp(mid));
        if (sel.size() == k) return sel;
        if (sel.size() > k) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::nullopt;
}

EvalReport evaluate(const Dataset& dataset, const FocusRange& range, const EvalOptions& options,
                    std::span<const LatentCode> external) {
    validate_range(range, dataset.size());
    if (options.region) validate_region(*options.region, dataset.width(), dataset.height());

    EvalReport report;
    report.dataset_id = dataset.id;
    report.range = range;
    report.methods = options.methods;

    auto t0 = Clock::now();
    std::vector<GridFrame> truth;
    truth.reserve(range.length());
    for (std::size_t t = range.start; t <= range.end; ++t) {
        truth.push_back(prepare(dataset.frames[t], dataset.norm, options.region));
    }
    report.timings.preprocess_ms = ms_since(t0);

    t0 = Clock::now();
    const auto codes = range_codes(dataset, range, options.region, external);
    const auto structural = structural_cost_matrix(codes);
    report.timings.codes_ms = ms_since(t0);

    const std::size_t T = range.length();
    std::optional<std::vector<Point2>> trajectory;
    auto arc_points = [&]() -> const std::vector<Point2>& {
        if (!trajectory) {
            const auto emb = project_2d(codes, range.start);
            std::vector<Point2> pts;
            pts.reserve(emb.size());
            for (const auto& p : emb) pts.push_back({p.x, p.y});
            trajectory = normalize_trajectory(pts);
        }
        return *trajectory;
    };
    if (std::find(options.methods.begin(), options.methods.end(), EvalMethod::Arc) != options.methods.end() && T >= 3) {
        report.arc_default_k = arc_based_selection(arc_points(), options.arc).size();
    }

    for (auto method : options.methods) {
        for (auto k : options.ks) {
            EvalRow row;
            row.method = method;
            row.k = k;
            try {
                auto ts = Clock::now();
                std::vector<std::size_t> rel;
                switch (method) {
                    case EvalMethod::Dp: {
                        SelectionParams p;
                        p.alpha = 1.0;
                        p.beta = 0.0;
                        p.k = k;
                        p.gamma = options.gamma;
                        p.sigma = options.sigma;
                        p.range = range;
                        p.region = options.region;
                        const auto res = run_selection(p, structural, {});
                        for (auto s : res.steps) rel.push_back(s - range.start);
                        break;
                    }
                    case EvalMethod::Even: rel = even_selection(T, k); break;
                    case EvalMethod::Arc: {
                        if (T < 3) throw BoundsError("arc baseline needs at least 3 frames");
                        auto sel = arc_selection_with_k(arc_points(), k, options.arc);
                        if (!sel) throw ConstraintError("no arc threshold scale yields k=" + std::to_string(k), {"k"});
                        rel = std::move(*sel);
                        break;
                    }
                }
                row.select_ms = ms_since(ts);

                ts = Clock::now();
                const auto recon = interpolate(truth, rel);
                row.interp_ms = ms_since(ts);
                const double m = mse(truth, recon);
                row.rmse = std::sqrt(m);
                row.psnr_db = psnr_from_mse(m);
                row.ssim = ssim(truth, recon);
                for (auto s : rel) row.steps.push_back(s + range.start);
                report.rows.push_back(std::move(row));
            } catch (const Error& e) {
                report.failures.push_back({method, k, e.what()});
            }
        }
    }

    if (options.beta_sweep) {
        std::vector<double> stat;
        try {
            stat = normalize_series(aggregate(dataset, range, options.region, options.aggregation));
        } catch (const Error& e) {
            report.failures.push_back({EvalMethod::Dp, 0, std::string("beta sweep: ") + e.what()});
        }
        if (!stat.empty()) {
            for (auto k : options.ks) {
                for (double beta : kBetaSweep) {
                    SelectionParams p;
                    p.alpha = 1.0 - beta;
                    p.beta = beta;
                    p.k = k;
                    p.gamma = options.gamma;
                    p.sigma = options.sigma;
                    p.aggregation = options.aggregation;
                    p.range = range;
                    p.region = options.region;
                    try {
                        report.beta_sweep.push_back({beta, k, run_selection(p, structural, stat).steps});
                    } catch (const Error&) {
                        // infeasible k already recorded in the method rows
                    }
                }
            }
        }
    }
    return report;
}

std::string to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "method,k,rmse,psnr_db,ssim,select_ms,interp_ms\n";
    char buf[256];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.9g,%s,%.9g,%.3f,%.3f\n", to_string(r.method), r.k, r.rmse,
                      format_psnr(r.psnr_db).c_str(), r.ssim, r.select_ms, r.interp_ms);
        out << buf;
    }
    return out.str();
}

}  // namespace keystep
