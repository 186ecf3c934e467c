#include "keystep/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "keystep/error.hpp"
#include "keystep/reconstruct.hpp"

namespace keystep {

namespace {

std::size_t as_index(const Json& j, const char* field) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::size_t>(j.get<long long>());
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d >= 0 && std::floor(d) == d) return static_cast<std::size_t>(d);
    }
    throw ConstraintError(std::string("'") + field + "' must be a non-negative integer", {field});
}

double as_number(const Json& j, const char* field) {
    if (!j.is_number()) throw ConstraintError(std::string("'") + field + "' must be a number", {field});
    return j.get<double>();
}

std::vector<std::size_t> split_indices(const std::string& text, const char* field, char sep) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto next = text.find(sep, pos);
        const auto tok = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            if (tok.empty() || tok[0] == '-' || tok[0] == '+') throw std::invalid_argument("sign");
            v = std::stoull(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) {
            throw ConstraintError(std::string("bad ") + field + " '" + text + "'", {field});
        }
        out.push_back(static_cast<std::size_t>(v));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::set<std::size_t> index_set(const Json& j, const char* field) {
    std::set<std::size_t> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw ConstraintError(std::string("'") + field + "' must be an array of frame indices", {field});
    for (const auto& v : j) out.insert(as_index(v, field));
    return out;
}

}  // namespace

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Region& r) { return Json::array({r.x0, r.y0, r.x1, r.y1}); }

Json to_json(const FocusRange& r) { return Json::array({r.start, r.end}); }

Json to_json(const SelectionParams& p) {
    return Json{
        {"alpha", p.alpha},
        {"beta", p.beta},
        {"k", p.k},
        {"gamma", p.gamma},
        {"sigma", p.sigma},
        {"aggregation", to_string(p.aggregation)},
        {"region", p.region ? to_json(*p.region) : Json(nullptr)},
        {"range", to_json(p.range)},
        {"pinned", p.pinned},
        {"excluded", p.excluded},
    };
}

Json to_json(const SelectionResult& r) {
    Json pairs = Json::array();
    for (const auto& b : r.pair_costs) {
        pairs.push_back({{"from", b.from},
                         {"to", b.to},
                         {"structural", b.structural},
                         {"statistical", b.statistical},
                         {"distance", b.distance},
                         {"combined", b.combined}});
    }
    return Json{{"steps", r.steps}, {"total_cost", r.total_cost}, {"pair_costs", pairs}, {"params", to_json(r.params)}};
}

Json to_json(const EvalReport& report) {
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"method", to_string(r.method)},
                        {"k", r.k},
                        {"steps", r.steps},
                        {"rmse", r.rmse},
                        {"psnr_db", std::isinf(r.psnr_db) ? Json("inf") : Json(r.psnr_db)},
                        {"ssim", r.ssim},
                        {"select_ms", r.select_ms},
                        {"interp_ms", r.interp_ms}});
    }
    Json failures = Json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"method", to_string(f.method)}, {"k", f.k}, {"message", f.message}});
    }
    Json sweep = Json::array();
    for (const auto& s : report.beta_sweep) sweep.push_back({{"beta", s.beta}, {"k", s.k}, {"steps", s.steps}});
    Json methods = Json::array();
    for (auto m : report.methods) methods.push_back(to_string(m));
    return Json{{"dataset", report.dataset_id},
                {"range", to_json(report.range)},
                {"methods", methods},
                {"rows", rows},
                {"failures", failures},
                {"beta_sweep", sweep},
                {"runtime_ms", {{"preprocess", report.timings.preprocess_ms}, {"codes", report.timings.codes_ms}}},
                {"arc_default_k", report.arc_default_k ? Json(*report.arc_default_k) : Json(nullptr)}};
}

Json to_json(const EmbeddedPoint& p) {
    return Json{{"t", p.frame}, {"x", p.x}, {"y", p.y}, {"salient", p.salient}, {"sampled_out", p.sampled_out}};
}

Json describe(const Dataset& d) {
    return Json{{"id", d.id},
                {"variable", d.variable},
                {"width", d.width()},
                {"height", d.height()},
                {"t", d.size()},
                {"extent", {d.extent.lon0, d.extent.lat0, d.extent.lon1, d.extent.lat1}},
                {"time_span", {d.timestamps.front(), d.timestamps.back()}},
                {"vmin", d.norm.vmin},
                {"vmax", d.norm.vmax}};
}

Region parse_region(const std::string& text) {
    const auto v = split_indices(text, "region", ',');
    if (v.size() != 4) throw ConstraintError("region needs x0,y0,x1,y1", {"region"});
    return {v[0], v[1], v[2], v[3]};
}

Region region_from_json(const Json& j) {
    if (j.is_string()) return parse_region(j.get<std::string>());
    if (j.is_array() && j.size() == 4) {
        return {as_index(j[0], "region"), as_index(j[1], "region"), as_index(j[2], "region"), as_index(j[3], "region")};
    }
    if (j.is_object() && j.contains("x0") && j.contains("y0") && j.contains("x1") && j.contains("y1")) {
        return {as_index(j["x0"], "region"), as_index(j["y0"], "region"), as_index(j["x1"], "region"),
                as_index(j["y1"], "region")};
    }
    throw ConstraintError("region must be \"x0,y0,x1,y1\", [x0,y0,x1,y1] or {x0,y0,x1,y1}", {"region"});
}

FocusRange parse_range(const std::string& text) {
    const auto v = split_indices(text, "range", ':');
    if (v.size() != 2) throw ConstraintError("range must be a:b", {"range"});
    return {v[0], v[1]};
}

FocusRange range_from_json(const Json& j) {
    if (j.is_string()) return parse_range(j.get<std::string>());
    if (j.is_array() && j.size() == 2) return {as_index(j[0], "range"), as_index(j[1], "range")};
    if (j.is_object() && j.contains("start") && j.contains("end")) {
        return {as_index(j["start"], "range"), as_index(j["end"], "range")};
    }
    throw ConstraintError("range must be \"a:b\", [a,b] or {start,end}", {"range"});
}

SelectionParams params_from_json(const Json& body, std::size_t frame_count) {
    if (!body.is_object()) throw ConstraintError("request body must be a JSON object", {"body"});
    static const std::set<std::string> known = {"range", "k", "alpha", "beta", "aggregation", "region",
                                                "pinned", "excluded", "gamma", "sigma"};
    for (const auto& [key, _] : body.items()) {
        if (!known.count(key)) throw ConstraintError("unknown field '" + key + "'", {key});
    }
    SelectionParams p;
    p.range = body.contains("range") && !body["range"].is_null() ? range_from_json(body["range"])
                                                                  : FocusRange{0, frame_count ? frame_count - 1 : 0};
    if (!body.contains("k")) throw ConstraintError("'k' is required", {"k"});
    p.k = as_index(body["k"], "k");
    const bool has_alpha = body.contains("alpha"), has_beta = body.contains("beta");
    if (has_alpha) p.alpha = as_number(body["alpha"], "alpha");
    if (has_beta) p.beta = as_number(body["beta"], "beta");
    if (has_alpha && !has_beta) p.beta = 1.0 - p.alpha;
    if (!has_alpha && has_beta) p.alpha = 1.0 - p.beta;
    if (body.contains("aggregation")) {
        if (!body["aggregation"].is_string()) throw ConstraintError("'aggregation' must be a string", {"aggregation"});
        p.aggregation = parse_aggregation(body["aggregation"].get<std::string>());
    }
    if (body.contains("region") && !body["region"].is_null()) p.region = region_from_json(body["region"]);
    if (body.contains("pinned")) p.pinned = index_set(body["pinned"], "pinned");
    if (body.contains("excluded")) p.excluded = index_set(body["excluded"], "excluded");
    if (body.contains("gamma")) p.gamma = as_number(body["gamma"], "gamma");
    if (body.contains("sigma")) p.sigma = as_number(body["sigma"], "sigma");
    return p;
}

}  // namespace keystep
