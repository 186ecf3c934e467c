#include "keystep/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "httplib.h"
#include "keystep/analysis.hpp"
#include "keystep/bytes.hpp"
#include "keystep/error.hpp"
#include "keystep/frame_stack.hpp"
#include "keystep/json_io.hpp"
#include "keystep/render.hpp"
#include "keystep/selector.hpp"

namespace keystep {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::Constraint:
        case ErrorCode::Bounds:
        case ErrorCode::Format:
        case ErrorCode::InvalidCode: return 400;
        case ErrorCode::EmptyData: return 422;
        case ErrorCode::Io: return 500;
    }
    return 500;
}

HttpReply error_reply(int status, const std::string& code, const std::string& message,
                      const std::vector<std::string>& fields = {}) {
    Json body{{"code", code}, {"message", message}};
    if (!fields.empty()) {
        body["field"] = fields.front();
        body["fields"] = fields;
    }
    HttpReply r;
    r.status = status;
    r.body = body.dump();
    return r;
}

HttpReply error_reply(const Error& e) { return error_reply(status_for(e.code()), to_string(e.code()), e.what(), e.fields()); }

template <typename F>
HttpReply guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return error_reply(e);
    } catch (const std::exception& e) {
        return error_reply(500, "internal_error", e.what());
    }
}

std::string format_header_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::optional<std::string> get(const Query& q, const std::string& key) {
    auto it = q.find(key);
    if (it == q.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::size_t parse_index(const std::string& text, const char* field) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!text.empty() && text[0] != '-' && text[0] != '+') v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ConstraintError(std::string("bad ") + field + " '" + text + "'", {field});
    return static_cast<std::size_t>(v);
}

double parse_double(const std::string& text, const char* field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ConstraintError(std::string("bad ") + field + " '" + text + "'", {field});
    return v;
}

std::optional<Region> query_region(const Query& q, const Dataset& d) {
    auto text = get(q, "region");
    if (!text) return std::nullopt;
    Region r = parse_region(*text);
    validate_region(r, d.width(), d.height());
    if (r.is_full(d.width(), d.height())) return std::nullopt;
    return r;
}

FocusRange query_range(const Query& q, const Dataset& d) {
    auto text = get(q, "range");
    FocusRange r = text ? parse_range(*text) : d.full_range();
    validate_range(r, d.size());
    return r;
}

void add_elapsed(HttpReply& r, Clock::time_point t0) {
    r.headers.emplace_back("X-Elapsed-Ms",
                           format_header_number(std::chrono::duration<double, std::milli>(Clock::now() - t0).count()));
}

}  // namespace

const char* to_string(DerivedKind kind) {
    switch (kind) {
        case DerivedKind::Codes: return "codes";
        case DerivedKind::StructuralMatrix: return "struc-matrix";
        case DerivedKind::AggSeries: return "agg-series";
        case DerivedKind::Embedding: return "embedding";
        case DerivedKind::Selection: return "selection";
    }
    return "?";
}

std::string CacheKey::canonical() const {
    return Json::array({dataset, region ? to_json(*region) : Json(nullptr), range ? to_json(*range) : Json(nullptr),
                        to_string(kind), detail})
        .dump();
}

std::size_t artifact_bytes(const Artifact& artifact) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::vector<LatentCode>>) {
                std::size_t n = 0;
                for (const auto& c : v) n += c.dims() * sizeof(double) + sizeof(LatentCode);
                return n;
            } else if constexpr (std::is_same_v<T, CostMatrix>) {
                return v.bytes();
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                return v.size() * sizeof(double);
            } else if constexpr (std::is_same_v<T, std::vector<EmbeddedPoint>>) {
                return v.size() * sizeof(EmbeddedPoint);
            } else {
                return v.size();
            }
        },
        artifact);
}

std::string HttpReply::header(const std::string& name) const {
    for (const auto& [k, v] : headers) {
        if (k == name) return v;
    }
    return {};
}

Service::Service(ServiceConfig config) : config_(std::move(config)), cache_(config_.cache_bytes, artifact_bytes) {
    if (!config_.dataset_root.empty()) load_root(config_.dataset_root);
}

Service::~Service() = default;

void Service::register_dataset(Dataset dataset, std::vector<LatentCode> external) {
    auto e = std::make_shared<Entry>();
    const FocusRange all = dataset.full_range();
    if (!external.empty()) {
        if (external.size() != dataset.size()) {
            throw FormatError("latent-code file holds " + std::to_string(external.size()) + " codes for " +
                              std::to_string(dataset.size()) + " frames");
        }
        e->codes = std::move(external);
        e->external_codes = true;
    } else {
        e->codes = compute_codes(dataset, all, std::nullopt);
    }
    for (auto kind : {AggregationKind::Max, AggregationKind::Min, AggregationKind::Avg}) {
        e->aggregates[static_cast<std::size_t>(kind)] = aggregate(dataset, all, std::nullopt, kind);
    }
    const std::string id = dataset.id;
    e->dataset = std::make_shared<const Dataset>(std::move(dataset));
    std::unique_lock lock(registry_mutex_);
    registry_[id] = std::move(e);
}

std::size_t Service::load_root(const fs::path& root) {
    if (!fs::is_directory(root)) throw IoError("dataset root is not a directory: " + root.string());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        auto d = ingest_stack(dir);
        std::vector<LatentCode> codes;
        if (fs::exists(dir / "codes.bin")) codes = load_latent_codes(dir / "codes.bin");
        register_dataset(std::move(d), std::move(codes));
    }
    return dirs.size();
}

std::shared_ptr<const Service::Entry> Service::find(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = registry_.find(id);
    if (it == registry_.end()) throw NotFoundError("unknown dataset '" + id + "'", {"id"});
    return it->second;
}

std::pair<std::shared_ptr<const Artifact>, bool> Service::cache_get_or_build(const CacheKey& key,
                                                                             const std::function<Artifact()>& build) {
    return cache_.get_or_build(key.canonical(), build);
}

CacheStats Service::cache_stats() const { return cache_.stats(); }

std::shared_ptr<const std::vector<LatentCode>> Service::codes_for(const Entry& e, const std::optional<Region>& region) {
    if (!region) return {std::shared_ptr<const Entry>(), &e.codes};
    const auto& d = *e.dataset;
    auto [artifact, hit] = cache_get_or_build({d.id, region, std::nullopt, DerivedKind::Codes, ""}, [&]() -> Artifact {
        return compute_codes(d, d.full_range(), region);
    });
    return {artifact, &std::get<std::vector<LatentCode>>(*artifact)};
}

std::shared_ptr<const std::vector<double>> Service::aggregates_for(const Entry& e, const std::optional<Region>& region,
                                                                   AggregationKind kind) {
    if (!region) return {std::shared_ptr<const Entry>(), &e.aggregates[static_cast<std::size_t>(kind)]};
    const auto& d = *e.dataset;
    auto [artifact, hit] =
        cache_get_or_build({d.id, region, std::nullopt, DerivedKind::AggSeries, to_string(kind)}, [&]() -> Artifact {
            return aggregate(d, d.full_range(), region, kind);
        });
    return {artifact, &std::get<std::vector<double>>(*artifact)};
}

std::shared_ptr<const CostMatrix> Service::structural_for(const Entry& e, const std::optional<Region>& region,
                                                          const FocusRange& range) {
    const auto& d = *e.dataset;
    auto [artifact, hit] =
        cache_get_or_build({d.id, region, range, DerivedKind::StructuralMatrix, ""}, [&]() -> Artifact {
            const auto codes = codes_for(e, region);
            std::span<const LatentCode> slice(codes->data() + range.start, range.length());
            return structural_cost_matrix(slice);
        });
    return {artifact, &std::get<CostMatrix>(*artifact)};
}

HttpReply Service::list_datasets() const {
    Json out = Json::array();
    std::shared_lock lock(registry_mutex_);
    for (const auto& [id, e] : registry_) {
        auto j = describe(*e->dataset);
        j["codes"] = e->external_codes ? "external" : "descriptor";
        out.push_back(std::move(j));
    }
    HttpReply r;
    r.body = out.dump();
    return r;
}

HttpReply Service::frame(const std::string& id, const std::string& t_text, const Query& q) const {
    return guarded([&] {
        const auto e = find(id);
        const auto& d = *e->dataset;
        std::size_t t = 0;
        try {
            t = parse_index(t_text, "t");
        } catch (const ConstraintError&) {
            throw NotFoundError("no frame '" + t_text + "'", {"t"});
        }
        if (t >= d.size()) throw NotFoundError("frame " + t_text + " out of range", {"t"});
        const auto region = query_region(q, d);
        const GridFrame f = region ? crop(d.frames[t], *region) : d.frames[t];
        const auto summary = summarize(f);

        HttpReply r;
        const std::string format = get(q, "format").value_or("f32");
        if (format == "f32") {
            r.content_type = "application/octet-stream";
            r.body.reserve(f.size() * 4);
            for (double v : f.values) bytes::put_f32(r.body, static_cast<float>(v));
        } else if (format == "png") {
            const double vmin = get(q, "vmin") ? parse_double(*get(q, "vmin"), "vmin") : d.norm.vmin;
            const double vmax = get(q, "vmax") ? parse_double(*get(q, "vmax"), "vmax") : d.norm.vmax;
            const auto cmap = parse_colormap(get(q, "cmap").value_or("viridis"));
            r.content_type = "image/png";
            r.body = encode_png(colorize(f, vmin, vmax, cmap), f.width, f.height);
        } else {
            throw ConstraintError("format must be f32 or png", {"format"});
        }
        r.headers = {{"X-Frame-Width", std::to_string(f.width)},
                     {"X-Frame-Height", std::to_string(f.height)},
                     {"X-Frame-Min", format_header_number(summary.min)},
                     {"X-Frame-Max", format_header_number(summary.max)},
                     {"X-Frame-Avg", format_header_number(summary.mean)},
                     {"X-Frame-Timestamp", d.timestamps[t]}};
        return r;
    });
}

HttpReply Service::select(const std::string& id, const std::string& body) {
    const auto t0 = Clock::now();
    return guarded([&] {
        const auto e = find(id);
        const auto& d = *e->dataset;
        Json parsed;
        try {
            parsed = Json::parse(body);
        } catch (const Json::parse_error& ex) {
            return error_reply(400, "bad_json", ex.what(), {"body"});
        }
        auto params = params_from_json(parsed, d.size());
        validate_params(params, d.size());
        if (params.region) {
            validate_region(*params.region, d.width(), d.height());
            if (params.region->is_full(d.width(), d.height())) params.region.reset();
        }

        const CacheKey key{d.id, params.region, params.range, DerivedKind::Selection, to_json(params).dump()};
        auto [artifact, hit] = cache_get_or_build(key, [&]() -> Artifact {
            std::shared_ptr<const CostMatrix> structural;
            if (params.alpha > 0.0) structural = structural_for(*e, params.region, params.range);
            std::vector<double> stat;
            if (params.beta > 0.0) {
                const auto all = aggregates_for(*e, params.region, params.aggregation);
                stat = normalize_series(std::span<const double>(all->data() + params.range.start, params.range.length()));
            }
            static const CostMatrix kEmpty;
            const auto result = run_selection(params, structural ? *structural : kEmpty, stat);
            Json out = to_json(result);
            out["preload_order"] = preload_order(result.steps, params.range);
            out["codes"] = (!params.region && e->external_codes) ? "external" : "descriptor";
            return out.dump();
        });
        HttpReply r;
        r.body = std::get<std::string>(*artifact);
        r.headers.emplace_back("X-Cache", hit ? "hit" : "miss");
        add_elapsed(r, t0);
        return r;
    });
}

HttpReply Service::trend(const std::string& id, const Query& q) {
    return guarded([&] {
        const auto e = find(id);
        const auto& d = *e->dataset;
        const auto range = query_range(q, d);
        const auto region = query_region(q, d);
        const std::string kind = get(q, "kind").value_or("structural");
        std::optional<std::size_t> ref;
        if (auto text = get(q, "ref")) {
            ref = parse_index(*text, "ref");
            if (*ref >= d.size()) throw ConstraintError("ref frame outside dataset", {"ref"});
        }

        Json values = Json::array();
        if (kind == "structural") {
            const auto codes = codes_for(*e, region);
            for (std::size_t t = range.start; t <= range.end; ++t) {
                if (ref) {
                    values.push_back(t == *ref ? structural_cost(1.0) : structural_cost((*codes)[t], (*codes)[*ref]));
                } else {
                    values.push_back(t == range.start ? Json(nullptr) : Json(structural_cost((*codes)[t - 1], (*codes)[t])));
                }
            }
        } else {
            const auto agg = parse_aggregation(kind);
            const auto all = aggregates_for(*e, region, agg);
            const auto vhat = normalize_series(std::span<const double>(all->data() + range.start, range.length()));
            if (ref && !range.contains(*ref)) {
                throw ConstraintError("ref must lie inside the focus range for statistical trends", {"ref"});
            }
            for (std::size_t i = 0; i < vhat.size(); ++i) {
                const double v = ref ? std::abs(vhat[i] - vhat[*ref - range.start]) : vhat[i];
                values.push_back(number_or_null(v));
            }
        }
        HttpReply r;
        r.body = Json{{"kind", kind},
                      {"range", to_json(range)},
                      {"region", region ? to_json(*region) : Json(nullptr)},
                      {"ref", ref ? Json(*ref) : Json(nullptr)},
                      {"values", values}}
                     .dump();
        return r;
    });
}

HttpReply Service::embedding(const std::string& id, const Query& q) {
    return guarded([&] {
        const auto e = find(id);
        const auto& d = *e->dataset;
        const auto range = query_range(q, d);
        const auto region = query_region(q, d);
        std::set<std::size_t> salient;
        if (auto text = get(q, "salient")) {
            std::size_t pos = 0;
            while (pos <= text->size()) {
                const auto next = text->find(',', pos);
                salient.insert(parse_index(text->substr(pos, next == std::string::npos ? std::string::npos : next - pos),
                                           "salient"));
                if (next == std::string::npos) break;
                pos = next + 1;
            }
        }
        const std::size_t cap = get(q, "cap") ? parse_index(*get(q, "cap"), "cap") : kDisplayCap;

        auto [artifact, hit] = cache_get_or_build({d.id, region, range, DerivedKind::Embedding, "pca"}, [&]() -> Artifact {
            const auto codes = codes_for(*e, region);
            return project_2d(std::span<const LatentCode>(codes->data() + range.start, range.length()), range.start);
        });
        auto points = std::get<std::vector<EmbeddedPoint>>(*artifact);
        sample_for_display(points, salient, cap);
        Json out = Json::array();
        for (const auto& p : points) {
            if (!p.sampled_out) out.push_back(to_json(p));
        }
        HttpReply r;
        r.body = Json{{"method", "pca"}, {"range", to_json(range)}, {"total", points.size()}, {"points", out}}.dump();
        return r;
    });
}

void Service::mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        for (const auto& [k, v] : reply.headers) res.set_header(k, v);
        res.set_content(reply.body, reply.content_type);
    };
    auto query_of = [](const httplib::Request& req) {
        Query q;
        for (const auto& [k, v] : req.params) q[k] = v;
        return q;
    };
    server.Get("/api/v1/datasets", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, list_datasets());
    });
    server.Get(R"(/api/v1/datasets/([^/]+)/frames/([^/]+))",
               [this, send, query_of](const httplib::Request& req, httplib::Response& res) {
                   send(res, frame(req.matches[1], req.matches[2], query_of(req)));
               });
    server.Post(R"(/api/v1/datasets/([^/]+)/select)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, select(req.matches[1], req.body));
    });
    server.Get(R"(/api/v1/datasets/([^/]+)/trend)",
               [this, send, query_of](const httplib::Request& req, httplib::Response& res) {
                   send(res, trend(req.matches[1], query_of(req)));
               });
    server.Get(R"(/api/v1/datasets/([^/]+)/embedding)",
               [this, send, query_of](const httplib::Request& req, httplib::Response& res) {
                   send(res, embedding(req.matches[1], query_of(req)));
               });
    server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            send(res, error_reply(res.status, res.status == 404 ? "not_found" : "http_error", "no such endpoint"));
        }
    });
}

bool Service::run() {
    httplib::Server server;
    const std::size_t workers = std::max<std::size_t>(1, config_.workers);
    server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    mount(server);
    return server.listen(config_.host, config_.port);
}

}  // namespace keystep
