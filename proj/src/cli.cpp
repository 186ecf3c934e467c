#include "keystep/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "keystep/analysis.hpp"
#include "keystep/embedding.hpp"
#include "keystep/error.hpp"
#include "keystep/evaluate.hpp"
#include "keystep/frame_stack.hpp"
#include "keystep/json_io.hpp"
#include "keystep/service.hpp"
#include "keystep/synth.hpp"

namespace keystep {

namespace fs = std::filesystem;

namespace {

int exit_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Constraint:
        case ErrorCode::Bounds:
        case ErrorCode::NotFound: return kExitUsage;
        default: return kExitFormat;
    }
}

struct Loaded {
    Dataset dataset;
    std::vector<LatentCode> codes;
};

Loaded load(const std::string& path, const std::string& codes_file) {
    if (!fs::is_directory(path)) throw NotFoundError("dataset directory not found: " + path, {"dataset"});
    Loaded l{ingest_stack(path), {}};
    fs::path codes = codes_file.empty() ? fs::path(path) / "codes.bin" : fs::path(codes_file);
    if (!codes_file.empty() && !fs::exists(codes)) throw NotFoundError("code file not found: " + codes_file, {"codes"});
    if (fs::exists(codes)) {
        l.codes = load_latent_codes(codes);
        if (l.codes.size() != l.dataset.size()) {
            throw FormatError("code file holds " + std::to_string(l.codes.size()) + " codes for " +
                              std::to_string(l.dataset.size()) + " frames");
        }
    }
    return l;
}

FocusRange range_or_all(const std::string& text, const Dataset& d) {
    return text.empty() ? d.full_range() : parse_range(text);
}

std::optional<Region> region_or_none(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return parse_region(text);
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
    const auto x = text.find_first_of("xX");
    try {
        if (x != std::string::npos) {
            std::size_t a = 0, b = 0;
            const auto w = std::stoull(text.substr(0, x), &a);
            const auto h = std::stoull(text.substr(x + 1), &b);
            if (a == x && b == text.size() - x - 1) return {w, h};
        }
    } catch (const std::exception&) {
    }
    throw ConstraintError("size must look like WxH, got '" + text + "'", {"size"});
}

void write_file(const fs::path& file, const std::string& data) {
    std::ofstream f(file, std::ios::binary);
    if (!f) throw IoError("cannot write " + file.string());
    f << data;
    if (!f) throw IoError("write failed for " + file.string());
}

std::string join(const std::vector<std::string>& names) {
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ",") + n;
    return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Salient time-step selection for raster time series"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    // ingest
    std::string ingest_src, ingest_out;
    bool ingest_codes = false;
    auto* ingest = app.add_subcommand("ingest", "Validate a frame-stack directory and write it in canonical form");
    ingest->add_option("--src", ingest_src, "Frame-stack directory (meta.json with .f32 or .csv frames)")->required();
    ingest->add_option("--out", ingest_out, "Output directory")->required();
    ingest->add_flag("--codes", ingest_codes, "Also write codes.bin with the 512-dim pyramid descriptor (phi=512)");

    // synth
    std::string synth_family = "ramp", synth_size = "32x32", synth_out, synth_id;
    std::size_t synth_t = 40;
    std::uint64_t synth_seed = 0;
    std::vector<std::size_t> synth_bursts;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--family", synth_family, "ramp | burst | blob | seasonal");
    synth->add_option("--t", synth_t, "Number of frames");
    synth->add_option("--size", synth_size, "Grid size WxH");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--bursts", synth_bursts, "Burst frame indices (burst family; default t/2)")->delimiter(',');
    synth->add_option("--id", synth_id, "Dataset id (default <family>-<seed>)");
    synth->add_option("--out", synth_out, "Output directory")->required();

    // select
    std::string sel_dataset, sel_range, sel_agg = "avg", sel_region, sel_codes;
    std::size_t sel_k = 0;
    double sel_alpha = 1.0, sel_beta = 0.0, sel_gamma = kDefaultGamma, sel_sigma = kDefaultSigma;
    std::vector<std::size_t> sel_pin, sel_exclude;
    bool sel_json = false, sel_csv = false;
    auto* sel = app.add_subcommand("select", "Select k salient time steps");
    sel->add_option("--dataset", sel_dataset, "Frame-stack directory")->required();
    sel->add_option("--range", sel_range, "Inclusive focus range a:b, 0-based (default: all frames)");
    sel->add_option("--k", sel_k, "Number of steps, endpoints included")->required();
    auto* alpha_opt = sel->add_option("--alpha", sel_alpha, "Structural weight");
    auto* beta_opt = sel->add_option("--beta", sel_beta, "Statistical weight; alpha + beta = 1");
    sel->add_option("--agg", sel_agg, "Aggregation: max | min | avg");
    sel->add_option("--gamma", sel_gamma, "Distance penalty weight");
    sel->add_option("--sigma", sel_sigma, "Distance penalty spread");
    sel->add_option("--region", sel_region, "Pixel window x0,y0,x1,y1 (inclusive)");
    sel->add_option("--pin", sel_pin, "Frames that must be selected")->delimiter(',');
    sel->add_option("--exclude", sel_exclude, "Frames that must not be selected")->delimiter(',');
    sel->add_option("--codes", sel_codes,
                    "Latent-code file (default: <dataset>/codes.bin if present, else the 512-dim pyramid "
                    "descriptor, phi=512)");
    auto* json_flag = sel->add_flag("--json", sel_json, "JSON output (default)");
    auto* csv_flag = sel->add_flag("--csv", sel_csv, "Per-pair cost table as CSV");
    json_flag->excludes(csv_flag);

    // eval
    std::string ev_dataset, ev_range, ev_region, ev_agg = "avg", ev_out, ev_codes;
    std::vector<std::string> ev_methods{"dp", "even", "arc"};
    std::vector<std::size_t> ev_ks{5, 10, 20};
    bool ev_sweep = false;
    double ev_gamma = kDefaultGamma, ev_sigma = kDefaultSigma;
    auto* ev = app.add_subcommand("eval", "Score selection methods by piecewise-linear reconstruction");
    ev->add_option("--dataset", ev_dataset, "Frame-stack directory")->required();
    ev->add_option("--range", ev_range, "Inclusive focus range a:b (default: all frames)");
    ev->add_option("--region", ev_region, "Pixel window x0,y0,x1,y1 for the structural codes");
    ev->add_option("--methods", ev_methods, "Methods: dp, even, arc")->delimiter(',');
    ev->add_option("--ks", ev_ks, "Values of k")->delimiter(',');
    ev->add_flag("--beta-sweep", ev_sweep, "Also record DP selections for beta in {0, .25, .5, .75, 1}");
    ev->add_option("--agg", ev_agg, "Aggregation used by the beta sweep");
    ev->add_option("--gamma", ev_gamma, "Distance penalty weight");
    ev->add_option("--sigma", ev_sigma, "Distance penalty spread");
    ev->add_option("--codes", ev_codes, "Latent-code file (default: <dataset>/codes.bin if present, phi=512 descriptor otherwise)");
    ev->add_option("--out", ev_out, "Report file; .json writes the full report, anything else CSV")->required();

    // embed
    std::string em_dataset, em_range, em_region, em_codes, em_out, em_codes_out;
    std::vector<std::size_t> em_salient;
    std::size_t em_cap = kDisplayCap;
    auto* em = app.add_subcommand("embed", "Project latent codes to 2D");
    em->add_option("--dataset", em_dataset, "Frame-stack directory")->required();
    em->add_option("--range", em_range, "Inclusive focus range a:b (default: all frames)");
    em->add_option("--region", em_region, "Pixel window x0,y0,x1,y1");
    em->add_option("--codes", em_codes, "Latent-code file (default: <dataset>/codes.bin if present, phi=512 descriptor otherwise)");
    em->add_option("--salient", em_salient, "Frames to mark salient")->delimiter(',');
    em->add_option("--cap", em_cap, "Display cap for sampling");
    em->add_option("--out", em_out, "Write JSON here instead of stdout");
    em->add_option("--codes-out", em_codes_out, "Also write the range codes as a latent-code file");

    // serve
    ServiceConfig sc;
    std::size_t cache_mb = sc.cache_bytes >> 20;
    std::string serve_root;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service under /api/v1");
    serve->add_option("--root", serve_root, "Directory of frame-stack datasets")->required();
    serve->add_option("--host", sc.host, "Bind address");
    serve->add_option("--port", sc.port, "Port");
    serve->add_option("--cache-mb", cache_mb, "Derived-artifact cache budget in MiB");
    serve->add_option("--workers", sc.workers, "Request worker threads");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return kExitUsage;
    }

    try {
        if (*ingest) {
            if (!fs::is_directory(ingest_src)) throw NotFoundError("dataset directory not found: " + ingest_src, {"src"});
            const auto d = ingest_stack(ingest_src);
            export_stack(d, ingest_out);
            if (ingest_codes) save_latent_codes(compute_codes(d, d.full_range(), std::nullopt), fs::path(ingest_out) / "codes.bin");
            out << describe(d).dump(2) << "\n";
        } else if (*synth) {
            SyntheticSpec spec;
            spec.family = parse_synth_family(synth_family);
            spec.t = synth_t;
            std::tie(spec.width, spec.height) = parse_size(synth_size);
            spec.seed = synth_seed;
            spec.bursts = synth_bursts;
            spec.id = synth_id;
            const auto d = synthesize(spec);
            export_stack(d, synth_out);
            out << describe(d).dump(2) << "\n";
        } else if (*sel) {
            const auto l = load(sel_dataset, sel_codes);
            SelectionParams p;
            p.range = range_or_all(sel_range, l.dataset);
            p.k = sel_k;
            p.alpha = sel_alpha;
            p.beta = sel_beta;
            if (alpha_opt->count() && !beta_opt->count()) p.beta = 1.0 - p.alpha;
            if (!alpha_opt->count() && beta_opt->count()) p.alpha = 1.0 - p.beta;
            p.gamma = sel_gamma;
            p.sigma = sel_sigma;
            p.aggregation = parse_aggregation(sel_agg);
            p.region = region_or_none(sel_region);
            p.pinned = {sel_pin.begin(), sel_pin.end()};
            p.excluded = {sel_exclude.begin(), sel_exclude.end()};
            const auto result = select(l.dataset, p, l.codes);
            if (sel_csv) {
                std::ostringstream s;
                s.precision(17);
                s << "from,to,structural,statistical,distance,combined\n";
                for (const auto& pc : result.pair_costs) {
                    s << pc.from << ',' << pc.to << ',' << pc.structural << ',' << pc.statistical << ','
                      << pc.distance << ',' << pc.combined << '\n';
                }
                out << s.str();
            } else {
                out << to_json(result).dump(2) << "\n";
            }
        } else if (*ev) {
            const auto l = load(ev_dataset, ev_codes);
            EvalOptions o;
            o.methods.clear();
            for (const auto& m : ev_methods) o.methods.push_back(parse_eval_method(m));
            o.ks = ev_ks;
            o.beta_sweep = ev_sweep;
            o.region = region_or_none(ev_region);
            o.aggregation = parse_aggregation(ev_agg);
            o.gamma = ev_gamma;
            o.sigma = ev_sigma;
            const auto report = evaluate(l.dataset, range_or_all(ev_range, l.dataset), o, l.codes);
            const bool as_json = fs::path(ev_out).extension() == ".json";
            write_file(ev_out, as_json ? to_json(report).dump(2) + "\n" : to_csv(report));
            for (const auto& f : report.failures) {
                err << "warning: " << to_string(f.method) << " k=" << f.k << ": " << f.message << "\n";
            }
            out << ev_out << "\n";
        } else if (*em) {
            const auto l = load(em_dataset, em_codes);
            const auto range = range_or_all(em_range, l.dataset);
            validate_range(range, l.dataset.size());
            const auto region = region_or_none(em_region);
            if (region) validate_region(*region, l.dataset.width(), l.dataset.height());
            const auto codes = range_codes(l.dataset, range, region, l.codes);
            auto points = project_2d(codes, range.start);
            sample_for_display(points, {em_salient.begin(), em_salient.end()}, em_cap);
            Json arr = Json::array();
            for (const auto& pt : points) arr.push_back(to_json(pt));
            const std::string text =
                Json{{"method", "pca"}, {"range", to_json(range)}, {"points", arr}}.dump(2) + "\n";
            if (!em_codes_out.empty()) save_latent_codes(codes, em_codes_out);
            if (em_out.empty()) {
                out << text;
            } else {
                write_file(em_out, text);
            }
        } else if (*serve) {
            sc.dataset_root = serve_root;
            sc.cache_bytes = cache_mb << 20;
            if (!fs::is_directory(serve_root)) throw NotFoundError("dataset root not found: " + serve_root, {"root"});
            Service service(sc);
            err << "serving on http://" << sc.host << ":" << sc.port << "/api/v1\n";
            if (!service.run()) throw IoError("cannot listen on " + sc.host + ":" + std::to_string(sc.port));
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what();
        if (!e.fields().empty()) err << " (fields: " << join(e.fields()) << ")";
        err << "\n";
        return exit_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFormat;
    }
    return kExitOk;
}

}  // namespace keystep
