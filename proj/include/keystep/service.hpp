#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "keystep/aggregation.hpp"
#include "keystep/cache.hpp"
#include "keystep/embedding.hpp"
#include "keystep/features.hpp"
#include "keystep/grid.hpp"
#include "keystep/matrix.hpp"

namespace httplib {
class Server;
}

namespace keystep {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path dataset_root;
    std::size_t cache_bytes = std::size_t{512} << 20;
    std::size_t workers = 4;
};

enum class DerivedKind { Codes, StructuralMatrix, AggSeries, Embedding, Selection };
const char* to_string(DerivedKind kind);

/// Identity of a cached derived artifact. Keys compare by their canonical serialization.
struct CacheKey {
    std::string dataset;
    std::optional<Region> region;     // nullopt: whole frame
    std::optional<FocusRange> range;  // nullopt: whole dataset
    DerivedKind kind = DerivedKind::Codes;
    std::string detail;               // aggregation kind, request digest, ...

    std::string canonical() const;
    friend bool operator==(const CacheKey& a, const CacheKey& b) { return a.canonical() == b.canonical(); }
};

using Artifact = std::variant<std::vector<LatentCode>, CostMatrix, std::vector<double>, std::vector<EmbeddedPoint>,
                              std::string>;
std::size_t artifact_bytes(const Artifact& artifact);

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;

    std::string header(const std::string& name) const;
};

using Query = std::map<std::string, std::string>;

/// HTTP facade over the engine. Handlers are plain member functions so they can be
/// exercised without a socket; `mount` wires them under /api/v1.
class Service {
public:
    explicit Service(ServiceConfig config = {});
    ~Service();

    /// Registers a dataset and precomputes whole-frame codes and aggregations.
    /// `external` (one code per frame) replaces descriptor codes for whole-frame queries.
    void register_dataset(Dataset dataset, std::vector<LatentCode> external = {});
    /// Registers every sub-directory of `root` holding a meta.json (and optional codes.bin).
    std::size_t load_root(const std::filesystem::path& root);

    HttpReply list_datasets() const;
    HttpReply frame(const std::string& id, const std::string& t, const Query& query) const;
    HttpReply select(const std::string& id, const std::string& body);
    HttpReply trend(const std::string& id, const Query& query);
    HttpReply embedding(const std::string& id, const Query& query);

    /// Single-flight, byte-bounded LRU access to derived artifacts. The bool is true on a hit.
    std::pair<std::shared_ptr<const Artifact>, bool> cache_get_or_build(const CacheKey& key,
                                                                        const std::function<Artifact()>& build);
    CacheStats cache_stats() const;

    void mount(httplib::Server& server);
    /// Blocking listen on config.host:config.port with a worker pool of config.workers.
    bool run();

    const ServiceConfig& config() const noexcept { return config_; }

private:
    struct Entry {
        std::shared_ptr<const Dataset> dataset;
        std::vector<LatentCode> codes;               // whole frame, every step
        std::array<std::vector<double>, 3> aggregates;  // whole frame, indexed by AggregationKind
        bool external_codes = false;
    };

    std::shared_ptr<const Entry> find(const std::string& id) const;
    std::shared_ptr<const std::vector<LatentCode>> codes_for(const Entry& e, const std::optional<Region>& region);
    std::shared_ptr<const std::vector<double>> aggregates_for(const Entry& e, const std::optional<Region>& region,
                                                              AggregationKind kind);
    std::shared_ptr<const CostMatrix> structural_for(const Entry& e, const std::optional<Region>& region,
                                                     const FocusRange& range);

    ServiceConfig config_;
    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<const Entry>> registry_;
    SingleFlightCache<std::string, Artifact> cache_;
};

}  // namespace keystep
