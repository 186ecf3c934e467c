#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <future>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

namespace keystep {

struct CacheStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t builds = 0;
    std::size_t evictions = 0;
    std::size_t entries = 0;
    std::size_t bytes = 0;
};

/// Byte-bounded LRU cache with single-flight builds: concurrent misses on the
/// same key run the builder once and every caller receives the same value.
/// A failed build is not cached; its exception reaches every waiter.
template <typename Key, typename Value, typename Hash = std::hash<Key>>
class SingleFlightCache {
public:
    using Ptr = std::shared_ptr<const Value>;
    using Sizer = std::function<std::size_t(const Value&)>;

    explicit SingleFlightCache(std::size_t capacity_bytes, Sizer sizer = [](const Value&) { return std::size_t{1}; })
        : capacity_(capacity_bytes), sizer_(std::move(sizer)) {}

    SingleFlightCache(const SingleFlightCache&) = delete;
    SingleFlightCache& operator=(const SingleFlightCache&) = delete;

    /// Returns the cached value and whether it was served without building.
    template <typename Builder>
    std::pair<Ptr, bool> get_or_build(const Key& key, Builder&& build) {
        std::unique_lock lock(mutex_);
        if (auto it = map_.find(key); it != map_.end()) {
            ++stats_.hits;
            if (it->second.ready) lru_.splice(lru_.begin(), lru_, it->second.lru_pos);
            auto fut = it->second.future;
            lock.unlock();
            return {fut.get(), true};
        }
        ++stats_.misses;
        ++stats_.builds;
        std::promise<Ptr> promise;
        map_.emplace(key, Entry{promise.get_future().share()});
        lock.unlock();

        Ptr value;
        try {
            value = std::make_shared<const Value>(build());
        } catch (...) {
            lock.lock();
            map_.erase(key);
            lock.unlock();
            promise.set_exception(std::current_exception());
            throw;
        }

        const std::size_t size = sizer_(*value);
        lock.lock();
        if (auto it = map_.find(key); it != map_.end()) {
            auto& e = it->second;
            e.ready = true;
            e.bytes = size;
            lru_.push_front(key);
            e.lru_pos = lru_.begin();
            stats_.bytes += size;
            evict_locked();
        }
        lock.unlock();
        promise.set_value(value);
        return {value, false};
    }

    /// Cached value without building, or nullptr.
    Ptr peek(const Key& key) {
        std::lock_guard lock(mutex_);
        auto it = map_.find(key);
        if (it == map_.end() || !it->second.ready) return nullptr;
        return it->second.future.get();
    }

    void clear() {
        std::lock_guard lock(mutex_);
        for (auto it = map_.begin(); it != map_.end();) {
            if (it->second.ready) {
                it = map_.erase(it);
            } else {
                ++it;
            }
        }
        lru_.clear();
        stats_.bytes = 0;
    }

    CacheStats stats() const {
        std::lock_guard lock(mutex_);
        CacheStats s = stats_;
        s.entries = lru_.size();
        return s;
    }

    std::size_t capacity() const noexcept { return capacity_; }

private:
    struct Entry {
        std::shared_future<Ptr> future;
        bool ready = false;
        std::size_t bytes = 0;
        typename std::list<Key>::iterator lru_pos{};
    };

    void evict_locked() {
        while (stats_.bytes > capacity_ && !lru_.empty()) {
            const Key& victim = lru_.back();
            auto it = map_.find(victim);
            stats_.bytes -= it->second.bytes;
            map_.erase(it);
            lru_.pop_back();
            ++stats_.evictions;
        }
    }

    std::size_t capacity_;
    Sizer sizer_;
    mutable std::mutex mutex_;
    std::unordered_map<Key, Entry, Hash> map_;
    std::list<Key> lru_;  // ready entries, most recent first
    CacheStats stats_;
};

}  // namespace keystep
