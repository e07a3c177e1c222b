#pragma once

#include "hclab/eigs.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace hc {

std::string fnv1a_hex(const std::string& bytes);

/// Keyed eigenpair store: an in-process map (full decompositions, vectors
/// included) backed by an on-disk layer that persists eigenvalues, moments
/// and the solve metadata. Disk entries therefore come back without
/// vectors, which is all the beta machinery needs; callers that require
/// coefficient vectors solve with the cache disabled.
///
/// Synchronization: one writer per key, concurrent readers; disk writes go
/// through a temp file + rename.
class EigenCache {
public:
    static EigenCache& instance();

    /// Cache directory resolution: explicit set_directory() wins, then the
    /// HCLAB_CACHE_DIR environment variable, then ".hclab-cache".
    void set_directory(const std::string& dir);
    void set_enabled(bool on);
    bool enabled() const { return enabled_; }
    std::string directory() const;

    std::optional<EigenDecomposition> load(const std::string& key);
    void store(const std::string& key, const EigenDecomposition& dec, double h);
    void clear_memory();

private:
    EigenCache() = default;
    mutable std::mutex mutex_;
    std::map<std::string, EigenDecomposition> memory_;
    std::string directory_;
    bool enabled_ = true;
};

}  // namespace hc
