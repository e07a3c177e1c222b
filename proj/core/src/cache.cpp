#include "hclab/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hc {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

EigenCache& EigenCache::instance() {
    static EigenCache cache;
    return cache;
}

void EigenCache::set_directory(const std::string& dir) {
    std::lock_guard lock(mutex_);
    directory_ = dir;
}

void EigenCache::set_enabled(bool on) { enabled_ = on; }

std::string EigenCache::directory() const {
    if (!directory_.empty()) return directory_;
    if (const char* env = std::getenv("HCLAB_CACHE_DIR")) return env;
    return ".hclab-cache";
}

std::optional<EigenDecomposition> EigenCache::load(const std::string& key) {
    if (!enabled_) return std::nullopt;
    {
        std::lock_guard lock(mutex_);
        auto it = memory_.find(key);
        if (it != memory_.end()) return it->second;
    }
    const std::filesystem::path path = std::filesystem::path(directory()) / (key + ".eig");
    std::ifstream is(path);
    if (!is) return std::nullopt;
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "hclab-eigcache" || version != 1) return std::nullopt;
    std::string file_key;
    double h = 0.0;
    int count = 0, block = 0;
    is >> file_key >> h >> count >> block;
    if (file_key != key) return std::nullopt;
    EigenDecomposition dec;
    dec.count_requested = dec.count_converged = count;
    dec.values.resize(count);
    dec.moments.resize(count, block);
    for (int i = 0; i < count; ++i) is >> dec.values[i];
    for (int i = 0; i < count; ++i)
        for (int c = 0; c < block; ++c) is >> dec.moments(i, c);
    if (!is) return std::nullopt;
    return dec;
}

void EigenCache::store(const std::string& key, const EigenDecomposition& dec, double h) {
    if (!enabled_) return;
    std::lock_guard lock(mutex_);
    memory_[key] = dec;

    std::error_code ec;
    std::filesystem::create_directories(directory(), ec);
    const std::filesystem::path path = std::filesystem::path(directory()) / (key + ".eig");
    const std::filesystem::path tmp = path.string() + ".partial";
    {
        std::ofstream os(tmp);
        if (!os) return;  // cache is best effort
        os.precision(17);
        os << "hclab-eigcache 1\n";
        os << key << " " << h << " " << dec.values.size() << " " << dec.moments.cols() << "\n";
        for (int i = 0; i < dec.values.size(); ++i) os << dec.values[i] << "\n";
        for (int i = 0; i < dec.moments.rows(); ++i) {
            for (int c = 0; c < dec.moments.cols(); ++c) os << dec.moments(i, c) << " ";
            os << "\n";
        }
    }
    std::filesystem::rename(tmp, path, ec);
}

void EigenCache::clear_memory() {
    std::lock_guard lock(mutex_);
    memory_.clear();
}

}  // namespace hc
