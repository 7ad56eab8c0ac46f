#include "hab/common.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace hab {

ContainerError::ContainerError(const std::string& message, std::size_t offset)
    : InputError(message + " (byte offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

StageError::StageError(std::string stage, const std::string& message)
    : std::runtime_error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    SplitMix64 rng(base ^ (0x9E3779B97F4A7C15ULL * (salt + 1)));
    return rng.next();
}

std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                      SplitMix64& rng) {
    k = std::min(k, n);
    std::vector<std::uint32_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
    // Partial Fisher-Yates: the first k slots end up holding the sample.
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace {
constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;
}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = kFnvOffset;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text) {
    return fnv1a64(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file for hashing: " + path);
    std::uint64_t h = kFnvOffset;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<std::uint8_t>(buf[i]);
            h *= kFnvPrime;
        }
    }
    char hex[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) hex[i] = digits[(h >> (60 - 4 * i)) & 0xF];
    hex[16] = '\0';
    return std::string("fnv1a:") + hex;
}

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("HAB_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    unsigned long cap = std::strtoul(env, nullptr, 10);
    if (cap == 0) return hw;
    return static_cast<unsigned>(std::min<unsigned long>(cap, hw));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(thread_budget(), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hab
