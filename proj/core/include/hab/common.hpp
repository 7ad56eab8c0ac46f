#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hab {

/// Placeholder consumed as an ordinary numeric value by tree splits.
inline constexpr double kSentinel = -999.0;

/// Bad user input: malformed files, out-of-range values, invalid config.
/// The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed binary container; carries the byte offset of the defect.
class ContainerError : public InputError {
public:
    ContainerError(const std::string& message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Failure inside a pipeline stage; carries the stage name. CLI exit code 3.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// ---------------------------------------------------------------------------
// Deterministic randomness. All sampling in this library goes through
// SplitMix64 with explicit bounded draws and Fisher-Yates shuffles, so results
// are identical across standard libraries and platforms.
// ---------------------------------------------------------------------------

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). Lemire multiply-shift reduction; n must be > 0.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Decorrelated stream seed for a (base, salt) pair.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

/// k distinct indices from [0, n), ascending.
std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                      SplitMix64& rng);

// ---------------------------------------------------------------------------
// Hashing, number formatting, parallelism.
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64(std::string_view text);
/// FNV-1a of a file's bytes rendered as "fnv1a:<16 hex digits>".
std::string hash_file(const std::string& path);

/// Shortest decimal form that round-trips exactly (via std::to_chars).
std::string format_double(double value);

/// Worker cap: HAB_THREADS env var, 0 or unset = hardware concurrency.
unsigned thread_budget();

/// Runs body(begin, end) over contiguous chunks of [0, n), possibly on
/// multiple threads. Chunk layout depends only on n and the worker count the
/// budget allows, never on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// ---------------------------------------------------------------------------
// Row-major numeric matrix shared by featurization and the tree models.
// ---------------------------------------------------------------------------

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * cols, cols};
    }
};

}  // namespace hab
