#pragma once
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace jointcq::util {

std::string trim(std::string_view s);
std::string lower_ascii(std::string_view s);
bool starts_with_ci(std::string_view text, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

// Splits on '\n', tolerating trailing '\r' on each line.
std::vector<std::string> split_lines(std::string_view text);

// Number of Unicode code points; counts bytes that are not UTF-8 continuations.
std::int64_t utf8_length(std::string_view s);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::string& path);
// Write-temp-then-rename so concurrent writers of the same key never expose
// partial content.
void atomic_write_file(const std::string& path, std::string_view content);

// splitmix64 step, used to derive independent seeds from (base, salt).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);
std::uint64_t hash_seed(std::uint64_t base, std::string_view salt);

// Deterministic draw in [0, n): mt19937_64 is fully specified by the
// standard, unlike uniform_int_distribution, so results are portable.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n);

// Partial Fisher-Yates: k distinct indices from [0, n), order randomized.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::mt19937_64& rng);

// Runs fn(0..n-1) on up to max_parallel worker threads; exceptions are
// rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, std::size_t max_parallel, const std::function<void(std::size_t)>& fn);

} // namespace jointcq::util
