#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nnrenyi/calibration.hpp"

namespace nnrenyi {

// Gamma cache: UTF-8 text, one JSON object per line,
//   {"d":3,"p":0.9,"S":[1,2,3],"n_cal":200000,"reps":10,"seed":1,
//    "mean":2.23,"std_error":0.0004,"tool_version":"0.3.0"}
// Doubles are written in shortest round-trip form, so a record read back
// compares equal to the estimate that produced it.

std::string gamma_record_to_json(const GammaEstimate& est);

// `line` is only used in error messages.
GammaEstimate gamma_record_from_json(const std::string& text, std::size_t line = 0);

// Throws DataError("invalid gamma record ...") naming the first bad line.
// A missing file is an empty cache.
std::vector<GammaEstimate> load_gamma_cache(const std::filesystem::path& path);

// Exact-key lookup (d, p, S, n_cal, reps); on a miss, estimates with `seed`
// and appends the record. The file is held under an exclusive advisory lock
// for the whole read-compute-append sequence.
GammaEstimate gamma_cache_get_or_compute(const GammaKey& key, const std::filesystem::path& path,
                                         std::uint64_t seed, bool* hit = nullptr);

}  // namespace nnrenyi
