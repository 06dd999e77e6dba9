#ifndef S2GEN_GENERATOR_HPP
#define S2GEN_GENERATOR_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "s2gen/common.hpp"
#include "s2gen/expr.hpp"
#include "s2gen/rng.hpp"
#include "s2gen/sampler.hpp"

namespace s2gen {

struct GenConfig {
    int series_length = 256;  // L
    int m_max = 6;
    int n_max = 12;
    double mixture_prob = 0.5;  // P: mixture source when the draw is <= P
    double value_cap = 1e4;
    int max_retries = 100;
    ExprSamplerParams expr;
    SamplerParams sampler;
    std::uint64_t seed = 0;
    std::int64_t pairs_per_cell = 100;
    std::int64_t total_pairs = 0;  // when > 0, apportioned across cells instead
};

struct SeedPath {
    std::uint64_t master = 0;
    int m = 0;
    int n = 0;
    std::int64_t draw = 0;
    int round = 0;  // increments when a draw's stream had to be replaced
};

struct SeriesPair {
    int m = 0;
    int n = 0;
    Matrix x;  // standardized inputs, quantized to the f32 grid
    Matrix y;  // outputs evaluated from x, stored at double precision
    std::vector<std::string> expr_texts;
    enum class Source : std::uint8_t { Mixture = 0, Arma = 1 } source = Source::Mixture;
    SeedPath seed_path;
};

/// Sample (expressions, inputs), evaluate, and reject candidates containing
/// any invalid point or |y| above value_cap; retries up to cfg.max_retries.
/// When `rejections` is given it receives the number of discarded candidates.
SeriesPair generate_pair(int m, int n, const GenConfig& cfg, Rng& rng,
                         int* rejections = nullptr);

struct CellReport {
    int m = 0;
    int n = 0;
    std::int64_t pairs = 0;
    std::int64_t rejections = 0;   // candidates discarded inside generate_pair
    std::int64_t reseeds = 0;      // draws whose stream was replaced entirely
    std::string shard_file;
};

struct DatasetManifest {
    std::uint64_t master_seed = 0;
    std::vector<CellReport> cells;
    std::int64_t total_pairs = 0;
    std::int64_t total_rejections = 0;
    std::int64_t total_reseeds = 0;
};

/// Traverses every (m, n) cell of [1, m_max] x [1, n_max], writes one shard
/// per cell plus manifest.json. Output bytes depend only on (cfg, seed):
/// every (cell, draw) owns the stream derive_stream_id(seed, {m, n, draw,
/// round}), so any worker count produces identical files.
DatasetManifest generate_dataset(const GenConfig& cfg, int workers,
                                 const std::filesystem::path& out_dir);

/// Channels concatenated in order: x rows, then y rows.
std::vector<double> concat_channels(const SeriesPair& pair);

struct PatchSet {
    int patch_len = 16;
    std::vector<std::vector<double>> patches;  // originals (loss targets)
    std::vector<bool> pad_mask;
    std::vector<bool> mtm_mask;
    std::vector<std::vector<double>> masked;   // zeroed copies, set by apply_mtm_mask

    std::size_t count() const { return patches.size(); }
    std::size_t real_count() const {
        std::size_t c = 0;
        for (bool pad : pad_mask)
            if (!pad) ++c;
        return c;
    }
};

/// Split the concatenated series into non-overlapping patches and zero-pad
/// up to max_patches. series_len must be divisible by patch_len.
PatchSet patchify(const std::vector<double>& concatenated, int series_len,
                  int patch_len = 16, int max_patches = 288);

/// Uniformly masks floor(ratio * real patch count) non-padded patches; the
/// masked copies are zeroed, originals kept as reconstruction targets.
PatchSet apply_mtm_mask(const PatchSet& ps, double ratio, Rng& rng);

/// Round every value to the nearest float32 (shards store f32; generation
/// evaluates on the quantized grid so a re-read shard reproduces y exactly
/// up to the f32 rounding of y itself).
void quantize_to_f32(Matrix& m);

}  // namespace s2gen

#endif
