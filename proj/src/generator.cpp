#include "s2gen/generator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "s2gen/shard.hpp"

namespace s2gen {

void quantize_to_f32(Matrix& m) {
    for (double& v : m.data) v = static_cast<double>(static_cast<float>(v));
}

SeriesPair generate_pair(int m, int n, const GenConfig& cfg, Rng& rng,
                         int* rejections) {
    if (m < 1 || m > cfg.m_max || n < 1 || n > cfg.n_max)
        throw std::invalid_argument("generate_pair: dims out of bounds");
    if (rejections) *rejections = 0;

    std::string last_reason = "no candidates drawn";
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        ExprSet exprs = sample_expr_set(m, n, cfg.expr, rng);

        InputSpec spec;
        spec.threshold_p = cfg.mixture_prob;
        if (rng.uniform() <= cfg.mixture_prob) {
            spec.source = sample_mixture_spec(cfg.sampler.k_max, rng);
        } else {
            spec.source = sample_arma_spec(cfg.sampler.p_max, cfg.sampler.q_max, rng,
                                           cfg.sampler.max_retries);
        }

        Matrix x_raw = generate_series(spec, m, cfg.series_length, rng);
        Matrix x = standardize(x_raw).x;
        quantize_to_f32(x);

        Matrix y(static_cast<std::size_t>(n), static_cast<std::size_t>(cfg.series_length));
        bool ok = true;
        double max_abs = 0.0;
        for (int i = 0; i < n && ok; ++i) {
            const EvalResult ev = evaluate(exprs.exprs[static_cast<std::size_t>(i)], x);
            for (std::size_t t = 0; t < ev.values.size(); ++t) {
                if (!ev.valid[t]) {
                    ok = false;
                    last_reason = "invalid point (domain violation or overflow)";
                    break;
                }
                const double v = ev.values[t];
                max_abs = std::max(max_abs, std::fabs(v));
                y.at(static_cast<std::size_t>(i), t) = v;
            }
        }
        if (ok && max_abs > cfg.value_cap) {
            ok = false;
            last_reason = "output magnitude above value cap";
        }
        if (!ok) {
            if (rejections) ++*rejections;
            continue;
        }

        SeriesPair pair;
        pair.m = m;
        pair.n = n;
        pair.x = std::move(x);
        pair.y = std::move(y);
        pair.source = spec.is_mixture() ? SeriesPair::Source::Mixture
                                        : SeriesPair::Source::Arma;
        pair.expr_texts.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            pair.expr_texts.push_back(serialize(exprs.exprs[static_cast<std::size_t>(i)],
                                                i + 1, cfg.expr.const_sig_digits));
        return pair;
    }
    throw GenerationFailureError(
        "generate_pair: all " + std::to_string(cfg.max_retries) +
            " candidates rejected (" + last_reason + ")",
        last_reason);
}

namespace {

std::vector<std::int64_t> cell_counts(const GenConfig& cfg) {
    const std::int64_t ncells =
        static_cast<std::int64_t>(cfg.m_max) * static_cast<std::int64_t>(cfg.n_max);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(ncells), cfg.pairs_per_cell);
    if (cfg.total_pairs > 0) {
        const std::int64_t base = cfg.total_pairs / ncells;
        const std::int64_t rem = cfg.total_pairs % ncells;
        for (std::int64_t i = 0; i < ncells; ++i)
            counts[static_cast<std::size_t>(i)] = base + (i < rem ? 1 : 0);
    }
    return counts;
}

constexpr int kMaxReseedRounds = 64;

}  // namespace

DatasetManifest generate_dataset(const GenConfig& cfg, int workers,
                                 const std::filesystem::path& out_dir) {
    if (workers < 1) throw std::invalid_argument("generate_dataset: workers must be >= 1");
    std::filesystem::create_directories(out_dir);

    const auto counts = cell_counts(cfg);
    const int ncells = cfg.m_max * cfg.n_max;
    std::vector<CellReport> reports(static_cast<std::size_t>(ncells));

    std::atomic<int> next_cell{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

    const auto run_cell = [&](int cell_index) {
        const int m = 1 + cell_index / cfg.n_max;
        const int n = 1 + cell_index % cfg.n_max;
        CellReport report;
        report.m = m;
        report.n = n;
        report.shard_file = "cell_M" + std::to_string(m) + "_N" + std::to_string(n) + ".s2sh";
        ShardWriter writer(out_dir / report.shard_file);
        const std::int64_t want = counts[static_cast<std::size_t>(cell_index)];
        for (std::int64_t draw = 0; draw < want; ++draw) {
            for (int round = 0;; ++round) {
                if (round > kMaxReseedRounds)
                    throw GenerationFailureError(
                        "generate_dataset: cell (" + std::to_string(m) + "," +
                            std::to_string(n) + ") draw " + std::to_string(draw) +
                            " failed after " + std::to_string(kMaxReseedRounds) + " reseeds",
                        "reseed budget exhausted");
                Rng rng(Rng::derive_stream_id(
                    cfg.seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(draw),
                               static_cast<std::uint64_t>(round)}));
                int rejected = 0;
                try {
                    SeriesPair pair = generate_pair(m, n, cfg, rng, &rejected);
                    pair.seed_path = SeedPath{cfg.seed, m, n, draw, round};
                    report.rejections += rejected;
                    writer.append(pair);
                    break;
                } catch (const GenerationFailureError&) {
                    report.rejections += rejected;
                    ++report.reseeds;
                }
            }
        }
        report.pairs = writer.count();
        reports[static_cast<std::size_t>(cell_index)] = std::move(report);
    };

    const auto worker_loop = [&](int widx) {
        try {
            for (;;) {
                const int cell = next_cell.fetch_add(1);
                if (cell >= ncells) return;
                run_cell(cell);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(widx)] = std::current_exception();
        }
    };

    if (workers == 1) {
        worker_loop(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    DatasetManifest manifest;
    manifest.master_seed = cfg.seed;
    manifest.cells = std::move(reports);
    for (const auto& r : manifest.cells) {
        manifest.total_pairs += r.pairs;
        manifest.total_rejections += r.rejections;
        manifest.total_reseeds += r.reseeds;
    }
    return manifest;
}

std::vector<double> concat_channels(const SeriesPair& pair) {
    std::vector<double> out;
    out.reserve((pair.x.rows + pair.y.rows) * pair.x.cols);
    out.insert(out.end(), pair.x.data.begin(), pair.x.data.end());
    out.insert(out.end(), pair.y.data.begin(), pair.y.data.end());
    return out;
}

PatchSet patchify(const std::vector<double>& concatenated, int series_len,
                  int patch_len, int max_patches) {
    if (patch_len < 1 || series_len < 1 || series_len % patch_len != 0)
        throw std::invalid_argument("patchify: series length must be divisible by patch length");
    if (concatenated.size() % static_cast<std::size_t>(series_len) != 0)
        throw std::invalid_argument("patchify: input is not whole channels");
    const std::size_t real =
        concatenated.size() / static_cast<std::size_t>(patch_len);
    if (real > static_cast<std::size_t>(max_patches))
        throw std::invalid_argument("patchify: more patches than max_patches");

    PatchSet ps;
    ps.patch_len = patch_len;
    ps.patches.reserve(static_cast<std::size_t>(max_patches));
    for (std::size_t p = 0; p < real; ++p) {
        const auto* begin = concatenated.data() + p * static_cast<std::size_t>(patch_len);
        ps.patches.emplace_back(begin, begin + patch_len);
    }
    ps.patches.resize(static_cast<std::size_t>(max_patches),
                      std::vector<double>(static_cast<std::size_t>(patch_len), 0.0));
    ps.pad_mask.assign(static_cast<std::size_t>(max_patches), false);
    for (std::size_t p = real; p < static_cast<std::size_t>(max_patches); ++p)
        ps.pad_mask[p] = true;
    ps.mtm_mask.assign(static_cast<std::size_t>(max_patches), false);
    return ps;
}

PatchSet apply_mtm_mask(const PatchSet& ps, double ratio, Rng& rng) {
    if (ratio < 0.0 || ratio > 1.0)
        throw std::invalid_argument("apply_mtm_mask: ratio must be in [0, 1]");
    PatchSet out = ps;
    out.mtm_mask.assign(out.patches.size(), false);
    out.masked = out.patches;

    std::vector<std::size_t> real_indices;
    for (std::size_t p = 0; p < ps.patches.size(); ++p)
        if (!ps.pad_mask[p]) real_indices.push_back(p);
    const std::size_t k =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(real_indices.size())));
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.uniform_int(real_indices.size() - i));
        std::swap(real_indices[i], real_indices[j]);
        const std::size_t chosen = real_indices[i];
        out.mtm_mask[chosen] = true;
        std::fill(out.masked[chosen].begin(), out.masked[chosen].end(), 0.0);
    }
    return out;
}

}  // namespace s2gen
