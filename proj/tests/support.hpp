#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/types.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return SHORTCHECK_FIXTURES_DIR; }
inline fs::path decoder_path() { return SHORTCHECK_DECODER_PATH; }
inline fs::path beirut_video() { return fixtures_dir() / "beirut.mp4"; }
inline fs::path recorded_dir() { return fixtures_dir() / "recorded"; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

// Default config plus the decoder built alongside the tests and the sample lexicon.
shortcheck::PipelineConfig test_config();

// Writes a clip with the in-repo decoder; `extra` goes straight to `synth`.
fs::path synth_clip(const fs::path& out, double duration_s, const std::vector<std::string>& extra = {});

void write_file(const fs::path& path, const std::string& bytes);

// Hand-rolled generators for property tests. Everything is drawn from one
// seeded engine so a failing case can be replayed from its seed.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(uniform_int(0, static_cast<int>(items.size()) - 1))];
    }

    shortcheck::SemanticClass semantic_class();
    shortcheck::Stance stance();
    std::string text(int max_len = 24);
    shortcheck::BuzzwordHit buzzword_hit();
    shortcheck::ClaimCheckResult claim();
    shortcheck::ModalitySignals signals();
    shortcheck::PipelineConfig config();
    shortcheck::Label label() { return coin() ? shortcheck::Label::Checkworthy : shortcheck::Label::Not_Checkworthy; }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace testing
