#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lmms/vecmath.hpp"

namespace lmms::test {

std::string fixture(const std::string& name);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  Vector gaussian(std::size_t dim);
  /// Gaussian vector, rejecting near-zero draws.
  Vector nonzero(std::size_t dim);
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& engine() noexcept { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Calls the CLI in-process; throws with the captured stderr on a non-zero exit.
std::string cli(const std::vector<std::string>& args);
int cli_status(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr);

struct FixtureInputs {
  std::string inventory, train_xml, train_gold, eval_xml, eval_gold;
  std::string train_embeddings, eval_embeddings, gloss_embeddings, statics;
};

/// Synthetic embeddings for the toy corpora (contextual dim 8, static dim 4).
FixtureInputs write_fixture_inputs(const TempDir& dir, std::uint64_t seed = 7);

/// Runs every pipeline stage under --deterministic and returns the artifact paths.
std::vector<std::string> run_fixture_pipeline(const FixtureInputs& in, const TempDir& out);

std::string read_file(const std::string& path);

}  // namespace lmms::test

#include "lmms/inventory.hpp"
#include "lmms/sense_set.hpp"

namespace lmms::test {

/// Unit vector normalized in long double, redrawn until float rounding keeps
/// its norm within the library's unit tolerance (so the index stores it as is).
Vector unit_vector(Gen& gen, std::size_t dim);

/// One synset per sense, `senses_per_lemma` senses per lemma "w<j>", random unit
/// vectors; every 50th sense duplicates the previous vector to force ties.
struct SyntheticWorld {
  Inventory inventory;
  SenseVectorSet set;
  std::vector<std::string> lemmas;
};
SyntheticWorld synthetic_world(std::uint64_t seed, std::size_t senses, std::size_t dim,
                               std::size_t senses_per_lemma);

/// Brute-force cosine ranking in long double: score descending, then key ascending.
/// Restricted to `only` when non-empty.
std::vector<std::string> oracle_rank(const SenseVectorSet& set, const Vector& query, std::size_t k,
                                     const std::vector<std::string>& only = {});

}  // namespace lmms::test
