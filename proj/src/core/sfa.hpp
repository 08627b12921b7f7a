#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/fitness.hpp"
#include "core/keypoint.hpp"
#include "core/rng.hpp"

namespace fkp::sfa {

enum class SelectMode { maximize, minimize };

struct SfaParams {
  double gamma = 0.3;     // light absorption
  double beta_pop = 0.3;  // attractiveness factor
  double mu = 0.25;       // random motion, pixels
  int fireflies = 400;
  int generations = 20;
  double best_ratio = 0.35;
  std::uint64_t seed = 0;
  SelectMode select_mode = SelectMode::maximize;

  void validate() const;
  /// floor(best_ratio * fireflies), the number of elites kept each generation.
  int retained() const noexcept;
};

struct Firefly {
  int x = 0;
  int y = 0;
  double fitness = 0.0;

  friend bool operator==(const Firefly&, const Firefly&) = default;
};

struct Population {
  std::vector<Firefly> members;
  int generation = 0;
};

double distance(const Firefly& a, const Firefly& b) noexcept;

/// beta_pop * exp(-gamma * r^2)
double attractiveness(const SfaParams& params, double r) noexcept;

/// True when fitness a is strictly preferred over b under the mode.
bool strictly_better(SelectMode mode, double a, double b) noexcept;

/// Among members strictly better than member i, the one exerting the largest
/// attractiveness; ties go to the closer member, then the lower index.
/// nullopt means member i moves randomly.
std::optional<std::size_t> choose_target(const Population& pop, std::size_t i,
                                         const SfaParams& params);

/// One discrete move: floor(a + beta(r) (target - a) + mu e) per axis, e ~ U[-1, 1],
/// clamped to the image. Always consumes two draws from rng (x then y).
/// The returned firefly's fitness is not evaluated.
Firefly move(const Firefly& a, const std::optional<Firefly>& target, const SfaParams& params,
             Rng& rng, int width, int height);

Population initialize(const FitnessField& field, const SfaParams& params, Rng& rng);

/// Offspring by move, then the top retained() of parents + offspring survive
/// (stable on fitness, parents first); the rest are re-seeded uniformly.
Population step(const Population& pop, const FitnessField& field, const SfaParams& params,
                Rng& rng);

/// Best retained() members of a population, ordered by fitness under the mode.
std::vector<Firefly> best_members(const Population& pop, const SfaParams& params);

using GenerationObserver = std::function<void(const Population&)>;

/// Full search. Returns the final elites as keypoints (score = fitness, scale = 1).
/// The observer, if set, sees the initial population and every generation after it.
std::vector<KeyPoint> run(const FitnessField& field, const SfaParams& params,
                          const GenerationObserver& observer = {});

std::vector<KeyPoint> run(const Image& img, Band band, const SfaParams& params,
                          double falloff = kDefaultFalloff);

}  // namespace fkp::sfa
