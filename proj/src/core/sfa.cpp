#include "core/sfa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fkp::sfa {

void SfaParams::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::invalid_argument, what); };
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be finite and >= 0");
  if (!(beta_pop >= 0.0) || !std::isfinite(beta_pop)) fail("beta_pop must be finite and >= 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) fail("mu must be finite and >= 0");
  if (fireflies <= 0) fail("fireflies must be > 0");
  if (generations < 0) fail("generations must be >= 0");
  if (!(best_ratio > 0.0 && best_ratio <= 1.0)) fail("best_ratio must lie in (0, 1]");
  if (retained() < 1) fail("best_ratio * fireflies must retain at least one firefly");
}

int SfaParams::retained() const noexcept {
  // The epsilon absorbs representation error, e.g. 0.35 * 400 must give 140.
  return static_cast<int>(std::floor(best_ratio * fireflies + 1e-9));
}

double distance(const Firefly& a, const Firefly& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double attractiveness(const SfaParams& params, double r) noexcept {
  return params.beta_pop * std::exp(-params.gamma * r * r);
}

bool strictly_better(SelectMode mode, double a, double b) noexcept {
  return mode == SelectMode::maximize ? a > b : a < b;
}

std::optional<std::size_t> choose_target(const Population& pop, std::size_t i,
                                         const SfaParams& params) {
  const auto& members = pop.members;
  const Firefly& self = members.at(i);
  std::optional<std::size_t> best;
  double best_beta = 0.0;
  double best_r = 0.0;
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (j == i || !strictly_better(params.select_mode, members[j].fitness, self.fitness)) {
      continue;
    }
    const double r = distance(self, members[j]);
    const double beta = attractiveness(params, r);
    if (!best || beta > best_beta || (beta == best_beta && r < best_r)) {
      best = j;
      best_beta = beta;
      best_r = r;
    }
  }
  return best;
}

Firefly move(const Firefly& a, const std::optional<Firefly>& target, const SfaParams& params,
             Rng& rng, int width, int height) {
  const double ex = rng.uniform(-1.0, 1.0);
  const double ey = rng.uniform(-1.0, 1.0);
  double nx = a.x + params.mu * ex;
  double ny = a.y + params.mu * ey;
  if (target) {
    const double beta = attractiveness(params, distance(a, *target));
    nx += beta * (target->x - a.x);
    ny += beta * (target->y - a.y);
  }
  Firefly out;
  out.x = std::clamp(static_cast<int>(std::floor(nx)), 0, width - 1);
  out.y = std::clamp(static_cast<int>(std::floor(ny)), 0, height - 1);
  return out;
}

namespace {

Firefly random_firefly(const FitnessField& field, Rng& rng) {
  Firefly f;
  f.x = static_cast<int>(rng.below(static_cast<std::uint32_t>(field.width())));
  f.y = static_cast<int>(rng.below(static_cast<std::uint32_t>(field.height())));
  f.fitness = field(f.x, f.y);
  return f;
}

// Indices of `members` ordered best-first, stable on index.
std::vector<std::size_t> ranking(const std::vector<Firefly>& members, SelectMode mode) {
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return strictly_better(mode, members[a].fitness, members[b].fitness);
  });
  return order;
}

}  // namespace

Population initialize(const FitnessField& field, const SfaParams& params, Rng& rng) {
  Population pop;
  pop.members.reserve(static_cast<std::size_t>(params.fireflies));
  for (int i = 0; i < params.fireflies; ++i) {
    pop.members.push_back(random_firefly(field, rng));
  }
  return pop;
}

Population step(const Population& pop, const FitnessField& field, const SfaParams& params,
                Rng& rng) {
  const std::size_t n = pop.members.size();

  std::vector<Firefly> pool = pop.members;
  pool.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto target = choose_target(pop, i, params);
    Firefly child = move(pop.members[i],
                         target ? std::optional<Firefly>(pop.members[*target]) : std::nullopt,
                         params, rng, field.width(), field.height());
    child.fitness = field(child.x, child.y);
    pool.push_back(child);
  }

  const auto order = ranking(pool, params.select_mode);
  const auto keep = std::min(static_cast<std::size_t>(params.retained()), n);

  Population next;
  next.generation = pop.generation + 1;
  next.members.reserve(n);
  for (std::size_t k = 0; k < keep; ++k) {
    next.members.push_back(pool[order[k]]);
  }
  while (next.members.size() < n) {
    next.members.push_back(random_firefly(field, rng));
  }
  return next;
}

std::vector<Firefly> best_members(const Population& pop, const SfaParams& params) {
  const auto order = ranking(pop.members, params.select_mode);
  const auto keep = std::min(static_cast<std::size_t>(params.retained()), order.size());
  std::vector<Firefly> out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    out.push_back(pop.members[order[k]]);
  }
  return out;
}

std::vector<KeyPoint> run(const FitnessField& field, const SfaParams& params,
                          const GenerationObserver& observer) {
  params.validate();
  Rng rng(params.seed);
  Population pop = initialize(field, params, rng);
  if (observer) observer(pop);
  for (int t = 0; t < params.generations; ++t) {
    pop = step(pop, field, params, rng);
    if (observer) observer(pop);
  }

  std::vector<KeyPoint> out;
  for (const Firefly& f : best_members(pop, params)) {
    KeyPoint kp;
    kp.x = f.x;
    kp.y = f.y;
    kp.scale = 1.0;
    kp.score = f.fitness;
    kp.detector = Detector::sfa;
    out.push_back(kp);
  }
  return out;
}

std::vector<KeyPoint> run(const Image& img, Band band, const SfaParams& params,
                          double falloff) {
  if (img.empty()) {
    throw Error(ErrorCode::invalid_argument, "empty image");
  }
  return run(FitnessField(img, band, falloff), params);
}

}  // namespace fkp::sfa
