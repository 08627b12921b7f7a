#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "handles.hpp"
#include "json.hpp"

namespace fkp::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

struct Scene {
  ImagePtr image;
  ImagePtr mask;
};

Scene load_scene(const RunConfig& cfg) {
  Scene scene;
  fkp_image* image = nullptr;
  fkp_image* mask = nullptr;
  if (cfg.use_fixture) {
    check(fkp_fixture_create(&cfg.fixture, &image, &mask), "fixture");
    scene.image.reset(image);
    scene.mask.reset(mask);
  } else {
    check(fkp_image_load(cfg.input.c_str(), &image), cfg.input.c_str());
    scene.image.reset(image);
    check(fkp_image_band_mask(image, cfg.band, &mask), "band mask");
    scene.mask.reset(mask);
  }
  return scene;
}

struct Detection {
  KeypointsPtr keypoints;
  double elapsed_ms = 0.0;
};

Detection detect(const RunConfig& cfg, const fkp_image* image, fkp_detector detector,
                 std::uint64_t seed) {
  fkp_keypoints* kps = nullptr;
  const auto start = std::chrono::steady_clock::now();
  switch (detector) {
    case FKP_DETECTOR_SFA: {
      fkp_sfa_params params = cfg.sfa;
      params.seed = seed;
      check(fkp_detect_sfa(image, &params, &kps), "sfa");
      break;
    }
    case FKP_DETECTOR_SURF:
      check(fkp_detect_surf(image, &cfg.surf, &kps), "surf");
      break;
    case FKP_DETECTOR_SIFT:
      check(fkp_detect_sift(image, &cfg.sift, &kps), "sift");
      break;
  }
  const std::chrono::duration<double, std::milli> elapsed =
      std::chrono::steady_clock::now() - start;
  // The clock can read zero for trivially fast runs; reports require positive timing.
  return {KeypointsPtr(kps), std::max(elapsed.count(), 1e-6)};
}

ReportPtr make_report(const RunConfig& cfg, const Scene& scene, const Detection& det,
                      fkp_detector detector, std::uint64_t seed) {
  fkp_report* report = nullptr;
  const auto params = parameters_json(cfg, detector, seed);
  check(fkp_report_compute(scene.mask.get(), det.keypoints.get(), det.elapsed_ms, detector,
                           params.c_str(), &report),
        "report");
  return ReportPtr(report);
}

int run_detect(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg);
  const Detection det = detect(cfg, scene.image.get(), cfg.detector, cfg.seed);
  const ReportPtr report = make_report(cfg, scene, det, cfg.detector, cfg.seed);

  char* json = nullptr;
  check(fkp_report_to_json(report.get(), &json), "report");
  const StringPtr json_text(json);
  if (cfg.out_report.empty()) {
    out << json_text.get();
  } else {
    write_text(cfg.out_report, json_text.get());
  }

  if (!cfg.out_keypoints.empty()) {
    char* csv = nullptr;
    check(fkp_keypoints_to_csv(det.keypoints.get(), &csv), "keypoints");
    const StringPtr csv_text(csv);
    write_text(cfg.out_keypoints, csv_text.get());
  }
  if (!cfg.out_image.empty()) {
    fkp_image* annotated = nullptr;
    check(fkp_annotate(scene.image.get(), det.keypoints.get(), &annotated), "annotate");
    const ImagePtr owned(annotated);
    if (fkp_image_save(annotated, cfg.out_image.c_str()) != FKP_OK) {
      throw IoError(fkp_last_error());
    }
  }
  if (!cfg.out_mask.empty() && fkp_image_save(scene.mask.get(), cfg.out_mask.c_str()) != FKP_OK) {
    throw IoError(fkp_last_error());
  }
  return 0;
}

int resolve_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("FKP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Cell {
  fkp_detector detector;
  std::uint64_t seed;
};

std::string format_row(const Cell& cell, const fkp_report_metrics& m) {
  char line[256];
  std::snprintf(line, sizeof line, "%s,%llu,%zu,%.3f,%.6f,%.6f,%.6f\n",
                detector_name(cell.detector).c_str(),
                static_cast<unsigned long long>(cell.seed), m.keypoint_count, m.elapsed_ms,
                m.precision, m.recall, m.spread);
  return line;
}

constexpr const char* kFixtureNames[] = {"disc", "checkerboard", "blob-grid", "step-edge",
                                         "constant"};

constexpr const char* kCsvHeader = "detector,seed,keypoints,elapsed_ms,precision,recall,spread\n";

int run_bench(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg);
  std::vector<Cell> cells;
  for (int i = 0; i < cfg.seeds; ++i) {
    for (const auto d : cfg.detectors) cells.push_back({d, cfg.seed + static_cast<std::uint64_t>(i)});
  }

  std::vector<std::string> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const Detection det = detect(cfg, scene.image.get(), cells[i].detector, cells[i].seed);
        const ReportPtr report = make_report(cfg, scene, det, cells[i].detector, cells[i].seed);
        fkp_report_metrics m{};
        check(fkp_report_metrics_get(report.get(), &m), "report");
        rows[i] = format_row(cells[i], m);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::min<int>(resolve_threads(cfg), static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  std::string body;
  for (const auto& r : rows) body += r;
  out << kCsvHeader << body;
  if (!cfg.out_csv.empty()) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(cfg.out_csv, ec) ||
                       std::filesystem::file_size(cfg.out_csv, ec) == 0;
    std::ofstream file(cfg.out_csv, std::ios::binary | std::ios::app);
    if (!file) throw IoError("cannot open " + cfg.out_csv + " for appending");
    if (fresh) file << kCsvHeader;
    file << body;
    if (!file) throw IoError("write failed for " + cfg.out_csv);
  }
  return 0;
}

int run_fixture(const RunConfig& cfg, std::ostream& out) {
  const Scene scene = load_scene(cfg);
  if (fkp_image_save(scene.image.get(), cfg.out_image.c_str()) != FKP_OK) {
    throw IoError(fkp_last_error());
  }
  if (!cfg.out_mask.empty() && fkp_image_save(scene.mask.get(), cfg.out_mask.c_str()) != FKP_OK) {
    throw IoError(fkp_last_error());
  }
  out << "wrote " << cfg.out_image << "\n";
  return 0;
}

}  // namespace

std::string parameters_json(const RunConfig& cfg, fkp_detector detector, std::uint64_t seed) {
  nlohmann::ordered_json j;
  if (cfg.use_fixture) {
    j["fixture"] = nlohmann::ordered_json{
        {"kind", kFixtureNames[cfg.fixture.kind]},
        {"width", cfg.fixture.width},
        {"height", cfg.fixture.height}};
  } else {
    j["input"] = cfg.input;
  }
  j["band"] = {cfg.band.low, cfg.band.high};
  switch (detector) {
    case FKP_DETECTOR_SFA:
      j["fireflies"] = cfg.sfa.fireflies;
      j["generations"] = cfg.sfa.generations;
      j["beta_pop"] = cfg.sfa.beta_pop;
      j["gamma"] = cfg.sfa.gamma;
      j["mu"] = cfg.sfa.mu;
      j["best_ratio"] = cfg.sfa.best_ratio;
      j["falloff"] = cfg.sfa.falloff;
      j["select"] = cfg.sfa.minimize ? "min" : "max";
      j["seed"] = seed;
      break;
    case FKP_DETECTOR_SURF: {
      std::vector<int> sizes(cfg.surf.sizes, cfg.surf.sizes + cfg.surf.size_count);
      j["sizes"] = sizes;
      j["hessian_weight"] = cfg.surf.hessian_weight;
      if (cfg.surf.use_absolute_threshold) {
        j["threshold"] = cfg.surf.absolute_threshold;
      } else {
        j["relative_threshold"] = cfg.surf.relative_threshold;
      }
      break;
    }
    case FKP_DETECTOR_SIFT:
      j["base_sigma"] = cfg.sift.base_sigma;
      j["scales_per_octave"] = cfg.sift.scales_per_octave;
      j["octaves"] = cfg.sift.octaves;
      j["contrast_threshold"] = cfg.sift.contrast_threshold;
      j["edge_ratio"] = cfg.sift.edge_ratio;
      break;
  }
  return j.dump();
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::detect: return run_detect(cfg, out);
      case Command::bench: return run_bench(cfg, out);
      case Command::fixture: return run_fixture(cfg, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    std::optional<std::string> text;
    if (const auto path = config_path(args)) {
      std::ifstream in(*path, std::ios::binary);
      if (!in) throw ConfigError("--config", "--config: cannot read " + *path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    cfg = parse_config(args, text);
  } catch (const HelpRequested& help) {
    out << help.what();
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  }
  return run_command(cfg, out, err);
}

}  // namespace fkp::cli
