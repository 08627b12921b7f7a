#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace fkp::cli {

namespace {

enum class Type { integer, unsigned64, real, text };

enum Scope : unsigned { kDetect = 1, kBench = 2, kFixture = 4, kAll = 7, kRun = 3 };

const char* type_label(Type t) {
  switch (t) {
    case Type::integer: return "INT";
    case Type::unsigned64: return "UINT";
    case Type::real: return "NUM";
    case Type::text: return "TEXT";
  }
  return "TEXT";
}

struct OptionSpec {
  const char* name;
  Type type;
  unsigned scope;
  const char* help;
};

constexpr OptionSpec kOptions[] = {
    {"config", Type::text, kAll, "JSON config file; keys are flag names without dashes"},
    {"detector", Type::text, kDetect, "sfa | surf | sift"},
    {"detectors", Type::text, kBench, "comma-separated detectors to sweep"},
    {"input", Type::text, kRun, "binary PNM (P5/P6) input image"},
    {"fixture", Type::text, kAll, "disc | checkerboard | blob-grid | step-edge | constant"},
    {"width", Type::integer, kAll, "fixture width"},
    {"height", Type::integer, kAll, "fixture height"},
    {"fg", Type::integer, kAll, "fixture foreground level"},
    {"bg", Type::integer, kAll, "fixture background level"},
    {"center-x", Type::real, kAll, "disc centre x (default: image centre)"},
    {"center-y", Type::real, kAll, "disc centre y (default: image centre)"},
    {"radius", Type::real, kAll, "disc radius"},
    {"square", Type::integer, kAll, "checkerboard cell size"},
    {"rows", Type::integer, kAll, "blob-grid rows"},
    {"cols", Type::integer, kAll, "blob-grid columns"},
    {"sigma", Type::real, kAll, "blob-grid blob sigma"},
    {"edge-x", Type::integer, kAll, "step-edge column (default: image centre)"},
    {"band-low", Type::real, kAll, "target luminance band, lower end"},
    {"band-high", Type::real, kAll, "target luminance band, upper end"},
    {"seed", Type::unsigned64, kRun, "RNG seed (bench: first seed)"},
    {"seeds", Type::integer, kBench, "number of consecutive seeds to sweep"},
    {"threads", Type::integer, kBench, "worker threads (default: FKP_THREADS or all cores)"},
    {"fireflies", Type::integer, kRun, "SFA population size"},
    {"generations", Type::integer, kRun, "SFA iteration count"},
    {"beta-pop", Type::real, kRun, "SFA attractiveness factor"},
    {"gamma", Type::real, kRun, "SFA light absorption coefficient"},
    {"mu", Type::real, kRun, "SFA random motion factor"},
    {"best-ratio", Type::real, kRun, "SFA fraction of elites kept, in (0, 1]"},
    {"falloff", Type::real, kRun, "SFA fitness falloff outside the band (0 = hard step)"},
    {"select", Type::text, kRun, "SFA selection: max | min"},
    {"surf-sizes", Type::text, kRun, "SURF filter sizes, e.g. 9,15,21,27"},
    {"hessian-weight", Type::real, kRun, "SURF Dxy weight in the determinant"},
    {"threshold", Type::real, kRun, "SURF absolute response threshold"},
    {"relative-threshold", Type::real, kRun, "SURF threshold as a fraction of the peak"},
    {"base-sigma", Type::real, kRun, "SIFT base blur"},
    {"scales-per-octave", Type::integer, kRun, "SIFT Gaussian grids per octave"},
    {"octaves", Type::integer, kRun, "SIFT octaves (0 = from image size)"},
    {"contrast-threshold", Type::real, kRun, "SIFT DoG contrast threshold"},
    {"edge-ratio", Type::real, kRun, "SIFT principal curvature ratio"},
    {"out-image", Type::text, kAll, "annotated (detect) or fixture image path"},
    {"out-report", Type::text, kDetect, "JSON report path (default: stdout)"},
    {"out-keypoints", Type::text, kDetect, "keypoint CSV path"},
    {"out-mask", Type::text, kAll, "ground-truth mask path"},
    {"out-csv", Type::text, kBench, "CSV file the sweep rows are appended to"},
};

unsigned scope_of(Command c) {
  switch (c) {
    case Command::detect: return kDetect;
    case Command::bench: return kBench;
    case Command::fixture: return kFixture;
  }
  return 0;
}

const OptionSpec* find_option(const std::string& name) {
  for (const auto& spec : kOptions) {
    if (name == spec.name) return &spec;
  }
  return nullptr;
}

std::string flag(const std::string& name) { return "--" + name; }

class Values {
 public:
  explicit Values(std::map<std::string, std::string> raw) : raw_(std::move(raw)) {}

  bool has(const std::string& name) const { return raw_.count(name) != 0; }

  std::string text(const std::string& name, const std::string& fallback) const {
    const auto it = raw_.find(name);
    return it == raw_.end() ? fallback : it->second;
  }

  long long integer(const std::string& name, long long fallback) const {
    const auto it = raw_.find(name);
    if (it == raw_.end()) return fallback;
    long long v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(flag(name), flag(name) + ": expected an integer, got '" + s + "'");
    }
    return v;
  }

  std::uint64_t unsigned64(const std::string& name, std::uint64_t fallback) const {
    const auto it = raw_.find(name);
    if (it == raw_.end()) return fallback;
    std::uint64_t v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(flag(name),
                        flag(name) + ": expected a non-negative integer, got '" + s + "'");
    }
    return v;
  }

  double real(const std::string& name, double fallback) const {
    const auto it = raw_.find(name);
    if (it == raw_.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError(flag(name), flag(name) + ": expected a number, got '" + s + "'");
    }
    return v;
  }

 private:
  std::map<std::string, std::string> raw_;
};

void require(bool ok, const std::string& name, const std::string& what) {
  if (!ok) throw ConfigError(flag(name), flag(name) + ": " + what);
}

int bounded_int(const Values& v, const std::string& name, long long fallback, long long lo,
                long long hi) {
  const auto value = v.integer(name, fallback);
  require(value >= lo && value <= hi, name,
          "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(value);
}

fkp_detector detector_from(const std::string& name, const std::string& key) {
  if (name == "sfa") return FKP_DETECTOR_SFA;
  if (name == "surf") return FKP_DETECTOR_SURF;
  if (name == "sift") return FKP_DETECTOR_SIFT;
  throw ConfigError(flag(key), flag(key) + ": unknown detector '" + name + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fkp_fixture_kind fixture_from(const std::string& name) {
  if (name == "disc") return FKP_FIXTURE_DISC;
  if (name == "checkerboard") return FKP_FIXTURE_CHECKERBOARD;
  if (name == "blob-grid") return FKP_FIXTURE_BLOB_GRID;
  if (name == "step-edge") return FKP_FIXTURE_STEP_EDGE;
  if (name == "constant") return FKP_FIXTURE_CONSTANT;
  throw ConfigError("--fixture", "--fixture: unknown fixture kind '" + name + "'");
}

// Flags given on the command line, as raw strings, plus the selected command.
std::pair<Command, std::map<std::string, std::string>> parse_command_line(
    const std::vector<std::string>& args) {
  CLI::App app{"Firefly key-point search with SURF/SIFT baselines"};
  app.require_subcommand(1, 1);
  app.allow_extras();

  std::map<std::string, std::string> storage;
  struct Sub {
    Command command;
    CLI::App* app;
    std::vector<std::pair<std::string, CLI::Option*>> options;
  };
  std::vector<Sub> subs;
  const std::pair<Command, const char*> commands[] = {
      {Command::detect, "detect"}, {Command::bench, "bench"}, {Command::fixture, "fixture"}};
  const char* descriptions[] = {"run one detector and write its artifacts",
                                "sweep detectors over seeds into CSV rows",
                                "write a synthetic fixture image and its mask"};
  std::map<std::string, std::map<Command, std::string>> per_command;
  for (std::size_t c = 0; c < 3; ++c) {
    Sub sub{commands[c].first, app.add_subcommand(commands[c].second, descriptions[c]), {}};
    sub.app->allow_extras();
    for (const auto& spec : kOptions) {
      if (!(spec.scope & scope_of(sub.command))) continue;
      auto& slot = per_command[spec.name][sub.command];
      auto* opt = sub.app->add_option(flag(spec.name), slot, spec.help);
      opt->type_name(type_label(spec.type));
      sub.options.emplace_back(spec.name, opt);
    }
    subs.push_back(std::move(sub));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const Sub* chosen = nullptr;
    for (const auto& s : subs) {
      if (s.app->parsed()) chosen = &s;
    }
    throw HelpRequested(chosen ? chosen->app->help() : app.help());
  } catch (const CLI::RequiredError& e) {
    throw ConfigError("command", std::string("expected a subcommand: detect, bench or fixture (") +
                                     e.what() + ")");
  } catch (const CLI::ParseError& e) {
    throw ConfigError("argument", e.what());
  }

  if (const auto extras = app.remaining(true); !extras.empty()) {
    const auto named = std::find_if(extras.begin(), extras.end(),
                                    [](const std::string& a) { return a.rfind("-", 0) == 0; });
    const std::string key = named != extras.end() ? *named : extras.front();
    throw ConfigError(key, "unknown flag or argument: " + key);
  }

  for (const auto& sub : subs) {
    if (!sub.app->parsed()) continue;
    std::map<std::string, std::string> given;
    for (const auto& [name, opt] : sub.options) {
      if (opt->count() > 0) given[name] = per_command[name][sub.command];
    }
    return {sub.command, given};
  }
  throw ConfigError("command", "expected a subcommand: detect, bench or fixture");
}

void merge_config_text(const std::string& text, Command command,
                       std::map<std::string, std::string>& raw) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("--config", std::string("--config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("--config", "--config: expected a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    const OptionSpec* spec = find_option(key);
    if (!spec || key == "config" || !(spec->scope & scope_of(command))) {
      throw ConfigError(key, "unknown config key '" + key + "'");
    }
    if (raw.count(key)) continue;  // command line wins
    switch (spec->type) {
      case Type::integer:
        if (!value.is_number_integer()) {
          throw ConfigError(key, "config key '" + key + "': expected an integer");
        }
        raw[key] = std::to_string(value.get<long long>());
        break;
      case Type::unsigned64:
        if (!value.is_number_unsigned()) {
          throw ConfigError(key, "config key '" + key + "': expected a non-negative integer");
        }
        raw[key] = std::to_string(value.get<std::uint64_t>());
        break;
      case Type::real:
        if (!value.is_number()) {
          throw ConfigError(key, "config key '" + key + "': expected a number");
        }
        raw[key] = value.dump();
        break;
      case Type::text:
        if (!value.is_string()) {
          throw ConfigError(key, "config key '" + key + "': expected a string");
        }
        raw[key] = value.get<std::string>();
        break;
    }
  }
}

}  // namespace

std::string detector_name(fkp_detector d) {
  switch (d) {
    case FKP_DETECTOR_SFA: return "sfa";
    case FKP_DETECTOR_SURF: return "surf";
    case FKP_DETECTOR_SIFT: return "sift";
  }
  return "?";
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& config_text) {
  auto [command, raw] = parse_command_line(args);
  if (config_text) merge_config_text(*config_text, command, raw);
  const Values v(std::move(raw));

  RunConfig cfg;
  cfg.command = command;

  if (command == Command::detect) {
    if (!v.has("detector")) {
      throw ConfigError("--detector", "--detector is required (sfa, surf or sift)");
    }
    cfg.detector = detector_from(v.text("detector", ""), "detector");
  }
  if (command == Command::bench) {
    for (const auto& name : split(v.text("detectors", "sfa,surf,sift"), ',')) {
      cfg.detectors.push_back(detector_from(name, "detectors"));
    }
    require(!cfg.detectors.empty(), "detectors", "needs at least one detector");
    cfg.seeds = bounded_int(v, "seeds", 1, 1, 1'000'000);
    cfg.threads = bounded_int(v, "threads", 0, 0, 4096);
  }

  // Input: a PNM path or a synthetic fixture.
  fkp_fixture_spec_default(&cfg.fixture);
  if (command == Command::fixture) {
    cfg.use_fixture = true;
    cfg.fixture.kind = fixture_from(v.text("fixture", "disc"));
  } else {
    const bool has_input = v.has("input");
    const bool has_fixture = v.has("fixture");
    if (!has_input && !has_fixture) {
      throw ConfigError("--input", "--input (or --fixture) is required");
    }
    if (has_input && has_fixture) {
      throw ConfigError("--input", "--input and --fixture are mutually exclusive");
    }
    cfg.input = v.text("input", "");
    cfg.use_fixture = has_fixture;
    if (has_fixture) cfg.fixture.kind = fixture_from(v.text("fixture", ""));
  }
  auto& fx = cfg.fixture;
  fx.width = bounded_int(v, "width", fx.width, 1, 1 << 14);
  fx.height = bounded_int(v, "height", fx.height, 1, 1 << 14);
  fx.foreground = static_cast<std::uint8_t>(bounded_int(v, "fg", fx.foreground, 0, 255));
  fx.background = static_cast<std::uint8_t>(bounded_int(v, "bg", fx.background, 0, 255));
  fx.center_x = v.real("center-x", fx.center_x);
  fx.center_y = v.real("center-y", fx.center_y);
  fx.radius = v.real("radius", fx.radius);
  require(fx.radius > 0.0, "radius", "must be > 0");
  fx.square = bounded_int(v, "square", fx.square, 1, 1 << 14);
  fx.rows = bounded_int(v, "rows", fx.rows, 1, 1024);
  fx.cols = bounded_int(v, "cols", fx.cols, 1, 1024);
  fx.sigma = v.real("sigma", fx.sigma);
  require(fx.sigma > 0.0, "sigma", "must be > 0");
  fx.edge_x = bounded_int(v, "edge-x", fx.edge_x, -1, 1 << 14);

  cfg.band.low = v.real("band-low", 0.9);
  cfg.band.high = v.real("band-high", 1.0);
  require(cfg.band.low >= 0.0 && cfg.band.low <= 1.0, "band-low", "must lie in [0, 1]");
  require(cfg.band.high >= 0.0 && cfg.band.high <= 1.0, "band-high", "must lie in [0, 1]");
  require(cfg.band.low <= cfg.band.high, "band-low", "must not exceed --band-high");
  fx.band = cfg.band;

  cfg.seed = v.unsigned64("seed", 0);

  fkp_sfa_params_default(&cfg.sfa);
  auto& sfa = cfg.sfa;
  sfa.fireflies = bounded_int(v, "fireflies", sfa.fireflies, 1, 10'000'000);
  sfa.generations = bounded_int(v, "generations", sfa.generations, 0, 10'000'000);
  sfa.beta_pop = v.real("beta-pop", sfa.beta_pop);
  require(sfa.beta_pop >= 0.0, "beta-pop", "must be >= 0");
  sfa.gamma = v.real("gamma", sfa.gamma);
  require(sfa.gamma >= 0.0, "gamma", "must be >= 0");
  sfa.mu = v.real("mu", sfa.mu);
  require(sfa.mu >= 0.0, "mu", "must be >= 0");
  sfa.best_ratio = v.real("best-ratio", sfa.best_ratio);
  require(sfa.best_ratio > 0.0 && sfa.best_ratio <= 1.0, "best-ratio", "must lie in (0, 1]");
  require(std::floor(sfa.best_ratio * sfa.fireflies + 1e-9) >= 1.0, "best-ratio",
          "must retain at least one firefly");
  sfa.falloff = v.real("falloff", sfa.falloff);
  require(sfa.falloff >= 0.0, "falloff", "must be >= 0");
  const auto select = v.text("select", "max");
  require(select == "max" || select == "min", "select", "must be 'max' or 'min'");
  sfa.minimize = select == "min" ? 1 : 0;
  sfa.band = cfg.band;
  sfa.seed = cfg.seed;

  fkp_surf_params_default(&cfg.surf);
  auto& surf = cfg.surf;
  if (v.has("surf-sizes")) {
    const auto items = split(v.text("surf-sizes", ""), ',');
    require(items.size() >= 3 && items.size() <= FKP_SURF_MAX_SIZES, "surf-sizes",
            "expects between 3 and " + std::to_string(FKP_SURF_MAX_SIZES) + " sizes");
    surf.size_count = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      int size = 0;
      const auto& s = items[i];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), size);
      require(ec == std::errc() && ptr == s.data() + s.size(), "surf-sizes",
              "expected integers, got '" + s + "'");
      require(size >= 3 && size % 3 == 0 && size % 2 == 1, "surf-sizes",
              "sizes must be odd multiples of 3");
      require(i == 0 || size > surf.sizes[i - 1], "surf-sizes", "sizes must increase");
      surf.sizes[i] = size;
    }
  }
  surf.hessian_weight = v.real("hessian-weight", surf.hessian_weight);
  require(surf.hessian_weight >= 0.0, "hessian-weight", "must be >= 0");
  surf.relative_threshold = v.real("relative-threshold", surf.relative_threshold);
  require(surf.relative_threshold >= 0.0 && surf.relative_threshold <= 1.0,
          "relative-threshold", "must lie in [0, 1]");
  if (v.has("threshold")) {
    surf.use_absolute_threshold = 1;
    surf.absolute_threshold = v.real("threshold", 0.0);
  }

  fkp_sift_params_default(&cfg.sift);
  auto& sift = cfg.sift;
  sift.base_sigma = v.real("base-sigma", sift.base_sigma);
  require(sift.base_sigma > 0.0, "base-sigma", "must be > 0");
  sift.scales_per_octave = bounded_int(v, "scales-per-octave", sift.scales_per_octave, 4, 64);
  sift.octaves = bounded_int(v, "octaves", sift.octaves, 0, 32);
  sift.contrast_threshold = v.real("contrast-threshold", sift.contrast_threshold);
  require(sift.contrast_threshold >= 0.0, "contrast-threshold", "must be >= 0");
  sift.edge_ratio = v.real("edge-ratio", sift.edge_ratio);
  require(sift.edge_ratio >= 1.0, "edge-ratio", "must be >= 1");

  cfg.out_image = v.text("out-image", "");
  cfg.out_report = v.text("out-report", "");
  cfg.out_keypoints = v.text("out-keypoints", "");
  cfg.out_mask = v.text("out-mask", "");
  cfg.out_csv = v.text("out-csv", "");
  if (command == Command::fixture) {
    require(!cfg.out_image.empty(), "out-image", "is required for the fixture command");
  }
  return cfg;
}

}  // namespace fkp::cli
