#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlflat/kernel.hpp"
#include "nlflat/nonlocal_operator.hpp"
#include "nlflat/verification.hpp"

namespace nlflat::cli {

enum class OutputFormat { csv, json, both };

OutputFormat parse_format(const std::string& s);
bool wants_csv(OutputFormat f);
bool wants_json(OutputFormat f);

struct GridConfig {
  double x_min = -200.0;
  double x_max = 4000.0;
  std::size_t n = 40001;
};

struct TimeConfig {
  double t_final = 1.0;
  std::vector<double> snapshots;
  double safety = 0.1;
  ApplyMethod method = ApplyMethod::automatic;
};

struct HalflineConfig {
  double tol = 0.02;  // in units of a
};

struct MirrorConfig {
  double half_width = 200.0;
  std::size_t n = 8001;
  double epsilon = 0.5;
  double t_final = 1.0;
  double tol = 0.02;  // in units of a
};

struct FlatteningConfig {
  std::optional<double> t;
  std::optional<Window> window;
  double tol_rel = 0.1;
};

struct SubsolutionConfig {
  double C = 2.0;
  std::size_t t_count = 20;
  std::size_t x_count = 20;
  std::optional<double> x_lo;
  double x_hi = 200.0;
  double quad_tol = 1e-10;
};

struct ReferenceConfig {
  std::optional<Window> window;
  std::size_t levels = 2;
  double tol = 5e-3;
  double min_ratio = 1.5;
};

struct BenchConfig {
  std::vector<std::size_t> sizes{256, 1024, 4096, 16384};
  std::size_t repeats = 5;
};

/// Fully validated run description.
struct RunConfig {
  KernelSpec kernel = cauchy_kernel();
  bool force_kernel = false;
  GridConfig grid;
  BoundaryModel boundary{1.0, RightZero{}};
  InitialDatum datum = InitialDatum::step(1.0, 0.0);
  TimeConfig time;
  HalflineConfig halfline;
  MirrorConfig mirror;
  FlatteningConfig flattening;
  SubsolutionConfig subsolution;
  ReferenceConfig reference;
  BenchConfig bench;
  std::filesystem::path output_dir = "out";
  OutputFormat format = OutputFormat::both;
  std::uint64_t seed = 0;
  nlohmann::json source;  // the parsed document, echoed into metadata
};

/// Parses and validates; every failure is a ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace nlflat::cli
