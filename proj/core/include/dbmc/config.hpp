#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dbmc/concentration_matrix.hpp"
#include "dbmc/diffusion_kernel.hpp"

namespace dbmc {

enum class GeometryKind { line, grid, cluster, wrapped_line, custom };

std::string_view to_string(GeometryKind kind);

struct GeometrySpec {
  GeometryKind kind = GeometryKind::line;
  std::optional<std::size_t> nodes;  // N
  std::optional<std::size_t> rows;
  std::optional<std::size_t> cols;
  std::optional<double> spacing;  // a
  std::optional<double> cluster_radius;
  std::optional<std::string> file;
};

struct ScheduleSpec {
  double k = 1.0;
  std::optional<double> horizon;  // explicit T0
  std::optional<double> radius;   // R; defaults to the spacing a
};

struct MatrixSpec {
  NormalizationMode normalization = NormalizationMode::column_normalized;
  std::optional<int> neighbor_budget;  // N'
  std::optional<double> epsilon;
  std::optional<double> density;
};

struct StatisticsSpec {
  double mu = 0.0;
  double sigma0_sq = 1.0;
  std::size_t trials = 0;
  unsigned epochs = 50;
  double tol = 1e-8;
  unsigned max_epochs = 10000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> files;  // empty: every file the command knows
};

// Validated experiment description. Config documents are JSON objects with
// the sections geometry, medium, schedule, matrix, statistics and output:
//
//   {"geometry": {"kind": "line", "N": 10, "a": 1.0},
//    "medium": {"m": 2, "D": 1.0, "node_radius": 0.1},
//    "statistics": {"seed": 42}}
//
// Keys: geometry.{kind,N,rows,cols,a,cluster_radius,file};
// medium.{m,D,node_radius}; schedule.{k,T0,R};
// matrix.{normalization,N_prime,epsilon,density};
// statistics.{mu,sigma0_sq,trials,epochs,tol,max_epochs,seed,threads};
// output.{directory,files}.
struct ExperimentConfig {
  GeometrySpec geometry;
  std::optional<MediumParams> medium;  // absent only for custom geometry files
  ScheduleSpec schedule;
  MatrixSpec matrix;
  StatisticsSpec statistics;
  OutputSpec output;

  // "section.key=value" for every default that was filled in.
  std::vector<std::string> applied_defaults;
  // Canonical JSON of the result-relevant settings (everything except
  // statistics.threads and the output section) and its FNV-1a 64 hash.
  std::string canonical;
  std::string hash;
};

// Parses and validates a config document. `overrides` are "section.key=value"
// strings applied before validation; values are read as JSON when they parse
// as JSON and as strings otherwise. Errors are ValidationError with the key
// path.
ExperimentConfig parse_config(std::string_view document,
                              std::span<const std::string> overrides = {});

ExperimentConfig load_config_file(const std::string& path,
                                  std::span<const std::string> overrides = {});

// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view text);

}  // namespace dbmc
