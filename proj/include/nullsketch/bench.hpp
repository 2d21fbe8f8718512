#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nullsketch/aaa.hpp"
#include "nullsketch/matrix.hpp"
#include "nullsketch/sketch.hpp"

namespace nullsketch {

// Experiment drivers. Each run_* function regenerates one figure or table at
// desk scale and returns it as an in-memory CSV. Everything is determined by
// (cfg, seeds); timing columns are the only cells that vary between re-runs.

struct BenchConfig {
  std::string experiment;  // fig1 | fig2 | fig3 | table1 | table2
  // Zero means "use the recipe default". Overrides exist for shrunken smoke
  // runs and must respect the usual guards (m >= n + k, s >= subspace size).
  Index m = 0;
  Index n = 0;
  Index k = 0;
  Index l = 0;
  std::vector<std::uint64_t> seeds;   // empty: recipe default
  std::optional<SketchKind> kind;     // fig1 panels ignore this
  std::optional<Index> sketch_size;   // fig1 panels ignore this
  // table2 only: subset of {logz4, sqrtbranch, tan128, tan256}; empty runs
  // the full set.
  std::vector<std::string> functions;
  std::string out_dir;  // consumed by the command line driver, not by run_*
};

// Rows are plain strings so that a written file and a re-run compare cell for
// cell. Numeric cells go through csv_cell (%.17g, so doubles round-trip).
struct CsvTable {
  std::string name;  // schema line reads "# schema: nullsketch.<name>.v1"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_cell(double value);
std::string csv_cell(Index value);

// Schema comment line, a column header line, then the rows. Tables with
// timing columns get a second comment marking those columns machine bound.
void write_csv(const CsvTable& table, std::ostream& out);

// Trailing-vector accuracy of one sketched SVD against the dense one, five
// sketch panels ({haar, coherent} left factors x {gaussian 4n, srft 2n},
// plus srft at s = ceil(n log2 n) for the coherent factor), swept over the
// spectrum tail ratio sigma_{n-1}/sigma_n in [10, 1e10].
CsvTable run_fig1(const BenchConfig& cfg);

// Different-dimension pairing sweep: trailing-l subspace of A against the
// trailing-k sketched subspace for k = 2..n-1, geometric and step spectra.
CsvTable run_fig2(const BenchConfig& cfg);

// Sketched total least squares error metrics against the noise level of the
// right-hand side block, one row per noise decade.
CsvTable run_fig3(const BenchConfig& cfg);

// Exact versus sketched TLS as m doubles: residuals, error metrics, and
// median-of-5 wall-clock times.
CsvTable run_table1(const BenchConfig& cfg);

// Exact versus sketched greedy rational approximation on the four named
// targets: final degrees, errors, and single-shot wall-clock times.
CsvTable run_table2(const BenchConfig& cfg);

// Dispatch on cfg.experiment; unknown names throw std::invalid_argument.
CsvTable run_experiment(const BenchConfig& cfg);

// The seed list an experiment falls back to when cfg.seeds is empty. Useful
// to callers that split a run across seeds and merge the row blocks.
std::vector<std::uint64_t> default_seeds(const std::string& experiment);

// Seeded sample sets for the named approximation targets:
//   logz4       log(2 + z^4) / (1 - 16 z^4)          uniform on |z| = 1
//   sqrtbranch  sqrt(z(1-z)) sqrt((z-i)(1+i-z))      uniform on [0,1]^2
//   tan128      tan(128 z)                           uniform on the unit disk
//   tan256      tan(256 z)                           uniform on the unit disk
SampleSet make_function_samples(const std::string& name, Index m, std::uint64_t seed);

}  // namespace nullsketch
