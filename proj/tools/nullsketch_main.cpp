#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"
#include "nullsketch/aaa.hpp"
#include "nullsketch/bench.hpp"
#include "nullsketch/kernels.hpp"
#include "nullsketch/matrix.hpp"
#include "nullsketch/nullspace.hpp"
#include "nullsketch/perturb.hpp"
#include "nullsketch/sketch.hpp"
#include "nullsketch/tls.hpp"

namespace {

using nullsketch::Index;
using ojson = nlohmann::ordered_json;

// MatrixMarket files announce themselves on the first line; everything else
// is treated as headerless CSV.
nullsketch::Matrix load_any(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string first;
  std::getline(in, first);
  in.close();
  if (first.rfind("%%MatrixMarket", 0) == 0) return nullsketch::load_matrix_market(path);
  return nullsketch::load_csv(path);
}

ojson complex_json(nullsketch::Complex z) { return ojson::array({z.real(), z.imag()}); }

ojson cvector_json(const nullsketch::ComplexVector& v) {
  ojson out = ojson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

ojson rvector_json(const nullsketch::RealVector& v) {
  ojson out = ojson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// JSON has no literal for infinity; bounds that overflow (or a chi at a zero
// gap) are reported as the string "inf" instead of a silent null.
ojson number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return nullptr;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void flatten_json(const ojson& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

// Summaries print as JSON by default; --format csv flattens the same content
// into key,value rows so shell pipelines can grep single fields.
void print_summary(const ojson& summary, const std::string& format) {
  if (format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten_json(summary, "", rows);
    std::cout << "key,value\n";
    for (const auto& [key, value] : rows) {
      std::cout << csv_escape(key) << "," << csv_escape(value) << "\n";
    }
  } else {
    std::cout << summary.dump(2) << "\n";
  }
}

std::string prepare_out_dir(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  return out_dir;
}

ojson sketch_json(const nullsketch::SketchOperator& S) {
  return ojson{{"kind", nullsketch::to_string(S.kind())},
               {"size", S.s()},
               {"rows", S.m()},
               {"seed", S.seed()},
               {"id", S.id()}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format;  // empty: per-command default
};

std::string format_or(const GlobalOpts& g, const char* fallback) {
  return g.format.empty() ? fallback : g.format;
}

void cmd_nullspace(const GlobalOpts& g, const std::string& in_path, Index k, double tol,
                   bool tol_given, const std::string& kind_name, Index sketch_size,
                   bool certificate) {
  nullsketch::Matrix a = load_any(in_path);
  const Index n = a.cols();
  const nullsketch::SketchKind kind = nullsketch::sketch_kind_from_string(kind_name);
  const Index s = sketch_size > 0 ? sketch_size : nullsketch::default_sketch_size(kind, n);
  nullsketch::SketchOperator S = nullsketch::SketchOperator::draw(kind, s, a.rows(), g.seed);

  nullsketch::NullspaceResult r = tol_given ? nullsketch::solve_tol(a, tol, S)
                                            : nullsketch::solve_k(a, k, S);
  if (certificate) r.residual_fro = nullsketch::residual_certificate(a, r.W);

  const std::string w_path =
      (std::filesystem::path(prepare_out_dir(g.out_dir)) / "nullspace_W.mtx").string();
  nullsketch::save_matrix_market(w_path, r.W.matrix());

  ojson summary{{"command", "nullspace"},
                {"input", in_path},
                {"m", a.rows()},
                {"n", n},
                {"k", r.k},
                {"tol", tol_given ? ojson(tol) : ojson(nullptr)},
                {"sketch", sketch_json(S)},
                {"w_path", w_path},
                {"sketched_singular_values", rvector_json(r.sketched_singular_values)},
                {"residual_fro",
                 r.residual_fro ? ojson(*r.residual_fro) : ojson(nullptr)}};
  print_summary(summary, format_or(g, "json"));
}

void cmd_bound(const GlobalOpts& g, const std::string& a_path, const std::string& atil_path,
               Index k, Index l, bool l_given) {
  nullsketch::Matrix a = load_any(a_path);
  nullsketch::Matrix atil = load_any(atil_path);
  std::optional<Index> l_opt = l_given ? std::optional<Index>(l) : std::nullopt;
  nullsketch::AngleReport rep = nullsketch::measure_angles(a, atil, k, l_opt);

  ojson branches = ojson::array();
  for (const nullsketch::AngleBranch& br : rep.branches) {
    ojson entry{{"pairing", br.pairing},
                {"alpha", br.params.alpha},
                {"delta", br.params.delta},
                {"admissible", br.admissible},
                {"angles", rvector_json(br.angles)},
                {"max_sine", std::sin(br.angles(br.angles.size() - 1))},
                {"corollary_bound",
                 br.admissible ? number_json(nullsketch::corollary_bound(br.params))
                               : ojson(nullptr)}};
    branches.push_back(std::move(entry));
  }

  // A priori bounds read off the unperturbed spectrum alone.
  const nullsketch::RealVector sa = nullsketch::singular_values(a);
  const Index n = a.cols();
  const double sigma_gap = sa(n - k - 1);
  ojson apriori;
  auto entry = [](std::optional<double> b) {
    return b ? number_json(*b) : ojson(nullptr);
  };
  if (l_given) {
    const double sigma_tail = sa(n - l);
    apriori = ojson{
        {"sigma_gap", sigma_gap},
        {"sigma_tail", sigma_tail},
        {"b3", entry(nullsketch::apriori_bound_diff_dim(sigma_gap, sigma_tail,
                                                        nullsketch::DiffDimBranch::b3))},
        {"b4", entry(nullsketch::apriori_bound_diff_dim(sigma_gap, sigma_tail,
                                                        nullsketch::DiffDimBranch::b4))}};
  } else {
    const double sigma_tail = sa(n - k);
    apriori = ojson{
        {"sigma_gap", sigma_gap},
        {"sigma_tail", sigma_tail},
        {"b1", entry(nullsketch::apriori_bound_same_dim(sigma_gap, sigma_tail,
                                                        nullsketch::SameDimBranch::b1))},
        {"b2", entry(nullsketch::apriori_bound_same_dim(sigma_gap, sigma_tail,
                                                        nullsketch::SameDimBranch::b2))}};
  }

  ojson summary{{"command", "bound"},
                {"a", a_path},
                {"atil", atil_path},
                {"k", k},
                {"l", l_given ? ojson(l) : ojson(nullptr)},
                {"branches", std::move(branches)},
                {"apriori", std::move(apriori)}};
  print_summary(summary, format_or(g, "json"));
}

void cmd_tls(const GlobalOpts& g, const std::string& a_path, const std::string& b_path,
             const std::string& kind_name, Index sketch_size, bool exact_baseline,
             bool allow_marginal) {
  nullsketch::TlsProblem p{load_any(a_path), load_any(b_path)};
  const Index m = p.A.rows();
  const Index n = p.A.cols();
  const Index k = p.B.cols();
  const nullsketch::SketchKind kind = nullsketch::sketch_kind_from_string(kind_name);
  const Index s = sketch_size > 0 ? sketch_size : nullsketch::default_sketch_size(kind, n + k);
  nullsketch::SketchOperator S = nullsketch::SketchOperator::draw(kind, s, m, g.seed);

  nullsketch::TlsOptions opt;
  opt.allow_marginal = allow_marginal;
  auto t0 = std::chrono::steady_clock::now();
  nullsketch::TlsSolution sk = nullsketch::tls_solve_sketched(p, S, opt);
  const double sketched_seconds = seconds_since(t0);

  const std::string x_path =
      (std::filesystem::path(prepare_out_dir(g.out_dir)) / "tls_X.mtx").string();
  nullsketch::save_matrix_market(x_path, sk.X);

  ojson summary{{"command", "tls"},
                {"a", a_path},
                {"b", b_path},
                {"m", m},
                {"n", n},
                {"k", k},
                {"sketch", sketch_json(S)},
                {"x_path", x_path},
                {"tls_residual", sk.tls_residual},
                {"cond_vk2", sk.cond_Vk2},
                {"augmented_singular_values", rvector_json(sk.augmented_singular_values)},
                {"timings", ojson{{"sketched_seconds", sketched_seconds}}}};

  if (exact_baseline) {
    auto t1 = std::chrono::steady_clock::now();
    nullsketch::TlsSolution exact = nullsketch::tls_solve_exact(p, opt);
    summary["timings"]["exact_seconds"] = seconds_since(t1);

    // Certified residual from an untimed re-solve, so the ratio compares true
    // Frobenius residuals rather than a sketched estimate.
    nullsketch::TlsOptions copt = opt;
    copt.certificate = true;
    nullsketch::TlsSolution certified = nullsketch::tls_solve_sketched(p, S, copt);
    nullsketch::TlsErrorMetrics metrics = nullsketch::tls_error_metrics(exact, sk);
    summary["exact"] = ojson{{"tls_residual", exact.tls_residual},
                             {"cond_vk2", exact.cond_Vk2}};
    summary["residual_certificate"] = *certified.residual_certificate;
    summary["residual_ratio"] =
        number_json(*certified.residual_certificate / exact.tls_residual);
    summary["metrics"] = ojson{{"rel_err", metrics.rel_err},
                               {"sin_x", metrics.sin_X},
                               {"sin_vk", metrics.sin_Vk}};
  }
  print_summary(summary, format_or(g, "json"));
}

void cmd_aaa(const GlobalOpts& g, const std::string& fn, const std::string& file_path,
             Index m, double tol, Index max_degree, const std::string& variant,
             const std::string& kind_name, Index sketch_size, bool check_consistency) {
  nullsketch::SampleSet samples;
  if (fn == "file") {
    if (file_path.empty()) throw std::runtime_error("--fn file requires --file");
    nullsketch::Matrix table = load_any(file_path);
    if (table.cols() != 2) {
      throw std::runtime_error("--fn file expects a two column matrix [z, f]");
    }
    samples.z.resize(table.rows());
    samples.f.resize(table.rows());
    for (Index i = 0; i < table.rows(); ++i) {
      samples.z(i) = table(i, 0);
      samples.f(i) = table(i, 1);
    }
  } else {
    samples = nullsketch::make_function_samples(fn, m, g.seed);
  }

  nullsketch::BarycentricRational r;
  nullsketch::AaaTrace trace;
  auto t0 = std::chrono::steady_clock::now();
  if (variant == "exact") {
    std::tie(r, trace) = nullsketch::aaa_exact(samples, tol, max_degree);
  } else {
    nullsketch::AaaSketchOptions opt;
    opt.kind = nullsketch::sketch_kind_from_string(kind_name);
    if (sketch_size > 0) opt.sketch_size = sketch_size;
    opt.check_consistency = check_consistency;
    std::tie(r, trace) = nullsketch::aaa_sketched(samples, tol, max_degree, g.seed, opt);
  }
  const double run_seconds = seconds_since(t0);

  nullsketch::CsvTable trace_table;
  trace_table.name = "aaa_trace";
  trace_table.columns = {"degree", "support_index", "max_error",
                         "sigma_min", "seconds",       "consistency_error"};
  for (const nullsketch::AaaIterationRecord& rec : trace.iterations) {
    trace_table.rows.push_back({nullsketch::csv_cell(rec.degree),
                                nullsketch::csv_cell(rec.support_index),
                                nullsketch::csv_cell(rec.max_error),
                                nullsketch::csv_cell(rec.sigma_min),
                                nullsketch::csv_cell(rec.seconds),
                                nullsketch::csv_cell(rec.consistency_error)});
  }
  const std::string trace_path =
      (std::filesystem::path(prepare_out_dir(g.out_dir)) / "aaa_trace.csv").string();
  {
    std::ofstream out(trace_path);
    nullsketch::write_csv(trace_table, out);
  }

  ojson summary{{"command", "aaa"},
                {"fn", fn},
                {"m", samples.z.size()},
                {"tol", tol},
                {"max_degree", max_degree},
                {"variant", variant},
                {"seed", g.seed},
                {"converged", trace.converged},
                {"degree", r.weights.size()},
                {"max_error",
                 trace.iterations.empty() ? ojson(nullptr)
                                          : ojson(trace.iterations.back().max_error)},
                {"seconds", run_seconds},
                {"support_z", cvector_json(r.support_z)},
                {"support_f", cvector_json(r.support_f)},
                {"weights", cvector_json(r.weights)},
                {"trace_path", trace_path}};
  print_summary(summary, format_or(g, "json"));
}

// Runs one experiment, optionally splitting the seed list across worker
// threads. Each worker produces the row block of a single seed; blocks are
// concatenated in seed order, which reproduces the sequential table byte for
// byte because every recipe iterates seeds outermost.
nullsketch::CsvTable run_bench(nullsketch::BenchConfig cfg, int jobs) {
  std::vector<std::uint64_t> seeds =
      cfg.seeds.empty() ? nullsketch::default_seeds(cfg.experiment) : cfg.seeds;
  cfg.seeds = seeds;
  if (jobs <= 1 || seeds.size() <= 1) return nullsketch::run_experiment(cfg);

  std::vector<nullsketch::CsvTable> parts(seeds.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                    seeds.size());
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= parts.size()) break;
          nullsketch::BenchConfig one = cfg;
          one.seeds = {seeds[i]};
          parts[i] = nullsketch::run_experiment(one);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  nullsketch::CsvTable merged = std::move(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    merged.rows.insert(merged.rows.end(),
                       std::make_move_iterator(parts[i].rows.begin()),
                       std::make_move_iterator(parts[i].rows.end()));
  }
  return merged;
}

void cmd_bench(const GlobalOpts& g, nullsketch::BenchConfig cfg, int jobs) {
  cfg.out_dir = g.out_dir;
  nullsketch::CsvTable table = run_bench(cfg, jobs);

  const std::string format = format_or(g, "csv");
  const std::filesystem::path dir = prepare_out_dir(g.out_dir);
  std::string path;
  if (format == "json") {
    path = (dir / (cfg.experiment + ".json")).string();
    ojson rows = ojson::array();
    for (const auto& row : table.rows) {
      ojson entry;
      for (std::size_t c = 0; c < table.columns.size(); ++c) entry[table.columns[c]] = row[c];
      rows.push_back(std::move(entry));
    }
    ojson doc{{"schema", "nullsketch." + table.name + ".v1"},
              {"columns", table.columns},
              {"rows", std::move(rows)}};
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
  } else {
    path = (dir / (cfg.experiment + ".csv")).string();
    std::ofstream out(path);
    nullsketch::write_csv(table, out);
  }
  std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("NULLSKETCH_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) Eigen::setNbThreads(threads);
  }

  CLI::App app{"Sketched trailing subspaces: null spaces, perturbation bounds, "
               "total least squares, rational approximation"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--out", g.out_dir, "Directory for emitted files")->capture_default_str();
  app.add_option("--format", g.format, "Output format (default: json, bench: csv)")
      ->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::string> kinds = {"gaussian", "srft", "srdct"};

  // nullspace
  auto* ns = app.add_subcommand("nullspace", "Approximate trailing right singular subspace");
  ns->fallthrough();
  std::string ns_in;
  Index ns_k = 1;
  double ns_tol = 0.0;
  std::string ns_kind = "srft";
  Index ns_size = 0;
  bool ns_cert = false;
  ns->add_option("--in", ns_in, "Input matrix (MatrixMarket or CSV)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* ns_k_opt = ns->add_option("--k", ns_k, "Trailing subspace dimension");
  auto* ns_tol_opt =
      ns->add_option("--tol", ns_tol, "Pick k as the count of sketched values below tol");
  ns_tol_opt->excludes(ns_k_opt);
  ns->add_option("--sketch", ns_kind, "Sketch kind")->check(CLI::IsMember(kinds));
  ns->add_option("--sketch-size", ns_size, "Sketch rows (0: kind default)");
  ns->add_flag("--certificate", ns_cert, "Compute the exact residual norm");

  // bound
  auto* bd = app.add_subcommand("bound", "Angles and perturbation bounds for two matrices");
  bd->fallthrough();
  std::string bd_a, bd_atil;
  Index bd_k = 1;
  Index bd_l = 0;
  bd->add_option("a", bd_a, "Unperturbed matrix")->required()->check(CLI::ExistingFile);
  bd->add_option("atil", bd_atil, "Perturbed matrix")->required()->check(CLI::ExistingFile);
  bd->add_option("k", bd_k, "Trailing subspace dimension")->required();
  auto* bd_l_opt = bd->add_option("l", bd_l, "Smaller pairing dimension (l < k)");

  // tls
  auto* tl = app.add_subcommand("tls", "Sketched total least squares");
  tl->fallthrough();
  std::string tl_a, tl_b;
  std::string tl_kind = "srdct";
  Index tl_size = 0;
  bool tl_exact = false;
  bool tl_marginal = false;
  tl->add_option("--a", tl_a, "Coefficient matrix")->required()->check(CLI::ExistingFile);
  tl->add_option("--b", tl_b, "Right hand side block")->required()->check(CLI::ExistingFile);
  tl->add_option("--sketch", tl_kind, "Sketch kind")->check(CLI::IsMember(kinds));
  tl->add_option("--sketch-size", tl_size, "Sketch rows (0: kind default)");
  tl->add_flag("--exact-baseline", tl_exact,
               "Also solve densely and report error metrics and the residual ratio");
  tl->add_flag("--allow-marginal", tl_marginal,
               "Skip the strict solvability margin check");

  // aaa
  auto* aa = app.add_subcommand("aaa", "Greedy barycentric rational approximation");
  aa->fallthrough();
  std::string aa_fn;
  std::string aa_file;
  Index aa_m = 10000;
  double aa_tol = 1e-9;
  Index aa_deg = 100;
  std::string aa_variant = "sketched";
  std::string aa_kind = "srft";
  Index aa_size = 0;
  bool aa_consistency = false;
  aa->add_option("--fn", aa_fn, "Target function")
      ->required()
      ->check(CLI::IsMember({"logz4", "sqrtbranch", "tan128", "tan256", "file"}));
  aa->add_option("--file", aa_file, "Two column sample matrix [z, f] for --fn file")
      ->check(CLI::ExistingFile);
  aa->add_option("--m", aa_m, "Sample count for the built in targets")
      ->capture_default_str();
  aa->add_option("--tol", aa_tol, "Relative stopping tolerance")->capture_default_str();
  aa->add_option("--max-degree", aa_deg, "Iteration cap")->capture_default_str();
  aa->add_option("--variant", aa_variant, "Solver variant")
      ->check(CLI::IsMember({"exact", "sketched"}))
      ->capture_default_str();
  aa->add_option("--sketch", aa_kind, "Sketch kind (sketched variant)")
      ->check(CLI::IsMember(kinds));
  aa->add_option("--sketch-size", aa_size, "Sketch rows (0: twice the degree cap)");
  aa->add_flag("--check-consistency", aa_consistency,
               "Record the per iteration sketch consistency gap in the trace");

  // bench
  auto* be = app.add_subcommand("bench", "Regenerate a figure or table at desk scale");
  be->fallthrough();
  nullsketch::BenchConfig be_cfg;
  std::string be_kind;
  Index be_size = 0;
  int be_jobs = 1;
  be->add_option("--experiment", be_cfg.experiment, "Which artifact to regenerate")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "table1", "table2"}));
  be->add_option("--m", be_cfg.m, "Row count override (0: recipe default)");
  be->add_option("--n", be_cfg.n, "Column count override");
  be->add_option("--k", be_cfg.k, "Subspace dimension override");
  be->add_option("--l", be_cfg.l, "Smaller pairing dimension override");
  be->add_option("--seeds", be_cfg.seeds, "Comma separated seed list")->delimiter(',');
  be->add_option("--sketch", be_kind, "Sketch kind override")->check(CLI::IsMember(kinds));
  be->add_option("--sketch-size", be_size, "Sketch size override");
  be->add_option("--functions", be_cfg.functions,
                 "table2: comma separated subset of the four targets")
      ->delimiter(',');
  be->add_option("--jobs", be_jobs, "Worker threads across seeds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (ns->parsed()) {
      cmd_nullspace(g, ns_in, ns_k, ns_tol, ns_tol_opt->count() > 0, ns_kind, ns_size,
                    ns_cert);
    } else if (bd->parsed()) {
      cmd_bound(g, bd_a, bd_atil, bd_k, bd_l, bd_l_opt->count() > 0);
    } else if (tl->parsed()) {
      cmd_tls(g, tl_a, tl_b, tl_kind, tl_size, tl_exact, tl_marginal);
    } else if (aa->parsed()) {
      cmd_aaa(g, aa_fn, aa_file, aa_m, aa_tol, aa_deg, aa_variant, aa_kind, aa_size,
              aa_consistency);
    } else if (be->parsed()) {
      if (be_kind.empty() == false) be_cfg.kind = nullsketch::sketch_kind_from_string(be_kind);
      if (be_size > 0) be_cfg.sketch_size = be_size;
      cmd_bench(g, std::move(be_cfg), be_jobs);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
