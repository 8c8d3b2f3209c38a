// forks command-line harness: single runs, seed/budget sweeps, the TISVD
// timing benchmark and adversarial stream generation. Talks to the library
// only through the C API.

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "forks/forks.h"

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(forks_status st, const std::string& what) {
  if (st != FORKS_OK) throw Failure(what + ": " + forks_last_error());
}

using DatasetPtr = std::unique_ptr<forks_dataset, decltype(&forks_dataset_free)>;
using ResultPtr = std::unique_ptr<forks_run_result, decltype(&forks_result_free)>;

DatasetPtr wrap(forks_dataset* ds) { return {ds, &forks_dataset_free}; }

// Every run/sweep flag lands here before being copied into forks_run_config.
struct Options {
  std::string data;
  bool scale = false;
  std::string algorithm = "forks";
  std::string loss = "hinge";
  std::vector<double> bandwidths{1.0};
  bool sigma_grid = false;
  std::uint64_t selection_seed = 0;
  std::size_t budget = 50;
  std::size_t sketch_size = 0;
  std::size_t sample_size = 0;
  double gamma = 0.2;
  std::size_t rank = 0;
  std::size_t blocks = 0;
  std::size_t update_cycle = 0;
  double theta = 0.3;
  std::string cycle_basis = "stream";
  double alpha = 0.01;
  double sigma_w = 0.5;
  double eta_w = 0.0;
  double kogd_eta = 0.2;
  double clip = 1.0;
  std::string ordering = "updated";
  std::string projection = "current";
  double pinv_tol = -1.0;
  std::size_t fogd_features = 0;
  double fogd_eta = 0.2;
  std::string stream = "permute";
  std::size_t adv_blocks = 500;
  std::size_t adv_repeats = 10;
};

const std::map<std::string, forks_algorithm> kAlgorithms{
    {"forks", FORKS_ALGO_FORKS}, {"kogd", FORKS_ALGO_KOGD}, {"fogd", FORKS_ALGO_FOGD}};

void add_learning_options(CLI::App& cmd, Options& o, bool sweep) {
  cmd.add_option("--data", o.data, "LIBSVM dataset (plain or gzip)")->required();
  cmd.add_flag("--scale", o.scale, "min-max scale every feature to [-1, 1]");
  if (!sweep) {
    cmd.add_option("--algorithm", o.algorithm, "forks, kogd or fogd")
        ->check(CLI::IsMember({"forks", "kogd", "fogd"}));
  }
  cmd.add_option("--loss", o.loss)->check(CLI::IsMember({"hinge", "squared-hinge"}));
  cmd.add_option("--bandwidth", o.bandwidths, sweep ? "Gaussian sigma values" : "Gaussian sigma")
      ->expected(1, sweep ? 1 << 20 : 1);
  cmd.add_flag("--sigma-grid", o.sigma_grid,
               "pick sigma from 2^{-5:0.5:7} on the stream for --selection-seed");
  cmd.add_option("--selection-seed", o.selection_seed, "stream seed held out for --sigma-grid");
  if (!sweep) cmd.add_option("--budget", o.budget, "support-vector budget B");
  cmd.add_option("--sketch-size", o.sketch_size, "s_p (0: B)");
  cmd.add_option("--sample-size", o.sample_size, "s_m (0: gamma * s_p)");
  cmd.add_option("--gamma", o.gamma);
  cmd.add_option("--rank", o.rank, "k (0: ceil(B / 10))");
  cmd.add_option("--blocks", o.blocks, "SJLT blocks D (0: derived from s_m)");
  cmd.add_option("--update-cycle", o.update_cycle, "rho (0: floor(theta * basis))");
  cmd.add_option("--theta", o.theta);
  cmd.add_option("--cycle-basis", o.cycle_basis, "length theta multiplies")
      ->check(CLI::IsMember({"stream", "after-budget"}));
  cmd.add_option("--alpha", o.alpha);
  cmd.add_option("--sigma-w", o.sigma_w);
  cmd.add_option("--eta-w", o.eta_w);
  cmd.add_option("--kogd-eta", o.kogd_eta);
  cmd.add_option("--clip", o.clip, "C in the projection");
  cmd.add_option("--ordering", o.ordering, "inverse used by the Newton step")
      ->check(CLI::IsMember({"current", "updated"}));
  cmd.add_option("--projection", o.projection, "example the projection clips against")
      ->check(CLI::IsMember({"current", "next"}));
  cmd.add_option("--pinv-tol", o.pinv_tol, "pseudoinverse cutoff (<0: default)");
  cmd.add_option("--fogd-features", o.fogd_features, "FOGD features (0: 4B)");
  cmd.add_option("--fogd-eta", o.fogd_eta);
  cmd.add_option("--stream", o.stream)->check(CLI::IsMember({"permute", "adversarial", "as-is"}));
  cmd.add_option("--adv-blocks", o.adv_blocks);
  cmd.add_option("--adv-repeats", o.adv_repeats);
}

forks_run_config make_config(const Options& o, forks_algorithm algo, std::size_t budget,
                             double bandwidth, std::uint64_t seed) {
  forks_run_config c;
  forks_run_config_init(&c);
  c.algorithm = algo;
  c.loss = o.loss == "hinge" ? FORKS_LOSS_HINGE : FORKS_LOSS_SQUARED_HINGE;
  c.bandwidth = bandwidth;
  c.budget = budget;
  c.sketch_size = o.sketch_size;
  c.sample_size = o.sample_size;
  c.gamma = o.gamma;
  c.rank = o.rank;
  c.blocks = o.blocks;
  c.update_cycle = o.update_cycle;
  c.theta = o.theta;
  c.cycle_basis = o.cycle_basis == "stream" ? FORKS_CYCLE_STREAM : FORKS_CYCLE_AFTER_BUDGET;
  c.alpha = o.alpha;
  c.sigma_w = o.sigma_w;
  c.eta_w = o.eta_w;
  c.kogd_eta = o.kogd_eta;
  c.clip = o.clip;
  c.ordering = o.ordering == "current" ? FORKS_ONS_CURRENT_INVERSE : FORKS_ONS_UPDATED_INVERSE;
  c.projection = o.projection == "current" ? FORKS_PROJECT_CURRENT : FORKS_PROJECT_NEXT;
  c.pinv_tol = o.pinv_tol;
  c.fogd_features = o.fogd_features;
  c.fogd_eta = o.fogd_eta;
  c.stream = o.stream == "permute"       ? FORKS_STREAM_PERMUTE
             : o.stream == "adversarial" ? FORKS_STREAM_ADVERSARIAL
                                         : FORKS_STREAM_AS_IS;
  c.adv_blocks = o.adv_blocks;
  c.adv_repeats = o.adv_repeats;
  c.seed = seed;
  return c;
}

DatasetPtr load(const Options& o) {
  forks_dataset* raw = nullptr;
  check(forks_dataset_load(o.data.c_str(), &raw), "loading " + o.data);
  DatasetPtr ds = wrap(raw);
  if (o.scale) {
    forks_dataset* scaled = nullptr;
    check(forks_dataset_minmax(ds.get(), -1.0, 1.0, &scaled), "scaling");
    ds = wrap(scaled);
  }
  return ds;
}

double choose_bandwidth(const Options& o, const forks_dataset* ds, forks_algorithm algo,
                        std::size_t budget) {
  std::vector<double> grid(forks_default_bandwidth_grid(nullptr, 0));
  forks_default_bandwidth_grid(grid.data(), grid.size());
  std::vector<double> rates(grid.size());
  const forks_run_config c = make_config(o, algo, budget, grid.front(), o.selection_seed);
  double best = 0.0;
  check(forks_select_bandwidth(&c, ds, grid.data(), grid.size(), &best, rates.data()),
        "bandwidth selection");
  return best;
}

// Opens `path` for writing, or returns std::cout for "-".
std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Failure("cannot write '" + path + "'");
  return file;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kind_name(forks_round_kind k) {
  switch (k) {
    case FORKS_ROUND_FILLING: return "filling";
    case FORKS_ROUND_UPDATE: return "update";
    case FORKS_ROUND_REGULAR: return "regular";
  }
  return "?";
}

int cmd_run(const Options& o, std::uint64_t seed, const std::string& rounds_path,
            const std::string& summary_path) {
  const DatasetPtr ds = load(o);
  const forks_algorithm algo = kAlgorithms.at(o.algorithm);
  const double bandwidth = o.sigma_grid ? choose_bandwidth(o, ds.get(), algo, o.budget)
                                        : o.bandwidths.front();
  const forks_run_config c = make_config(o, algo, o.budget, bandwidth, seed);
  forks_run_result* raw = nullptr;
  check(forks_run(&c, ds.get(), &raw), "run");
  const ResultPtr res(raw, &forks_result_free);

  std::ofstream file;
  std::ostream& out = open_out(rounds_path, file);
  out << "t,label,prediction,score,kind,cumulative_mistakes\n";
  const std::size_t n = forks_result_rounds(res.get());
  for (std::size_t t = 0; t < n; ++t) {
    forks_round r;
    check(forks_result_round(res.get(), t, &r), "reading round");
    out << t + 1 << ',' << r.label << ',' << r.prediction << ',' << fmt(r.score) << ','
        << kind_name(r.kind) << ',' << r.cumulative_mistakes << '\n';
  }
  out.flush();

  forks_run_summary s;
  forks_result_summary(res.get(), &s);
  std::ostringstream line;
  line << o.algorithm << ',' << seed << ',' << fmt(bandwidth) << ',' << s.rounds << ','
       << s.mistakes << ',' << fmt(s.mistake_rate) << ',' << fmt(s.seconds_filling) << ','
       << fmt(s.seconds_update) << ',' << fmt(s.seconds_regular) << ',' << s.anchors << ','
       << s.resolved.budget << ',' << s.resolved.sketch_size << ',' << s.resolved.sample_size << ','
       << s.resolved.rank << ',' << s.resolved.blocks << ',' << s.resolved.update_cycle << ','
       << s.resolved.fogd_features << '\n';
  const char* header =
      "algorithm,seed,bandwidth,rounds,mistakes,mistake_rate,seconds_filling,seconds_update,"
      "seconds_regular,anchors,budget,sketch_size,sample_size,rank,blocks,update_cycle,"
      "fogd_features\n";
  if (summary_path.empty()) {
    std::cerr << header << line.str();
  } else {
    std::ofstream sfile;
    std::ostream& sout = open_out(summary_path, sfile);
    sout << header << line.str();
  }
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw Failure("bad seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw Failure("bad seed list '" + spec + "'");
    }
  }
  if (seeds.empty()) throw Failure("empty seed list");
  return seeds;
}

struct SweepCell {
  std::string algorithm;
  std::size_t budget = 0;
  double bandwidth = 0.0;
  std::vector<double> rates;
  std::vector<double> seconds;
  std::vector<double> anchors;
  std::vector<std::string> errors;
};

int cmd_sweep(const Options& o, const std::vector<std::string>& algorithms,
              const std::vector<std::size_t>& budgets, const std::string& seed_spec,
              unsigned jobs, const std::string& out_path) {
  const DatasetPtr ds = load(o);
  const std::vector<std::uint64_t> seeds = parse_seeds(seed_spec);

  std::vector<SweepCell> cells;
  for (const auto& name : algorithms) {
    const forks_algorithm algo = kAlgorithms.at(name);
    for (const std::size_t b : budgets) {
      std::vector<double> sigmas = o.bandwidths;
      std::string selection_error;
      if (o.sigma_grid) {
        try {
          sigmas = {choose_bandwidth(o, ds.get(), algo, b)};
        } catch (const Failure& e) {
          sigmas = {std::nan("")};
          selection_error = e.what();
        }
      }
      for (const double s : sigmas) {
        SweepCell cell{name, b, s, {}, {}, {}, {}};
        if (!selection_error.empty()) cell.errors.push_back(selection_error);
        cells.push_back(std::move(cell));
      }
    }
  }

  struct Job {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Job> queue;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!cells[c].errors.empty()) continue;
    for (const auto s : seeds) queue.push_back({c, s});
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < queue.size(); j = next++) {
      SweepCell& cell = cells[queue[j].cell];
      const forks_run_config c =
          make_config(o, kAlgorithms.at(cell.algorithm), cell.budget, cell.bandwidth, queue[j].seed);
      forks_run_result* raw = nullptr;
      const forks_status st = forks_run(&c, ds.get(), &raw);
      const std::string err = st == FORKS_OK ? "" : forks_last_error();
      const ResultPtr res(raw, &forks_result_free);
      forks_run_summary s{};
      if (st == FORKS_OK) forks_result_summary(res.get(), &s);
      const std::lock_guard<std::mutex> lock(mu);
      if (st != FORKS_OK) {
        cell.errors.push_back("seed " + std::to_string(queue[j].seed) + ": " + err);
      } else {
        cell.rates.push_back(s.mistake_rate);
        cell.seconds.push_back(s.seconds_filling + s.seconds_update + s.seconds_regular);
        cell.anchors.push_back(static_cast<double>(s.anchors));
      }
    }
  };
  jobs = std::max(1u, jobs);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
  };
  // Sample standard deviation; zero for a single run.
  auto stdev = [&](const std::vector<double>& v) {
    if (v.size() < 2) return v.empty() ? std::nan("") : 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  out << "algorithm,budget,bandwidth,runs,failed,mean_rate,std_rate,mean_seconds,mean_anchors,error\n";
  bool any_failed = false;
  for (const auto& c : cells) {
    std::string err = c.errors.empty() ? "" : c.errors.front();
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    any_failed = any_failed || !c.errors.empty();
    out << c.algorithm << ',' << c.budget << ',' << fmt(c.bandwidth) << ',' << c.rates.size() << ','
        << c.errors.size() << ',' << fmt(mean(c.rates)) << ',' << fmt(stdev(c.rates)) << ','
        << fmt(mean(c.seconds)) << ',' << fmt(mean(c.anchors)) << ',' << err << '\n';
  }
  return any_failed ? 3 : 0;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t rank, std::size_t steps,
              std::uint64_t seed, const std::string& out_path) {
  std::ofstream file;
  std::ostream& out = open_out(out_path, file);
  out << "sketch_size,rank,steps,tisvd_us,dense_us,speedup,tisvd_error,dense_error,error_gap\n";
  for (const std::size_t sp : sizes) {
    forks_tisvd_bench b;
    check(forks_bench_tisvd(sp, std::min(rank, sp), steps, seed, &b), "bench-tisvd");
    out << b.sketch_size << ',' << b.rank << ',' << b.steps << ',' << fmt(b.tisvd_us) << ','
        << fmt(b.dense_us) << ',' << fmt(b.dense_us / b.tisvd_us) << ',' << fmt(b.tisvd_error) << ','
        << fmt(b.dense_error) << ',' << fmt(b.tisvd_error - b.dense_error) << '\n';
    out.flush();
  }
  return 0;
}

int cmd_gen_adversarial(const Options& o, std::size_t blocks, std::size_t repeats,
                        std::uint64_t seed, const std::string& out_path) {
  const DatasetPtr ds = load(o);
  forks_dataset* raw = nullptr;
  check(forks_dataset_adversarial(ds.get(), blocks, repeats, seed, &raw), "gen-adversarial");
  const DatasetPtr adv = wrap(raw);
  check(forks_dataset_save(adv.get(), out_path.c_str()), "writing " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online kernel learning benchmark harness"};
  app.set_config("--config", "", "key = value configuration file");
  app.require_subcommand(1);
  app.set_version_flag("--version", forks_version());

  Options run_opts;
  std::uint64_t run_seed = 0;
  std::string rounds_path = "-";
  std::string summary_path;
  auto* run = app.add_subcommand("run", "run one learner over one stream");
  add_learning_options(*run, run_opts, false);
  run->add_option("--seed", run_seed, "stream and learner seed");
  run->add_option("--rounds", rounds_path, "per-round CSV ('-' for stdout)");
  run->add_option("--summary", summary_path, "summary CSV (default: stderr)");

  Options sweep_opts;
  std::vector<std::string> algorithms{"forks"};
  std::vector<std::size_t> budgets{50};
  std::string seed_spec = "1-20";
  unsigned jobs = 1;
  std::string sweep_out = "-";
  auto* sweep = app.add_subcommand("sweep", "runs over algorithms x budgets x bandwidths x seeds");
  add_learning_options(*sweep, sweep_opts, true);
  sweep->add_option("--algorithms", algorithms)->check(CLI::IsMember({"forks", "kogd", "fogd"}));
  sweep->add_option("--budgets", budgets);
  sweep->add_option("--seeds", seed_spec, "e.g. 1-20 or 1,4,9");
  sweep->add_option("--jobs", jobs, "parallel runs");
  sweep->add_option("--out", sweep_out, "aggregate CSV ('-' for stdout)");

  std::vector<std::size_t> bench_sizes{128, 512};
  std::size_t bench_rank = 32;
  std::size_t bench_steps = 500;
  std::uint64_t bench_seed = 0;
  std::string bench_out = "-";
  auto* bench = app.add_subcommand("bench-tisvd", "time TISVD against dense truncated eigendecomposition");
  bench->add_option("--sketch-sizes", bench_sizes);
  bench->add_option("--rank", bench_rank);
  bench->add_option("--steps", bench_steps)->check(CLI::Range(std::size_t{100}, std::size_t{1} << 30));
  bench->add_option("--seed", bench_seed);
  bench->add_option("--out", bench_out);

  Options adv_opts;
  std::size_t adv_blocks = 500;
  std::size_t adv_repeats = 10;
  std::uint64_t adv_seed = 0;
  std::string adv_out;
  auto* adv = app.add_subcommand("gen-adversarial", "write a block-repeated, label-flipped stream");
  adv->add_option("--data", adv_opts.data)->required();
  adv->add_flag("--scale", adv_opts.scale);
  adv->add_option("--blocks", adv_blocks);
  adv->add_option("--repeats", adv_repeats);
  adv->add_option("--seed", adv_seed);
  adv->add_option("--out", adv_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts, run_seed, rounds_path, summary_path);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, algorithms, budgets, seed_spec, jobs, sweep_out);
    if (bench->parsed()) return cmd_bench(bench_sizes, bench_rank, bench_steps, bench_seed, bench_out);
    if (adv->parsed()) return cmd_gen_adversarial(adv_opts, adv_blocks, adv_repeats, adv_seed, adv_out);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
