#include "assort/genbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "assort/error.hpp"
#include "assort/highs_backend.hpp"
#include "assort/oracle.hpp"

namespace assort {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::pair<double, double>> pairs(std::initializer_list<std::pair<double, double>> p) { return p; }

FamilySpec sen_cardinality(std::string name, int n, int m, std::vector<double> v0, std::vector<double> caps) {
  FamilySpec s;
  s.name = std::move(name);
  s.n = n;
  s.m = m;
  s.v0_choices = std::move(v0);
  s.capacities = std::move(caps);
  return s;
}

FamilySpec with_subsets(FamilySpec s, std::string name, int subsets, std::vector<std::pair<double, double>> p) {
  s.name = std::move(name);
  s.scheme = ConstraintScheme::Subsets;
  s.capacities.clear();
  s.subsets = subsets;
  s.pairs = std::move(p);
  return s;
}

FamilySpec graph_family() {
  FamilySpec s;
  s.name = "Sen_100_100";
  s.n = 100;
  s.m = 100;
  s.revenue = RevenueScheme::PerEntry;
  s.utility = UtilityScheme::Graph;
  s.rho = RhoScheme::Uniform01;
  s.v0_choices = {1, 2};
  s.capacities = {10, 20, 50, 100};
  return s;
}

FamilySpec family_1000_100() {
  FamilySpec s;
  s.name = "1000_100";
  s.n = 100;
  s.m = 1000;
  s.revenue = RevenueScheme::PerEntry;
  s.utility = UtilityScheme::Uniform01;
  s.rho = RhoScheme::Uniform01;
  s.v0_choices = {10, 20};
  s.capacities = {25, 50, 100, 250, 500};
  return s;
}

FamilySpec large_customer(std::string name, int m, int n, std::vector<double> v0) {
  FamilySpec s;
  s.name = std::move(name);
  s.n = n;
  s.m = m;
  s.revenue = RevenueScheme::PerEntry;
  s.utility = UtilityScheme::Uniform01;
  s.rho = RhoScheme::Equal;
  s.v0_choices = std::move(v0);
  s.scheme = ConstraintScheme::General;
  s.capacities = {10, 20, 50};
  return s;
}

// Uniform double in [lo, hi) from the top 53 bits of one draw; portable
// across standard libraries, unlike std::uniform_real_distribution.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = double(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

std::vector<std::string> family_names() {
  return {"Sen_200_20", "Sen_500_50", "Sen_100_100", "Sen_200_20_5", "200_20_10", "500_50_5",
          "500_50_10",  "100_100_5",  "100_100_10",  "1000_100",     "1000_100_5", "1000_100_10",
          "100_1000",   "200_2000",   "200_4000",    "100_5000"};
}

FamilySpec family_spec(const std::string& name) {
  const auto sen200 = sen_cardinality("Sen_200_20", 20, 200, {5, 10}, {10, 20, 50, 100, 200});
  const auto sen500 = sen_cardinality("Sen_500_50", 50, 500, {10, 20}, {20, 50, 100, 200, 500});
  if (name == "Sen_200_20") return sen200;
  if (name == "Sen_500_50") return sen500;
  if (name == "Sen_100_100") return graph_family();
  if (name == "Sen_200_20_5" || name == "200_20_10") {
    auto base = sen200;
    base.v0_choices = {10, 20};
    if (name == "Sen_200_20_5") return with_subsets(base, name, 5, pairs({{5, 2}, {10, 4}, {25, 10}, {50, 20}, {100, 40}}));
    return with_subsets(base, name, 10, pairs({{5, 2}, {10, 4}, {25, 10}, {50, 20}}));
  }
  if (name == "500_50_5") return with_subsets(sen500, name, 5, pairs({{10, 4}, {25, 10}, {50, 20}, {125, 50}, {250, 100}}));
  if (name == "500_50_10") return with_subsets(sen500, name, 10, pairs({{5, 2}, {10, 4}, {25, 10}, {50, 20}, {125, 50}}));
  if (name == "100_100_5") return with_subsets(graph_family(), name, 5, pairs({{5, 2}, {10, 4}, {25, 10}, {50, 20}}));
  if (name == "100_100_10") return with_subsets(graph_family(), name, 10, pairs({{5, 2}, {10, 4}, {25, 10}}));
  if (name == "1000_100") return family_1000_100();
  if (name == "1000_100_5")
    return with_subsets(family_1000_100(), name, 5, pairs({{25, 10}, {50, 20}, {125, 50}, {250, 100}, {500, 200}}));
  if (name == "1000_100_10")
    return with_subsets(family_1000_100(), name, 10, pairs({{10, 4}, {25, 10}, {50, 20}, {125, 50}, {250, 100}}));
  if (name == "100_1000") return large_customer(name, 100, 1000, {1, 2});
  if (name == "200_2000") return large_customer(name, 200, 2000, {5, 10});
  if (name == "200_4000") return large_customer(name, 200, 4000, {5, 10});
  if (name == "100_5000") return large_customer(name, 100, 5000, {1, 2});
  throw InputError("unknown family '" + name + "'");
}

FamilySpec resize(FamilySpec spec, int n, int m) {
  if (n < 1 || m < 1) throw InputError("family sizes must be positive");
  spec.n = n;
  spec.m = m;
  return spec;
}

std::vector<Cell> family_cells(const FamilySpec& spec) {
  std::vector<Cell> out;
  for (double v0 : spec.v0_choices) {
    if (spec.scheme == ConstraintScheme::Subsets)
      for (const auto& [alpha, ck] : spec.pairs) out.push_back({v0, alpha, ck});
    else
      for (double c : spec.capacities) out.push_back({v0, c, 0.0});
  }
  return out;
}

Instance generate(const FamilySpec& spec, const Cell& cell, std::uint64_t seed) {
  const int n = spec.n, m = spec.m;
  if (n < 1 || m < 1) throw InputError("family sizes must be positive");
  if (!(cell.v0 > 0.0) || !(cell.capacity > 0.0)) throw InputError("cell needs v0 > 0 and capacity > 0");
  std::mt19937_64 rng(seed);
  const std::size_t nm = std::size_t(n) * std::size_t(m);

  std::vector<double> rho(std::size_t(n), 1.0 / n);
  if (spec.rho == RhoScheme::Uniform01)
    for (auto& p : rho) p = uniform(rng, 0.0, 1.0);

  std::vector<double> r(nm);
  if (spec.revenue == RevenueScheme::PerProduct) {
    std::vector<double> price(static_cast<std::size_t>(m));
    for (auto& p : price) p = uniform(rng, 1.0, 3.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) r[std::size_t(i) * std::size_t(m) + std::size_t(j)] = price[std::size_t(j)];
  } else {
    for (auto& x : r) x = uniform(rng, 1.0, 3.0);
  }

  std::vector<double> v(nm, 0.0);
  switch (spec.utility) {
    case UtilityScheme::Uniform12:
      for (auto& x : v) x = uniform(rng, 1.0, 2.0);
      break;
    case UtilityScheme::Uniform01:
      for (auto& x : v) x = uniform(rng, 0.0, 1.0);
      break;
    case UtilityScheme::Graph: {
      // Undirected graph on max(n, m) vertices without self-loops; class i
      // values product j when {i, j} is an edge.
      const int V = std::max(n, m);
      std::vector<std::uint8_t> edge(std::size_t(V) * std::size_t(V), 0);
      for (int a = 0; a < V; ++a)
        for (int b = a + 1; b < V; ++b)
          if (uniform(rng, 0.0, 1.0) < spec.edge_probability)
            edge[std::size_t(a) * std::size_t(V) + std::size_t(b)] = edge[std::size_t(b) * std::size_t(V) + std::size_t(a)] = 1;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
          if (edge[std::size_t(i) * std::size_t(V) + std::size_t(j)])
            v[std::size_t(i) * std::size_t(m) + std::size_t(j)] = uniform(rng, 1.0, 2.0);
      break;
    }
  }

  std::vector<LinearConstraint> cons;
  switch (spec.scheme) {
    case ConstraintScheme::Cardinality:
      cons.push_back(LinearConstraint::cardinality(m, cell.capacity));
      break;
    case ConstraintScheme::General:
    case ConstraintScheme::Subsets: {
      LinearConstraint general;
      general.alpha = cell.capacity;
      general.beta.resize(static_cast<std::size_t>(m));
      for (auto& b : general.beta) b = uniform(rng, 0.0, 1.0);
      cons.push_back(std::move(general));
      if (spec.scheme == ConstraintScheme::Subsets) {
        // Contiguous blocks of near-equal size.
        const int K = std::clamp(spec.subsets, 1, m);
        for (int k = 0; k < K; ++k) {
          LinearConstraint sub;
          sub.alpha = cell.subset_capacity;
          sub.beta.assign(std::size_t(m), 0.0);
          const int first = int(std::int64_t(m) * k / K), last = int(std::int64_t(m) * (k + 1) / K);
          for (int j = first; j < last; ++j) sub.beta[std::size_t(j)] = 1.0;
          cons.push_back(std::move(sub));
        }
      }
      break;
    }
  }

  std::vector<double> v0(std::size_t(n), cell.v0);
  return Instance(std::move(rho), std::move(v0), std::move(v), std::move(r), std::move(cons));
}

std::string instance_id(const FamilySpec& spec, const Cell& cell, std::uint64_t seed) {
  std::string id = spec.name + "_v" + num(cell.v0);
  if (spec.scheme == ConstraintScheme::Subsets) id += "_a" + num(cell.capacity) + "_k" + num(cell.subset_capacity);
  else if (spec.scheme == ConstraintScheme::General) id += "_a" + num(cell.capacity);
  else id += "_c" + num(cell.capacity);
  return id + "_s" + std::to_string(seed);
}

std::vector<GeneratedInstance> generate_family(const FamilySpec& spec, std::uint64_t base_seed) {
  std::vector<GeneratedInstance> out;
  std::uint64_t seed = base_seed;
  for (const auto& cell : family_cells(spec))
    for (int k = 0; k < spec.instances_per_cell; ++k, ++seed)
      out.push_back({instance_id(spec, cell, seed), spec.name, generate(spec, cell, seed)});
  return out;
}

std::vector<std::filesystem::path> save_instances(const std::vector<GeneratedInstance>& set,
                                                  const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& g : set) {
    const auto folder = dir / g.family;
    std::filesystem::create_directories(folder);
    const auto path = folder / (g.id + ".json");
    save_instance(g.instance, path);
    paths.push_back(path);
  }
  return paths;
}

// ---------------------------------------------------------------------------

std::string v0_label(const Instance& inst) {
  const double first = inst.v0(0);
  for (int i = 1; i < inst.classes(); ++i)
    if (inst.v0(i) != first) return "mixed";
  return num(first);
}

std::string alpha_label(const Instance& inst) {
  // Distinct right-hand sides in order of appearance, e.g. "25/10".
  std::vector<std::string> seen;
  for (const auto& c : inst.constraints()) {
    const std::string a = num(c.alpha);
    if (std::find(seen.begin(), seen.end(), a) == seen.end()) seen.push_back(a);
  }
  if (seen.empty()) return "none";
  std::string label = seen.front();
  for (std::size_t k = 1; k < seen.size(); ++k) label += "/" + seen[k];
  return label;
}

namespace {

BenchmarkRecord run_one(const GeneratedInstance& g, const SolveConfig& cfg, const std::string& backend_name) {
  BenchmarkRecord rec;
  rec.instance = g.id;
  rec.family = g.family;
  rec.v0 = v0_label(g.instance);
  rec.alpha = alpha_label(g.instance);
  rec.method = to_string(cfg.method);
  rec.master = to_string(cfg.master);
  rec.cuts = to_string(cfg.cuts);
  rec.segments = cfg.segments;
  try {
    auto backend = make_backend(backend_name, cfg.threads);
    auto res = solve(g.instance, cfg, *backend);
    rec.master = res.master_used;
    rec.status = to_string(res.status);
    rec.objective = res.objective;
    rec.bound = res.bound;
    rec.gap = res.gap;
    rec.time_s = res.wall_time;
    rec.iterations = res.iterations;
    rec.nodes = res.nodes;
    rec.cuts_added = res.cuts_added;
  } catch (const UnsupportedError& e) {
    rec.status = e.code();
  } catch (const std::exception&) {
    rec.status = "error";
  }
  return rec;
}

struct Job {
  const GeneratedInstance* instance;
  SolveConfig config;
};

std::vector<BenchmarkRecord> run_jobs(const std::vector<Job>& jobs, const std::string& backend, int workers) {
  std::vector<BenchmarkRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();)
      out[k] = run_one(*jobs[k].instance, jobs[k].config, backend);
  };
  const int w = std::max(1, std::min<int>(workers, int(jobs.size())));
  if (w == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<BenchmarkRecord> run_benchmark(const std::vector<GeneratedInstance>& instances,
                                           const std::vector<SolveConfig>& configs, double time_limit,
                                           const std::string& backend, int workers) {
  std::vector<Job> jobs;
  for (const auto& g : instances)
    for (auto cfg : configs) {
      if (time_limit > 0.0) cfg.time_limit = time_limit;
      jobs.push_back({&g, cfg});
    }
  return run_jobs(jobs, backend, workers);
}

std::vector<BenchmarkRecord> sweep_segments(const std::vector<GeneratedInstance>& instances,
                                            const std::vector<int>& segments, const SolveConfig& base,
                                            double time_limit, const std::string& backend, int workers) {
  std::vector<Job> jobs;
  for (const auto& g : instances)
    for (int L : segments) {
      if (L < 1 || L > g.instance.classes()) continue;
      for (Method method : {Method::CP, Method::BC}) {
        SolveConfig cfg = base;
        cfg.method = method;
        cfg.segments = L;
        if (time_limit > 0.0) cfg.time_limit = time_limit;
        jobs.push_back({&g, cfg});
      }
    }
  return run_jobs(jobs, backend, workers);
}

void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << kResultsSchema << '\n'
      << "instance,family,v0,alpha,method,master,cuts,L,status,objective,bound,gap,time_s,iterations,nodes,cuts_added\n";
  for (const auto& r : records)
    out << csv_field(r.instance) << ',' << csv_field(r.family) << ',' << csv_field(r.v0) << ',' << csv_field(r.alpha)
        << ',' << r.method << ',' << csv_field(r.master) << ',' << r.cuts << ',' << r.segments << ',' << r.status << ','
        << num(r.objective) << ',' << num(r.bound) << ',' << num(r.gap) << ',' << num(r.time_s) << ',' << r.iterations
        << ',' << r.nodes << ',' << r.cuts_added << '\n';
}

std::vector<BenchmarkRecord> read_records_csv(std::istream& in) {
  std::vector<BenchmarkRecord> out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    auto f = split_csv(line);
    if (f.size() != 16) throw InputError("results row has " + std::to_string(f.size()) + " fields, expected 16");
    BenchmarkRecord r;
    r.instance = f[0];
    r.family = f[1];
    r.v0 = f[2];
    r.alpha = f[3];
    r.method = f[4];
    r.master = f[5];
    r.cuts = f[6];
    r.segments = std::stoi(f[7]);
    r.status = f[8];
    r.objective = std::stod(f[9]);
    r.bound = std::stod(f[10]);
    r.gap = std::stod(f[11]);
    r.time_s = std::stod(f[12]);
    r.iterations = std::stol(f[13]);
    r.nodes = std::stol(f[14]);
    r.cuts_added = std::stol(f[15]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CellSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string, std::string, std::string, std::string, int>;
  std::map<Key, std::size_t> index;
  std::vector<CellSummary> cells;
  std::vector<double> time_sum;
  for (const auto& r : records) {
    Key key{r.family, r.v0, r.alpha, r.method, r.master, r.cuts, r.segments};
    auto [it, fresh] = index.emplace(key, cells.size());
    if (fresh) {
      cells.push_back({r.family, r.v0, r.alpha, r.method, r.master, r.cuts, r.segments, 0, 0, std::nullopt});
      time_sum.push_back(0.0);
    }
    auto& c = cells[it->second];
    ++c.runs;
    if (r.status == "optimal") {
      ++c.solved;
      time_sum[it->second] += r.time_s;
    }
  }
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (cells[k].solved > 0) cells[k].mean_time_solved = time_sum[k] / cells[k].solved;
  return cells;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "# assort-summary v1 (mean_time_s over solved runs only)\n"
      << "family,v0,alpha,method,master,cuts,L,runs,solved,mean_time_s\n";
  for (const auto& c : cells)
    out << csv_field(c.family) << ',' << csv_field(c.v0) << ',' << csv_field(c.alpha) << ',' << c.method << ','
        << csv_field(c.master) << ',' << c.cuts << ',' << c.segments << ',' << c.runs << ',' << c.solved << ','
        << (c.mean_time_solved ? num(*c.mean_time_solved) : "-") << '\n';
}

// ---------------------------------------------------------------------------

std::vector<GeneratedInstance> ratio_instances(int count, int n, int m, int capacity, std::uint64_t seed) {
  if (m < 2) throw InputError("ratio instances need at least two products");
  std::vector<GeneratedInstance> out;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t s = seed + std::uint64_t(k);
    std::mt19937_64 rng(s);
    const double q = uniform(rng, 0.25, 0.9);
    const double r_max = 3.0, r_min = q * r_max;
    std::vector<double> price(static_cast<std::size_t>(m));
    for (auto& p : price) p = uniform(rng, r_min, r_max);
    price[0] = r_min;
    price[1] = r_max;
    const double v0 = uniform(rng, 0.0, 1.0) < 0.5 ? 5.0 : 10.0;
    std::vector<double> v(std::size_t(n) * std::size_t(m)), r(v.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        v[std::size_t(i) * std::size_t(m) + std::size_t(j)] = uniform(rng, 1.0, 2.0);
        r[std::size_t(i) * std::size_t(m) + std::size_t(j)] = price[std::size_t(j)];
      }
    Instance inst(std::vector<double>(std::size_t(n), 1.0 / n), std::vector<double>(std::size_t(n), v0), std::move(v),
                  std::move(r), {LinearConstraint::cardinality(m, capacity)});
    out.push_back({"ratio_n" + std::to_string(n) + "_m" + std::to_string(m) + "_c" + std::to_string(capacity) + "_s" +
                       std::to_string(s),
                   "ratio", std::move(inst)});
  }
  return out;
}

std::vector<RatioRow> ratio_experiment(const std::vector<GeneratedInstance>& instances) {
  std::vector<RatioRow> rows;
  for (const auto& g : instances) {
    const auto& inst = g.instance;
    RatioRow row;
    row.instance = g.id;
    row.n = inst.classes();
    row.m = inst.products();
    row.capacity = inst.single_cardinality() ? int(std::floor(*inst.single_cardinality() + 1e-9)) : row.m;
    row.price_ratio = inst.price_max() > 0.0 ? inst.price_min() / inst.price_max() : 1.0;
    row.greedy = greedy_family(inst).objective;
    row.optimum = brute_force(inst).objective;
    row.ratio = row.optimum > 0.0 ? row.greedy / row.optimum : 1.0;
    row.bound = approximation_bound(inst);
    rows.push_back(row);
  }
  return rows;
}

void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows) {
  out << "# assort-ratio v1\n"
      << "instance,n,m,capacity,price_ratio,greedy,optimum,ratio,bound\n";
  for (const auto& r : rows)
    out << csv_field(r.instance) << ',' << r.n << ',' << r.m << ',' << r.capacity << ',' << num(r.price_ratio) << ','
        << num(r.greedy) << ',' << num(r.optimum) << ',' << num(r.ratio) << ',' << num(r.bound) << '\n';
}

}  // namespace assort
