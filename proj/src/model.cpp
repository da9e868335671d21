#include "assort/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "assort/error.hpp"

namespace assort {

using nlohmann::json;

LinearConstraint LinearConstraint::cardinality(int m, double capacity) {
  return LinearConstraint{std::vector<double>(std::size_t(m), 1.0), capacity};
}

bool LinearConstraint::is_cardinality() const {
  return std::all_of(beta.begin(), beta.end(), [](double b) { return b == 1.0; });
}

Instance::Instance(std::vector<double> rho, std::vector<double> v0, std::vector<double> v,
                   std::vector<double> r, std::vector<LinearConstraint> constraints)
    : rho_(std::move(rho)),
      v0_(std::move(v0)),
      v_(std::move(v)),
      r_(std::move(r)),
      constraints_(std::move(constraints)) {
  n_ = int(rho_.size());
  if (n_ < 1) throw InputError("instance needs at least one customer class");
  if (v0_.size() != rho_.size()) throw InputError("v0 must have one entry per class");
  if (v_.size() % std::size_t(n_) != 0) throw InputError("v must be n x m");
  m_ = int(v_.size() / std::size_t(n_));
  if (r_.size() != v_.size()) throw InputError("r must have the same shape as v");

  double rho_sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (!(rho_[i] >= 0.0) || !std::isfinite(rho_[i])) throw InputError("rho must be finite and >= 0");
    if (!(v0_[i] > 0.0) || !std::isfinite(v0_[i])) throw InputError("v0 must be finite and > 0");
    rho_sum += rho_[i];
  }
  if (!(rho_sum > 0.0)) throw InputError("rho must have a positive sum");
  for (double x : v_)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("v must be finite and >= 0");
  for (double x : r_)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("r must be finite and >= 0");
  for (const auto& c : constraints_) {
    if (int(c.beta.size()) != m_) throw InputError("constraint beta must have one entry per product");
    for (double b : c.beta)
      if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("constraint beta must be finite and >= 0");
    if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw InputError("constraint alpha must be finite and > 0");
  }

  r_max_.assign(std::size_t(n_), 0.0);
  r_shift_.assign(r_.size(), 0.0);
  for (int i = 0; i < n_; ++i) {
    auto row = r_row(i);
    r_max_[i] = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    for (int j = 0; j < m_; ++j) r_shift_[idx(i, j)] = r_max_[i] - row[j];
    revenue_constant_ += rho_[i] * r_max_[i];
  }
  if (!r_.empty()) {
    auto [lo, hi] = std::minmax_element(r_.begin(), r_.end());
    price_min_ = *lo;
    price_max_ = *hi;
  }
}

std::optional<double> Instance::single_cardinality() const {
  if (constraints_.size() == 1 && constraints_.front().is_cardinality()) return constraints_.front().alpha;
  return std::nullopt;
}

bool Instance::cardinality_only() const {
  return std::all_of(constraints_.begin(), constraints_.end(),
                     [](const LinearConstraint& c) { return c.is_cardinality(); });
}

void check_dimension(const Instance& inst, std::span<const std::uint8_t> x) {
  if (int(x.size()) != inst.products())
    throw InputError("assortment has " + std::to_string(x.size()) + " entries, instance has " +
                     std::to_string(inst.products()) + " products");
}

bool is_feasible(const Instance& inst, std::span<const std::uint8_t> x) {
  check_dimension(inst, x);
  for (const auto& c : inst.constraints()) {
    double load = 0.0;
    for (int j = 0; j < inst.products(); ++j)
      if (x[j]) load += c.beta[j];
    // Relative slack keeps alpha = sum of chosen betas feasible.
    if (load > c.alpha + 1e-9 * std::max(1.0, c.alpha)) return false;
  }
  return true;
}

double eval_revenue(const Instance& inst, std::span<const std::uint8_t> x) {
  check_dimension(inst, x);
  double total = 0.0;
  for (int i = 0; i < inst.classes(); ++i) {
    auto v = inst.v_row(i);
    auto r = inst.r_row(i);
    double num = 0.0, den = inst.v0(i);
    for (int j = 0; j < inst.products(); ++j) {
      if (!x[j]) continue;
      num += r[j] * v[j];
      den += v[j];
    }
    total += inst.rho(i) * num / den;
  }
  return total;
}

double eval_min_objective(const Instance& inst, std::span<const std::uint8_t> x) {
  check_dimension(inst, x);
  double total = 0.0;
  for (int i = 0; i < inst.classes(); ++i) {
    auto v = inst.v_row(i);
    double num = inst.r_max(i) * inst.v0(i), den = inst.v0(i);
    for (int j = 0; j < inst.products(); ++j) {
      if (!x[j]) continue;
      num += inst.r_shift(i, j) * v[j];
      den += v[j];
    }
    total += inst.rho(i) * num / den;
  }
  return total;
}

double eval_psi(const Instance& inst, int i, std::span<const double> x) {
  if (int(x.size()) != inst.products()) throw InputError("point has wrong dimension");
  auto v = inst.v_row(i);
  double psi = inst.v0(i);
  for (int j = 0; j < inst.products(); ++j) psi += v[j] * x[j];
  return psi;
}

double eval_phi(const Instance& inst, int i, std::span<const double> x) { return 1.0 / eval_psi(inst, i, x); }

double eval_psi(const Instance& inst, int i, std::span<const std::uint8_t> x) {
  check_dimension(inst, x);
  auto v = inst.v_row(i);
  double psi = inst.v0(i);
  for (int j = 0; j < inst.products(); ++j)
    if (x[j]) psi += v[j];
  return psi;
}

double eval_phi(const Instance& inst, int i, std::span<const std::uint8_t> x) {
  return 1.0 / eval_psi(inst, i, x);
}

double eval_unit_revenue(const Instance& inst, std::span<const std::uint8_t> x) {
  check_dimension(inst, x);
  double total = 0.0;
  for (int i = 0; i < inst.classes(); ++i) {
    double psi = eval_psi(inst, i, x);
    total += inst.rho(i) * (psi - inst.v0(i)) / psi;
  }
  return total;
}

Assortment assortment_from_subset(int m, std::span<const int> subset) {
  Assortment x(std::size_t(m), 0);
  for (int j : subset) {
    if (j < 0 || j >= m) throw InputError("product index out of range");
    x[j] = 1;
  }
  return x;
}

std::vector<int> subset_from_assortment(std::span<const std::uint8_t> x) {
  std::vector<int> s;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j]) s.push_back(int(j));
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!ok) throw InputError(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

std::vector<double> real_array(const json& a, std::size_t expected, const char* what) {
  if (!a.is_array()) throw InputError(std::string(what) + " must be an array");
  if (a.size() != expected)
    throw InputError(std::string(what) + " has " + std::to_string(a.size()) + " entries, expected " +
                     std::to_string(expected));
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& e : a) {
    if (!e.is_number()) throw InputError(std::string(what) + " must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> matrix(const json& a, std::size_t n, std::size_t m, const char* what) {
  if (!a.is_array() || a.size() != n) throw InputError(std::string(what) + " must have n rows");
  std::vector<double> out;
  out.reserve(n * m);
  for (const auto& row : a) {
    auto vals = real_array(row, m, what);
    out.insert(out.end(), vals.begin(), vals.end());
  }
  return out;
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw InputError(std::string("missing key '") + key + "'");
  return *it;
}

}  // namespace

Instance instance_from_json(const json& doc, const LoadOptions& opts) {
  if (!doc.is_object()) throw InputError("instance document must be a JSON object");
  reject_unknown_keys(doc, {"n", "m", "rho", "v0", "v", "r", "constraints"}, "instance");
  const json& jn = require(doc, "n");
  const json& jm = require(doc, "m");
  if (!jn.is_number_integer() || !jm.is_number_integer()) throw InputError("n and m must be integers");
  const long long n = jn.get<long long>();
  const long long m = jm.get<long long>();
  if (n < 1 || m < 0) throw InputError("need n >= 1 and m >= 0");

  auto rho = real_array(require(doc, "rho"), std::size_t(n), "rho");
  auto v0 = real_array(require(doc, "v0"), std::size_t(n), "v0");
  auto v = matrix(require(doc, "v"), std::size_t(n), std::size_t(m), "v");
  auto r = matrix(require(doc, "r"), std::size_t(n), std::size_t(m), "r");

  std::vector<LinearConstraint> constraints;
  if (auto it = doc.find("constraints"); it != doc.end()) {
    if (!it->is_array()) throw InputError("constraints must be an array");
    for (const auto& c : *it) {
      if (!c.is_object()) throw InputError("each constraint must be an object");
      if (c.contains("cardinality")) {
        reject_unknown_keys(c, {"cardinality"}, "cardinality constraint");
        if (!c["cardinality"].is_number()) throw InputError("cardinality must be a number");
        constraints.push_back(LinearConstraint::cardinality(int(m), c["cardinality"].get<double>()));
      } else {
        reject_unknown_keys(c, {"beta", "alpha"}, "constraint");
        const json& alpha = require(c, "alpha");
        if (!alpha.is_number()) throw InputError("alpha must be a number");
        constraints.push_back({real_array(require(c, "beta"), std::size_t(m), "beta"), alpha.get<double>()});
      }
    }
  }

  if (opts.normalize_rho) {
    double s = std::accumulate(rho.begin(), rho.end(), 0.0);
    if (s > 0.0)
      for (double& x : rho) x /= s;
  }
  return Instance(std::move(rho), std::move(v0), std::move(v), std::move(r), std::move(constraints));
}

json instance_to_json(const Instance& inst) {
  const int n = inst.classes(), m = inst.products();
  json doc;
  doc["n"] = n;
  doc["m"] = m;
  doc["rho"] = std::vector<double>(inst.rho().begin(), inst.rho().end());
  doc["v0"] = std::vector<double>(inst.v0().begin(), inst.v0().end());
  json v = json::array(), r = json::array();
  for (int i = 0; i < n; ++i) {
    v.push_back(std::vector<double>(inst.v_row(i).begin(), inst.v_row(i).end()));
    r.push_back(std::vector<double>(inst.r_row(i).begin(), inst.r_row(i).end()));
  }
  doc["v"] = std::move(v);
  doc["r"] = std::move(r);
  json cons = json::array();
  for (const auto& c : inst.constraints()) {
    if (c.is_cardinality() && m > 0)
      cons.push_back({{"cardinality", c.alpha}});
    else
      cons.push_back({{"alpha", c.alpha}, {"beta", c.beta}});
  }
  doc["constraints"] = std::move(cons);
  return doc;
}

Instance load_instance(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed instance file " + path.string() + ": " + e.what());
  }
  return instance_from_json(doc, opts);
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write instance file " + path.string());
  out << instance_to_json(inst).dump(1) << '\n';
}

}  // namespace assort
