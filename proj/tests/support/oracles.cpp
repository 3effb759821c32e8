#include "oracles.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fftw3.h>

namespace oracle {

std::vector<double> precise_log_diffs(std::span<const double> values) {
  using big = boost::multiprecision::cpp_bin_float_50;
  std::vector<double> out;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const big d = log(big(values[i])) - log(big(values[i - 1]));
    out.push_back(d.convert_to<double>());
  }
  return out;
}

std::vector<double> circulant_gaussian(std::size_t n, const std::function<double(std::size_t)>& r,
                                       std::uint64_t seed, std::size_t* clipped) {
  const std::size_t m = 2 * n;
  auto* row = fftw_alloc_real(m);
  auto* eig = fftw_alloc_complex(m / 2 + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = r(j);
  for (std::size_t j = 1; j < n; ++j) row[m - j] = r(j);
  fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(m), row, eig, FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);

  std::vector<double> lambda(m);
  std::size_t neg = 0;
  for (std::size_t k = 0; k <= m / 2; ++k) {
    double v = eig[k][0];
    if (v < 0.0) {
      ++neg;
      v = 0.0;
    }
    lambda[k] = v;
    if (k > 0 && k < m - k) lambda[m - k] = v;
  }
  if (clipped) *clipped = neg;

  auto* w = fftw_alloc_complex(m);
  auto* x = fftw_alloc_complex(m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::sqrt(lambda[k] / static_cast<double>(m));
    w[k][0] = a * z(rng);
    w[k][1] = a * z(rng);
  }
  p = fftw_plan_dft_1d(static_cast<int>(m), w, x, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);

  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = x[j][0];
  fftw_free(row);
  fftw_free(eig);
  fftw_free(w);
  fftw_free(x);
  return out;
}

std::vector<FlowEvent> brute_force_match(std::vector<FlowEvent> temp, std::span<const Trade> trades,
                                         TimeNs window, std::size_t* matched) {
  std::vector<std::size_t> order(trades.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trades[a].ts < trades[b].ts; });
  std::vector<bool> used(temp.size(), false);
  std::size_t hits = 0;
  for (std::size_t ti : order) {
    const Trade& t = trades[ti];
    std::size_t best = temp.size();
    TimeNs best_dt = 0;
    for (std::size_t i = 0; i < temp.size(); ++i) {
      const auto& e = temp[i];
      if (used[i] || e.kind != EventKind::Cancel || e.price != t.price || e.size != t.size) continue;
      if (t.aggressor == Aggressor::Bid && e.side != Side::Ask) continue;
      if (t.aggressor == Aggressor::Ask && e.side != Side::Bid) continue;
      const TimeNs dt = std::abs(e.ts - t.ts);
      if (dt > window) continue;
      if (best == temp.size() || dt < best_dt || (dt == best_dt && e.ts < temp[best].ts)) {
        best = i;
        best_dt = dt;
      }
    }
    if (best < temp.size()) {
      used[best] = true;
      temp[best].kind = EventKind::Market;
      ++hits;
    }
  }
  if (matched) *matched = hits;
  return temp;
}

namespace {

using nlohmann::json;

bool type_matches(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  return false;
}

void check(const json& v, const json& s, const json& root, const std::string& at,
           std::vector<std::string>& errs) {
  if (s.contains("$ref")) {
    const auto ref = s["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) {
      errs.push_back(at + ": unsupported $ref " + ref);
      return;
    }
    check(v, root.at("definitions").at(ref.substr(prefix.size())), root, at, errs);
    return;
  }
  if (s.contains("anyOf")) {
    bool any = false;
    for (const auto& alt : s["anyOf"]) {
      std::vector<std::string> sub;
      check(v, alt, root, at, sub);
      if (sub.empty()) {
        any = true;
        break;
      }
    }
    if (!any) errs.push_back(at + ": no anyOf alternative matches");
  }
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || type_matches(v, t.get<std::string>());
    } else {
      ok = type_matches(v, s["type"].get<std::string>());
    }
    if (!ok) {
      errs.push_back(at + ": wrong type");
      return;
    }
  }
  if (s.contains("enum")) {
    bool ok = false;
    for (const auto& e : s["enum"]) ok = ok || e == v;
    if (!ok) errs.push_back(at + ": value not in enum");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) errs.push_back(at + ": below minimum");
    if (s.contains("maximum") && x > s["maximum"].get<double>()) errs.push_back(at + ": above maximum");
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& k : s["required"])
        if (!v.contains(k.get<std::string>())) errs.push_back(at + ": missing " + k.get<std::string>());
    for (const auto& [k, child] : v.items()) {
      const std::string path = at + "/" + k;
      if (s.contains("properties") && s["properties"].contains(k)) {
        check(child, s["properties"][k], root, path, errs);
      } else if (s.contains("additionalProperties")) {
        const auto& ap = s["additionalProperties"];
        if (ap.is_boolean()) {
          if (!ap.get<bool>()) errs.push_back(path + ": unexpected property");
        } else {
          check(child, ap, root, path, errs);
        }
      }
    }
  }
  if (v.is_array() && s.contains("items"))
    for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], root, at + "/" + std::to_string(i), errs);
}

}  // namespace

std::vector<std::string> schema_errors(const nlohmann::json& doc, const nlohmann::json& schema) {
  std::vector<std::string> errs;
  check(doc, schema, schema, "", errs);
  return errs;
}

BookSnapshot book(TimeNs ts, std::vector<Level> bids, std::vector<Level> asks) {
  BookSnapshot b;
  b.ts = ts;
  b.bids = std::move(bids);
  b.asks = std::move(asks);
  return b;
}

FlowEvent event(EventKind kind, Side side, Ticks price, Qty size, TimeNs ts, int level) {
  FlowEvent e;
  e.kind = kind;
  e.side = side;
  e.price = price;
  e.size = size;
  e.ts = ts;
  e.level = level;
  return e;
}

GenConfig small_config(std::uint64_t seed, double seconds) {
  GenConfig c;
  c.seed = seed;
  c.duration_seconds = seconds;
  c.spread_closing_intensity_multiplier = 10.0;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oracle
