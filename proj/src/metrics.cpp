#include "fastgen/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fastgen/error.hpp"
#include "fastgen/optimal_transport.hpp"

namespace fastgen {

void MetricConfig::validate() const {
  if (ngram_order < 1) throw InputError("ngram_order must be at least 1");
  if (kl_bins < 2) throw InputError("kl_bins must be at least 2");
  if (!(kl_epsilon > 0.0)) throw InputError("kl_epsilon must be > 0");
  if (ot_category_cap < 2) throw InputError("ot_category_cap must be at least 2");
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> ngrams(std::string_view value, std::size_t n) {
  const auto w = words(value);
  std::vector<std::string> out;
  if (w.size() < n) return out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) {
    std::string gram(w[i]);
    for (std::size_t k = 1; k < n; ++k) {
      gram.push_back('\x1f');
      gram.append(w[i + k]);
    }
    out.push_back(std::move(gram));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<char32_t> folded_code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    char32_t cp = b;
    if (len > 1 && i + len <= s.size()) {
      cp = b & (0xFF >> (len + 1));
      for (std::size_t k = 1; k < len; ++k) {
        const auto cont = static_cast<unsigned char>(s[i + k]);
        if ((cont & 0xC0) != 0x80) {
          len = 0;
          break;
        }
        cp = (cp << 6) | (cont & 0x3F);
      }
    }
    if (len <= 1 || i + len > s.size()) {
      // Stray or truncated byte: keep it as its own unit.
      cp = b;
      len = 1;
    }
    if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

struct CategoryMass {
  std::vector<std::string> labels;
  std::vector<double> mass;
  double other = 0.0;
};

CategoryMass empirical(const std::vector<std::string>& values, std::size_t cap) {
  std::map<std::string_view, std::size_t> counts;
  for (const auto& v : values) ++counts[v];
  std::vector<std::pair<std::string_view, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  CategoryMass d;
  const double total = static_cast<double>(values.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const double share = static_cast<double>(ranked[i].second) / total;
    if (i < cap) {
      d.labels.emplace_back(ranked[i].first);
      d.mass.push_back(share);
    } else {
      d.other += share;
    }
  }
  return d;
}

}  // namespace

std::size_t vocabulary(const std::vector<std::string>& values) {
  std::unordered_set<std::string_view> seen;
  for (const auto& v : values) {
    for (auto w : words(v)) seen.insert(w);
  }
  return seen.size();
}

double isnf(const std::vector<std::string>& values, std::size_t n) {
  if (values.size() < 2) throw InputError("isnf needs at least two values");
  if (n < 1) throw InputError("isnf n-gram order must be at least 1");

  std::vector<std::vector<std::string>> grams;
  grams.reserve(values.size());
  std::vector<std::string_view> vocab;
  for (const auto& v : values) grams.push_back(ngrams(v, n));
  for (const auto& g : grams) vocab.insert(vocab.end(), g.begin(), g.end());
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());

  // Identical n-gram sets are grouped; ids follow sorted n-gram order so the
  // result does not depend on input order.
  std::map<std::vector<std::uint32_t>, std::size_t> groups;
  for (const auto& g : grams) {
    std::vector<std::uint32_t> ids;
    ids.reserve(g.size());
    for (const auto& gram : g) {
      ids.push_back(static_cast<std::uint32_t>(
          std::lower_bound(vocab.begin(), vocab.end(), std::string_view(gram)) - vocab.begin()));
    }
    ++groups[std::move(ids)];
  }
  std::vector<const std::vector<std::uint32_t>*> sets;
  std::vector<double> counts;
  for (const auto& [ids, c] : groups) {
    sets.push_back(&ids);
    counts.push_back(static_cast<double>(c));
  }

  std::vector<std::vector<std::size_t>> postings(vocab.size());
  for (std::size_t g = 0; g < sets.size(); ++g) {
    for (auto id : *sets[g]) postings[id].push_back(g);
  }

  double sum = 0.0;
  for (double c : counts) sum += c * (c - 1.0) / 2.0;  // identical sets score 1
  std::vector<std::size_t> shared(sets.size(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    touched.clear();
    for (auto id : *sets[a]) {
      const auto& list = postings[id];
      for (auto it = std::upper_bound(list.begin(), list.end(), a); it != list.end(); ++it) {
        if (shared[*it]++ == 0) touched.push_back(*it);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t b : touched) {
      const double inter = static_cast<double>(shared[b]);
      const double uni = static_cast<double>(sets[a]->size() + sets[b]->size()) - inter;
      sum += counts[a] * counts[b] * inter / uni;
      shared[b] = 0;
    }
  }
  const double m = static_cast<double>(values.size());
  return std::clamp(sum / (m * (m - 1.0) / 2.0), 0.0, 1.0);
}

KlResult kl_divergence_numeric(const std::vector<std::string>& gen,
                               const std::vector<std::string>& ref, const MetricConfig& cfg) {
  cfg.validate();
  KlResult result;
  std::vector<double> g, r;
  for (const auto& s : gen) {
    if (auto v = parse_real(s)) g.push_back(*v); else ++result.dropped_generated;
  }
  for (const auto& s : ref) {
    if (auto v = parse_real(s)) r.push_back(*v); else ++result.dropped_reference;
  }
  if (g.empty()) throw InputError("no parseable numeric values in the generated data");
  if (r.empty()) throw InputError("no parseable numeric values in the reference data");

  auto [min_it, max_it] = std::minmax_element(r.begin(), r.end());
  double lo = *min_it;
  double hi = *max_it;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const std::size_t bins = cfg.kl_bins;
  const double width = (hi - lo) / static_cast<double>(bins);
  auto histogram = [&](const std::vector<double>& xs) {
    std::vector<double> h(bins, 0.0);
    for (double x : xs) {
      const double pos = std::floor((x - lo) / width);
      const auto idx = pos < 0.0 ? std::size_t{0}
                                 : std::min(bins - 1, static_cast<std::size_t>(
                                                          std::min(pos, static_cast<double>(bins))));
      h[idx] += 1.0;
    }
    const double total = static_cast<double>(xs.size());
    double norm = 0.0;
    for (double& v : h) norm += (v = v / total + cfg.kl_epsilon);
    for (double& v : h) v /= norm;
    return h;
  };
  const auto p = histogram(g);
  const auto q = histogram(r);
  double kl = 0.0;
  for (std::size_t i = 0; i < bins; ++i) kl += p[i] * std::log(p[i] / q[i]);
  result.value = std::max(0.0, kl);
  return result;
}

double edit_cost(std::string_view a, std::string_view b) {
  const auto x = folded_code_points(a);
  const auto y = folded_code_points(b);
  const std::size_t longest = std::max(x.size(), y.size());
  if (longest == 0) return 0.0;
  std::vector<std::size_t> row(y.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= x.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (x[i - 1] == y[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return static_cast<double>(row[y.size()]) / static_cast<double>(longest);
}

double ot_distance(const std::vector<std::string>& gen, const std::vector<std::string>& ref,
                   const MetricConfig& cfg) {
  cfg.validate();
  if (gen.empty() || ref.empty()) throw InputError("ot_distance needs non-empty inputs");
  CategoryMass p = empirical(gen, cfg.ot_category_cap);
  CategoryMass q = empirical(ref, cfg.ot_category_cap);
  const bool p_other = p.other > 0.0;
  const bool q_other = q.other > 0.0;
  if (p_other) p.mass.push_back(p.other);
  if (q_other) q.mass.push_back(q.other);
  const std::size_t rows = p.mass.size();
  const std::size_t cols = q.mass.size();
  std::vector<double> cost(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const bool i_other = i >= p.labels.size();
    for (std::size_t j = 0; j < cols; ++j) {
      const bool j_other = j >= q.labels.size();
      double c;
      if (i_other || j_other) {
        c = (i_other && j_other) ? 0.0 : 1.0;
      } else {
        c = edit_cost(p.labels[i], q.labels[j]);
      }
      cost[i * cols + j] = c;
    }
  }
  return std::max(0.0, solve_transport(p.mass, q.mass, cost).cost);
}

MetricReport evaluate(const Table& gen, const Table& ref,
                      const std::map<std::string, FieldKind>& kinds, const MetricConfig& cfg) {
  cfg.validate();
  std::vector<std::string> missing;
  for (const auto& [name, kind] : kinds) {
    if (!gen.find(name)) missing.push_back("generated:" + name);
    if (!ref.find(name)) missing.push_back("reference:" + name);
  }
  if (!missing.empty()) {
    std::string msg = "column mismatch, missing";
    for (const auto& m : missing) msg += " " + m;
    throw InputError(msg);
  }

  MetricReport report;
  double kl_sum = 0.0, ot_sum = 0.0;
  std::size_t kl_count = 0, ot_count = 0;
  for (const Column& column : gen.columns()) {
    auto kind_it = kinds.find(column.name);
    if (kind_it == kinds.end()) continue;
    const auto& reference = ref.column(column.name).values;
    FieldMetrics m;
    m.name = column.name;
    m.kind = kind_it->second;
    m.vocabulary = vocabulary(column.values);
    m.isnf = isnf(column.values, cfg.ngram_order);
    m.reference_vocabulary = vocabulary(reference);
    m.reference_isnf = isnf(reference, cfg.ngram_order);
    if (m.kind == FieldKind::Numerical) {
      try {
        const KlResult kl = kl_divergence_numeric(column.values, reference, cfg);
        m.kl = kl.value;
        if (kl.dropped_generated) {
          m.notes.push_back(std::to_string(kl.dropped_generated) +
                            " non-numeric generated values dropped");
        }
        if (kl.dropped_reference) {
          m.notes.push_back(std::to_string(kl.dropped_reference) +
                            " non-numeric reference values dropped");
        }
        kl_sum += kl.value;
        ++kl_count;
      } catch (const InputError& e) {
        m.notes.push_back(std::string("kl unavailable: ") + e.what());
      }
    } else {
      m.ot = ot_distance(column.values, reference, cfg);
      ot_sum += *m.ot;
      ++ot_count;
    }
    report.per_field.push_back(std::move(m));
  }
  if (!report.per_field.empty()) {
    const double fields = static_cast<double>(report.per_field.size());
    for (const auto& m : report.per_field) {
      report.dataset_means.vocabulary += static_cast<double>(m.vocabulary);
      report.dataset_means.isnf += m.isnf;
    }
    report.dataset_means.vocabulary /= fields;
    report.dataset_means.isnf /= fields;
  }
  if (kl_count) report.dataset_means.kl = kl_sum / static_cast<double>(kl_count);
  if (ot_count) report.dataset_means.ot = ot_sum / static_cast<double>(ot_count);
  return report;
}

std::string serialize_metric_report(const MetricReport& report) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["fields"] = ojson::array();
  for (const auto& m : report.per_field) {
    ojson f;
    f["name"] = m.name;
    f["kind"] = kind_token(m.kind);
    f["vocabulary"] = m.vocabulary;
    f["isnf"] = m.isnf;
    f["reference_vocabulary"] = m.reference_vocabulary;
    f["reference_isnf"] = m.reference_isnf;
    f["kl"] = m.kl ? ojson(*m.kl) : ojson(nullptr);
    f["ot"] = m.ot ? ojson(*m.ot) : ojson(nullptr);
    if (!m.notes.empty()) f["notes"] = m.notes;
    doc["fields"].push_back(std::move(f));
  }
  const auto& means = report.dataset_means;
  doc["dataset_means"] = {{"vocabulary", means.vocabulary},
                          {"isnf", means.isnf},
                          {"kl", means.kl ? ojson(*means.kl) : ojson(nullptr)},
                          {"ot", means.ot ? ojson(*means.ot) : ojson(nullptr)}};
  return doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string format_metric_report(const MetricReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"field", "kind", "vocab", "isnf", "ref_vocab", "ref_isnf", "kl", "ot"});
  for (const auto& m : report.per_field) {
    rows.push_back({m.name, std::string(kind_token(m.kind)), std::to_string(m.vocabulary),
                    fmt(m.isnf), std::to_string(m.reference_vocabulary), fmt(m.reference_isnf),
                    m.kl ? fmt(*m.kl) : "-", m.ot ? fmt(*m.ot) : "-"});
  }
  const auto& means = report.dataset_means;
  rows.push_back({"(mean)", "", fmt(means.vocabulary, 2), fmt(means.isnf), "", "",
                  means.kl ? fmt(*means.kl) : "-", means.ot ? fmt(*means.ot) : "-"});

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) line += "  ";
      // Text columns left-aligned, numbers right-aligned.
      const std::size_t pad = width[c] - r[c].size();
      if (c < 2) {
        line += r[c] + std::string(pad, ' ');
      } else {
        line += std::string(pad, ' ') + r[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

CostEstimate estimate_cost_time(std::uint64_t tokens, double usd_per_mtok,
                                double tokens_per_second) {
  if (!(tokens_per_second > 0.0)) throw InputError("tokens_per_second must be > 0");
  const double t = static_cast<double>(tokens);
  return {tokens, t / 1e6 * usd_per_mtok, t / tokens_per_second / 3600.0};
}

}  // namespace fastgen
