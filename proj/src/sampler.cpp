#include "fastgen/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_set>

#include "fastgen/error.hpp"
#include "fastgen/rng.hpp"

namespace fastgen {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Exact inverse CDF over a window of mode +/- (12 sd + 20), which leaves out
// less than 1e-30 of the mass.
class PoissonSampler {
 public:
  explicit PoissonSampler(double lambda) : lambda_(lambda) {
    if (lambda > kPoissonTableLimit) return;
    const double mode = std::floor(lambda);
    const double reach = std::ceil(12.0 * std::sqrt(lambda) + 20.0);
    first_ = static_cast<std::int64_t>(std::max(0.0, mode - reach));
    const auto last = static_cast<std::int64_t>(mode + reach);
    const auto m = static_cast<std::size_t>(static_cast<std::int64_t>(mode) - first_);
    std::vector<double> pmf(static_cast<std::size_t>(last - first_ + 1));
    pmf[m] = 1.0;
    for (std::size_t i = m; i + 1 < pmf.size(); ++i) {
      pmf[i + 1] = pmf[i] * lambda / static_cast<double>(first_ + static_cast<std::int64_t>(i) + 1);
    }
    for (std::size_t i = m; i > 0; --i) {
      pmf[i - 1] = pmf[i] * static_cast<double>(first_ + static_cast<std::int64_t>(i)) / lambda;
    }
    cdf_.resize(pmf.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) cdf_[i] = (total += pmf[i]);
    for (double& c : cdf_) c /= total;
  }

  double draw(SplitMix64& rng) const {
    if (cdf_.empty()) {
      const double z = inverse_normal_cdf(rng.open_uniform());
      return std::max(0.0, std::floor(lambda_ + std::sqrt(lambda_) * z + 0.5));
    }
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<double>(first_ + (it - cdf_.begin()));
  }

 private:
  double lambda_;
  std::int64_t first_ = 0;
  std::vector<double> cdf_;
};

void strip_negative_zero(std::string& s) {
  if (s.empty() || s.front() != '-') return;
  if (s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
}

std::vector<std::string> sample_numerical(const NumericalSpec& spec, SplitMix64& rng,
                                          std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  std::optional<PoissonSampler> poisson;
  if (const auto* p = std::get_if<dist::Poisson>(&spec.distribution)) poisson.emplace(p->lambda);

  auto draw = [&]() -> double {
    return std::visit(
        overloaded{
            [&](const dist::Uniform& d) {
              const double u = rng.uniform();
              return (1.0 - u) * d.min + u * d.max;
            },
            [&](const dist::Normal& d) {
              return d.mean + d.std * inverse_normal_cdf(rng.open_uniform());
            },
            [&](const dist::LogNormal& d) {
              return std::exp(d.mu + d.sigma * inverse_normal_cdf(rng.open_uniform()));
            },
            [&](const dist::Exponential& d) { return -std::log1p(-rng.uniform()) / d.rate; },
            [&](const dist::Poisson&) { return poisson->draw(rng); },
            [&](const dist::UniformInt& d) {
              const auto span = static_cast<std::uint64_t>(d.max - d.min) + 1;
              return static_cast<double>(d.min + static_cast<std::int64_t>(rng.below(span)));
            },
        },
        spec.distribution);
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < spec.null_rate) {
      out.emplace_back();
      continue;
    }
    double v = draw();
    if (spec.clamp) v = std::clamp(v, spec.clamp->lo, spec.clamp->hi);
    out.push_back(format_number(v, spec.rounding));
  }
  return out;
}

std::vector<std::string> sample_categorical(const CategoricalSpec& spec, SplitMix64& rng,
                                            std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  const std::size_t k = spec.categories.size();
  std::vector<double> cumulative;
  std::size_t last_nonzero = k - 1;
  if (!spec.uniform()) {
    double sum = 0.0;
    for (const Category& c : spec.categories) sum += *c.prob;
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      acc += *spec.categories[i].prob / sum;
      cumulative.push_back(acc);
      if (*spec.categories[i].prob > 0.0) last_nonzero = i;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < spec.null_rate) {
      out.emplace_back();
      continue;
    }
    std::size_t pick;
    if (cumulative.empty()) {
      pick = static_cast<std::size_t>(rng.below(k));
    } else {
      const double u = rng.uniform();
      pick = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                      cumulative.begin());
      if (pick >= k) pick = last_nonzero;
    }
    out.push_back(spec.categories[pick].value);
  }
  return out;
}

std::vector<std::string> sample_text(const std::string& field, const TextSpec& spec,
                                     SplitMix64& rng, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  PatternRenderer renderer(spec.pattern);
  if (!spec.unique) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.uniform() < spec.null_rate) {
        out.emplace_back();
        continue;
      }
      out.push_back(renderer.render(rng));
    }
    return out;
  }

  const std::uint64_t cardinality = estimate_cardinality(spec.pattern);
  if (!contains_counter(spec.pattern) && cardinality < n) {
    throw GenerationError(field, "unique pattern can produce at most " +
                                     std::to_string(cardinality) + " distinct values, " +
                                     std::to_string(n) + " requested");
  }
  std::unordered_set<std::string> seen;
  seen.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    (void)rng.uniform();  // null draw; unique fields never emit nulls
    std::size_t collisions = 0;
    for (;;) {
      std::string value = renderer.render(rng);
      if (seen.insert(value).second) {
        out.push_back(std::move(value));
        break;
      }
      if (++collisions >= kMaxUniqueCollisions) {
        throw GenerationError(field, "uniqueness exhausted after " +
                                         std::to_string(kMaxUniqueCollisions) +
                                         " consecutive collisions at row " + std::to_string(i));
      }
    }
  }
  return out;
}

}  // namespace

double inverse_normal_cdf(double p) noexcept {
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p <= 0.0) return -INFINITY;
  if (p >= 1.0) return INFINITY;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

std::string format_number(double value, const Rounding& rounding) {
  char buf[512];
  std::to_chars_result res{};
  switch (rounding.mode) {
    case Rounding::Mode::None:
      if (value == std::floor(value) && std::fabs(value) < 0x1.0p53) {
        res = std::to_chars(buf, buf + sizeof buf, static_cast<std::int64_t>(value));
      } else {
        res = std::to_chars(buf, buf + sizeof buf, value);
      }
      break;
    case Rounding::Mode::Integer:
      res = std::to_chars(buf, buf + sizeof buf, std::round(value), std::chars_format::fixed, 0);
      break;
    case Rounding::Mode::Decimals:
      res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed,
                          rounding.decimals);
      break;
  }
  std::string s(buf, res.ptr);
  strip_negative_zero(s);
  return s;
}

std::vector<std::string> sample_field(const FieldSpec& spec, std::uint64_t seed, std::size_t n) {
  if (spec.placeholder) return std::vector<std::string>(n);
  SplitMix64 rng(seed);
  return std::visit(overloaded{
                        [&](const std::monostate&) -> std::vector<std::string> {
                          throw GenerationError(spec.field_name, "spec has no body");
                        },
                        [&](const NumericalSpec& s) { return sample_numerical(s, rng, n); },
                        [&](const CategoricalSpec& s) { return sample_categorical(s, rng, n); },
                        [&](const TextSpec& s) { return sample_text(spec.field_name, s, rng, n); },
                    },
                    spec.body);
}

Table generate_dataset(const GenerationPlan& plan, std::size_t n, std::size_t workers) {
  const std::size_t fields = plan.specs.size();
  std::vector<std::vector<std::string>> columns(fields);
  std::vector<std::exception_ptr> errors(fields);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < fields; i = next++) {
      const FieldSpec& spec = plan.specs[i];
      try {
        columns[i] = sample_field(spec, derive_field_seed(plan.master_seed, spec.field_name), n);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(fields, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Table table(n);
  for (std::size_t i = 0; i < fields; ++i) {
    table.add_column(Column{plan.specs[i].field_name, std::move(columns[i])});
  }
  return table;
}

}  // namespace fastgen
