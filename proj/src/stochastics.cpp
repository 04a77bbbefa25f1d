#include <foamrve/stochastics.hpp>
#include <foamrve/analytic.hpp>

#include <algorithm>
#include <cmath>

namespace foamrve {

std::pair<Real, Real> lognormal_params(Real mean, Real sd) {
    if (mean <= 0 || sd < 0)
        throw ConfigError("lognormal_params: requires mean > 0, sd >= 0");
    const Real m2 = mean * mean;
    const Real mu = std::log(m2 / std::sqrt(m2 + sd * sd));
    const Real sigma = std::sqrt(std::log(1.0 + sd * sd / m2));
    return {mu, sigma};
}

std::pair<Real, Real> gamma_params(Real mean, Real sd) {
    if (mean <= 0)
        throw ConfigError("gamma_params: requires mean > 0");
    if (sd <= 0)
        throw ConfigError("gamma_params: sd = 0 is a constant spec, not a gamma");
    const Real alpha = mean * mean / (sd * sd);
    const Real theta = sd * sd / mean;
    return {alpha, theta};
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index)
    : key_(mix64(mix64(seed) ^ (index * 0xD1B54A32D192ED03ull + 1))) {}

double CounterRng::uniform() {
    const std::uint64_t bits = mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double CounterRng::normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double CounterRng::gamma(Real alpha, Real scale) {
    if (alpha < 1.0) {
        const double u = uniform();
        return gamma(alpha + 1.0, scale) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
            return d * v * scale;
    }
}

Real sample_one(const DistributionSpec &spec, std::uint64_t seed, std::uint64_t index,
                std::uint64_t *resampled) {
    switch (spec.kind) {
    case DistKind::Constant:
        return spec.mean;
    case DistKind::Lognormal: {
        const auto [mu, sigma] = lognormal_params(spec.mean, spec.sd);
        CounterRng rng(seed, index);
        return std::exp(mu + sigma * rng.normal());
    }
    case DistKind::Gamma: {
        const auto [alpha, theta] = gamma_params(spec.mean, spec.sd);
        CounterRng rng(seed, index);
        for (int attempt = 0; attempt < 256; ++attempt) {
            const Real x = rng.gamma(alpha, theta);
            if (x > 0) return x;
            if (resampled) ++*resampled;
        }
        throw ConfigError("sample_one: gamma resampling failed to produce a positive draw");
    }
    case DistKind::Normal: {
        CounterRng rng(seed, index);
        for (int attempt = 0; attempt < 256; ++attempt) {
            const Real x = spec.mean + spec.sd * rng.normal();
            if (x > 0) return x;
            if (resampled) ++*resampled;
        }
        throw ConfigError("sample_one: normal resampling failed to produce a positive draw");
    }
    }
    throw ConfigError("sample_one: unknown distribution kind");
}

std::vector<Real> sample(const DistributionSpec &spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t *resampled) {
    std::vector<Real> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sample_one(spec, seed, i, resampled);
    return out;
}

SampleSummary summarize(std::vector<Real> values, int bins) {
    SampleSummary s;
    s.n = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    Real sum = 0;
    for (Real v : values) sum += v;
    s.mean = sum / s.n;
    Real ss = 0;
    for (Real v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;

    auto quantile = [&](Real q) {
        if (s.n == 1) return values[0];
        const Real h = q * (s.n - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, s.n - 1);
        return values[lo] + (h - lo) * (values[hi] - values[lo]);
    };
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);

    const Real span = s.max - s.min;
    const Real width = span > 0 ? span / bins : 1.0;
    s.hist_width = width;
    s.hist_left.resize(bins);
    s.hist_density.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b) s.hist_left[b] = s.min + b * width;
    for (Real v : values) {
        int b = span > 0 ? std::min<int>(bins - 1, static_cast<int>((v - s.min) / width)) : 0;
        s.hist_density[b] += 1.0;
    }
    for (Real &d : s.hist_density) d /= (s.n * width);

    s.cdf_x = values;
    s.cdf_p.resize(s.n);
    for (std::size_t i = 0; i < s.n; ++i)
        s.cdf_p[i] = static_cast<Real>(i + 1) / s.n;
    return s;
}

AnisotropyPopulation propagate_cell_anisotropy(const std::vector<Real> &Rv, CellModel model,
                                               const BucklingFit &fit) {
    AnisotropyPopulation pop;
    pop.RE.reserve(Rv.size());
    pop.Rsigma.reserve(Rv.size());
    for (Real r : Rv) {
        const AnisotropyBreakdown b =
            (model == CellModel::Rect) ? rect_anisotropy(r, fit) : kelvin_anisotropy(r, fit);
        pop.RE.push_back(b.RE);
        pop.Rsigma.push_back(b.Rsigma);
    }
    pop.RE_summary = summarize(pop.RE);
    pop.Rsigma_summary = summarize(pop.Rsigma);
    return pop;
}

} // namespace foamrve
