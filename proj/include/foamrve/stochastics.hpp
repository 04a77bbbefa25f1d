////////////////////////////////////////////////////////////////////////////////
// stochastics.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Distribution parameter maps (natural moments -> internal parameters),
//  counter-based deterministic sampling keyed by (seed, index), and
//  population summaries. The keyed generator guarantees that a wall or cell
//  draw never depends on evaluation order or thread schedule.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_STOCHASTICS_HPP
#define FOAMRVE_STOCHASTICS_HPP

#include <foamrve/core.hpp>
#include <cstdint>
#include <vector>

namespace foamrve {

enum class DistKind { Constant, Lognormal, Gamma, Normal };

struct DistributionSpec {
    DistKind kind = DistKind::Constant;
    Real mean = 0; // natural-unit mean
    Real sd = 0;   // natural-unit standard deviation
};

// Eq. B.2: lognormal internal parameters from natural moments.
std::pair<Real, Real> lognormal_params(Real mean, Real sd);
// Eq. B.4: gamma shape/scale from natural moments.
std::pair<Real, Real> gamma_params(Real mean, Real sd);

// Counter-based uniform stream for one (seed, index) pair. Each draw consumes
// explicit counter slots, so streams for different indices never interact.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t index);
    double uniform();                // in (0,1)
    double normal();                 // standard normal (Box-Muller)
    double gamma(Real alpha, Real scale); // Marsaglia-Tsang
    std::uint64_t slots_used() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// One positive draw for a spec; non-positive draws are resampled and counted.
Real sample_one(const DistributionSpec &spec, std::uint64_t seed, std::uint64_t index,
                std::uint64_t *resampled = nullptr);

std::vector<Real> sample(const DistributionSpec &spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t *resampled = nullptr);

struct SampleSummary {
    std::size_t n = 0;
    Real mean = 0, sd = 0;
    Real min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    std::vector<Real> hist_left;    // bin left edges
    Real hist_width = 0;
    std::vector<Real> hist_density; // PDF estimate
    std::vector<Real> cdf_x;        // sorted values
    std::vector<Real> cdf_p;        // empirical CDF at cdf_x
};

SampleSummary summarize(std::vector<Real> values, int bins = 30);

struct AnisotropyPopulation {
    std::vector<Real> RE;
    std::vector<Real> Rsigma;
    SampleSummary RE_summary;
    SampleSummary Rsigma_summary;
};

struct BucklingFit;
enum class CellModel { Rect, Kelvin };

AnisotropyPopulation propagate_cell_anisotropy(const std::vector<Real> &Rv, CellModel model,
                                               const BucklingFit &fit);

} // namespace foamrve

#endif
