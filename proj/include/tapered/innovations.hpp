#pragma once

#include "tapered/rng.hpp"

#include <limits>
#include <optional>
#include <span>

namespace tapered {

/// Tail index of the Pareto law. Limit theory needs 0 < alpha < 2, alpha != 1.
class TailIndex {
public:
    explicit TailIndex(double alpha);
    double value() const { return alpha_; }
    bool has_mean() const { return alpha_ > 1.0; }

private:
    double alpha_;
};

/// Innovation tapering level: either a fixed threshold b or b(n) = n^gamma.
class TaperLevel {
public:
    static TaperLevel fixed(double b);
    static TaperLevel growing(double gamma);
    /// No tapering at all; the tapered law coincides with the raw Pareto law.
    static TaperLevel none() { return fixed(std::numeric_limits<double>::infinity()); }

    double at(long n) const;
    std::optional<double> gamma() const { return gamma_; }
    bool is_fixed() const { return !gamma_.has_value(); }

private:
    TaperLevel() = default;
    double b_ = 1.0;
    std::optional<double> gamma_;
};

enum class InnovationKind { GaussianUnit, Pareto, TaperedPareto, CenteredPareto, CenteredTaperedPareto };

enum class InnovationTaper { Hard, Soft, Intermediate };

InnovationTaper classify_innovation_taper(double alpha, double gamma);

struct InnovationSpec {
    InnovationKind kind = InnovationKind::GaussianUnit;
    std::optional<TailIndex> alpha;
    std::optional<TaperLevel> taper;

    static InnovationSpec gaussian();
    static InnovationSpec pareto(double alpha);
    static InnovationSpec centered_pareto(double alpha);
    static InnovationSpec tapered(double alpha, TaperLevel taper);
    static InnovationSpec centered_tapered(double alpha, TaperLevel taper);
    /// Raw Pareto centred when the mean exists, uncentred otherwise.
    static InnovationSpec stable_pareto(double alpha);
    static InnovationSpec stable_tapered(double alpha, TaperLevel taper);

    void validate() const;
    bool is_tapered() const;
    bool is_centered() const;
    bool is_pareto_family() const { return kind != InnovationKind::GaussianUnit; }
};

/// Inverse-cdf Pareto draw, u in (0, 1). Accepts any alpha > 0.
double sample_pareto(double alpha, double u);
/// theta if theta < b, else b + R with R = -log(u2).
double sample_tapered_pareto(double alpha, double b, double u1, double u2);

/// E zeta(alpha, b)^p, finite for every p > 0.
double tapered_moment(double alpha, double b, double p);
/// E theta^p for p < alpha.
double pareto_moment(double alpha, double p);
/// E|zeta - E zeta|^p.
double tapered_central_abs_moment(double alpha, double b, double p);

/// Innovation moments used by the variance and Lyapunov machinery at size n.
struct InnovationMoments {
    double mean = 0.0;     ///< subtracted by the centred kinds
    double variance = 1.0; ///< of the emitted (centred) variable; infinite for raw Pareto with alpha < 2
};
InnovationMoments innovation_moments(const InnovationSpec& spec, long n);
/// E|emitted innovation|^p at size n.
double innovation_abs_moment(const InnovationSpec& spec, long n, double p);

/// Fills out[k] with independent innovations for size n. Pareto kinds consume two
/// uniforms per entry (u1 for theta, u2 for the overshoot), so raw and tapered
/// draws from the same stream are coupled index by index.
void draw_innovations(const InnovationSpec& spec, long n, Rng& rng, std::span<double> out);

struct MomentRatio {
    double ratio; ///< E|xi|^{2+delta} / (E xi^2)^{(2+delta)/2}
    double bound; ///< n^{gamma alpha delta / 2}
};
MomentRatio moment_ratio_bound_check(double alpha, double gamma, long n, double delta);

/// E|zeta(b) - theta - mu|^r for the coupled pair with mu = E(zeta - theta) when
/// alpha > 1 and 0 otherwise. The no-exceedance part is exact; the conditional part
/// uses `draws` Monte Carlo samples.
double coupling_moment(double alpha, double b, double r, std::size_t draws, Rng& rng);

/// Exponent k such that the coupling moment is O(b^{-k}).
double coupling_moment_decay(double alpha, double r);

} // namespace tapered
