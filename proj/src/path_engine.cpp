#include "tapered/errors.hpp"
#include "tapered/partial_sums.hpp"
#include "tapered/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

namespace tapered {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex mu;
    return mu;
}

std::size_t fft_size(std::size_t need)
{
    // smallest 2^a 3^b 5^c >= need
    std::size_t best = 1;
    while (best < need) best <<= 1;
    for (std::size_t p5 = 1; p5 < best; p5 *= 5) {
        for (std::size_t p3 = p5; p3 < best; p3 *= 3) {
            std::size_t v = p3;
            while (v < need) v <<= 1;
            best = std::min(best, v);
        }
    }
    return best;
}

void check_grid(std::span<const double> grid)
{
    if (grid.empty()) throw UsageError("time grid is empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0) || !std::isfinite(grid[k])) throw UsageError("time grid must hold finite t >= 0");
        if (k > 0 && grid[k] < grid[k - 1]) throw UsageError("time grid must be ascending");
    }
}

double direct_sum(std::span<const double> prefix, long lag, long m, std::span<const double> eta)
{
    auto P = [&](long k) { return prefix[static_cast<std::size_t>(std::min(k, lag))]; };
    double s = 0.0;
    for (long i = -lag; i <= 0; ++i) s += (P(m - i) - P(-i)) * eta[static_cast<std::size_t>(i + lag)];
    for (long i = 1; i <= m; ++i) s += P(m - i) * eta[static_cast<std::size_t>(i + lag)];
    return s;
}

} // namespace

struct PathEngine::Fft {
    std::size_t size = 0;
    long lag = 0;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_complex* filter_hat = nullptr;

    Fft(const TaperedFilter& filter, std::size_t count) : size(fft_size(count)), lag(filter.lag())
    {
        double* buf = fftw_alloc_real(size);
        fftw_complex* spec = fftw_alloc_complex(size / 2 + 1);
        filter_hat = fftw_alloc_complex(size / 2 + 1);
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), buf, spec, FFTW_ESTIMATE);
            backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), spec, buf, FFTW_ESTIMATE);
        }
        std::fill(buf, buf + size, 0.0);
        for (long k = 0; k <= lag; ++k) buf[k] = filter.coefficient(k);
        fftw_execute_dft_r2c(forward, buf, filter_hat);
        fftw_free(buf);
        fftw_free(spec);
    }

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    ~Fft()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(filter_hat);
    }

    // S(m_g) = sum_{k=1}^{m_g} X_k with X_k = conv[k + lag]; circular wrap never
    // reaches indices >= lag because size >= count
    std::vector<double> run(std::span<const double> eta, std::span<const long> ms) const
    {
        const std::size_t count = static_cast<std::size_t>(ms.back() + lag + 1);
        double* buf = fftw_alloc_real(size);
        fftw_complex* spec = fftw_alloc_complex(size / 2 + 1);
        std::fill(buf, buf + size, 0.0);
        std::copy(eta.begin(), eta.begin() + static_cast<std::ptrdiff_t>(count), buf);
        fftw_execute_dft_r2c(forward, buf, spec);
        for (std::size_t k = 0; k < size / 2 + 1; ++k) {
            const double re = spec[k][0] * filter_hat[k][0] - spec[k][1] * filter_hat[k][1];
            const double im = spec[k][0] * filter_hat[k][1] + spec[k][1] * filter_hat[k][0];
            spec[k][0] = re;
            spec[k][1] = im;
        }
        fftw_execute_dft_c2r(backward, spec, buf);
        const double inv = 1.0 / static_cast<double>(size);
        std::vector<double> out(ms.size());
        stats::Accumulator acc;
        long k = 0;
        for (std::size_t g = 0; g < ms.size(); ++g) {
            while (k < ms[g]) {
                ++k;
                acc.add(buf[static_cast<std::size_t>(k + lag)] * inv);
            }
            out[g] = acc.value();
        }
        fftw_free(buf);
        fftw_free(spec);
        return out;
    }
};

PathEngine::PathEngine(const RegimeSpec& regime, long n, std::vector<double> t_grid, PathMethod method)
    : regime_(regime), n_(n), grid_(std::move(t_grid)), filter_(regime.filter_at(n)), method_(method)
{
    regime_.validate();
    check_grid(grid_);
    for (double t : grid_) steps_.push_back(steps(n, t));
    const long lag = filter_.lag();
    const double total = static_cast<double>(steps_.back()) + static_cast<double>(lag) + 1.0;
    if (total > 1.5e9) throw SizeError("path would need " + std::to_string(total) + " innovations");
    count_ = static_cast<std::size_t>(total);
    prefix_ = filter_.prefix_sums();

    if (method_ == PathMethod::Auto) {
        const double L = static_cast<double>(fft_size(count_));
        const double direct = static_cast<double>(grid_.size()) * static_cast<double>(count_);
        const double fft = 6.0 * L * std::log2(L) + 2.0 * static_cast<double>(count_);
        method_ = fft < direct ? PathMethod::Fft : PathMethod::Direct;
    }
    if (method_ == PathMethod::Fft) fft_ = new Fft(filter_, count_);
}

PathEngine::~PathEngine()
{
    delete fft_;
}

std::vector<double> PathEngine::simulate(std::uint64_t seed, std::uint64_t replica) const
{
    Rng rng(seed, Purpose::Innovations, replica);
    std::vector<double> eta(count_);
    draw_innovations(regime_.innovation, n_, rng, eta);
    return from_innovations(eta);
}

std::vector<double> PathEngine::from_innovations(std::span<const double> eta) const
{
    if (eta.size() < count_) throw UsageError("innovation array is shorter than lag + floor(n t_max) + 1");
    const long lag = filter_.lag();
    std::vector<double> out(grid_.size());
    if (method_ == PathMethod::Direct) {
        for (std::size_t g = 0; g < grid_.size(); ++g) out[g] = direct_sum(prefix_, lag, steps_[g], eta);
        return out;
    }
    return fft_->run(eta, steps_);
}

std::vector<double> partial_sums_from_innovations(const TaperedFilter& filter, std::span<const double> t_grid,
                                                  std::span<const double> innovations, PathMethod method)
{
    check_grid(t_grid);
    const long lag = filter.lag();
    const long mmax = steps(filter.n(), t_grid.back());
    if (innovations.size() < static_cast<std::size_t>(mmax + lag + 1)) {
        throw UsageError("innovation array is shorter than lag + floor(n t_max) + 1");
    }
    std::vector<long> ms;
    for (double t : t_grid) ms.push_back(steps(filter.n(), t));
    if (method == PathMethod::Fft) {
        const PathEngine::Fft fft(filter, static_cast<std::size_t>(mmax + lag + 1));
        return fft.run(innovations, ms);
    }
    const auto prefix = filter.prefix_sums();
    std::vector<double> out;
    for (long m : ms) out.push_back(direct_sum(prefix, lag, m, innovations));
    return out;
}

std::vector<double> process_values(const TaperedFilter& filter, std::span<const double> innovations, long count)
{
    const long lag = filter.lag();
    if (count < 0) throw UsageError("count must be non-negative");
    if (innovations.size() < static_cast<std::size_t>(count + lag + 1)) {
        throw UsageError("innovation array is shorter than lag + count + 1");
    }
    std::vector<double> coef(static_cast<std::size_t>(lag) + 1);
    for (long j = 0; j <= lag; ++j) coef[static_cast<std::size_t>(j)] = filter.coefficient(j);
    std::vector<double> x(static_cast<std::size_t>(count));
    for (long k = 1; k <= count; ++k) {
        double s = 0.0;
        for (long j = 0; j <= lag; ++j) s += coef[static_cast<std::size_t>(j)] * innovations[static_cast<std::size_t>(k + lag - j)];
        x[static_cast<std::size_t>(k - 1)] = s;
    }
    return x;
}

} // namespace tapered
