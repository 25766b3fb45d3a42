#include "turbogp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>

#include "turbogp/error.hpp"

namespace turbogp::dft {
namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per grid size and kept for the process
// lifetime. FFTW_UNALIGNED lets them run on std::vector storage.
class PlanCache {
public:
    const PlanPair& get(int n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<Complex> a(std::size_t(n) * n), b(std::size_t(n) * n);
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair p;
        p.forward = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, flags);
        p.backward = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, flags);
        if (!p.forward || !p.backward) throw NumericalError("FFTW failed to plan a transform of size " + std::to_string(n));
        return plans_.emplace(n, p).first->second;
    }

private:
    std::mutex mutex_;
    std::map<int, PlanPair> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void check_sizes(const GridSpec& grid, std::size_t in, std::size_t out) {
    if (in != grid.size() || out != grid.size()) {
        throw InvalidArgument("transform buffer size does not match the grid");
    }
}

void execute(fftw_plan plan, std::span<const Complex> in, std::span<Complex> out) {
    // fftw_execute_dft does not modify the input of an out-of-place plan.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (in.data() == out.data()) {
        std::vector<Complex> copy(in.begin(), in.end());
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()), dst);
        return;
    }
    fftw_execute_dft(plan, src, dst);
}

}  // namespace

void forward(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out) {
    check_sizes(grid, in.size(), out.size());
    execute(cache().get(grid.n()).forward, in, out);
    const double scale = 1.0 / double(grid.size());
    for (auto& c : out) c *= scale;
}

void inverse(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out) {
    check_sizes(grid, in.size(), out.size());
    execute(cache().get(grid.n()).backward, in, out);
}

std::vector<double> inverse_even(const GridSpec& grid, std::span<const double> coefficients) {
    if (coefficients.size() != grid.size()) throw InvalidArgument("coefficient array does not match the grid");
    std::vector<Complex> in(coefficients.begin(), coefficients.end());
    std::vector<Complex> out(grid.size());
    inverse(grid, in, out);
    std::vector<double> result(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) result[i] = out[i].real();
    return result;
}

}  // namespace turbogp::dft
