#include "rbergomi/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rbergomi {

std::size_t Radix2Fft::next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

Radix2Fft::Radix2Fft(std::size_t size) : size_(size) {
    if (size == 0 || (size & (size - 1)) != 0)
        throw std::invalid_argument("Radix2Fft: size must be a power of two");
    bitrev_.resize(size);
    std::size_t j = 0;
    for (std::size_t i = 1; i < size; ++i) {
        std::size_t bit = size >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        bitrev_[i] = j;
    }
    // flat per-stage tables: stage of length `len` owns len/2 entries starting
    // at offset len/2 - 1
    twiddle_.resize(size - 1);
    twiddle_inv_.resize(size - 1);
    for (std::size_t len = 2; len <= size; len <<= 1) {
        const std::size_t half = len >> 1;
        const double step = 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = step * static_cast<double>(k);
            twiddle_[half - 1 + k] = {std::cos(ang), -std::sin(ang)};
            twiddle_inv_[half - 1 + k] = {std::cos(ang), std::sin(ang)};
        }
    }
}

void Radix2Fft::transform(std::complex<double>* data, bool invert) const {
    const std::size_t n = size_;
    auto* a = reinterpret_cast<double*>(data);  // interleaved re/im
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t r = bitrev_[i];
        if (i < r) {
            std::swap(a[2 * i], a[2 * r]);
            std::swap(a[2 * i + 1], a[2 * r + 1]);
        }
    }
    const auto* tw = reinterpret_cast<const double*>((invert ? twiddle_inv_ : twiddle_).data());
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const double* stage_tw = tw + 2 * (half - 1);
        for (std::size_t i = 0; i < n; i += len) {
            double* lo = a + 2 * i;
            double* hi = lo + 2 * half;
            for (std::size_t k = 0; k < half; ++k) {
                const double wr = stage_tw[2 * k], wi = stage_tw[2 * k + 1];
                const double xr = hi[2 * k], xi = hi[2 * k + 1];
                const double vr = xr * wr - xi * wi;
                const double vi = xr * wi + xi * wr;
                const double ur = lo[2 * k], ui = lo[2 * k + 1];
                lo[2 * k] = ur + vr;
                lo[2 * k + 1] = ui + vi;
                hi[2 * k] = ur - vr;
                hi[2 * k + 1] = ui - vi;
            }
        }
    }
    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < 2 * n; ++i) a[i] *= inv_n;
    }
}

void Radix2Fft::forward(std::complex<double>* data) const { transform(data, false); }
void Radix2Fft::inverse(std::complex<double>* data) const { transform(data, true); }

FftConvolver::FftConvolver(std::span<const double> kernel, std::size_t input_len,
                           std::size_t out_len)
    : input_len_(input_len),
      out_len_(out_len),
      fft_(Radix2Fft::next_pow2(input_len + kernel.size())) {
    if (out_len > fft_.size())
        throw std::invalid_argument("FftConvolver: out_len exceeds transform size");
    kernel_hat_.assign(fft_.size(), {0.0, 0.0});
    for (std::size_t m = 0; m < kernel.size(); ++m) kernel_hat_[m] = {kernel[m], 0.0};
    fft_.forward(kernel_hat_.data());
}

void FftConvolver::convolve(std::span<const double> in, std::span<double> out,
                            Scratch& scratch) const {
    auto& buf = scratch.buf;
    buf.assign(fft_.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < input_len_; ++i) buf[i] = {in[i], 0.0};
    fft_.forward(buf.data());
    const auto* kh = reinterpret_cast<const double*>(kernel_hat_.data());
    auto* b = reinterpret_cast<double*>(buf.data());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        const double br = b[2 * i], bi = b[2 * i + 1];
        const double kr = kh[2 * i], ki = kh[2 * i + 1];
        b[2 * i] = br * kr - bi * ki;
        b[2 * i + 1] = br * ki + bi * kr;
    }
    fft_.inverse(buf.data());
    for (std::size_t i = 0; i < out_len_; ++i) out[i] = buf[i].real();
}

void FftConvolver::convolve(std::span<const double> in, std::span<double> out) const {
    Scratch scratch;
    convolve(in, out, scratch);
}

}  // namespace rbergomi
