#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rbergomi {

/// In-place iterative radix-2 FFT with precomputed twiddles and bit-reversal
/// table. Size must be a power of two; inverse() includes the 1/n scaling.
class Radix2Fft {
public:
    explicit Radix2Fft(std::size_t size);

    std::size_t size() const { return size_; }

    void forward(std::complex<double>* data) const;
    void inverse(std::complex<double>* data) const;

    static std::size_t next_pow2(std::size_t n);

private:
    void transform(std::complex<double>* data, bool invert) const;

    std::size_t size_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;      // forward, size/2
    std::vector<std::complex<double>> twiddle_inv_;  // inverse, size/2
};

/// Linear convolution of a fixed real kernel with batches of real inputs;
/// the kernel transform is computed once.
class FftConvolver {
public:
    /// kernel[m] multiplies input lag m; output length is capped at out_len.
    FftConvolver(std::span<const double> kernel, std::size_t input_len, std::size_t out_len);

    std::size_t input_len() const { return input_len_; }
    std::size_t out_len() const { return out_len_; }

    /// out := (kernel * in), truncated to out_len. in must have input_len entries.
    void convolve(std::span<const double> in, std::span<double> out) const;

    /// Scratch sized for one call; pass the same object across calls to avoid
    /// reallocation. One buffer per worker thread.
    struct Scratch {
        std::vector<std::complex<double>> buf;
    };
    void convolve(std::span<const double> in, std::span<double> out, Scratch& scratch) const;

private:
    std::size_t input_len_;
    std::size_t out_len_;
    Radix2Fft fft_;
    std::vector<std::complex<double>> kernel_hat_;
};

}  // namespace rbergomi
