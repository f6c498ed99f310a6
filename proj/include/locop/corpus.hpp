#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "locop/json_io.hpp"

namespace locop::corpus {

// a(i, j) = a(i − j) on {0, …, size−1}.
LocalizedMatrix toeplitz(const FiniteSequence& a, long size);

// Band-limited random matrix on {0, …, size−1}: off-diagonals uniform in
// [−scale, scale], constant diagonal gap + 2·band·scale so that every row and
// column is dominated by at least `gap`. Rows are drawn in order from one
// seeded stream, so smaller sizes are exact sections of larger ones.
LocalizedMatrix banded_random(long size, int band, double scale, std::uint64_t seed, double gap = 0.5);

// a(j, αj + k) = b(k) for rows j in {0, …, rows−1}; columns {0, …, α(rows−1) + last offset}.
LocalizedMatrix slanted(long rows, long alpha, const FiniteSequence& b);

// Real part of the Gram matrix of the Gaussian Gabor system
// M_{bm} T_{ak} 2^{1/4}e^{−πx²}, indexed by (ak, bm) ∈ ℝ², entries kept for
// |z − z′| ≤ radius.
LocalizedMatrix gabor_gram(double a, double b, long k_count, long m_count, double radius = 5.0);

// Gram matrix of the order-m cardinal B-spline shifts: N_{2m}(m + i − j).
LocalizedMatrix bspline_gram(int order, long size);

// Rows shuffled by a seeded permutation (index points move with their rows).
LocalizedMatrix row_permuted(const LocalizedMatrix& a, std::uint64_t seed);

// K(x, y) = θ·exp(−((x − y)/σ)²) with envelope |θ|·exp(−(u/σ)²), α = 1 and D
// calibrated to the measured envelope and modulus norms.
KernelOperator gaussian_kernel(double theta, double sigma);

// Shifts of the order-m B-spline on {0, …, size−1} with an indicator envelope
// and a calibrated modulus bound.
GeneratorFamily bspline_family(int order, long size);

std::string sha256_hex(const std::string& data);

// Writes every object listed in the generation request into out_dir plus manifest.json;
// returns the manifest.
io::json generate(const io::json& request, const std::filesystem::path& out_dir);

}  // namespace locop::corpus
