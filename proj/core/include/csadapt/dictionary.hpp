#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "csadapt/matrix.hpp"

namespace csadapt {

/// [I | D]: N×2N concatenation of the identity and dct_matrix(N).
struct IdentityDct {
  friend bool operator==(const IdentityDct&, const IdentityDct&) = default;
};

/// Column-normalized Gaussian N×L matrix.
struct GaussianRandom {
  friend bool operator==(const GaussianRandom&, const GaussianRandom&) = default;
};

/// CSV matrix loaded from disk and column-normalized.
struct FromFile {
  std::filesystem::path path;
  friend bool operator==(const FromFile&, const FromFile&) = default;
};

using DictionaryKind = std::variant<IdentityDct, GaussianRandom, FromFile>;

/// Accepts "idct", "gauss" and "file:PATH".
DictionaryKind parse_dictionary_kind(const std::string& text);
std::string to_string(const DictionaryKind& kind);

/// n×n orthonormal DCT-II: D(k, j) = c(k) cos(π (2j+1) k / 2n),
/// c(0) = √(1/n), c(k>0) = √(2/n). D is orthogonal, so both its rows and
/// its columns form orthonormal bases.
DenseMatrix dct_matrix(Eigen::Index n);

/// Builds Ψ (n×l). Every returned dictionary has unit-norm columns.
/// IdentityDct requires l == 2n; FromFile ignores `seed` and checks the
/// loaded shape against (n, l).
DenseMatrix build_dictionary(const DictionaryKind& kind, Eigen::Index n, Eigen::Index l, RngSeed seed);

}  // namespace csadapt
