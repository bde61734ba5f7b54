#include "csadapt/dictionary.hpp"

#include <cmath>
#include <numbers>

#include "csadapt/errors.hpp"
#include "csadapt/matrix_io.hpp"

namespace csadapt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string dims(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

DictionaryKind parse_dictionary_kind(const std::string& text) {
  if (text == "idct") return IdentityDct{};
  if (text == "gauss") return GaussianRandom{};
  if (text.starts_with("file:") && text.size() > 5) return FromFile{text.substr(5)};
  throw ConfigError("unknown dictionary '" + text + "' (expected idct, gauss or file:PATH)");
}

std::string to_string(const DictionaryKind& kind) {
  return std::visit(Overloaded{[](const IdentityDct&) { return std::string("idct"); },
                               [](const GaussianRandom&) { return std::string("gauss"); },
                               [](const FromFile& f) { return "file:" + f.path.string(); }},
                    kind);
}

DenseMatrix dct_matrix(Eigen::Index n) {
  if (n < 1) throw DimensionError("dct_matrix: size must be at least 1, got " + std::to_string(n));
  DenseMatrix d(n, n);
  const double nn = static_cast<double>(n);
  const double c0 = std::sqrt(1.0 / nn);
  const double ck = std::sqrt(2.0 / nn);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double scale = k == 0 ? c0 : ck;
    for (Eigen::Index j = 0; j < n; ++j) {
      // reduce the argument mod 4n to keep cos accurate for large n
      const auto phase = ((2 * j + 1) * k) % (4 * n);
      d(k, j) = scale * std::cos(std::numbers::pi * static_cast<double>(phase) / (2.0 * nn));
    }
  }
  return d;
}

DenseMatrix build_dictionary(const DictionaryKind& kind, Eigen::Index n, Eigen::Index l, RngSeed seed) {
  if (n < 1 || l < 1) throw DimensionError("build_dictionary: invalid shape " + dims(n, l));
  return std::visit(
      Overloaded{
          [&](const IdentityDct&) -> DenseMatrix {
            if (l != 2 * n) {
              throw DimensionError("build_dictionary: [I|DCT] needs l = 2n, got " + dims(n, l));
            }
            DenseMatrix psi(n, l);
            psi.leftCols(n).setIdentity();
            psi.rightCols(n) = dct_matrix(n);
            return psi;
          },
          [&](const GaussianRandom&) -> DenseMatrix { return gaussian_matrix(n, l, seed); },
          [&](const FromFile& f) -> DenseMatrix {
            DenseMatrix psi = read_matrix_csv(f.path);
            if (psi.rows() != n || psi.cols() != l) {
              throw DimensionError("build_dictionary: '" + f.path.string() + "' is " + dims(psi.rows(), psi.cols()) +
                                   ", expected " + dims(n, l));
            }
            return normalize_columns(psi);
          }},
      kind);
}

}  // namespace csadapt
