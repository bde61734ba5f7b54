#include <gtest/gtest.h>

#include <cmath>

#include "csadapt/dictionary.hpp"
#include "csadapt/errors.hpp"
#include "csadapt/matrix_io.hpp"

namespace csadapt {
namespace {

TEST(Dct, SizeOneAndTwo) {
  EXPECT_EQ(dct_matrix(1), DenseMatrix::Ones(1, 1));
  const DenseMatrix d = dct_matrix(2);
  EXPECT_NEAR(d(0, 0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(d(0, 1), std::sqrt(0.5), 1e-15);
  EXPECT_LT((d.transpose() * d - DenseMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dct, OrthonormalUpTo512) {
  for (Eigen::Index n : {3, 8, 64, 200, 257, 512}) {
    const DenseMatrix d = dct_matrix(n);
    EXPECT_LT((d * d.transpose() - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10) << n;
    for (Eigen::Index j = 0; j < n; ++j) ASSERT_LT(std::abs(d.col(j).norm() - 1.0), 1e-10);
  }
}

TEST(Dictionary, IdentityDctLayout) {
  const DenseMatrix psi = build_dictionary(IdentityDct{}, 200, 400, RngSeed{0});
  ASSERT_EQ(psi.rows(), 200);
  ASSERT_EQ(psi.cols(), 400);
  EXPECT_EQ(psi.leftCols(200), DenseMatrix::Identity(200, 200));
  Eigen::Index single_nonzero = 0;
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    if ((psi.col(j).array() != 0.0).count() == 1) ++single_nonzero;
    ASSERT_LT(std::abs(psi.col(j).norm() - 1.0), 1e-10);
  }
  EXPECT_EQ(single_nonzero, 200);
}

TEST(Dictionary, IdentityDctSmall) {
  const DenseMatrix psi = build_dictionary(IdentityDct{}, 2, 4, RngSeed{0});
  // third column (index 2) is the first DCT column (√½, √½)
  EXPECT_NEAR(psi(0, 2), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(psi(1, 2), std::sqrt(0.5), 1e-15);
}

TEST(Dictionary, IdentityDctRequiresDoubleWidth) {
  EXPECT_THROW(build_dictionary(IdentityDct{}, 4, 7, RngSeed{0}), DimensionError);
}

TEST(Dictionary, GaussianIsReproducibleAndNormalized) {
  const DenseMatrix a = build_dictionary(GaussianRandom{}, 4, 8, RngSeed{3});
  EXPECT_EQ(a, build_dictionary(GaussianRandom{}, 4, 8, RngSeed{3}));
  for (Eigen::Index j = 0; j < a.cols(); ++j) EXPECT_LT(std::abs(a.col(j).norm() - 1.0), 1e-10);
}

TEST(Dictionary, FromFileNormalizesAndChecksShape) {
  const auto p = std::filesystem::temp_directory_path() / "csadapt_dict_test.csv";
  write_file_atomic(p, "3,0\n4,2\n");
  const DenseMatrix psi = build_dictionary(FromFile{p}, 2, 2, RngSeed{0});
  EXPECT_DOUBLE_EQ(psi(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(psi(1, 1), 1.0);
  EXPECT_THROW(build_dictionary(FromFile{p}, 2, 3, RngSeed{0}), DimensionError);
  EXPECT_THROW(build_dictionary(FromFile{"/no/such/file.csv"}, 2, 2, RngSeed{0}), IoError);
}

TEST(Dictionary, KindParsing) {
  EXPECT_TRUE(std::holds_alternative<IdentityDct>(parse_dictionary_kind("idct")));
  EXPECT_TRUE(std::holds_alternative<GaussianRandom>(parse_dictionary_kind("gauss")));
  const auto f = parse_dictionary_kind("file:/tmp/x.csv");
  ASSERT_TRUE(std::holds_alternative<FromFile>(f));
  EXPECT_EQ(to_string(f), "file:/tmp/x.csv");
  EXPECT_THROW(parse_dictionary_kind("wavelet"), ConfigError);
  EXPECT_THROW(parse_dictionary_kind("file:"), ConfigError);
}

}  // namespace
}  // namespace csadapt
