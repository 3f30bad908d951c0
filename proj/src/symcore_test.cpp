#include "rotrook/symcore.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

namespace rotrook {
namespace {

TEST(PackedIndex, RowMajorUpperLayout) {
  EXPECT_EQ(packed_index(0, 0, 4), 0u);
  EXPECT_EQ(packed_index(1, 2, 4), 5u);
  EXPECT_EQ(packed_index(3, 3, 4), 9u);
  EXPECT_EQ(packed_index(0, 3, 4), 3u);
  EXPECT_EQ(packed_index(1, 1, 4), 4u);
}

TEST(PackedIndex, CanonicalizesPairs) {
  EXPECT_EQ(packed_index(2, 1, 4), packed_index(1, 2, 4));
  EXPECT_EQ(packed_index(3, 0, 4), packed_index(0, 3, 4));
}

TEST(PackedIndex, IsABijectionOntoTheStorage) {
  for (std::size_t n : {1u, 2u, 5u, 17u}) {
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const std::size_t off = packed_index(i, j, n);
        EXPECT_LT(off, n * (n + 1) / 2);
        EXPECT_EQ(off, packed_offset(i, j, n));
        seen.insert(off);
      }
    EXPECT_EQ(seen.size(), n * (n + 1) / 2);
  }
}

TEST(PackedIndex, OutOfRangeIsAUsageError) {
  EXPECT_THROW(packed_index(4, 0, 4), UsageError);
  EXPECT_THROW(packed_index(0, 4, 4), UsageError);
  EXPECT_THROW(packed_index(0, 0, 0), UsageError);
}

TEST(PackedSymMatrix, DataLengthMustMatch) {
  EXPECT_NO_THROW(PackedSymMatrix(3, std::vector<double>(6)));
  EXPECT_THROW(PackedSymMatrix(3, std::vector<double>(5)), UsageError);
  EXPECT_THROW(PackedSymMatrix(3, std::vector<double>(9)), UsageError);
}

TEST(PackedSymMatrix, AccessIsSymmetric) {
  PackedSymMatrix a(3);
  a.set(2, 0, 7.5);
  a.set(1, 1, -2.0);
  EXPECT_EQ(a.get(0, 2), 7.5);
  EXPECT_EQ(a.get(2, 0), 7.5);
  EXPECT_EQ(a.upper(0, 2), 7.5);
  EXPECT_EQ(a.at_sym(2, 0), 7.5);
  EXPECT_EQ(a.get(1, 1), -2.0);
  EXPECT_THROW(a.get(3, 0), UsageError);
  EXPECT_THROW(a.set(0, 3, 1.0), UsageError);
}

TEST(PackedSymMatrix, DenseRoundTrip) {
  const std::vector<double> full{1, 2, 3,
                                 2, 4, 5,
                                 3, 5, 6};
  const PackedSymMatrix a = PackedSymMatrix::from_dense(3, full);
  EXPECT_EQ(a.data().size(), 6u);
  EXPECT_EQ(a.to_dense(), full);
  EXPECT_EQ(a.max_abs(), 6.0);
  EXPECT_TRUE(a.all_finite());
}

TEST(PackedSymMatrix, FromDenseReadsOnlyTheUpperTriangle) {
  const std::vector<double> full{1, 2, 99, 1};
  const PackedSymMatrix a = PackedSymMatrix::from_dense(2, full);
  EXPECT_EQ(a.get(1, 0), 2.0);
}

TEST(PackedSymMatrix, NonFiniteIsDetected) {
  PackedSymMatrix a = PackedSymMatrix::identity(2);
  a.set(0, 1, std::numeric_limits<double>::quiet_NaN());
  EXPECT_FALSE(a.all_finite());
}

TEST(SymMatvec, Examples) {
  const std::vector<double> x3{1, 2, 3};
  EXPECT_EQ(sym_matvec(PackedSymMatrix::identity(3), x3), x3);

  const PackedSymMatrix perm(2, {0, 1, 0});
  EXPECT_EQ(sym_matvec(perm, std::vector<double>{1, 0}), (std::vector<double>{0, 1}));

  const PackedSymMatrix a(2, {1, 2, 1});
  EXPECT_EQ(sym_matvec(a, std::vector<double>{1, 1}), (std::vector<double>{3, 3}));
}

TEST(SymMatvec, DimensionMismatch) {
  EXPECT_THROW(sym_matvec(PackedSymMatrix::identity(3), std::vector<double>{1, 2}),
               UsageError);
}

TEST(FrobeniusDiff, Examples) {
  const PackedSymMatrix a(2, {1, 2, 1});
  EXPECT_EQ(frobenius_diff(a, a), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_diff(PackedSymMatrix::identity(2), PackedSymMatrix(2)),
                   std::sqrt(2.0));
  EXPECT_NEAR(frobenius_diff(a, PackedSymMatrix(2)), std::sqrt(10.0), 1e-15);
  EXPECT_NEAR(a.frobenius_norm(), 3.1623, 1e-4);
  EXPECT_THROW(frobenius_diff(a, PackedSymMatrix(3)), UsageError);
}

TEST(Norm2, AvoidsOverflowAndUnderflow) {
  EXPECT_DOUBLE_EQ(norm2(std::vector<double>{3e200, 4e200}), 5e200);
  EXPECT_DOUBLE_EQ(norm2(std::vector<double>{3e-200, 4e-200}), 5e-200);
  EXPECT_EQ(norm2(std::vector<double>{}), 0.0);
}

}  // namespace
}  // namespace rotrook
