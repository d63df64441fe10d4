#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "glcn/ops.hpp"
#include "glcn/tape.hpp"
#include "gradcheck.hpp"

namespace glcn {
namespace {

using test::check_gradients;
using test::random_away_from_zero;
using test::random_matrix;
using test::weighted_sum;

constexpr double kGradTol = 1e-4;

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_TRUE(a.same_shape(b)) << a.shape() << " vs " << b.shape();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a.values()[k], b.values()[k], tol) << "entry " << k;
}

// ---- matmul -----------------------------------------------------------------

TEST(Matmul, IdentityLeavesOperandUnchanged) {
  Tape t;
  Tensor out = matmul(t.constant(Matrix::identity(2)), t.constant({{3, 4}, {5, 6}}));
  EXPECT_EQ(out.value(), Matrix({{3, 4}, {5, 6}}));
}

TEST(Matmul, RowTimesColumn) {
  Tape t;
  EXPECT_EQ(matmul(t.constant({{1, 2}}), t.constant({{3}, {4}})).scalar(), 11.0);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Tape t;
  try {
    matmul(t.constant(Matrix(2, 3)), t.constant(Matrix(2, 3)));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("[2x3]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("x [2x3]"), std::string::npos);
  }
}

TEST(Matmul, GradientOfSumMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  auto r = check_gradients([](Tape&, const std::vector<Tensor>& in) { return total_sum(matmul(in[0], in[1])); },
                           {random_matrix(3, 3, rng), random_matrix(3, 3, rng)});
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

// ---- relu -------------------------------------------------------------------

TEST(Relu, SignCases) {
  Tape t;
  EXPECT_EQ(relu(t.constant({{-1, 0, 2}})).value(), Matrix({{0, 0, 2}}));
}

TEST(Relu, IdentityOnNonnegatives) {
  Tape t;
  const Matrix m{{0, 1.5}, {2, 3}};
  EXPECT_EQ(relu(t.constant(m)).value(), m);
}

TEST(Relu, SubgradientAtZeroIsZero) {
  Tape t;
  Tensor x = t.variable({{0.0, 1.0}});
  t.backward(total_sum(relu(x)));
  EXPECT_EQ(x.grad(), Matrix({{0.0, 1.0}}));
}

TEST(Relu, GradientAwayFromKink) {
  std::mt19937_64 rng(2);
  auto r = check_gradients([](Tape&, const std::vector<Tensor>& in) { return weighted_sum(relu(in[0])); },
                           {random_away_from_zero(4, 3, rng)});
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

// ---- row_softmax --------------------------------------------------------------

TEST(RowSoftmax, MatchesDirectExpOverSum) {
  Tape t;
  const Matrix out = row_softmax(t.constant({{1, 2, 3}})).value();
  // Independent oracle: exp without max subtraction.
  const double s = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(out(0, 0), std::exp(1.0) / s, 1e-15);
  EXPECT_NEAR(out(0, 0), 0.09003, 1e-5);
  EXPECT_NEAR(out(0, 1), 0.24473, 1e-5);
  EXPECT_NEAR(out(0, 2), 0.66524, 1e-5);
}

TEST(RowSoftmax, ConstantRowIsUniform) {
  Tape t;
  const Matrix out = row_softmax(t.constant({{4.2, 4.2, 4.2}})).value();
  for (double v : out.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(RowSoftmax, MaskForcesSingleSupport) {
  Tape t;
  EXPECT_EQ(row_softmax(t.constant({{5, 5}}), Matrix{{1, 0}}).value(), Matrix({{1, 0}}));
}

TEST(RowSoftmax, FullyMaskedRowReportsRowIndex) {
  Tape t;
  try {
    row_softmax(t.constant({{1, 2}, {3, 4}}), Matrix{{1, 1}, {0, 0}});
    FAIL() << "expected DegenerateRowError";
  } catch (const DegenerateRowError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(RowSoftmax, HugeLogitsStayFinite) {
  Tape t;
  const Matrix out = row_softmax(t.constant({{1000, 1001, 999}})).value();
  EXPECT_TRUE(out.all_finite());
  EXPECT_NEAR(out(0, 0) + out(0, 1) + out(0, 2), 1.0, 1e-12);
}

TEST(RowSoftmax, RowsAreDistributionsAndShiftInvariant) {
  std::mt19937_64 rng(3);
  for (int draw = 0; draw < 20; ++draw) {
    const Matrix a = random_matrix(5, 6, rng, -10, 10);
    Matrix shifted = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double c = std::uniform_real_distribution<double>(-50, 50)(rng);
      for (double& v : shifted.row(i)) v += c;
    }
    Tape t;
    const Matrix s = row_softmax(t.constant(a)).value();
    const Matrix s2 = row_softmax(t.constant(shifted)).value();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      double sum = 0.0;
      for (double v : s.row(i)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    expect_matrix_near(s, s2, 1e-12);
  }
}

TEST(RowSoftmax, GradientUnmaskedAndWeightedMask) {
  std::mt19937_64 rng(4);
  const Matrix mask{{1, 0, 0.5, 2}, {0, 1, 1, 0}, {0.3, 0.3, 0.3, 0.3}};
  auto plain = check_gradients([](Tape&, const std::vector<Tensor>& in) { return weighted_sum(row_softmax(in[0])); },
                               {random_matrix(3, 4, rng)});
  EXPECT_LT(plain.max_rel_error, kGradTol) << plain.worst;
  auto masked = check_gradients(
      [&](Tape&, const std::vector<Tensor>& in) { return weighted_sum(row_softmax(in[0], mask)); },
      {random_matrix(3, 4, rng)});
  EXPECT_LT(masked.max_rel_error, kGradTol) << masked.worst;
}

// ---- pairwise ops -----------------------------------------------------------

TEST(PairwiseAbsDiffProject, ZeroWeightsGiveZeroMatrix) {
  std::mt19937_64 rng(5);
  Tape t;
  EXPECT_EQ(pairwise_abs_diff_project(t.constant(random_matrix(4, 3, rng)), t.constant(Matrix(3, 1))).value(),
            Matrix(4, 4));
}

TEST(PairwiseAbsDiffProject, TwoNodeExample) {
  Tape t;
  EXPECT_EQ(pairwise_abs_diff_project(t.constant({{0}, {3}}), t.constant({{2}})).value(), Matrix({{0, 6}, {6, 0}}));
}

TEST(PairwiseAbsDiffProject, NegativeScoresAreClipped) {
  Tape t;
  EXPECT_EQ(pairwise_abs_diff_project(t.constant({{0}, {3}}), t.constant({{-2}})).value(), Matrix(2, 2));
}

TEST(PairwiseAbsDiffProject, SymmetricWithZeroDiagonal) {
  std::mt19937_64 rng(6);
  for (int draw = 0; draw < 10; ++draw) {
    Tape t;
    const Matrix out =
        pairwise_abs_diff_project(t.constant(random_matrix(6, 4, rng)), t.constant(random_matrix(4, 1, rng))).value();
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(out(i, i), 0.0);
      for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(out(i, j), out(j, i));
    }
  }
}

TEST(PairwiseAbsDiffProject, ShapeMismatch) {
  Tape t;
  EXPECT_THROW(pairwise_abs_diff_project(t.constant(Matrix(3, 2)), t.constant(Matrix(3, 1))), DimensionError);
}

TEST(PairwiseAbsDiffProject, GradientForFeaturesAndWeights) {
  std::mt19937_64 rng(7);
  auto r = check_gradients(
      [](Tape&, const std::vector<Tensor>& in) { return weighted_sum(pairwise_abs_diff_project(in[0], in[1])); },
      {random_matrix(5, 3, rng), random_matrix(3, 1, rng, 0.1, 1.0)});
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
}

TEST(PairwiseSqDist, IdenticalRowsGiveZeros) {
  Tape t;
  EXPECT_EQ(pairwise_sq_dist(t.constant({{1, 2}, {1, 2}, {1, 2}})).value(), Matrix(3, 3));
}

TEST(PairwiseSqDist, ThreeFourFive) {
  Tape t;
  EXPECT_EQ(pairwise_sq_dist(t.constant({{0, 0}, {3, 4}})).value(), Matrix({{0, 25}, {25, 0}}));
}

TEST(PairwiseSqDist, SymmetricWithZeroDiagonal) {
  std::mt19937_64 rng(8);
  Tape t;
  const Matrix out = pairwise_sq_dist(t.constant(random_matrix(7, 3, rng))).value();
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(out(i, i), 0.0);
    for (std::size_t j = 0; j < 7; ++j) EXPECT_EQ(out(i, j), out(j, i));
  }
}

TEST(PairwiseSqDist, Gradient) {
  std::mt19937_64 rng(9);
  auto r = check_gradients([](Tape&, const std::vector<Tensor>& in) { return weighted_sum(pairwise_sq_dist(in[0])); },
                           {random_matrix(5, 3, rng)});
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

// ---- reductions ---------------------------------------------------------------

TEST(FrobeniusSq, Examples) {
  Tape t;
  EXPECT_NEAR(frobenius_sq(t.constant(Matrix(4, 4, 0.25))).scalar(), 1.0, 1e-15);
  EXPECT_EQ(frobenius_sq(t.constant(Matrix(3, 3))).scalar(), 0.0);
  EXPECT_EQ(frobenius_sq(t.constant({{1, 2}, {3, 4}})).scalar(), 30.0);
}

// ---- backward -----------------------------------------------------------------

TEST(Backward, SumGivesOnes) {
  Tape t;
  Tensor x = t.variable({{1, -2}, {3, 4}});
  t.backward(total_sum(x));
  EXPECT_EQ(x.grad(), Matrix(2, 2, 1.0));
}

TEST(Backward, FrobeniusGivesTwiceInput) {
  Tape t;
  Tensor x = t.variable({{1, -2}, {3, 4}});
  t.backward(frobenius_sq(x));
  EXPECT_EQ(x.grad(), Matrix({{2, -4}, {6, 8}}));
}

TEST(Backward, RejectsNonScalarLoss) {
  Tape t;
  Tensor x = t.variable(Matrix(2, 2, 1.0));
  EXPECT_THROW(t.backward(x), ContractError);
}

TEST(Backward, RepeatedCallsAccumulateAndZeroGradResets) {
  Tape t;
  Tensor x = t.variable({{1, 2}});
  Tensor loss = frobenius_sq(x);
  t.backward(loss);
  t.backward(loss);
  EXPECT_EQ(x.grad(), Matrix({{4, 8}}));
  t.zero_grad();
  EXPECT_EQ(x.grad(), Matrix(1, 2));
}

TEST(Backward, ConstantsCarryNoGradient) {
  Tape t;
  Tensor c = t.constant({{1.0}});
  Tensor x = t.variable({{2.0}});
  t.backward(total_sum(hadamard(c, x)));
  EXPECT_FALSE(c.requires_grad());
  EXPECT_THROW(c.grad(), ContractError);
  EXPECT_EQ(x.grad(), Matrix({{1.0}}));
}

TEST(Backward, ParameterBindingIsMemoized) {
  Parameter p{"w", {{3.0}}};
  Tape t;
  Tensor a = t.parameter(p);
  Tensor b = t.parameter(p);
  EXPECT_EQ(a.id(), b.id());
  t.backward(total_sum(hadamard(a, b)));
  EXPECT_EQ(t.grad(p), Matrix({{6.0}}));
}

TEST(Backward, MixingTapesIsRejected) {
  Tape t1, t2;
  EXPECT_THROW(add(t1.variable({{1.0}}), t2.variable({{1.0}})), ContractError);
}

TEST(Backward, SharedSubexpressionsAccumulate) {
  std::mt19937_64 rng(10);
  // x feeds matmul twice and a hadamard; y = x x is reused by two consumers.
  auto r = check_gradients(
      [](Tape&, const std::vector<Tensor>& in) {
        Tensor x = in[0];
        Tensor y = matmul(x, x);
        return add(total_sum(hadamard(y, x)), frobenius_sq(sub(y, transpose(x))));
      },
      {random_matrix(3, 3, rng)});
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
}

TEST(Log, RejectsNonPositive) {
  Tape t;
  EXPECT_THROW(log(t.constant({{1.0, 0.0}})), DomainError);
}

// Every differentiable op, ten random draws each.
struct OpCase {
  const char* name;
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  bool positive_inputs;
  std::function<Tensor(const std::vector<Tensor>&)> op;
};

class OpGradient : public ::testing::TestWithParam<OpCase> {};

TEST_P(OpGradient, MatchesCentralDifferencesOnTenDraws) {
  const OpCase& c = GetParam();
  std::mt19937_64 rng(1234);
  for (int draw = 0; draw < 10; ++draw) {
    std::vector<Matrix> inputs;
    for (auto [r, k] : c.shapes) {
      inputs.push_back(c.positive_inputs ? random_matrix(r, k, rng, 0.1, 2.0) : random_away_from_zero(r, k, rng));
    }
    auto res = check_gradients([&](Tape&, const std::vector<Tensor>& in) { return weighted_sum(c.op(in), draw); },
                               inputs);
    EXPECT_LT(res.max_rel_error, kGradTol) << c.name << " draw " << draw << ": " << res.worst;
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllOps, OpGradient,
    ::testing::Values(
        OpCase{"matmul", {{3, 4}, {4, 2}}, false, [](auto& in) { return matmul(in[0], in[1]); }},
        OpCase{"add", {{3, 2}, {3, 2}}, false, [](auto& in) { return add(in[0], in[1]); }},
        OpCase{"sub", {{3, 2}, {3, 2}}, false, [](auto& in) { return sub(in[0], in[1]); }},
        OpCase{"scale", {{3, 2}}, false, [](auto& in) { return scale(in[0], -1.7); }},
        OpCase{"hadamard", {{3, 2}, {3, 2}}, false, [](auto& in) { return hadamard(in[0], in[1]); }},
        OpCase{"relu", {{3, 3}}, false, [](auto& in) { return relu(in[0]); }},
        OpCase{"clamp_min", {{3, 3}}, false, [](auto& in) { return clamp_min(in[0], 0.0); }},
        OpCase{"log", {{3, 2}}, true, [](auto& in) { return log(in[0]); }},
        OpCase{"transpose", {{2, 3}}, false, [](auto& in) { return transpose(in[0]); }},
        OpCase{"row_sum", {{3, 4}}, false, [](auto& in) { return row_sum(in[0]); }},
        OpCase{"total_sum", {{3, 4}}, false, [](auto& in) { return total_sum(in[0]); }},
        OpCase{"frobenius_sq", {{3, 4}}, false, [](auto& in) { return frobenius_sq(in[0]); }},
        OpCase{"row_softmax", {{4, 5}}, false, [](auto& in) { return row_softmax(in[0]); }},
        OpCase{"pairwise_abs_diff_project", {{5, 3}, {3, 1}}, false,
               [](auto& in) { return pairwise_abs_diff_project(in[0], in[1]); }},
        OpCase{"pairwise_sq_dist", {{5, 3}}, false, [](auto& in) { return pairwise_sq_dist(in[0]); }}),
    [](const ::testing::TestParamInfo<OpCase>& info) { return std::string(info.param.name); });

}  // namespace
}  // namespace glcn
