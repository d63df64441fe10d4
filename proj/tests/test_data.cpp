#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "glcn/data.hpp"
#include "glcn/gconv.hpp"

namespace glcn {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("glcn_data_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }

  fs::path dir_;
};

const char* kFeatures3 = "id,a,b\nx,1,0\ny,0,1\nz,0.5,0.5\n";
const char* kLabels3 = "id,label\nx,cat\ny,dog\nz,cat\n";

// ---- load_citation ------------------------------------------------------------

using LoadCitation = TempDir;

TEST_F(LoadCitation, ChainIsSymmetrized) {
  const Dataset ds = load_citation(write("e.txt", "x y\ny z\n"), write("f.csv", kFeatures3), write("l.csv", kLabels3));
  ASSERT_TRUE(ds.adjacency);
  std::size_t nonzeros = 0;
  for (double v : ds.adjacency->values()) nonzeros += v != 0.0 ? 1 : 0;
  EXPECT_EQ(nonzeros, 4u);
  EXPECT_EQ((*ds.adjacency)(0, 1), 1.0);
  EXPECT_EQ((*ds.adjacency)(2, 1), 1.0);
  EXPECT_EQ(ds.edge_lines, 2u);
  EXPECT_EQ(ds.undirected_edges(), 2u);
  EXPECT_EQ(ds.features, Matrix({{1, 0}, {0, 1}, {0.5, 0.5}}));
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"cat", "dog"}));
  EXPECT_EQ(ds.labels, Matrix({{1, 0}, {0, 1}, {1, 0}}));
}

TEST_F(LoadCitation, DanglingEdgeNamesLine) {
  try {
    load_citation(write("e.txt", "x y\n# comment\ny w\n"), write("f.csv", kFeatures3), write("l.csv", kLabels3));
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'w'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("e.txt:3"), std::string::npos) << msg;
  }
}

TEST_F(LoadCitation, DuplicateNodeId) {
  EXPECT_THROW(load_citation(write("e.txt", "x y\n"), write("f.csv", "id,a\nx,1\nx,2\n"), write("l.csv", kLabels3)),
               LoadError);
}

TEST_F(LoadCitation, MultiLabelRowIsRejected) {
  EXPECT_THROW(load_citation(write("e.txt", "x y\n"), write("f.csv", kFeatures3),
                             write("l.csv", "id,label\nx,cat\ny,dog\nz,cat\nz,dog\n")),
               LoadError);
  EXPECT_THROW(load_citation(write("e.txt", "x y\n"), write("f.csv", kFeatures3),
                             write("l.csv", "id,label\nx,cat;dog\ny,dog\nz,cat\n")),
               LoadError);
}

TEST_F(LoadCitation, EmptyEdgeFileNeedsGraphFreeFlag) {
  const auto e = write("e.txt", "# nothing\n");
  const auto f = write("f.csv", kFeatures3);
  const auto l = write("l.csv", kLabels3);
  EXPECT_THROW(load_citation(e, f, l), LoadError);
  const Dataset ds = load_citation(e, f, l, true);
  EXPECT_FALSE(ds.adjacency);
}

TEST_F(LoadCitation, WeightedEdgesAndBadWeights) {
  const Dataset ds = load_citation(write("e.txt", "x y 0.25\n"), write("f.csv", kFeatures3), write("l.csv", kLabels3));
  EXPECT_EQ((*ds.adjacency)(1, 0), 0.25);
  EXPECT_THROW(load_citation(write("e2.txt", "x y -1\n"), write("f.csv", kFeatures3), write("l.csv", kLabels3)),
               LoadError);
}

TEST_F(LoadCitation, NumericClassNamesSortNumerically) {
  const Dataset ds = load_citation(write("e.txt", "x y\n"), write("f.csv", kFeatures3),
                                   write("l.csv", "id,label\nx,10\ny,2\nz,1\n"));
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"1", "2", "10"}));
}

TEST_F(LoadCitation, BadNumberReportsLocation) {
  try {
    load_citation(write("e.txt", "x y\n"), write("f.csv", "id,a\nx,1\ny,oops\nz,0\n"), write("l.csv", kLabels3));
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos) << e.what();
  }
}

using LoadLinqs = TempDir;

TEST_F(LoadLinqs, ReadsContentAndCites) {
  const Dataset ds = load_linqs(write("c.content", "31 0 1 1 Theory\n7 1 0 0 Rule\n9 1 1 0 Theory\n"),
                                write("c.cites", "31 7\n9 31\n"));
  EXPECT_EQ(ds.nodes(), 3u);
  EXPECT_EQ(ds.feature_dim(), 3u);
  EXPECT_EQ(ds.classes(), 2u);
  EXPECT_EQ(ds.edge_lines, 2u);
  EXPECT_EQ((*ds.adjacency)(2, 0), 1.0);
}

TEST_F(LoadLinqs, DanglingCitationsAreErrorsUnlessDropped) {
  const auto c = write("c.content", "1 0 A\n2 1 B\n");
  const auto e = write("c.cites", "1 2\n1 99\n");
  EXPECT_THROW(load_linqs(c, e), LoadError);
  EXPECT_EQ(load_linqs(c, e, true).edge_lines, 1u);
}

// ---- round trip -----------------------------------------------------------------

using DatasetDir = TempDir;

TEST_F(DatasetDir, SaveLoadIsLossless) {
  SynthSpec spec;
  spec.n_per_class = 15;
  spec.features = 4;
  spec.seed = 3;
  Dataset ds = synth_blobs(spec);
  ds.adjacency = knn_gaussian_graph(ds.features, 4);
  (*ds.adjacency)(0, 1) = (*ds.adjacency)(1, 0) = 1.0;  // exercises the unweighted line form
  Rng rng(1);
  ds = make_splits(ds, {.labels_per_class = 3, .val_count = 5, .test_count = 10}, rng);
  save_dataset_dir(ds, dir_ / "out");
  const Dataset back = load_dataset_dir(dir_ / "out");
  EXPECT_EQ(back.features, ds.features);
  ASSERT_TRUE(back.adjacency);
  EXPECT_EQ(*back.adjacency, *ds.adjacency);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.splits, ds.splits);
  EXPECT_EQ(back.node_names, ds.node_names);
  EXPECT_EQ(back.class_names, ds.class_names);
}

TEST_F(DatasetDir, MissingEdgesGivesGraphFreeDataset) {
  const Dataset ds = synth_blobs({.n_per_class = 4, .classes = 2, .features = 2});
  save_dataset_dir(ds, dir_ / "g");
  EXPECT_FALSE(fs::exists(dir_ / "g" / "edges.txt"));
  EXPECT_FALSE(load_dataset_dir(dir_ / "g").adjacency);
}

TEST_F(DatasetDir, OverlappingSplitsAreRejected) {
  const Dataset ds = synth_blobs({.n_per_class = 4, .classes = 2, .features = 2});
  save_dataset_dir(ds, dir_ / "s");
  write("s/splits.json", R"({"train":[0,1],"val":[1],"test":[2]})");
  EXPECT_THROW(load_dataset_dir(dir_ / "s"), LoadError);
}

// ---- make_splits ------------------------------------------------------------------

Dataset seven_classes() {
  return synth_blobs({.n_per_class = 100, .classes = 7, .features = 8, .noise_sigma = 0.1, .separation = 1.0, .seed = 2});
}

TEST(MakeSplits, TwentyPerClassOnSevenClasses) {
  Rng rng(0);
  const Dataset ds = make_splits(seven_classes(), {.labels_per_class = 20, .val_count = 300, .test_count = 200}, rng);
  EXPECT_EQ(ds.splits.train.size(), 140u);
  EXPECT_EQ(ds.splits.val.size(), 300u);
  EXPECT_EQ(ds.splits.test.size(), 200u);
  std::vector<std::size_t> per_class(7, 0);
  for (std::size_t i : ds.splits.train) ++per_class[ds.label_of(i)];
  for (std::size_t c : per_class) EXPECT_EQ(c, 20u);
  EXPECT_NO_THROW(ds.validate());
}

TEST(MakeSplits, RestGoesToTestByDefault) {
  Rng rng(0);
  const Dataset ds = make_splits(seven_classes(), {.labels_per_class = 10, .val_count = 100}, rng);
  EXPECT_EQ(ds.splits.test.size(), 700u - 70u - 100u);
}

TEST(MakeSplits, ExhaustedClassesLeaveNothingForValidation) {
  Rng rng(0);
  try {
    make_splits(seven_classes(), {.labels_per_class = 100, .val_count = 10}, rng);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("short by"), std::string::npos) << e.what();
  }
  EXPECT_THROW(make_splits(seven_classes(), {.labels_per_class = 101, .val_count = 10}, rng), ConfigError);
}

TEST(MakeSplits, SeedsVaryButSizesDoNot) {
  Rng a(1), b(2), a2(1);
  const SplitSpec spec{.labels_per_class = 5, .val_count = 50, .test_count = 100};
  const Dataset da = make_splits(seven_classes(), spec, a);
  const Dataset db = make_splits(seven_classes(), spec, b);
  const Dataset da2 = make_splits(seven_classes(), spec, a2);
  EXPECT_NE(da.splits, db.splits);
  EXPECT_EQ(da.splits, da2.splits);
  EXPECT_EQ(da.splits.train.size(), db.splits.train.size());
  EXPECT_EQ(da.splits.test.size(), db.splits.test.size());
}

TEST(MakeSplits, TotalLabeledMode) {
  Rng rng(4);
  const Dataset ds = make_splits(seven_classes(), {.total_labeled = 33, .val_count = 10}, rng);
  EXPECT_EQ(ds.splits.train.size(), 33u);
  EXPECT_THROW(make_splits(seven_classes(), {.val_count = 10}, rng), ConfigError);
}

// ---- knn_gaussian_graph -------------------------------------------------------

TEST(KnnGraph, AllNeighboursGivesFullyConnectedGraph) {
  std::mt19937_64 rng(1);
  Matrix x(6, 2);
  std::normal_distribution<double> g;
  for (double& v : x.values()) v = g(rng);
  const Matrix a = knn_gaussian_graph(x, 5);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(a(i, j) > 0.0, i != j);
}

TEST(KnnGraph, FarClustersAreDisconnected) {
  const Dataset ds = synth_blobs({.n_per_class = 20, .classes = 2, .features = 3, .noise_sigma = 0.05,
                                  .separation = 50.0, .seed = 5});
  const Matrix a = knn_gaussian_graph(ds.features, 3);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 40; ++j)
      if (ds.label_of(i) != ds.label_of(j)) {
        EXPECT_LT(a(i, j), 1e-10);
      }
}

TEST(KnnGraph, MatchesKernelAndDegreeBound) {
  std::mt19937_64 rng(2);
  for (int draw = 0; draw < 10; ++draw) {
    Matrix x(15, 3);
    std::normal_distribution<double> g;
    for (double& v : x.values()) v = g(rng);
    const double sigma = 0.8;
    const Matrix a = knn_gaussian_graph(x, 4, sigma);
    for (std::size_t i = 0; i < 15; ++i) {
      std::size_t degree = 0;
      for (std::size_t j = 0; j < 15; ++j) {
        EXPECT_EQ(a(i, j), a(j, i));
        EXPECT_GE(a(i, j), 0.0);
        if (a(i, j) == 0.0) continue;
        ++degree;
        double d2 = 0.0;
        for (std::size_t c = 0; c < 3; ++c) d2 += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
        EXPECT_NEAR(a(i, j), std::exp(-d2 / (2 * sigma * sigma)), 1e-15);
      }
      EXPECT_GE(degree, 4u);
      EXPECT_EQ(a(i, i), 0.0);
    }
  }
}

TEST(KnnGraph, ParameterErrors) {
  const Matrix x(4, 2);
  EXPECT_THROW(knn_gaussian_graph(x, 0), ConfigError);
  EXPECT_THROW(knn_gaussian_graph(x, 4), ConfigError);
  EXPECT_THROW(knn_gaussian_graph(x, 2, -1.0), ConfigError);
}

// ---- synth_blobs ----------------------------------------------------------------

TEST(SynthBlobs, ZeroNoiseCollapsesEachClass) {
  const Dataset ds = synth_blobs({.n_per_class = 5, .classes = 3, .features = 4, .noise_sigma = 0.0});
  for (std::size_t i = 0; i < ds.nodes(); ++i) {
    const std::size_t first = ds.label_of(i) * 5;
    for (std::size_t f = 0; f < 4; ++f) EXPECT_EQ(ds.features(i, f), ds.features(first, f));
  }
}

TEST(SynthBlobs, CentresAreSeparationApart) {
  const Dataset ds = synth_blobs({.n_per_class = 1, .classes = 3, .features = 5, .noise_sigma = 0.0, .separation = 2.5});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < 5; ++f) d2 += std::pow(ds.features(i, f) - ds.features(j, f), 2);
      EXPECT_NEAR(std::sqrt(d2), 2.5, 1e-12);
    }
}

TEST(SynthBlobs, WellSeparatedBlobsAreOneNnSeparable) {
  // Noise is per coordinate, so the ratio is taken in the plane.
  const Dataset ds = synth_blobs({.n_per_class = 100, .classes = 2, .features = 2, .noise_sigma = 0.2,
                                  .separation = 5 * 0.2, .seed = 8});
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.nodes(); ++i) {
    double best = INFINITY;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < ds.nodes(); ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t f = 0; f < 2; ++f) d2 += std::pow(ds.features(i, f) - ds.features(j, f), 2);
      if (d2 < best) {
        best = d2;
        arg = j;
      }
    }
    hits += ds.label_of(arg) == ds.label_of(i) ? 1 : 0;
  }
  EXPECT_EQ(hits, ds.nodes());
}

TEST(SynthBlobs, SeedReproducibility) {
  const SynthSpec spec{.n_per_class = 10, .seed = 99};
  EXPECT_EQ(synth_blobs(spec).features, synth_blobs(spec).features);
  SynthSpec other = spec;
  other.seed = 100;
  EXPECT_NE(synth_blobs(spec).features, synth_blobs(other).features);
}

TEST(RowNormalize, RowsSumToOneAndZeroRowsStay) {
  Matrix x{{1, 3}, {0, 0}, {2, 2}};
  row_normalize(x);
  EXPECT_EQ(x, Matrix({{0.25, 0.75}, {0, 0}, {0.5, 0.5}}));
}

TEST(DatasetValidate, RejectsAsymmetricAdjacency) {
  Dataset ds = synth_blobs({.n_per_class = 2, .classes = 2, .features = 2});
  Matrix a(4, 4);
  a(0, 1) = 1.0;
  ds.adjacency = a;
  EXPECT_THROW(ds.validate(), LoadError);
}

}  // namespace
}  // namespace glcn
