#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "glcn/errors.hpp"
#include "glcn/matrix.hpp"
#include "glcn/optim.hpp"

namespace glcn {

struct Splits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  friend bool operator==(const Splits&, const Splits&) = default;
};

/// Node features, optional prior adjacency, one-hot labels and index splits.
struct Dataset {
  Matrix features;                 ///< n x p
  std::optional<Matrix> adjacency; ///< n x n, symmetric, nonnegative
  Matrix labels;                   ///< n x c, one-hot rows
  std::vector<std::string> node_names;
  std::vector<std::string> class_names;
  Splits splits;
  std::size_t edge_lines = 0;      ///< edge records read from disk, before symmetrization

  std::size_t nodes() const { return features.rows(); }
  std::size_t feature_dim() const { return features.cols(); }
  std::size_t classes() const { return labels.cols(); }

  std::size_t label_of(std::size_t i) const {
    auto r = labels.row(i);
    return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }

  std::vector<std::size_t> class_sizes() const {
    std::vector<std::size_t> sizes(classes(), 0);
    for (std::size_t i = 0; i < nodes(); ++i) ++sizes[label_of(i)];
    return sizes;
  }

  std::size_t undirected_edges() const {
    if (!adjacency) return 0;
    std::size_t e = 0;
    for (std::size_t i = 0; i < adjacency->rows(); ++i)
      for (std::size_t j = i + 1; j < adjacency->cols(); ++j) e += (*adjacency)(i, j) != 0.0 ? 1 : 0;
    return e;
  }

  void validate() const {
    const std::size_t n = nodes();
    if (labels.rows() != n) throw LoadError("label rows " + std::to_string(labels.rows()) + " != nodes " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (double v : labels.row(i)) {
        if (v != 0.0 && v != 1.0) throw LoadError("label row " + std::to_string(i) + " is not one-hot");
        sum += v;
      }
      if (sum != 1.0) throw LoadError("label row " + std::to_string(i) + " is not one-hot");
    }
    if (adjacency) {
      const Matrix& a = *adjacency;
      if (a.rows() != n || a.cols() != n) throw LoadError("adjacency " + a.shape() + " does not match " + std::to_string(n) + " nodes");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (!(a(i, j) >= 0.0)) throw LoadError("adjacency has a negative or NaN entry");
          if (a(i, j) != a(j, i)) throw LoadError("adjacency is not symmetric");
        }
    }
    std::vector<char> seen(n, 0);
    for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
      for (std::size_t i : *part) {
        if (i >= n) throw LoadError("split index " + std::to_string(i) + " out of range");
        if (seen[i]) throw LoadError("split index " + std::to_string(i) + " appears in more than one split");
        seen[i] = 1;
      }
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) throw LoadError("not a number '" + s + "' at " + where);
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw LoadError("cannot open " + p.string());
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw LoadError("cannot write " + p.string());
  return out;
}

// Class order: numeric when every name is an integer, otherwise lexicographic.
inline std::vector<std::string> order_class_names(const std::set<std::string>& names) {
  std::vector<std::string> v(names.begin(), names.end());
  const bool numeric = std::all_of(v.begin(), v.end(), [](const std::string& s) {
    long long x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    return ec == std::errc{} && p == s.data() + s.size();
  });
  if (numeric) {
    std::sort(v.begin(), v.end(), [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
  }
  return v;
}

inline Matrix one_hot(const std::vector<std::string>& node_labels, const std::vector<std::string>& class_names) {
  std::map<std::string, std::size_t> cls;
  for (std::size_t k = 0; k < class_names.size(); ++k) cls[class_names[k]] = k;
  Matrix y(node_labels.size(), class_names.size());
  for (std::size_t i = 0; i < node_labels.size(); ++i) y(i, cls.at(node_labels[i])) = 1.0;
  return y;
}

struct EdgeRead {
  Matrix adjacency;
  std::size_t lines = 0;
};

// "a b [w]" per line, '#' comments. Edges are symmetrized; w defaults to 1.
inline EdgeRead read_edges(const std::filesystem::path& path, const std::unordered_map<std::string, std::size_t>& ids) {
  auto in = open_in(path);
  EdgeRead r{Matrix(ids.size(), ids.size()), 0};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);
    if (tok.size() != 2 && tok.size() != 3) throw LoadError("expected 'src dst [weight]' at " + where);
    auto a = ids.find(tok[0]);
    auto b = ids.find(tok[1]);
    if (a == ids.end()) throw LoadError("dangling edge id '" + tok[0] + "' at " + where);
    if (b == ids.end()) throw LoadError("dangling edge id '" + tok[1] + "' at " + where);
    const double w = tok.size() == 3 ? parse_double(tok[2], where) : 1.0;
    if (!(w >= 0.0) || !std::isfinite(w)) throw LoadError("edge weight must be finite and nonnegative at " + where);
    r.adjacency(a->second, b->second) = w;
    r.adjacency(b->second, a->second) = w;
    ++r.lines;
  }
  return r;
}

inline std::vector<std::size_t> index_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw LoadError(std::string("splits file lacks array '") + key + "'");
  std::vector<std::size_t> v;
  for (const auto& e : j.at(key)) {
    if (!e.is_number_unsigned()) throw LoadError(std::string("splits '") + key + "' must hold nonnegative integers");
    v.push_back(e.get<std::size_t>());
  }
  return v;
}

}  // namespace detail

/// Reads features.csv ("id,f0,f1,...") and labels.csv ("id,label"), then an
/// optional edge list. An edge file with no edges is rejected unless
/// allow_graph_free is set, in which case the dataset carries no adjacency.
inline Dataset load_citation(const std::filesystem::path& edge_file, const std::filesystem::path& feature_file,
                             const std::filesystem::path& label_file, bool allow_graph_free = false) {
  Dataset ds;
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<double> values;
  std::size_t p = 0;
  {
    auto in = detail::open_in(feature_file);
    std::string line;
    if (!std::getline(in, line)) throw LoadError(feature_file.string() + " is empty");
    const auto header = detail::split_csv(line);
    if (header.size() < 2) throw LoadError(feature_file.string() + ": header needs an id column and at least one feature");
    p = header.size() - 1;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      const std::string where = feature_file.filename().string() + ":" + std::to_string(lineno);
      const auto cells = detail::split_csv(line);
      if (cells.size() != p + 1) throw LoadError("expected " + std::to_string(p + 1) + " columns at " + where);
      if (!ids.emplace(cells[0], ds.node_names.size()).second) throw LoadError("duplicate node id '" + cells[0] + "' at " + where);
      ds.node_names.push_back(cells[0]);
      for (std::size_t k = 1; k < cells.size(); ++k) values.push_back(detail::parse_double(cells[k], where));
    }
  }
  const std::size_t n = ds.node_names.size();
  if (n == 0) throw LoadError(feature_file.string() + " has no nodes");
  ds.features = Matrix(n, p, std::move(values));

  std::vector<std::string> node_labels(n);
  {
    auto in = detail::open_in(label_file);
    std::string line;
    if (!std::getline(in, line)) throw LoadError(label_file.string() + " is empty");
    std::size_t lineno = 1;
    std::vector<char> seen(n, 0);
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      const std::string where = label_file.filename().string() + ":" + std::to_string(lineno);
      const auto cells = detail::split_csv(line);
      if (cells.size() != 2) throw LoadError("expected 'id,label' at " + where);
      auto it = ids.find(cells[0]);
      if (it == ids.end()) throw LoadError("label for unknown node '" + cells[0] + "' at " + where);
      if (seen[it->second]) throw LoadError("node '" + cells[0] + "' labelled twice (multi-label rows are not supported) at " + where);
      if (cells[1].empty() || cells[1].find(';') != std::string::npos) {
        throw LoadError("node '" + cells[0] + "' needs exactly one label at " + where);
      }
      seen[it->second] = 1;
      node_labels[it->second] = cells[1];
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i]) throw LoadError("node '" + ds.node_names[i] + "' has no label");
  }
  ds.class_names = detail::order_class_names({node_labels.begin(), node_labels.end()});
  ds.labels = detail::one_hot(node_labels, ds.class_names);

  if (!edge_file.empty() && std::filesystem::exists(edge_file)) {
    auto e = detail::read_edges(edge_file, ids);
    ds.edge_lines = e.lines;
    if (e.lines > 0) ds.adjacency = std::move(e.adjacency);
  }
  if (!ds.adjacency && !allow_graph_free) {
    throw LoadError("no edges found" + (edge_file.empty() ? std::string() : " in " + edge_file.string()) +
                    "; pass the graph-free flag to proceed without a graph");
  }
  ds.validate();
  return ds;
}

/// Raw LINQS release layout: "<id> <f...> <label>" content and "<cited> <citing>" cites.
inline Dataset load_linqs(const std::filesystem::path& content_file, const std::filesystem::path& cites_file,
                          bool drop_dangling = false) {
  Dataset ds;
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<double> values;
  std::vector<std::string> node_labels;
  std::size_t p = 0;
  {
    auto in = detail::open_in(content_file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto tok = detail::split_ws(line);
      if (tok.empty()) continue;
      const std::string where = content_file.filename().string() + ":" + std::to_string(lineno);
      if (tok.size() < 3) throw LoadError("expected '<id> <features...> <label>' at " + where);
      if (p == 0) p = tok.size() - 2;
      if (tok.size() - 2 != p) throw LoadError("inconsistent feature count at " + where);
      if (!ids.emplace(tok[0], ds.node_names.size()).second) throw LoadError("duplicate node id '" + tok[0] + "' at " + where);
      ds.node_names.push_back(tok[0]);
      for (std::size_t k = 1; k + 1 < tok.size(); ++k) values.push_back(detail::parse_double(tok[k], where));
      node_labels.push_back(tok.back());
    }
  }
  const std::size_t n = ds.node_names.size();
  if (n == 0) throw LoadError(content_file.string() + " has no nodes");
  ds.features = Matrix(n, p, std::move(values));
  ds.class_names = detail::order_class_names({node_labels.begin(), node_labels.end()});
  ds.labels = detail::one_hot(node_labels, ds.class_names);

  Matrix a(n, n);
  auto in = detail::open_in(cites_file);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    const std::string where = cites_file.filename().string() + ":" + std::to_string(lineno);
    if (tok.size() != 2) throw LoadError("expected '<cited> <citing>' at " + where);
    auto x = ids.find(tok[0]);
    auto y = ids.find(tok[1]);
    if (x == ids.end() || y == ids.end()) {
      if (drop_dangling) continue;
      throw LoadError("dangling edge id '" + (x == ids.end() ? tok[0] : tok[1]) + "' at " + where);
    }
    a(x->second, y->second) = 1.0;
    a(y->second, x->second) = 1.0;
    ++ds.edge_lines;
  }
  if (ds.edge_lines == 0) throw LoadError(cites_file.string() + " has no edges");
  ds.adjacency = std::move(a);
  ds.validate();
  return ds;
}

/// features.csv, labels.csv, optional edges.txt and splits.json. A missing
/// edges.txt yields a graph-free dataset.
inline Dataset load_dataset_dir(const std::filesystem::path& dir, bool allow_graph_free = false) {
  const auto edges = dir / "edges.txt";
  const bool has_edges = std::filesystem::exists(edges);
  Dataset ds = load_citation(has_edges ? edges : std::filesystem::path{}, dir / "features.csv", dir / "labels.csv",
                             allow_graph_free || !has_edges);
  if (std::filesystem::exists(dir / "splits.json")) {
    auto in = detail::open_in(dir / "splits.json");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("splits.json: " + std::string(e.what()));
    }
    ds.splits = {detail::index_array(j, "train"), detail::index_array(j, "val"), detail::index_array(j, "test")};
    ds.validate();
  }
  return ds;
}

/// Writes the dataset-dir layout. Doubles use the shortest round-trip form.
inline void save_dataset_dir(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t n = ds.nodes();
  auto name = [&](std::size_t i) { return ds.node_names.empty() ? std::to_string(i) : ds.node_names[i]; };
  {
    auto out = detail::open_out(dir / "features.csv");
    out << "id";
    for (std::size_t k = 0; k < ds.feature_dim(); ++k) out << ",f" << k;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      out << name(i);
      for (double v : ds.features.row(i)) out << ',' << detail::format_double(v);
      out << '\n';
    }
  }
  {
    auto out = detail::open_out(dir / "labels.csv");
    out << "id,label\n";
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = ds.label_of(i);
      out << name(i) << ',' << (ds.class_names.empty() ? std::to_string(c) : ds.class_names[c]) << '\n';
    }
  }
  if (ds.adjacency) {
    auto out = detail::open_out(dir / "edges.txt");
    const Matrix& a = *ds.adjacency;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        if (a(i, j) == 0.0) continue;
        out << name(i) << ' ' << name(j);
        if (a(i, j) != 1.0) out << ' ' << detail::format_double(a(i, j));
        out << '\n';
      }
  }
  if (!ds.splits.train.empty() || !ds.splits.val.empty() || !ds.splits.test.empty()) {
    auto out = detail::open_out(dir / "splits.json");
    out << nlohmann::json{{"train", ds.splits.train}, {"val", ds.splits.val}, {"test", ds.splits.test}}.dump() << '\n';
  }
}

/// Scales each nonzero feature row to unit sum.
inline void row_normalize(Matrix& x) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (double v : x.row(i)) s += v;
    if (s == 0.0) continue;
    for (double& v : x.row(i)) v /= s;
  }
}

struct SplitSpec {
  std::optional<std::size_t> labels_per_class;  ///< stratified mode
  std::optional<std::size_t> total_labeled;     ///< used when labels_per_class is unset
  std::size_t val_count = 0;
  std::optional<std::size_t> test_count;        ///< unset = all remaining nodes
};

/// Stratified (or uniform) train selection, then val and test from the rest.
inline Dataset make_splits(Dataset ds, const SplitSpec& spec, Rng& rng) {
  const std::size_t n = ds.nodes();
  if (spec.labels_per_class.has_value() == spec.total_labeled.has_value()) {
    throw ConfigError("split spec needs exactly one of labels_per_class or total_labeled");
  }
  if (spec.val_count == 0) throw ConfigError("split spec needs at least one validation node");
  std::vector<char> used(n, 0);
  Splits s;
  if (spec.labels_per_class) {
    const std::size_t k = *spec.labels_per_class;
    if (k == 0) throw ConfigError("labels_per_class must be >= 1");
    std::vector<std::vector<std::size_t>> by_class(ds.classes());
    for (std::size_t i = 0; i < n; ++i) by_class[ds.label_of(i)].push_back(i);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      auto& members = by_class[c];
      if (members.size() < k) {
        throw ConfigError("class " + std::to_string(c) + " has " + std::to_string(members.size()) + " nodes, " +
                          std::to_string(k - members.size()) + " short of " + std::to_string(k) + " labels");
      }
      std::shuffle(members.begin(), members.end(), rng);
      s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    }
  } else {
    if (*spec.total_labeled == 0 || *spec.total_labeled > n) throw ConfigError("total_labeled must be in [1, n]");
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    s.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(*spec.total_labeled));
  }
  for (std::size_t i : s.train) used[i] = 1;

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) rest.push_back(i);
  const std::size_t test_needed = spec.test_count.value_or(1);
  if (spec.test_count && *spec.test_count == 0) throw ConfigError("test_count must be >= 1");
  if (rest.size() < spec.val_count + test_needed) {
    throw ConfigError("only " + std::to_string(rest.size()) + " nodes remain after labelling; val+test need " +
                      std::to_string(spec.val_count + test_needed) + " (short by " +
                      std::to_string(spec.val_count + test_needed - rest.size()) + ")");
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  const auto vend = rest.begin() + static_cast<std::ptrdiff_t>(spec.val_count);
  s.val.assign(rest.begin(), vend);
  s.test.assign(vend, spec.test_count ? vend + static_cast<std::ptrdiff_t>(*spec.test_count) : rest.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  ds.splits = std::move(s);
  return ds;
}

/// k-NN graph with Gaussian weights exp(-d^2 / (2 sigma^2)). An edge exists if
/// either endpoint is among the other's k nearest (ties broken by index).
/// Without sigma, the mean distance to the k-th neighbour is used.
inline Matrix knn_gaussian_graph(const Matrix& x, std::size_t k, std::optional<double> sigma = std::nullopt) {
  const std::size_t n = x.rows();
  if (k == 0) throw ConfigError("knn: k must be >= 1");
  if (k >= n) throw ConfigError("knn: k must be < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  if (sigma && !(*sigma > 0.0)) throw ConfigError("knn: sigma must be > 0");

  Matrix d2(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      d2(i, j) = d2(j, i) = s;
    }

  std::vector<std::vector<std::size_t>> nbrs(n);
  double kth_sum = 0.0;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    auto closer = [&](std::size_t a, std::size_t b) { return d2(i, a) != d2(i, b) ? d2(i, a) < d2(i, b) : a < b; };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
    nbrs[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    kth_sum += std::sqrt(d2(i, order[k - 1]));
  }
  double s = sigma.value_or(kth_sum / static_cast<double>(n));
  if (!(s > 0.0)) s = 1.0;  // all k-th neighbours coincide

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : nbrs[i]) {
      // Selected edges keep a positive weight even when the kernel underflows.
      const double w = std::max(std::exp(-d2(i, j) / (2.0 * s * s)), std::numeric_limits<double>::min());
      a(i, j) = a(j, i) = w;
    }
  return a;
}

struct SynthSpec {
  std::size_t n_per_class = 200;
  std::size_t classes = 3;
  std::size_t features = 10;
  double noise_sigma = 0.3;
  double separation = 1.0;  ///< distance between class centres
  std::uint64_t seed = 0;
};

/// Isotropic Gaussian blobs. With classes <= features the centres sit on
/// scaled coordinate axes, so every pair is exactly `separation` apart.
inline Dataset synth_blobs(const SynthSpec& spec) {
  if (spec.n_per_class == 0 || spec.classes == 0 || spec.features == 0) {
    throw ConfigError("synth_blobs: counts must be positive");
  }
  if (!(spec.noise_sigma >= 0.0) || !(spec.separation > 0.0)) throw ConfigError("synth_blobs: invalid noise or separation");
  Rng rng(spec.seed);
  const std::size_t c = spec.classes, p = spec.features, n = spec.n_per_class * c;
  const double radius = spec.separation / std::sqrt(2.0);
  Matrix centres(c, p);
  if (c <= p) {
    for (std::size_t k = 0; k < c; ++k) centres(k, k) = radius;
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t k = 0; k < c; ++k) {
      double norm = 0.0;
      for (double& v : centres.row(k)) {
        v = g(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (double& v : centres.row(k)) v *= radius / norm;
    }
  }
  Dataset ds;
  ds.features = Matrix(n, p);
  ds.labels = Matrix(n, c);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t k = 0; k < c; ++k) {
    ds.class_names.push_back(std::to_string(k));
    for (std::size_t m = 0; m < spec.n_per_class; ++m) {
      const std::size_t i = k * spec.n_per_class + m;
      for (std::size_t f = 0; f < p; ++f) ds.features(i, f) = centres(k, f) + spec.noise_sigma * noise(rng);
      ds.labels(i, k) = 1.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) ds.node_names.push_back("n" + std::to_string(i));
  return ds;
}

}  // namespace glcn
