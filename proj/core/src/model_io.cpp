#include <cstring>
#include <fstream>

#include "wfp/classify.hpp"
#include "wfp/error.hpp"

namespace wfp {

namespace {

constexpr char kMagic[4] = {'W', 'F', 'P', 'M'};
constexpr uint32_t kFormatVersion = 1;

struct Writer {
  std::ofstream f;

  explicit Writer(const std::string& path) : f(path, std::ios::binary) {
    if (!f) throw ParseError("cannot open for writing: " + path);
  }
  template <typename T>
  void put(const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_bytes(const void* data, std::size_t len) {
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  }
  void put_string(const std::string& s) {
    put<uint32_t>(static_cast<uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  template <typename T>
  void put_vector(const std::vector<T>& v) {
    put<uint64_t>(v.size());
    put_bytes(v.data(), v.size() * sizeof(T));
  }
};

struct Reader {
  std::ifstream f;

  explicit Reader(const std::string& path) : f(path, std::ios::binary) {
    if (!f) throw ParseError("cannot open model: " + path);
  }
  template <typename T>
  T get() {
    T v;
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw ParseError("model file truncated");
    return v;
  }
  std::string get_string() {
    auto len = get<uint32_t>();
    std::string s(len, '\0');
    f.read(s.data(), len);
    if (!f) throw ParseError("model file truncated");
    return s;
  }
  template <typename T>
  std::vector<T> get_vector() {
    auto len = get<uint64_t>();
    std::vector<T> v(len);
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(len * sizeof(T)));
    if (!f) throw ParseError("model file truncated");
    return v;
  }
};

}  // namespace

struct ModelCodec {
  static void save(const Model& m, const std::string& path) {
    Writer w(path);
    w.put_bytes(kMagic, 4);
    w.put<uint32_t>(kFormatVersion);
    w.put<uint8_t>(static_cast<uint8_t>(m.algorithm_));
    w.put<uint64_t>(m.seed_);
    w.put<uint64_t>(m.schema_hash_);
    w.put<uint64_t>(m.dim_);
    w.put<uint32_t>(static_cast<uint32_t>(m.classes_.size()));
    for (const auto& c : m.classes_) w.put_string(c);

    if (const auto* forest = std::get_if<ForestState>(&m.state_)) {
      w.put<uint32_t>(static_cast<uint32_t>(forest->trees.size()));
      for (const Tree& t : forest->trees) {
        w.put<uint64_t>(t.nodes.size());
        for (const TreeNode& n : t.nodes) {  // field-wise: no padding bytes
          w.put<int32_t>(n.feature);
          w.put<double>(n.threshold);
          w.put<uint32_t>(n.left);
          w.put<uint32_t>(n.right);
          w.put<int32_t>(n.leaf_class);
        }
      }
      w.put_vector(forest->importance);
    } else if (const auto* knn = std::get_if<KnnState>(&m.state_)) {
      w.put<uint32_t>(knn->k);
      w.put<uint64_t>(knn->n_rows);
      w.put_vector(knn->matrix);
      w.put_vector(knn->labels);
    } else {
      const auto& nb = std::get<NaiveBayesState>(m.state_);
      w.put_vector(nb.log_prior);
      w.put_vector(nb.mean);
      w.put_vector(nb.var);
    }
    if (!w.f) throw ParseError("model write failed: " + path);
  }

  static Model load(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.f.read(magic, 4);
    if (!r.f || std::memcmp(magic, kMagic, 4) != 0) {
      throw ParseError("not a model file: " + path);
    }
    auto version = r.get<uint32_t>();
    if (version != kFormatVersion) {
      throw ParseError("unsupported model version " + std::to_string(version));
    }

    Model m;
    m.algorithm_ = static_cast<Algorithm>(r.get<uint8_t>());
    m.seed_ = r.get<uint64_t>();
    m.schema_hash_ = r.get<uint64_t>();
    m.dim_ = r.get<uint64_t>();
    auto n_classes = r.get<uint32_t>();
    m.classes_.reserve(n_classes);
    for (uint32_t i = 0; i < n_classes; ++i) m.classes_.push_back(r.get_string());

    switch (m.algorithm_) {
      case Algorithm::RF:
      case Algorithm::ET: {
        ForestState forest;
        auto n_trees = r.get<uint32_t>();
        forest.trees.resize(n_trees);
        for (uint32_t t = 0; t < n_trees; ++t) {
          auto n_nodes = r.get<uint64_t>();
          forest.trees[t].nodes.resize(n_nodes);
          for (TreeNode& n : forest.trees[t].nodes) {
            n.feature = r.get<int32_t>();
            n.threshold = r.get<double>();
            n.left = r.get<uint32_t>();
            n.right = r.get<uint32_t>();
            n.leaf_class = r.get<int32_t>();
          }
        }
        forest.importance = r.get_vector<double>();
        m.state_ = std::move(forest);
        break;
      }
      case Algorithm::KNN: {
        KnnState knn;
        knn.k = r.get<uint32_t>();
        knn.n_rows = r.get<uint64_t>();
        knn.matrix = r.get_vector<double>();
        knn.labels = r.get_vector<int32_t>();
        m.state_ = std::move(knn);
        break;
      }
      case Algorithm::NB: {
        NaiveBayesState nb;
        nb.log_prior = r.get_vector<double>();
        nb.mean = r.get_vector<double>();
        nb.var = r.get_vector<double>();
        m.state_ = std::move(nb);
        break;
      }
      default:
        throw ParseError("model file has unknown algorithm tag");
    }
    return m;
  }
};

void Model::save(const std::string& path) const { ModelCodec::save(*this, path); }

Model Model::load(const std::string& path) { return ModelCodec::load(path); }

Model Model::load(const std::string& path, const FeatureSchema& expect) {
  Model m = ModelCodec::load(path);
  if (expect.hash() != m.schema_hash_) {
    throw ParseError("model schema hash mismatch: model expects dimension " +
                     std::to_string(m.dim_) + ", caller schema has dimension " +
                     std::to_string(expect.dimension()));
  }
  return m;
}

}  // namespace wfp
