#include "offlang/model_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "offlang/errors.hpp"

namespace offlang {

namespace {

// --- little-endian primitives ------------------------------------------------

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_bytes(std::vector<std::uint8_t>& out, const std::string& s) {
  out.insert(out.end(), s.begin(), s.end());
}

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > buf.size())
      throw ParseError(std::string("artifact truncated while reading ") + what);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(buf[pos + static_cast<std::size_t>(i)]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(buf[pos + static_cast<std::size_t>(i)]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
    pos += n;
    return s;
  }
};

// --- sections ----------------------------------------------------------------

struct NamedArray {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

void append_section(std::vector<std::uint8_t>& out, const std::string& name,
                    const std::vector<std::uint8_t>& payload) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  put_bytes(out, name);
  put_u64(out, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
}

std::vector<std::uint8_t> encode_params(const std::vector<NamedArray>& arrays) {
  std::vector<std::uint8_t> out;
  put_u32(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    put_u32(out, static_cast<std::uint32_t>(a.name.size()));
    put_bytes(out, a.name);
    put_u32(out, static_cast<std::uint32_t>(a.shape.size()));
    std::size_t total = 1;
    for (std::size_t d : a.shape) {
      put_u64(out, d);
      total *= d;
    }
    if (total != a.data.size())
      throw Error("internal: array '" + a.name + "' shape/data mismatch");
    for (double v : a.data) put_f64(out, v);
  }
  return out;
}

std::vector<NamedArray> decode_params(const std::vector<std::uint8_t>& payload) {
  Reader r{payload};
  std::vector<NamedArray> arrays(r.u32("parameter array count"));
  for (auto& a : arrays) {
    a.name = r.bytes(r.u32("array name length"), "array name");
    std::uint32_t ndim = r.u32("array rank");
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      std::uint64_t dim = r.u64("array dimension");
      if (dim > payload.size() || total > payload.size())
        throw ParseError("artifact array '" + a.name + "' has a corrupt shape");
      a.shape.push_back(static_cast<std::size_t>(dim));
      total *= a.shape.back();
    }
    if (total * 8 > payload.size() - r.pos)
      throw ParseError("artifact array '" + a.name +
                       "' declares more data than present");
    a.data.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
      a.data.push_back(r.f64("array data"));
  }
  if (r.pos != payload.size())
    throw ParseError("artifact params section has trailing bytes");
  return arrays;
}

NamedArray tensor_array(const std::string& name, const Tensor& t) {
  NamedArray a;
  a.name = name;
  a.shape = t.shape();
  a.data.assign(t.data(), t.data() + t.size());
  return a;
}

const NamedArray& find_array(const std::vector<NamedArray>& arrays,
                             const std::string& name) {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw ParseError("artifact is missing parameter array '" + name + "'");
}

// --- config section ----------------------------------------------------------

std::string render_config(const TrainedPipeline& p) {
  std::ostringstream out;
  out << "task = " << to_string(p.config.task) << "\n";
  out << "model = " << to_string(p.config.model) << "\n";
  out << "preprocess_mode = " << to_string(p.config.preprocess_mode) << "\n";
  out << "drop_hashtag_body = " << (p.config.drop_hashtag_body ? "true" : "false")
      << "\n";
  out << "seed = " << p.config.seed << "\n";
  out << "augment_enabled = " << (p.config.augment.enabled ? "true" : "false")
      << "\n";
  std::ostringstream ratio;
  ratio.precision(17);
  ratio << p.config.augment.target_ratio;
  out << "augment_target_ratio = " << ratio.str() << "\n";
  {
    std::string classes;
    for (const auto& c : p.classes) {
      if (!classes.empty()) classes.push_back(',');
      classes += c;
    }
    out << "classes = " << classes << "\n";
  }
  for (const auto& [k, v] : p.config.hyper.entries())
    out << "hyper." << k << " = " << v << "\n";
  if (p.vocab) out << "max_len = " << p.max_len << "\n";
  if (p.tfidf) out << "tfidf_n_docs = " << p.tfidf->n_docs << "\n";
  if (std::holds_alternative<ForestModel>(p.model)) {
    const auto& f = std::get<ForestModel>(p.model);
    out << "forest_n_trees = " << f.params.n_trees << "\n";
    out << "forest_max_depth = " << f.params.max_depth << "\n";
    out << "forest_min_samples_split = " << f.params.min_samples_split << "\n";
    out << "forest_features_per_split = " << f.params.features_per_split << "\n";
    out << "forest_bootstrap = " << (f.params.bootstrap ? "true" : "false") << "\n";
    out << "forest_seed = " << f.seed << "\n";
  }
  return out.str();
}

}  // namespace

std::vector<std::uint8_t> save_model(const TrainedPipeline& p) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kArtifactMagic, kArtifactMagic + 4);
  put_u32(out, kArtifactVersion);

  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> sections;

  {
    std::vector<std::uint8_t> payload;
    put_bytes(payload, render_config(p));
    sections.emplace_back("config", std::move(payload));
  }
  {
    std::vector<std::uint8_t> payload;
    std::string text;
    if (p.vocab) {
      for (std::size_t i = 2; i < p.vocab->index_to_word.size(); ++i) {
        text += p.vocab->index_to_word[i];
        text.push_back('\n');
      }
    } else if (p.tfidf) {
      for (const auto& term : p.tfidf->terms) {
        text += term;
        text.push_back('\n');
      }
    }
    put_bytes(payload, text);
    sections.emplace_back("vocab", std::move(payload));
  }
  {
    std::vector<std::uint8_t> payload;
    std::string text;
    for (const auto& [inflected, lemma] : p.lexicon.sorted_entries()) {
      text += inflected;
      text.push_back('\t');
      text += lemma;
      text.push_back('\n');
    }
    put_bytes(payload, text);
    sections.emplace_back("verblex", std::move(payload));
  }
  {
    std::vector<NamedArray> arrays;
    if (p.tfidf) {
      NamedArray idf;
      idf.name = "tfidf.idf";
      idf.shape = {p.tfidf->idf.size()};
      idf.data = p.tfidf->idf;
      arrays.push_back(std::move(idf));
      NamedArray df;
      df.name = "tfidf.df";
      df.shape = {p.tfidf->df.size()};
      for (long v : p.tfidf->df) df.data.push_back(static_cast<double>(v));
      arrays.push_back(std::move(df));
    }
    if (std::holds_alternative<LinearModel>(p.model)) {
      const auto& m = std::get<LinearModel>(p.model);
      NamedArray w;
      w.name = "linear.weights";
      w.shape = {m.weights.size(), m.n_features};
      for (const auto& row : m.weights)
        w.data.insert(w.data.end(), row.begin(), row.end());
      arrays.push_back(std::move(w));
      NamedArray b;
      b.name = "linear.bias";
      b.shape = {m.bias.size()};
      b.data = m.bias;
      arrays.push_back(std::move(b));
    } else if (std::holds_alternative<ForestModel>(p.model)) {
      // one [n_nodes x (5 + n_classes)] array per tree:
      // is_leaf, feature, threshold, left, right, counts...
      const auto& f = std::get<ForestModel>(p.model);
      const std::size_t row_len = 5 + static_cast<std::size_t>(f.n_classes);
      for (std::size_t t = 0; t < f.trees.size(); ++t) {
        NamedArray a;
        a.name = "forest.tree." + std::to_string(t);
        a.shape = {f.trees[t].nodes.size(), row_len};
        for (const auto& node : f.trees[t].nodes) {
          a.data.push_back(node.is_leaf ? 1.0 : 0.0);
          a.data.push_back(static_cast<double>(node.feature));
          a.data.push_back(node.threshold);
          a.data.push_back(static_cast<double>(node.left));
          a.data.push_back(static_cast<double>(node.right));
          for (int c = 0; c < f.n_classes; ++c)
            a.data.push_back(node.is_leaf && c < static_cast<int>(node.counts.size())
                                 ? static_cast<double>(node.counts[static_cast<std::size_t>(c)])
                                 : 0.0);
        }
        arrays.push_back(std::move(a));
      }
    } else {
      const auto& m = std::get<NeuralModel>(p.model);
      for (const auto& [name, tensor] : named_parameters(m))
        arrays.push_back(tensor_array(name, *tensor));
    }
    sections.emplace_back("params", encode_params(arrays));
  }

  put_u32(out, static_cast<std::uint32_t>(sections.size()));
  for (const auto& [name, payload] : sections) append_section(out, name, payload);
  return out;
}

namespace {

std::vector<std::string> read_lines(const std::vector<std::uint8_t>& payload) {
  std::vector<std::string> lines;
  std::string current;
  for (std::uint8_t b : payload) {
    if (b == '\n') {
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(b));
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

void load_tensor(const std::vector<NamedArray>& arrays, const std::string& name,
                 Tensor& dst) {
  const NamedArray& a = find_array(arrays, name);
  if (a.shape != dst.shape())
    throw ParseError("artifact array '" + name + "' has an unexpected shape");
  std::copy(a.data.begin(), a.data.end(), dst.data());
}

}  // namespace

std::unique_ptr<TrainedPipeline> load_model(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  std::string magic = r.bytes(4, "magic");
  if (std::memcmp(magic.data(), kArtifactMagic, 4) != 0)
    throw ParseError("not a model artifact (bad magic)");
  std::uint32_t version = r.u32("format version");
  if (version > kArtifactVersion)
    throw ParseError("artifact format version " + std::to_string(version) +
                     " is newer than supported version " +
                     std::to_string(kArtifactVersion));

  std::uint32_t n_sections = r.u32("section count");
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> sections;
  for (std::uint32_t s = 0; s < n_sections; ++s) {
    std::string name = r.bytes(r.u32("section name length"), "section name");
    std::uint64_t len = r.u64("section length");
    if (r.pos + len > bytes.size())
      throw ParseError("artifact section '" + name +
                       "' length exceeds the file size");
    std::vector<std::uint8_t> payload(bytes.begin() + static_cast<long>(r.pos),
                                      bytes.begin() + static_cast<long>(r.pos + len));
    r.pos += len;
    sections.emplace_back(std::move(name), std::move(payload));
  }
  if (r.pos != bytes.size())
    throw ParseError("artifact has trailing bytes after the last section");

  auto section = [&](const std::string& name) -> const std::vector<std::uint8_t>& {
    for (const auto& [n, payload] : sections)
      if (n == name) return payload;
    throw ParseError("artifact is missing section '" + name + "'");
  };

  KvConfig conf = KvConfig::parse(
      std::string(section("config").begin(), section("config").end()));

  auto pipeline = std::make_unique<TrainedPipeline>();
  RunConfig& rc = pipeline->config;
  rc.task = task_from_string(conf.get_or("task", "a"));
  rc.model = model_kind_from_string(conf.get_or("model", "logreg"));
  rc.preprocess_mode = reduce_mode_from_string(conf.get_or("preprocess_mode", "none"));
  rc.drop_hashtag_body = conf.get_bool("drop_hashtag_body", false);
  rc.seed = static_cast<std::uint64_t>(conf.get_long("seed", 0));
  rc.augment.enabled = conf.get_bool("augment_enabled", false);
  rc.augment.target_ratio = conf.get_double("augment_target_ratio", 1.0);
  for (const auto& [k, v] : conf.entries()) {
    if (k.rfind("hyper.", 0) == 0) rc.hyper.set(k.substr(6), v);
  }
  pipeline->classes = task_classes(rc.task);

  {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& line : read_lines(section("verblex"))) {
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("artifact verblex section is malformed");
      pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    pipeline->lexicon = VerbLexicon::from_pairs(std::move(pairs));
  }

  auto arrays = decode_params(section("params"));
  auto vocab_lines = read_lines(section("vocab"));

  if (is_neural(rc.model)) {
    Vocabulary vocab;
    vocab.index_to_word = {"<pad>", "<oov>"};
    for (auto& word : vocab_lines) {
      int index = static_cast<int>(vocab.index_to_word.size());
      vocab.word_to_index.emplace(word, index);
      vocab.index_to_word.push_back(std::move(word));
    }
    pipeline->vocab = std::move(vocab);
    pipeline->max_len = static_cast<std::size_t>(conf.get_long("max_len", 1));

    auto kind = rc.model == ModelKind::cnn    ? NeuralModel::Kind::cnn
                : rc.model == ModelKind::lstm ? NeuralModel::Kind::lstm
                                              : NeuralModel::Kind::gru;
    NeuralConfig nc;
    nc.embed_dim = static_cast<std::size_t>(rc.hyper.get_long("embed_dim", 100));
    if (rc.model == ModelKind::cnn) {
      nc.n_filters = static_cast<int>(rc.hyper.get_long("n_filters", 64));
      nc.dropout = rc.hyper.get_double("dropout", 0.5);
      if (auto ks = rc.hyper.get("kernel_sizes")) {
        nc.kernel_sizes.clear();
        for (const auto& item : split_list(*ks)) {
          try {
            nc.kernel_sizes.push_back(std::stoi(item));
          } catch (const std::exception&) {
            throw ParseError("artifact hyper.kernel_sizes is malformed");
          }
        }
      }
    } else {
      nc.hidden = static_cast<std::size_t>(rc.hyper.get_long("hidden", 32));
      nc.head_hidden =
          static_cast<std::size_t>(rc.hyper.get_long("head_hidden", 16));
    }
    NeuralModel net = make_neural(kind, nc, static_cast<int>(pipeline->classes.size()),
                                  pipeline->vocab->rows(), pipeline->max_len,
                                  /*seed=*/0);
    for (auto& [name, tensor] : named_parameters(net))
      load_tensor(arrays, name, *tensor);
    pipeline->model = std::move(net);
  } else {
    TfidfModel tfidf;
    tfidf.n_docs = static_cast<std::size_t>(conf.get_long("tfidf_n_docs", 0));
    for (auto& term : vocab_lines) {
      tfidf.term_to_column.emplace(term, static_cast<int>(tfidf.terms.size()));
      tfidf.terms.push_back(std::move(term));
    }
    const NamedArray& idf = find_array(arrays, "tfidf.idf");
    const NamedArray& df = find_array(arrays, "tfidf.df");
    if (idf.data.size() != tfidf.terms.size() || df.data.size() != tfidf.terms.size())
      throw ParseError("artifact tfidf arrays do not match the term list");
    tfidf.idf = idf.data;
    for (double v : df.data) tfidf.df.push_back(static_cast<long>(v));
    pipeline->tfidf = std::move(tfidf);
    const std::size_t n_features = pipeline->tfidf->n_features();

    if (rc.model == ModelKind::forest) {
      ForestModel forest;
      forest.n_classes = static_cast<int>(pipeline->classes.size());
      forest.n_features = n_features;
      forest.seed = static_cast<std::uint64_t>(conf.get_long("forest_seed", 0));
      int n_trees = static_cast<int>(conf.get_long("forest_n_trees", 0));
      forest.params.n_trees = n_trees;
      forest.params.max_depth = static_cast<int>(conf.get_long("forest_max_depth", -1));
      forest.params.min_samples_split =
          static_cast<int>(conf.get_long("forest_min_samples_split", 2));
      forest.params.features_per_split =
          static_cast<int>(conf.get_long("forest_features_per_split", 0));
      forest.params.bootstrap = conf.get_bool("forest_bootstrap", true);
      const std::size_t row_len = 5 + static_cast<std::size_t>(forest.n_classes);
      for (int t = 0; t < n_trees; ++t) {
        const NamedArray& a =
            find_array(arrays, "forest.tree." + std::to_string(t));
        if (a.shape.size() != 2 || a.shape[1] != row_len)
          throw ParseError("artifact forest tree has an unexpected shape");
        DecisionTree tree;
        for (std::size_t node_i = 0; node_i < a.shape[0]; ++node_i) {
          const double* row = a.data.data() + node_i * row_len;
          DecisionTree::Node node;
          node.is_leaf = row[0] != 0.0;
          node.feature = static_cast<int>(row[1]);
          node.threshold = row[2];
          node.left = static_cast<int>(row[3]);
          node.right = static_cast<int>(row[4]);
          if (node.is_leaf)
            for (int c = 0; c < forest.n_classes; ++c)
              node.counts.push_back(
                  static_cast<long>(row[5 + static_cast<std::size_t>(c)]));
          tree.nodes.push_back(std::move(node));
        }
        forest.trees.push_back(std::move(tree));
      }
      pipeline->model = std::move(forest);
    } else {
      LinearModel m;
      m.kind = rc.model == ModelKind::svm ? LinearModel::Kind::svm
                                          : LinearModel::Kind::logreg;
      m.n_classes = static_cast<int>(pipeline->classes.size());
      m.n_features = n_features;
      const NamedArray& w = find_array(arrays, "linear.weights");
      const NamedArray& b = find_array(arrays, "linear.bias");
      if (w.shape.size() != 2 || w.shape[1] != n_features ||
          b.shape.size() != 1 || b.shape[0] != w.shape[0])
        throw ParseError("artifact linear arrays have unexpected shapes");
      for (std::size_t row = 0; row < w.shape[0]; ++row)
        m.weights.emplace_back(w.data.begin() + static_cast<long>(row * n_features),
                               w.data.begin() + static_cast<long>((row + 1) * n_features));
      m.bias = b.data;
      pipeline->model = std::move(m);
    }
  }
  return pipeline;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write to " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      fs::remove(tmp);
      throw Error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

void save_model_file(const TrainedPipeline& pipeline, const std::string& path) {
  auto bytes = save_model(pipeline);
  write_file_atomic(path,
                    std::string(reinterpret_cast<const char*>(bytes.data()),
                                bytes.size()));
}

std::unique_ptr<TrainedPipeline> load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model artifact: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return load_model(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace offlang
