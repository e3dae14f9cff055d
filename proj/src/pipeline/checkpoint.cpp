#include "grat/pipeline/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "grat/error.hpp"

namespace grat::pipe {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'G', 'R', 'A', 'T', 'C', 'K', 'P', 'T'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64(const char* what) { return uint(8, what); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint(4, what)); }
  std::string take(std::uint64_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::uint64_t n, const char* what) const {
    if (n > remaining()) throw CheckpointError(std::string("truncated ") + what);
  }
  std::uint64_t uint(int n, const char* what) {
    need(n, what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

json spec_to_json(const ModelSpec& s) {
  return json{{"node_labels", s.vocab.nodes.user_names()},
              {"edge_types", s.vocab.edges.user_names()},
              {"property_tasks", s.property_tasks},
              {"node_feature_dim", s.node_feature_dim},
              {"edge_feature_dim", s.edge_feature_dim}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.vocab.nodes = graph::NodeLabelVocab(j.at("node_labels").get<std::vector<std::string>>());
  s.vocab.edges = graph::EdgeTypeVocab(j.at("edge_types").get<std::vector<std::string>>());
  s.property_tasks = j.at("property_tasks").get<std::vector<std::string>>();
  s.node_feature_dim = j.at("node_feature_dim").get<std::size_t>();
  s.edge_feature_dim = j.at("edge_feature_dim").get<std::size_t>();
  return s;
}

}  // namespace

Checkpoint make_checkpoint(const GratModel& model, const ad::AdamState* adam) {
  Checkpoint c;
  c.config = model.config;
  c.spec = model.spec;
  c.target_mean = model.target_mean;
  c.target_std = model.target_std;
  for (const auto& [name, t] : model.store.items()) {
    c.params[name] = TensorRecord{t.shape(), std::vector<double>(t.data().begin(), t.data().end())};
  }
  if (adam) c.adam = *adam;
  return c;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  // Every value array goes to the blob; the manifest only points at it.
  std::vector<std::pair<std::string, TensorRecord>> blobs;
  for (const auto& [name, rec] : ckpt.params) blobs.emplace_back("param/" + name, rec);
  blobs.emplace_back("norm/mean", TensorRecord{{ckpt.target_mean.size()}, ckpt.target_mean});
  blobs.emplace_back("norm/std", TensorRecord{{ckpt.target_std.size()}, ckpt.target_std});
  json optimizer = nullptr;
  if (ckpt.adam) {
    const ad::AdamState& a = *ckpt.adam;
    optimizer = json{{"t", a.t}, {"lr", a.config.lr}, {"beta1", a.config.beta1}, {"beta2", a.config.beta2},
                     {"eps", a.config.eps}, {"weight_decay", a.config.weight_decay}};
    for (const auto& [name, m] : a.m) blobs.emplace_back("adam.m/" + name, TensorRecord{{m.size()}, m});
    for (const auto& [name, v] : a.v) blobs.emplace_back("adam.v/" + name, TensorRecord{{v.size()}, v});
  }

  json tensors = json::array();
  std::string blob;
  for (const auto& [name, rec] : blobs) {
    tensors.push_back({{"name", name}, {"dtype", "f64"}, {"shape", rec.shape}, {"offset", blob.size()}});
    for (double x : rec.values) put_u64(blob, std::bit_cast<std::uint64_t>(x));
  }
  const json manifest{{"config", config_to_json(ckpt.config)},
                      {"spec", spec_to_json(ckpt.spec)},
                      {"optimizer", optimizer},
                      {"tensors", tensors}};
  const std::string text = manifest.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kCheckpointVersion);
  put_u64(out, text.size());
  out += text;
  put_u64(out, blob.size());
  out += blob;
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("bad magic");
  }
  r.take(sizeof kMagic, "magic");
  const std::uint32_t version = r.u32("header");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const std::string text = r.take(r.u64("header"), "manifest");
  const std::uint64_t blob_size = r.u64("blob header");
  const std::string blob = r.take(blob_size, "blob");
  if (r.remaining() != 0) throw CheckpointError("trailing bytes after blob");
  if (blob_size % 8 != 0) throw CheckpointError("blob length is not a multiple of 8");

  Checkpoint c;
  try {
    const json manifest = json::parse(text);
    c.config = config_from_json(manifest.at("config"));
    c.spec = spec_from_json(manifest.at("spec"));

    struct Entry {
      std::string name;
      ad::Shape shape;
      std::uint64_t offset;
      std::uint64_t size;
    };
    std::vector<Entry> entries;
    for (const json& t : manifest.at("tensors")) {
      Entry e{t.at("name").get<std::string>(), t.at("shape").get<ad::Shape>(), t.at("offset").get<std::uint64_t>(), 0};
      if (t.at("dtype").get<std::string>() != "f64") throw CheckpointError("tensor " + e.name + " has unknown dtype");
      e.size = ad::numel(e.shape) * 8;
      if (e.offset % 8 != 0 || e.offset > blob_size || e.size > blob_size - e.offset) {
        throw CheckpointError("tensor " + e.name + " lies outside the blob (truncated blob)");
      }
      entries.push_back(std::move(e));
    }
    std::vector<const Entry*> by_offset;
    // Empty tensors occupy no bytes and may share an offset with anything.
    for (const Entry& e : entries) {
      if (e.size) by_offset.push_back(&e);
    }
    std::sort(by_offset.begin(), by_offset.end(), [](const Entry* a, const Entry* b) { return a->offset < b->offset; });
    for (std::size_t i = 1; i < by_offset.size(); ++i) {
      const Entry& prev = *by_offset[i - 1];
      if (prev.offset + prev.size > by_offset[i]->offset) {
        throw CheckpointError("overlapping offsets: " + prev.name + " and " + by_offset[i]->name);
      }
    }

    std::map<std::string, TensorRecord> all;
    for (const Entry& e : entries) {
      TensorRecord rec{e.shape, std::vector<double>(ad::numel(e.shape))};
      for (std::size_t k = 0; k < rec.values.size(); ++k) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
          bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(blob[e.offset + 8 * k + b])) << (8 * b);
        }
        rec.values[k] = std::bit_cast<double>(bits);
      }
      if (!all.emplace(e.name, std::move(rec)).second) throw CheckpointError("tensor " + e.name + " listed twice");
    }

    auto take = [&](const std::string& name) {
      const auto it = all.find(name);
      if (it == all.end()) throw CheckpointError("missing tensor " + name);
      TensorRecord rec = std::move(it->second);
      all.erase(it);
      return rec;
    };
    c.target_mean = take("norm/mean").values;
    c.target_std = take("norm/std").values;

    const json& opt = manifest.at("optimizer");
    if (!opt.is_null()) {
      ad::AdamState a;
      a.t = opt.at("t").get<std::uint64_t>();
      a.config.lr = opt.at("lr").get<double>();
      a.config.beta1 = opt.at("beta1").get<double>();
      a.config.beta2 = opt.at("beta2").get<double>();
      a.config.eps = opt.at("eps").get<double>();
      a.config.weight_decay = opt.value("weight_decay", 0.0);
      c.adam = std::move(a);
    }
    for (auto& [name, rec] : all) {
      if (name.rfind("param/", 0) == 0) {
        c.params[name.substr(6)] = std::move(rec);
      } else if (c.adam && name.rfind("adam.m/", 0) == 0) {
        c.adam->m[name.substr(7)] = std::move(rec.values);
      } else if (c.adam && name.rfind("adam.v/", 0) == 0) {
        c.adam->v[name.substr(7)] = std::move(rec.values);
      } else {
        throw CheckpointError("unexpected tensor " + name);
      }
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed manifest: ") + e.what());
  } catch (const ContractError& e) {
    throw CheckpointError(std::string("malformed manifest: ") + e.what());
  }
  return c;
}

void save_checkpoint(const std::string& path, const GratModel& model, const ad::AdamState* adam) {
  const std::string bytes = encode_checkpoint(make_checkpoint(model, adam));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

GratModel model_from_checkpoint(const Checkpoint& ckpt) {
  GratModel model(ckpt.config, ckpt.spec);
  if (ckpt.target_mean.size() != model.target_mean.size() || ckpt.target_std.size() != model.target_std.size()) {
    throw CheckpointError("normalization does not match the property tasks");
  }
  model.target_mean = ckpt.target_mean;
  model.target_std = ckpt.target_std;
  for (const auto& [name, t] : model.store.items()) {
    const auto it = ckpt.params.find(name);
    if (it == ckpt.params.end()) throw CheckpointError("missing parameter " + name);
    if (it->second.shape != t.shape()) throw CheckpointError("shape mismatch for parameter " + name);
  }
  for (const auto& [name, rec] : ckpt.params) {
    if (!model.store.contains(name)) throw CheckpointError("unknown parameter " + name);
    model.store.assign(name, rec.values);
  }
  return model;
}

}  // namespace grat::pipe
