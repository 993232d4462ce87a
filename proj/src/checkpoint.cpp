#include "fnd/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace fnd {
namespace {

constexpr const char* kMagic = "fnd-checkpoint";
constexpr int kVersion = 1;

void write_matrix(std::ostream& os, const char* tag, const std::string& name, const nn::Matrix<double>& m) {
  os << tag << ' ' << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), m(r, c), std::chars_format::hex);
      if (c) os << ' ';
      os.write(buf, end - buf);
    }
    os << '\n';
  }
}

nn::Matrix<double> read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  nn::Matrix<double> m(rows, cols);
  std::string tok;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(is >> tok)) throw CheckpointError("checkpoint: truncated values for '" + name + "'");
      double v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, std::chars_format::hex);
      if (ec != std::errc() || p != tok.data() + tok.size()) {
        throw CheckpointError("checkpoint: bad value '" + tok + "' in '" + name + "'");
      }
      m(r, c) = v;
    }
  }
  return m;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot write checkpoint " + path.string());
  os << kMagic << ' ' << kVersion << '\n';
  for (const auto& [k, v] : ckpt.meta) os << "meta " << k << ' ' << v << '\n';
  const auto params = ckpt.params.parameters();
  for (const auto* p : params) write_matrix(os, "param", p->name, p->value);
  os << "adam_step " << ckpt.params.adam.step << '\n';
  for (std::size_t k = 0; k < ckpt.params.adam.m.size() && k < params.size(); ++k) {
    write_matrix(os, "adam_m", params[k]->name, ckpt.params.adam.m[k]);
    write_matrix(os, "adam_v", params[k]->name, ckpt.params.adam.v[k]);
  }
  os << "end\n";
  if (!os) throw CheckpointError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint " + path.string());
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != kMagic) throw CheckpointError(path.string() + ": not a checkpoint");
  if (version != kVersion) throw CheckpointError(path.string() + ": unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  std::map<std::string, nn::Matrix<double>> values, m, v;
  std::int64_t step = 0;
  std::string tag;
  bool ended = false;
  while (is >> tag) {
    if (tag == "end") {
      ended = true;
      break;
    }
    if (tag == "meta") {
      std::string key, value;
      is >> key;
      std::getline(is, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ckpt.meta[key] = value;
    } else if (tag == "adam_step") {
      is >> step;
    } else if (tag == "param" || tag == "adam_m" || tag == "adam_v") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      if (!(is >> name >> rows >> cols) || rows < 0 || cols < 0) throw CheckpointError(path.string() + ": bad matrix header");
      auto mat = read_matrix(is, rows, cols, name);
      auto& target = tag == "param" ? values : (tag == "adam_m" ? m : v);
      target[name] = std::move(mat);
    } else {
      throw CheckpointError(path.string() + ": unexpected token '" + tag + "'");
    }
  }
  if (!ended) throw CheckpointError(path.string() + ": missing end marker");

  auto need = [&](const std::string& name) -> const nn::Matrix<double>& {
    auto it = values.find(name);
    if (it == values.end()) throw CheckpointError(path.string() + ": missing parameter '" + name + "'");
    return it->second;
  };
  ckpt.params = nn::ModelParams<double>(need("estimator.w1").rows(), need("classifier.w1").rows(),
                                        need("estimator.w1").cols(), need("classifier.w1").cols());
  auto params = ckpt.params.parameters();
  for (auto* p : params) {
    const auto& src = need(p->name);
    if (src.rows() != p->value.rows() || src.cols() != p->value.cols()) {
      throw CheckpointError(path.string() + ": shape mismatch for '" + p->name + "'");
    }
    p->value = src;
  }
  ckpt.params.adam.step = step;
  if (!m.empty()) {
    for (auto* p : params) {
      auto im = m.find(p->name);
      auto iv = v.find(p->name);
      if (im == m.end() || iv == v.end()) throw CheckpointError(path.string() + ": missing Adam moments for '" + p->name + "'");
      ckpt.params.adam.m.push_back(im->second);
      ckpt.params.adam.v.push_back(iv->second);
    }
  }
  return ckpt;
}

}  // namespace fnd
